#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fisherspike/stieltjes.hpp"

namespace fisherspike {

/// Population description for the simulation study: Sigma_1 = U0 * diag(
/// lambda_diagonal) * U0^T with U0 the eigenvector matrix of the Toeplitz
/// correlation matrix with decay rho, and Sigma_2 = I.
struct PopulationSpec {
    int p = 0;
    double rho = 0.5;
    std::vector<double> lambda_diagonal;

    PopulationSpec(int p_, double rho_, std::vector<double> lambda_diagonal_);
};

/// Entry distributions, each standardized to mean 0 and variance 1.
enum class EntryDistribution { StandardNormal, StandardizedChiSquare2, UniformSqrt3 };

const char* to_string(EntryDistribution dist);
EntryDistribution entry_distribution_from_string(const std::string& name);

/// Deterministic per-stream random generator.
///
/// Streams are derived from a (master seed, stream id) pair by counter-based
/// mixing, so replications can be generated in any order, in parallel, with
/// identical results. The raw 64-bit stream is engine-exact everywhere; the
/// floating-point transforms below follow the platform libm.
class StreamRng {
public:
    StreamRng(std::uint64_t master_seed, std::uint64_t stream);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; used where log(u) must stay finite.
    double uniform01_open_left() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (two uniforms per draw).
    double normal() {
        const double u1 = uniform01_open_left();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// chi^2(2)/2 - 1 = Exp(1) - 1.
    double standardized_chi_square_2() { return -std::log(uniform01_open_left()) - 1.0; }

    /// Uniform on (-sqrt(3), sqrt(3)).
    double uniform_sqrt3() { return (2.0 * uniform01() - 1.0) * kSqrt3; }

    double draw(EntryDistribution dist);

private:
    static constexpr double kPi = 3.14159265358979323846;
    static constexpr double kSqrt3 = 1.7320508075688772;

    std::uint64_t master_seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

/// Diagonal of the simulation-study population: the spike head, an equal
/// split of 2s and 1s, and the spike tail. Requires the bulk count
/// p - |head| - |tail| to be even and positive (p even and >= 8 for the
/// default head/tail).
std::vector<double> build_lambda(int p, const std::vector<double>& head = {10.0, 7.5, 7.5},
                                 const std::vector<double>& tail = {0.2, 0.2, 0.1});

/// Orthonormal eigenvector matrix of the symmetric Toeplitz matrix with
/// first row (1, rho, ..., rho^(p-1)). Columns are ordered by descending
/// eigenvalue (ties broken by the row of the dominant entry) and signed so
/// each column's largest-magnitude entry is positive.
Eigen::MatrixXd toeplitz_eigvecs(int p, double rho);

/// Matrix of i.i.d. standardized entries, filled in column-major order.
Eigen::MatrixXd draw_matrix(EntryDistribution dist, int rows, int cols, StreamRng& rng);

/// Symmetric square root of Sigma_1 = U0 * diag(lambda) * U0^T.
Eigen::MatrixXd sigma1_sqrt(const PopulationSpec& spec);

/// Eigenvalues of the Fisher matrix S1 * S2^{-1} for one draw, computed
/// from the symmetric form S2^{-1/2} S1 S2^{-1/2} and sorted descending.
/// X is drawn before Y, both column-major.
EigenSample fisher_eigenvalues(const PopulationSpec& spec, EntryDistribution dist, int n1,
                               int n2, StreamRng& rng);

/// Same, with the population square root precomputed (shared across
/// replications).
EigenSample fisher_eigenvalues(const Eigen::MatrixXd& sigma1_half, EntryDistribution dist,
                               int n1, int n2, StreamRng& rng);

}  // namespace fisherspike
