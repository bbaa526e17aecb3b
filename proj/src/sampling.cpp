#include "fisherspike/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fisherspike {

namespace {

constexpr double kSingularFloor = 1e-12;

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

PopulationSpec::PopulationSpec(int p_, double rho_, std::vector<double> lambda_diagonal_)
    : p(p_), rho(rho_), lambda_diagonal(std::move(lambda_diagonal_)) {
    if (p < 1) throw std::invalid_argument("population dimension must be positive");
    if (!(rho >= 0.0) || !(rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");
    if (static_cast<int>(lambda_diagonal.size()) != p) {
        throw std::invalid_argument("lambda diagonal must have length p");
    }
    for (std::size_t i = 0; i < lambda_diagonal.size(); ++i) {
        if (!(lambda_diagonal[i] > 0.0)) {
            throw std::invalid_argument("population eigenvalues must be strictly positive");
        }
        if (i > 0 && lambda_diagonal[i] > lambda_diagonal[i - 1]) {
            throw std::invalid_argument("lambda diagonal must be sorted descending");
        }
    }
}

const char* to_string(EntryDistribution dist) {
    switch (dist) {
        case EntryDistribution::StandardNormal: return "normal";
        case EntryDistribution::StandardizedChiSquare2: return "chisq";
        case EntryDistribution::UniformSqrt3: return "uniform";
    }
    return "unknown";
}

EntryDistribution entry_distribution_from_string(const std::string& name) {
    if (name == "normal" || name == "gaussian") return EntryDistribution::StandardNormal;
    if (name == "chisq" || name == "chi-square" || name == "chisquare") {
        return EntryDistribution::StandardizedChiSquare2;
    }
    if (name == "uniform") return EntryDistribution::UniformSqrt3;
    throw std::invalid_argument("unknown entry distribution '" + name +
                                "' (expected normal, chisq or uniform)");
}

StreamRng::StreamRng(std::uint64_t master_seed, std::uint64_t stream)
    : master_seed_(master_seed), stream_(stream) {
    const std::uint64_t mixed =
        splitmix64(splitmix64(master_seed) ^ splitmix64(stream * 0xD1B54A32D192ED03ULL + 1));
    engine_.seed(mixed);
}

double StreamRng::draw(EntryDistribution dist) {
    switch (dist) {
        case EntryDistribution::StandardNormal: return normal();
        case EntryDistribution::StandardizedChiSquare2: return standardized_chi_square_2();
        case EntryDistribution::UniformSqrt3: return uniform_sqrt3();
    }
    throw std::invalid_argument("unknown entry distribution");
}

std::vector<double> build_lambda(int p, const std::vector<double>& head,
                                 const std::vector<double>& tail) {
    const int fixed = static_cast<int>(head.size() + tail.size());
    const int bulk = p - fixed;
    if (bulk < 2 || bulk % 2 != 0) {
        throw BadDimension("p = " + std::to_string(p) + " leaves a bulk of " +
                           std::to_string(bulk) + " eigenvalues; it must be even and >= 2");
    }
    std::vector<double> lambda;
    lambda.reserve(static_cast<std::size_t>(p));
    lambda.insert(lambda.end(), head.begin(), head.end());
    lambda.insert(lambda.end(), static_cast<std::size_t>(bulk / 2), 2.0);
    lambda.insert(lambda.end(), static_cast<std::size_t>(bulk / 2), 1.0);
    lambda.insert(lambda.end(), tail.begin(), tail.end());
    for (std::size_t i = 1; i < lambda.size(); ++i) {
        if (lambda[i] > lambda[i - 1]) {
            throw std::invalid_argument("head/tail values break the descending order");
        }
    }
    return lambda;
}

Eigen::MatrixXd toeplitz_eigvecs(int p, double rho) {
    if (p < 1) throw std::invalid_argument("p must be positive");
    if (!(rho >= 0.0) || !(rho < 1.0)) throw std::invalid_argument("rho must lie in [0, 1)");

    Eigen::MatrixXd toep(p, p);
    for (int i = 0; i < p; ++i) {
        toep(i, i) = 1.0;
        double r = 1.0;
        for (int j = i + 1; j < p; ++j) {
            r *= rho;
            toep(i, j) = r;
            toep(j, i) = r;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(toep);
    const Eigen::VectorXd vals = solver.eigenvalues();
    const Eigen::MatrixXd& vecs = solver.eigenvectors();

    // Dominant row per column: largest |entry|, smallest row on ties.
    std::vector<int> dominant(p);
    for (int j = 0; j < p; ++j) {
        int best = 0;
        for (int i = 1; i < p; ++i) {
            if (std::abs(vecs(i, j)) > std::abs(vecs(best, j))) best = i;
        }
        dominant[j] = best;
    }

    // Order columns by descending eigenvalue; exactly equal eigenvalues are
    // tie-broken by dominant row so rho = 0 yields the identity.
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (vals(a) != vals(b)) return vals(a) > vals(b);
        return dominant[a] < dominant[b];
    });

    Eigen::MatrixXd out(p, p);
    for (int j = 0; j < p; ++j) {
        const int src = order[j];
        out.col(j) = vecs.col(src);
        if (vecs(dominant[src], src) < 0.0) out.col(j) = -out.col(j);
    }
    return out;
}

Eigen::MatrixXd draw_matrix(EntryDistribution dist, int rows, int cols, StreamRng& rng) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("matrix dimensions must be positive");
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            m(i, j) = rng.draw(dist);
        }
    }
    return m;
}

Eigen::MatrixXd sigma1_sqrt(const PopulationSpec& spec) {
    const Eigen::MatrixXd u0 = toeplitz_eigvecs(spec.p, spec.rho);
    Eigen::VectorXd root(spec.p);
    for (int i = 0; i < spec.p; ++i) root(i) = std::sqrt(spec.lambda_diagonal[i]);
    return u0 * root.asDiagonal() * u0.transpose();
}

EigenSample fisher_eigenvalues(const Eigen::MatrixXd& sigma1_half, EntryDistribution dist,
                               int n1, int n2, StreamRng& rng) {
    const int p = static_cast<int>(sigma1_half.rows());
    if (sigma1_half.cols() != p) throw std::invalid_argument("sigma1_half must be square");
    if (n1 < 1) throw std::invalid_argument("n1 must be positive");
    if (n2 <= p) throw std::invalid_argument("n2 must exceed p");

    const Eigen::MatrixXd x = draw_matrix(dist, p, n1, rng);
    const Eigen::MatrixXd y = draw_matrix(dist, p, n2, rng);

    const Eigen::MatrixXd b = sigma1_half * x;
    Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(p, p);
    s1.selfadjointView<Eigen::Lower>().rankUpdate(b, 1.0 / n1);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
    s2.selfadjointView<Eigen::Lower>().rankUpdate(y, 1.0 / n2);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s2_solver(s2);
    if (s2_solver.eigenvalues()(0) < kSingularFloor) {
        throw SingularS2("second sample covariance is numerically singular (min eigenvalue " +
                         std::to_string(s2_solver.eigenvalues()(0)) + ")");
    }
    const Eigen::MatrixXd whitener = s2_solver.operatorInverseSqrt();
    const Eigen::MatrixXd fisher =
        whitener * Eigen::MatrixXd(s1.selfadjointView<Eigen::Lower>()) * whitener;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> f_solver(fisher, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = f_solver.eigenvalues();

    std::vector<double> values(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        values[static_cast<std::size_t>(i)] = std::max(ev(p - 1 - i), 0.0);
    }
    return EigenSample(std::move(values), n1, n2);
}

EigenSample fisher_eigenvalues(const PopulationSpec& spec, EntryDistribution dist, int n1,
                               int n2, StreamRng& rng) {
    return fisher_eigenvalues(sigma1_sqrt(spec), dist, n1, n2, rng);
}

}  // namespace fisherspike
