#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fisherspike/errors.hpp"

namespace fisherspike {

/// Discrete probability measure given by atoms (location, weight).
///
/// Represents the bulk spectral distribution H of the population ratio
/// matrix. Continuous measures must be pre-discretized by the caller;
/// every integral against H then reduces to an exact weighted sum.
class SpectralMeasure {
public:
    /// Builds a measure from parallel location/weight arrays.
    /// Locations must be strictly positive, strictly increasing and
    /// duplicate-free; weights must be in (0,1] and sum to 1 within 1e-12.
    SpectralMeasure(std::vector<double> locations, std::vector<double> weights);

    /// Single atom at `location` with full mass.
    static SpectralMeasure point_mass(double location);

    const std::vector<double>& locations() const { return locations_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t atom_count() const { return locations_.size(); }
    double min_atom() const { return locations_.front(); }
    double max_atom() const { return locations_.back(); }

    /// Distance from x to the nearest atom.
    double distance_to(double x) const;

    /// True iff min_i |x - t_i| <= delta.
    bool in_support(double x, double delta) const { return distance_to(x) <= delta; }

    /// Default spike-separation constant: 1e-3 * (max atom - min atom).
    double default_delta() const { return 1e-3 * (max_atom() - min_atom()); }

private:
    std::vector<double> locations_;
    std::vector<double> weights_;
};

/// Dimension ratios c1 = p/n1 and c2 = p/n2.
///
/// The limiting theory requires c1 > 0 and c2 in (0,1); c1 = 0 and c2 = 0
/// are additionally accepted so the identity regime (no dimensional
/// distortion) can be evaluated and tested.
struct AspectRatios {
    double c1 = 0.0;
    double c2 = 0.0;

    AspectRatios(double c1_, double c2_);

    /// h^2 = c1 + c2 - c1*c2.
    double h_squared() const { return c1 + c2 - c1 * c2; }
};

/// A population spiked eigenvalue with its multiplicity and rank positions
/// (1-based, descending order of the population spectrum).
struct Spike {
    double alpha = 0.0;
    int multiplicity = 1;
    std::vector<int> ranks;

    Spike(double alpha_, std::vector<int> ranks_);
};

/// Full population spectrum description: bulk measure plus spikes.
struct SpikedPopulation {
    SpectralMeasure bulk;
    std::vector<Spike> spikes;
    int p = 0;

    SpikedPopulation(SpectralMeasure bulk_, std::vector<Spike> spikes_, int p_);

    /// Total spike multiplicity M.
    int total_multiplicity() const;
};

enum class SpikeKind { Distant, CloseBelow, CloseAbove, Undefined };

const char* to_string(SpikeKind kind);

/// Outcome of the phase-transition analysis of one spike.
///
/// Distant spikes carry no critical point; close spikes carry the critical
/// point of psi whose image is the limit. Undefined means psi' < 0
/// throughout the containing gap with no zero on either side.
struct SpikeClassification {
    SpikeKind kind = SpikeKind::Undefined;
    std::optional<double> critical_point;
    double limit = 0.0;
};

/// Union of disjoint closed intervals, sorted ascending.
struct SupportSet {
    std::vector<std::pair<double, double>> intervals;

    bool contains(double x, double dilation = 0.0) const;
    /// Interior gaps: open intervals strictly between consecutive support
    /// intervals (excludes (-inf, lower edge) and (upper edge, inf)).
    std::vector<std::pair<double, double>> interior_gaps() const;
    double lower_edge() const { return intervals.front().first; }
    double upper_edge() const { return intervals.back().second; }
};

/// Maximal subinterval of a gap of H on which all three support-criterion
/// conditions hold. psi is strictly increasing on it; image_lo/image_hi
/// are the psi-images of the endpoints. unbounded_above marks the tail
/// interval (alpha_hi and image_hi are +infinity).
struct AdmissibleInterval {
    double alpha_lo = 0.0;
    double alpha_hi = 0.0;
    double image_lo = 0.0;
    double image_hi = 0.0;
    bool unbounded_above = false;
};

/// Phase-transition map psi(alpha) evaluated by exact atom sums:
///   alpha * (1 - c1 * sum_i w_i t_i/(t_i-alpha))
///         / (1 + c2 * sum_i w_i alpha/(t_i-alpha)).
/// Throws AtomCollision if alpha is (numerically) an atom of H and
/// DegenerateDenominator if the denominator is smaller than 1e-12.
double psi(double alpha, const SpectralMeasure& H, const AspectRatios& c);

/// Analytic derivative of psi.
double psi_prime(double alpha, const SpectralMeasure& H, const AspectRatios& c);

/// Second support-criterion quantity 1 - c2 * sum_i w_i alpha^2/(t_i-alpha)^2.
/// The caller tests the sign.
double condition_ii(double alpha, const SpectralMeasure& H, const AspectRatios& c);

/// Full support criterion: alpha is farther than delta from every atom,
/// condition_ii(alpha) > 0 and psi'(alpha) > 0. Returns false (never
/// throws) when alpha collides with an atom or is not positive.
bool is_distant_spike(double alpha, const SpectralMeasure& H, const AspectRatios& c,
                      double delta);

/// Classifies a spike and computes the almost-sure limit of its sample
/// eigenvalues: psi(alpha) when psi'(alpha) > 0, otherwise psi at the
/// nearest zero of psi' reached from alpha through negative psi' inside
/// the containing gap of H.
SpikeClassification phase_transition_limit(const Spike& spike, const SpectralMeasure& H,
                                           const AspectRatios& c);

SpikeClassification phase_transition_limit(double alpha, const SpectralMeasure& H,
                                           const AspectRatios& c);

/// Maximal admissible subintervals of all gaps of H, with their psi-images.
/// Requires c1 > 0 or c2 > 0.
std::vector<AdmissibleInterval> admissible_intervals(const SpectralMeasure& H,
                                                     const AspectRatios& c);

/// Support of the limiting spectral distribution of the Fisher matrix:
/// the complement of the psi-images of the admissible subintervals,
/// clipped to [0, psi at the last admissible boundary].
SupportSet lsd_support(const SpectralMeasure& H, const AspectRatios& c);

}  // namespace fisherspike
