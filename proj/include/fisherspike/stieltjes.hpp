#pragma once

#include <string>
#include <vector>

#include "fisherspike/spectrum.hpp"

namespace fisherspike {

/// Descending-sorted sample eigenvalues of a Fisher matrix.
///
/// Ranks are 1-based in descending order throughout, matching the
/// lambda_{p,1} >= ... >= lambda_{p,p} convention.
struct EigenSample {
    std::vector<double> values;
    int p = 0;
    int n1 = 0;
    int n2 = 0;

    EigenSample(std::vector<double> values_, int n1_, int n2_);

    double value_at_rank(int rank) const;
};

/// Stieltjes transform pair (m, m_underline) at one evaluation point.
struct StieltjesPair {
    double m = 0.0;
    double m_underline = 0.0;
    double x = 0.0;
};

/// Root m0 of the companion-transform equation psi(-m0) = x.
struct CompanionRoot {
    double m0 = 0.0;
    double x = 0.0;
};

/// Empirical Stieltjes transform estimate together with the exclusion set
/// (1-based ranks, sorted ascending; always contains the evaluation rank).
struct MHatResult {
    double m_hat = 0.0;
    std::vector<int> excluded;

    int excluded_count() const { return static_cast<int>(excluded.size()); }
};

/// Pooled spike estimate over a group of sample ranks.
struct SpikeEstimate {
    std::vector<int> ranks;
    std::vector<double> per_rank;   // NaN where estimation failed
    std::vector<std::string> rank_errors;  // empty string where estimation succeeded
    double pooled = 0.0;            // mean of the successful per-rank values
    int successes = 0;

    bool complete() const { return successes == static_cast<int>(ranks.size()); }
    bool any_success() const { return successes > 0; }
};

inline constexpr double kDefaultExclusionRatio = 0.2;

/// Solves psi(u) = x for u on the admissible gap subintervals of H and
/// returns m0 = -u. Throws NotOutsideSupport if x lies in the support of
/// the Fisher LSD and NoRoot if no admissible interval maps onto x.
CompanionRoot solve_m0(double x, const SpectralMeasure& H, const AspectRatios& c);

/// Population transform pair at a point x outside the support:
/// m_underline from the companion root via the atom sum, then m from the
/// index-flip relation m_underline = -(1-c1)/x + c1 m.
StieltjesPair population_m_pair(double x, const SpectralMeasure& H, const AspectRatios& c);

/// Empirical Stieltjes transform at the sample eigenvalue of the given
/// rank: eigenvalues within `exclusion_ratio` relative distance are
/// excluded, the rest enter the resolvent average.
MHatResult empirical_m_hat(const EigenSample& sample, int rank,
                           double exclusion_ratio = kDefaultExclusionRatio);

/// Empirical companion transform -(1-c~1)/lambda + c~1 * m_hat, evaluated
/// with the same eigenvalue as m_hat and c~1 = (p - |J0|)/n1.
double empirical_m_underline_hat(const EigenSample& sample, int rank,
                                 double exclusion_ratio = kDefaultExclusionRatio);

/// Spike estimate at one rank:
///   alpha_hat = -(1 + c~2 * lambda * m_hat) / m_underline_hat.
double estimate_spike_at(const EigenSample& sample, int rank,
                         double exclusion_ratio = kDefaultExclusionRatio);

/// Applies estimate_spike_at at each rank and pools by arithmetic mean.
/// A rank that errors is flagged and excluded from the mean; the pooled
/// value is NaN when every rank fails.
SpikeEstimate estimate_spike_group(const EigenSample& sample, const std::vector<int>& ranks,
                                   double exclusion_ratio = kDefaultExclusionRatio);

}  // namespace fisherspike
