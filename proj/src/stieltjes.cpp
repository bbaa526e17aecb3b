#include "fisherspike/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fisherspike/detail/bisect.hpp"

namespace fisherspike {

namespace {

constexpr double kRootTol = 1e-12;
constexpr double kUnderlineFloor = 1e-14;

double psi_on_gap(double u, const SpectralMeasure& H, const AspectRatios& c) {
    double st = 0.0, sa = 0.0;
    const auto& ts = H.locations();
    const auto& ws = H.weights();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double d = ts[i] - u;
        st += ws[i] * ts[i] / d;
        sa += ws[i] * u / d;
    }
    return u * (1.0 - c.c1 * st) / (1.0 + c.c2 * sa);
}

}  // namespace

EigenSample::EigenSample(std::vector<double> values_, int n1_, int n2_)
    : values(std::move(values_)), p(static_cast<int>(values.size())), n1(n1_), n2(n2_) {
    if (values.empty()) throw std::invalid_argument("eigenvalue list must be nonempty");
    if (n1 < 1) throw std::invalid_argument("n1 must be positive");
    if (n2 <= p) {
        throw std::invalid_argument("n2 must exceed p = " + std::to_string(p) +
                                    " (invertibility of the second sample covariance)");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw std::invalid_argument("eigenvalues must be finite and nonnegative");
        }
        if (i > 0 && values[i] > values[i - 1]) {
            throw std::invalid_argument("eigenvalues must be sorted in descending order");
        }
    }
}

double EigenSample::value_at_rank(int rank) const {
    if (rank < 1 || rank > p) {
        throw std::invalid_argument("rank " + std::to_string(rank) + " outside [1, " +
                                    std::to_string(p) + "]");
    }
    return values[static_cast<std::size_t>(rank - 1)];
}

CompanionRoot solve_m0(double x, const SpectralMeasure& H, const AspectRatios& c) {
    if (c.c1 == 0.0 && c.c2 == 0.0) {
        // Identity regime: psi(u) = u, the Fisher LSD coincides with H.
        if (!(x > 0.0)) throw NoRoot("x must be positive in the identity regime");
        if (H.distance_to(x) <= 1e-10 * std::max(1.0, x)) {
            throw NotOutsideSupport("x = " + std::to_string(x) + " is an atom of H");
        }
        return {-x, x};
    }
    const auto ivs = admissible_intervals(H, c);

    for (const auto& iv : ivs) {
        if (!(x > iv.image_lo) || (!iv.unbounded_above && !(x < iv.image_hi))) continue;

        double lo = iv.alpha_lo;
        double hi;
        if (iv.unbounded_above) {
            // Bracket by doubling: psi is increasing and unbounded on the tail.
            double step = std::max(1.0, std::abs(lo));
            hi = lo + step;
            int guard = 0;
            while (psi_on_gap(hi, H, c) < x) {
                step *= 2.0;
                hi = lo + step;
                if (++guard > 200) {
                    throw NoRoot("failed to bracket psi(u) = " + std::to_string(x) +
                                 " on the unbounded gap");
                }
            }
        } else {
            hi = iv.alpha_hi;
        }

        const double u = detail::bisect_zero(
            [&](double a) { return psi_on_gap(a, H, c) - x; }, lo, hi, kRootTol);
        return {-u, x};
    }

    if (lsd_support(H, c).contains(x)) {
        throw NotOutsideSupport("x = " + std::to_string(x) +
                                " lies inside the support of the Fisher LSD");
    }
    throw NoRoot("no admissible interval maps onto x = " + std::to_string(x));
}

StieltjesPair population_m_pair(double x, const SpectralMeasure& H, const AspectRatios& c) {
    const CompanionRoot root = solve_m0(x, H, c);
    const double m0 = root.m0;

    double s = 0.0;
    const auto& ts = H.locations();
    const auto& ws = H.weights();
    for (std::size_t i = 0; i < ts.size(); ++i) s += ws[i] / (ts[i] + m0);
    const double m_underline = 1.0 / m0 - c.c2 * s;

    double m;
    if (c.c1 > 0.0) {
        m = (m_underline + (1.0 - c.c1) / x) / c.c1;
    } else if (c.c2 > 0.0) {
        // c1 = 0: recover m from the eigen-equation 1 + c2 x m + m_underline*alpha = 0
        // with alpha = -m0; the index-flip relation degenerates to m_underline = -1/x.
        m = -(1.0 + m_underline * (-m0)) / (c.c2 * x);
    } else {
        // Fully degenerate ratios: the Fisher LSD coincides with H.
        double direct = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) direct += ws[i] / (ts[i] - x);
        m = direct;
    }
    return {m, m_underline, x};
}

MHatResult empirical_m_hat(const EigenSample& sample, int rank, double exclusion_ratio) {
    if (!(exclusion_ratio >= 0.0)) {
        throw std::invalid_argument("exclusion ratio must be nonnegative");
    }
    const double lambda = sample.value_at_rank(rank);
    if (lambda == 0.0) {
        throw ZeroEigenvalue("evaluation eigenvalue at rank " + std::to_string(rank) +
                             " is zero");
    }

    MHatResult result;
    double sum = 0.0;
    int kept = 0;
    for (int i = 1; i <= sample.p; ++i) {
        const double v = sample.values[static_cast<std::size_t>(i - 1)];
        if (std::abs(v - lambda) / std::abs(lambda) <= exclusion_ratio) {
            result.excluded.push_back(i);
        } else {
            sum += 1.0 / (v - lambda);
            ++kept;
        }
    }
    if (kept == 0) {
        throw AllExcluded("exclusion window covers all " + std::to_string(sample.p) +
                          " eigenvalues around rank " + std::to_string(rank));
    }
    result.m_hat = sum / kept;
    return result;
}

double empirical_m_underline_hat(const EigenSample& sample, int rank, double exclusion_ratio) {
    const MHatResult mh = empirical_m_hat(sample, rank, exclusion_ratio);
    const double lambda = sample.value_at_rank(rank);
    const double c1_tilde =
        static_cast<double>(sample.p - mh.excluded_count()) / static_cast<double>(sample.n1);
    return -(1.0 - c1_tilde) / lambda + c1_tilde * mh.m_hat;
}

double estimate_spike_at(const EigenSample& sample, int rank, double exclusion_ratio) {
    const MHatResult mh = empirical_m_hat(sample, rank, exclusion_ratio);
    const double lambda = sample.value_at_rank(rank);
    const double kept = static_cast<double>(sample.p - mh.excluded_count());
    const double c1_tilde = kept / static_cast<double>(sample.n1);
    const double c2_tilde = kept / static_cast<double>(sample.n2);
    const double m_underline = -(1.0 - c1_tilde) / lambda + c1_tilde * mh.m_hat;
    if (std::abs(m_underline) < kUnderlineFloor) {
        throw ZeroDenominator("empirical companion transform vanishes at rank " +
                              std::to_string(rank));
    }
    return -(1.0 + c2_tilde * lambda * mh.m_hat) / m_underline;
}

SpikeEstimate estimate_spike_group(const EigenSample& sample, const std::vector<int>& ranks,
                                   double exclusion_ratio) {
    if (ranks.empty()) throw std::invalid_argument("rank group must be nonempty");
    for (int r : ranks) (void)sample.value_at_rank(r);  // validate before computing

    SpikeEstimate est;
    est.ranks = ranks;
    est.per_rank.resize(ranks.size(), std::numeric_limits<double>::quiet_NaN());
    est.rank_errors.resize(ranks.size());

    double sum = 0.0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        try {
            est.per_rank[i] = estimate_spike_at(sample, ranks[i], exclusion_ratio);
            sum += est.per_rank[i];
            ++est.successes;
        } catch (const Error& e) {
            est.rank_errors[i] = e.what();
        }
    }
    est.pooled = est.successes > 0 ? sum / est.successes
                                   : std::numeric_limits<double>::quiet_NaN();
    return est;
}

}  // namespace fisherspike
