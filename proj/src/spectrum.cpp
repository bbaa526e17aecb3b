#include "fisherspike/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fisherspike/detail/bisect.hpp"

namespace fisherspike {

namespace {

constexpr int kScanPoints = 512;
constexpr double kRefineTol = 1e-10;
constexpr double kAtomMarginScale = 1e-8;
constexpr double kDenominatorFloor = 1e-12;

double collision_tolerance(double t) { return 1e-10 * std::max(1.0, std::abs(t)); }

struct PsiTerms {
    double A;        // 1 - c1 * sum w t/(t-a)
    double A_prime;  // -c1 * sum w t/(t-a)^2
    double B;        // 1 + c2 * sum w a/(t-a)
    double B_prime;  //  c2 * sum w t/(t-a)^2
};

void check_alpha(double alpha, const SpectralMeasure& H) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("alpha must be strictly positive, got " +
                                    std::to_string(alpha));
    }
    for (double t : H.locations()) {
        if (std::abs(alpha - t) <= collision_tolerance(t)) {
            throw AtomCollision("alpha = " + std::to_string(alpha) +
                                " coincides with an atom of H at " + std::to_string(t));
        }
    }
}

PsiTerms psi_terms(double alpha, const SpectralMeasure& H, const AspectRatios& c) {
    double st = 0.0, st2 = 0.0, sa = 0.0;
    const auto& ts = H.locations();
    const auto& ws = H.weights();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double d = ts[i] - alpha;
        st += ws[i] * ts[i] / d;
        st2 += ws[i] * ts[i] / (d * d);
        sa += ws[i] * alpha / d;
    }
    return {1.0 - c.c1 * st, -c.c1 * st2, 1.0 + c.c2 * sa, c.c2 * st2};
}

// Raw evaluations on points already known to be clear of atoms; used by the
// scan machinery where margins guarantee the preconditions.
double psi_raw(double alpha, const SpectralMeasure& H, const AspectRatios& c) {
    const PsiTerms t = psi_terms(alpha, H, c);
    return alpha * t.A / t.B;
}

double psi_prime_raw(double alpha, const SpectralMeasure& H, const AspectRatios& c) {
    const PsiTerms t = psi_terms(alpha, H, c);
    return ((t.A + alpha * t.A_prime) * t.B - alpha * t.A * t.B_prime) / (t.B * t.B);
}

double condition_ii_raw(double alpha, const SpectralMeasure& H, const AspectRatios& c) {
    double s = 0.0;
    const auto& ts = H.locations();
    const auto& ws = H.weights();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double d = ts[i] - alpha;
        s += ws[i] * alpha * alpha / (d * d);
    }
    return 1.0 - c.c2 * s;
}

// Gap of (0, inf) \ atoms containing alpha: [lower, upper) with lower = 0 or
// an atom, upper = an atom or +inf.
std::pair<double, double> containing_gap(double alpha, const SpectralMeasure& H) {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    for (double t : H.locations()) {
        if (t < alpha) lo = std::max(lo, t);
        if (t > alpha) hi = std::min(hi, t);
    }
    return {lo, hi};
}

double unbounded_map_width(const SpectralMeasure& H) {
    return std::max({H.max_atom() - H.min_atom(), H.max_atom(), 1.0});
}

}  // namespace

SpectralMeasure::SpectralMeasure(std::vector<double> locations, std::vector<double> weights)
    : locations_(std::move(locations)), weights_(std::move(weights)) {
    if (locations_.empty() || locations_.size() != weights_.size()) {
        throw std::invalid_argument("measure needs matching, nonempty atom/weight lists");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < locations_.size(); ++i) {
        if (!(locations_[i] > 0.0)) {
            throw std::invalid_argument("atom locations must be strictly positive");
        }
        if (i > 0 && !(locations_[i] > locations_[i - 1])) {
            throw std::invalid_argument("atom locations must be strictly increasing");
        }
        if (!(weights_[i] > 0.0) || weights_[i] > 1.0) {
            throw std::invalid_argument("atom weights must lie in (0, 1]");
        }
        sum += weights_[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("atom weights must sum to 1 (got " + std::to_string(sum) +
                                    ")");
    }
}

SpectralMeasure SpectralMeasure::point_mass(double location) {
    return SpectralMeasure({location}, {1.0});
}

double SpectralMeasure::distance_to(double x) const {
    double d = std::numeric_limits<double>::infinity();
    for (double t : locations_) d = std::min(d, std::abs(x - t));
    return d;
}

AspectRatios::AspectRatios(double c1_, double c2_) : c1(c1_), c2(c2_) {
    if (!(c1 >= 0.0) || !std::isfinite(c1)) {
        throw std::invalid_argument("c1 must be finite and nonnegative");
    }
    if (!(c2 >= 0.0) || !(c2 < 1.0)) {
        throw std::invalid_argument("c2 must lie in [0, 1)");
    }
}

Spike::Spike(double alpha_, std::vector<int> ranks_)
    : alpha(alpha_), multiplicity(static_cast<int>(ranks_.size())), ranks(std::move(ranks_)) {
    if (!(alpha > 0.0)) throw std::invalid_argument("spike value must be strictly positive");
    if (ranks.empty()) throw std::invalid_argument("spike needs at least one rank");
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (ranks[i] < 1) throw std::invalid_argument("spike ranks are 1-based");
        if (i > 0 && ranks[i] != ranks[i - 1] + 1) {
            throw std::invalid_argument("spike ranks must be contiguous");
        }
    }
}

SpikedPopulation::SpikedPopulation(SpectralMeasure bulk_, std::vector<Spike> spikes_, int p_)
    : bulk(std::move(bulk_)), spikes(std::move(spikes_)), p(p_) {
    if (p < 1) throw std::invalid_argument("population dimension must be positive");
    std::vector<int> seen;
    const double delta = bulk.default_delta();
    for (const auto& s : spikes) {
        if (bulk.in_support(s.alpha, delta)) {
            throw std::invalid_argument("spike at " + std::to_string(s.alpha) +
                                        " lies within delta of the bulk support");
        }
        for (int r : s.ranks) {
            if (r > p) throw std::invalid_argument("spike rank exceeds dimension p");
            seen.push_back(r);
        }
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
        throw std::invalid_argument("spike rank sets must be disjoint");
    }
    if (total_multiplicity() > p) {
        throw std::invalid_argument("total spike multiplicity exceeds p");
    }
}

int SpikedPopulation::total_multiplicity() const {
    int m = 0;
    for (const auto& s : spikes) m += s.multiplicity;
    return m;
}

const char* to_string(SpikeKind kind) {
    switch (kind) {
        case SpikeKind::Distant: return "Distant";
        case SpikeKind::CloseBelow: return "CloseBelow";
        case SpikeKind::CloseAbove: return "CloseAbove";
        case SpikeKind::Undefined: return "Undefined";
    }
    return "Unknown";
}

bool SupportSet::contains(double x, double dilation) const {
    for (const auto& [lo, hi] : intervals) {
        if (x >= lo - dilation && x <= hi + dilation) return true;
    }
    return false;
}

std::vector<std::pair<double, double>> SupportSet::interior_gaps() const {
    std::vector<std::pair<double, double>> gaps;
    for (std::size_t i = 1; i < intervals.size(); ++i) {
        gaps.emplace_back(intervals[i - 1].second, intervals[i].first);
    }
    return gaps;
}

double psi(double alpha, const SpectralMeasure& H, const AspectRatios& c) {
    check_alpha(alpha, H);
    const PsiTerms t = psi_terms(alpha, H, c);
    if (std::abs(t.B) < kDenominatorFloor) {
        throw DegenerateDenominator("psi denominator vanishes at alpha = " +
                                    std::to_string(alpha));
    }
    return alpha * t.A / t.B;
}

double psi_prime(double alpha, const SpectralMeasure& H, const AspectRatios& c) {
    check_alpha(alpha, H);
    const PsiTerms t = psi_terms(alpha, H, c);
    if (std::abs(t.B) < kDenominatorFloor) {
        throw DegenerateDenominator("psi denominator vanishes at alpha = " +
                                    std::to_string(alpha));
    }
    return ((t.A + alpha * t.A_prime) * t.B - alpha * t.A * t.B_prime) / (t.B * t.B);
}

double condition_ii(double alpha, const SpectralMeasure& H, const AspectRatios& c) {
    check_alpha(alpha, H);
    return condition_ii_raw(alpha, H, c);
}

bool is_distant_spike(double alpha, const SpectralMeasure& H, const AspectRatios& c,
                      double delta) {
    if (!(delta >= 0.0)) {
        throw std::invalid_argument("delta must be nonnegative");
    }
    if (!(alpha > 0.0)) return false;
    if (H.distance_to(alpha) <= delta) return false;
    try {
        return condition_ii(alpha, H, c) > 0.0 && psi_prime(alpha, H, c) > 0.0;
    } catch (const Error&) {
        return false;
    }
}

SpikeClassification phase_transition_limit(double alpha, const SpectralMeasure& H,
                                           const AspectRatios& c) {
    const double dp = psi_prime(alpha, H, c);
    if (dp > 0.0) {
        return {SpikeKind::Distant, std::nullopt, psi(alpha, H, c)};
    }
    if (dp == 0.0) {
        // Boundary case: psi' vanishes exactly at the spike itself.
        return {SpikeKind::CloseBelow, alpha, psi(alpha, H, c)};
    }

    const auto [gap_lo, gap_hi] = containing_gap(alpha, H);
    const auto dpsi = [&](double a) { return psi_prime_raw(a, H, c); };

    // Rightward: look for the first zero of psi' in [alpha, gap_hi).
    {
        std::vector<double> grid;
        grid.reserve(kScanPoints);
        if (std::isinf(gap_hi)) {
            const double width = std::max(unbounded_map_width(H), alpha);
            for (int k = 1; k <= kScanPoints; ++k) {
                const double u = static_cast<double>(k) / (kScanPoints + 1);
                grid.push_back(alpha + width * u / (1.0 - u));
            }
        } else {
            const double hi = gap_hi - kAtomMarginScale * std::max(1.0, gap_hi);
            if (hi > alpha) {
                for (int k = 1; k <= kScanPoints; ++k) {
                    grid.push_back(alpha + (hi - alpha) * k / kScanPoints);
                }
            }
        }
        double prev = alpha;
        for (double a : grid) {
            if (dpsi(a) >= 0.0) {
                const double crit = detail::bisect_zero(dpsi, prev, a, kRefineTol);
                return {SpikeKind::CloseBelow, crit, psi_raw(crit, H, c)};
            }
            prev = a;
        }
    }

    // Leftward: psi'(s) < 0 for all s in (crit, alpha].
    {
        const double lo = gap_lo > 0.0 ? gap_lo + kAtomMarginScale * std::max(1.0, gap_lo)
                                       : alpha * 1e-12;
        if (lo < alpha) {
            double prev = alpha;
            for (int k = 1; k <= kScanPoints; ++k) {
                const double a = alpha - (alpha - lo) * k / kScanPoints;
                if (dpsi(a) >= 0.0) {
                    const double crit = detail::bisect_zero(dpsi, a, prev, kRefineTol);
                    return {SpikeKind::CloseAbove, crit, psi_raw(crit, H, c)};
                }
                prev = a;
            }
        }
    }

    return {SpikeKind::Undefined, std::nullopt, std::numeric_limits<double>::quiet_NaN()};
}

SpikeClassification phase_transition_limit(const Spike& spike, const SpectralMeasure& H,
                                           const AspectRatios& c) {
    return phase_transition_limit(spike.alpha, H, c);
}

std::vector<AdmissibleInterval> admissible_intervals(const SpectralMeasure& H,
                                                     const AspectRatios& c) {
    if (c.c1 == 0.0 && c.c2 == 0.0) {
        throw std::invalid_argument(
            "support analysis requires c1 > 0 or c2 > 0; the fully degenerate "
            "ratio pair collapses every support interval to a point");
    }

    const auto& atoms = H.locations();
    const auto pred = [&](double a) {
        return psi_prime_raw(a, H, c) > 0.0 && condition_ii_raw(a, H, c) > 0.0;
    };

    std::vector<AdmissibleInterval> out;

    const std::size_t n_gaps = atoms.size() + 1;
    for (std::size_t g = 0; g < n_gaps; ++g) {
        const double gap_lo = g == 0 ? 0.0 : atoms[g - 1];
        const bool last = g == atoms.size();
        const double gap_hi = last ? std::numeric_limits<double>::infinity() : atoms[g];

        std::vector<double> grid;
        grid.reserve(kScanPoints);
        if (last) {
            const double start = gap_lo + kAtomMarginScale * std::max(1.0, gap_lo);
            const double width = unbounded_map_width(H);
            for (int k = 0; k < kScanPoints; ++k) {
                const double u = (k + 0.5) / (kScanPoints + 1);
                grid.push_back(start + width * u / (1.0 - u));
            }
        } else {
            const double lo =
                g == 0 ? gap_hi * 1e-12 : gap_lo + kAtomMarginScale * std::max(1.0, gap_lo);
            const double hi = gap_hi - kAtomMarginScale * std::max(1.0, gap_hi);
            if (hi <= lo) continue;
            for (int k = 0; k < kScanPoints; ++k) {
                grid.push_back(lo + (hi - lo) * k / (kScanPoints - 1));
            }
        }

        std::vector<char> flags(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) flags[i] = pred(grid[i]) ? 1 : 0;

        std::size_t i = 0;
        while (i < grid.size()) {
            if (!flags[i]) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j + 1 < grid.size() && flags[j + 1]) ++j;

            AdmissibleInterval iv;
            iv.alpha_lo = i == 0 ? grid[0]
                                 : detail::bisect_boundary(pred, grid[i], grid[i - 1], kRefineTol);
            iv.alpha_hi = j + 1 == grid.size()
                              ? grid[j]
                              : detail::bisect_boundary(pred, grid[j], grid[j + 1], kRefineTol);

            if (i == 0 && g == 0) {
                // Run abuts the origin: psi(0+) = 0.
                iv.image_lo = 0.0;
            } else {
                iv.image_lo = psi_raw(iv.alpha_lo, H, c);
            }
            if (j + 1 == grid.size() && last) {
                iv.unbounded_above = true;
                iv.alpha_hi = std::numeric_limits<double>::infinity();
                iv.image_hi = std::numeric_limits<double>::infinity();
            } else {
                iv.image_hi = psi_raw(iv.alpha_hi, H, c);
            }
            out.push_back(iv);
            i = j + 1;
        }
    }
    return out;
}

SupportSet lsd_support(const SpectralMeasure& H, const AspectRatios& c) {
    const auto ivs = admissible_intervals(H, c);

    // psi-images clipped to [0, inf), sorted and merged.
    std::vector<std::pair<double, double>> images;
    for (const auto& iv : ivs) {
        double lo = iv.image_lo;
        double hi = iv.image_hi;
        if (hi <= 0.0) continue;
        lo = std::max(lo, 0.0);
        images.emplace_back(lo, hi);
    }
    std::sort(images.begin(), images.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& [lo, hi] : images) {
        const double eps = 1e-9 * std::max(1.0, std::abs(lo));
        if (!merged.empty() && lo <= merged.back().second + eps) {
            merged.back().second = std::max(merged.back().second, hi);
        } else {
            merged.emplace_back(lo, hi);
        }
    }

    SupportSet support;
    double cursor = 0.0;
    for (const auto& [lo, hi] : merged) {
        if (lo > cursor + 1e-9 * std::max(1.0, std::abs(lo))) {
            support.intervals.emplace_back(cursor, lo);
        }
        if (std::isinf(hi)) break;  // everything beyond the tail image is removed
        cursor = std::max(cursor, hi);
    }
    if (support.intervals.empty()) {
        // No admissible gap below the tail: the support is one interval from
        // 0 up to the tail image edge.
        double upper = 0.0;
        for (const auto& [lo, hi] : merged) {
            if (std::isinf(hi)) upper = lo;
        }
        support.intervals.emplace_back(0.0, upper);
    }
    return support;
}

}  // namespace fisherspike
