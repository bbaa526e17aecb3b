#pragma once

#include <cmath>
#include <cstdlib>

namespace fisherspike::detail {

/// Bisects f over [lo, hi] assuming f(lo) and f(hi) have opposite signs.
/// Stops when the bracket width falls below tol_rel * max(1, |mid|).
template <class F>
double bisect_zero(F&& f, double lo, double hi, double tol_rel) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= tol_rel * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

/// Refines the boundary between a point satisfying pred (at `inside`) and
/// one violating it (at `outside`). Returns the innermost point still
/// satisfying pred.
template <class P>
double bisect_boundary(P&& pred, double inside, double outside, double tol_rel) {
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (inside + outside);
        if (pred(mid)) {
            inside = mid;
        } else {
            outside = mid;
        }
        if (std::abs(outside - inside) <= tol_rel * std::max(1.0, std::abs(mid))) break;
    }
    return inside;
}

}  // namespace fisherspike::detail
