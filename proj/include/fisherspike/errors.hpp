#pragma once

#include <stdexcept>
#include <string>

namespace fisherspike {

/// Base class for all domain errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An evaluation point coincides with an atom of the spectral measure.
struct AtomCollision : Error {
    using Error::Error;
};

/// The denominator of the phase-transition map vanished at the evaluation point.
struct DegenerateDenominator : Error {
    using Error::Error;
};

/// A bisection bracket for a critical point of psi could not be established.
struct NoCriticalPoint : Error {
    using Error::Error;
};

/// The evaluation point lies inside the support of the limiting distribution.
struct NotOutsideSupport : Error {
    using Error::Error;
};

/// No admissible interval maps onto the requested evaluation point.
struct NoRoot : Error {
    using Error::Error;
};

/// The exclusion window covers every sample eigenvalue.
struct AllExcluded : Error {
    using Error::Error;
};

/// The evaluation eigenvalue is zero.
struct ZeroEigenvalue : Error {
    using Error::Error;
};

/// The empirical companion transform is too close to zero to divide by.
struct ZeroDenominator : Error {
    using Error::Error;
};

/// A dimension argument violates the parity or size constraints.
struct BadDimension : Error {
    using Error::Error;
};

/// The second sample covariance matrix is numerically singular.
struct SingularS2 : Error {
    using Error::Error;
};

}  // namespace fisherspike
