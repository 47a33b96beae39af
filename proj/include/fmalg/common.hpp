#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>

namespace fmalg {

using cplx = std::complex<double>;

// Numerical tolerances shared across the library.
inline constexpr double kNormTol = 1e-12;       // state normalization
inline constexpr double kPsdTol = 1e-10;        // min eigenvalue of a density operator
inline constexpr double kDropTol = 1e-15;       // sparse entry pruning
inline constexpr double kCoeffTol = 1e-15;      // polynomial coefficient pruning
inline constexpr double kWitnessThreshold = 1e-9;
inline constexpr double kProjectionTol = 1e-10; // "is a projection" checks
inline constexpr double kMeetAgreeTol = 1e-8;   // agreement of the two meet routes

/// Largest mode count for which dense/sparse 2^M operators may be built.
/// Default 14; override with the FMA_MAX_MODES environment variable.
int max_mode_guard();

/// Throws std::domain_error if `modes` is out of [1, max_mode_guard()].
void check_mode_guard(int modes);

} // namespace fmalg
