#pragma once

#include "restdiag/errors.hpp"

namespace restdiag {

// Numeric thresholds shared across the workbench. The defaults are the
// contract values used by the test suite; the CLI can override the
// configurable ones per run.
struct ToleranceConfig {
    // Singular values at or below rank_eps * max(1, sigma_max) count as zero.
    // One threshold shared by pseudoinverse, rank counts and codimension
    // arithmetic, so index counts cannot disagree between routes.
    double rank_eps = 1e-9;
    // Fredholm spectral-gap surrogate: singular values of the compressed
    // projection product must sit in [0, gap_lo] or [gap_hi, 1].
    double gap_lo = 1e-9;
    double gap_hi = 1e-6;
    // Residual bound for constructed conjugations and certificates.
    double residual_tol = 1e-8;

    void validate() const {
        require(rank_eps > 0 && gap_lo > 0 && gap_hi > 0 && residual_tol > 0,
                errc::out_of_range, "tolerances must be positive");
        require(rank_eps <= gap_lo && gap_lo < gap_hi, errc::out_of_range,
                "expected rank_eps <= gap_lo < gap_hi");
    }
};

namespace tol {
// Non-increase tolerance (relative) for sequence profiles.
inline constexpr double profile_monotone = 1e-12;
// Projection defect (idempotence / self-adjointness) bound.
inline constexpr double projection = 1e-10;
// Identity-decomposition orthogonality and completeness bound.
inline constexpr double decomposition = 1e-10;
// Eigenvalue distinctness margin for diagonalizable operators.
inline constexpr double eigen_gap = 1e-9;
// Partial isometry defect bound.
inline constexpr double partial_isometry = 1e-9;
// Unitarity defect for certificates.
inline constexpr double unitary = 1e-9;
// Strict-margin used where proofs need a norm strictly below one.
inline constexpr double norm_margin = 1e-6;
// Trace cross-check bound for essential codimension.
inline constexpr double trace_check = 1e-6;
// Largest admissible profile prefix (memory bound).
inline constexpr std::size_t max_prefix = std::size_t{1} << 16;
}  // namespace tol

}  // namespace restdiag
