#pragma once

// Essential codimension of projection pairs, the Fredholm-pair gap test, and
// the constructive unitary equivalences built from minimal-rotation basis
// alignment: a unitary conjugating one projection onto another whenever their
// difference lies in the ideal and the codimension vanishes, its extension to
// partial isometries, and codimension balancing across finite families.

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "restdiag/errors.hpp"
#include "restdiag/ideals.hpp"
#include "restdiag/operators.hpp"
#include "restdiag/tolerances.hpp"

namespace restdiag {

struct EssCodimResult {
    long value = 0;
    std::size_t dim_kernel_side = 0;    // dim(N(Q) ∩ R(P))
    std::size_t dim_cokernel_side = 0;  // dim(R(Q) ∩ N(P))
    std::optional<double> trace_crosscheck;
};

// Spectral-gap surrogate for the Fredholm property at truncation scale: the
// compression of QP between the ranges must have every singular value near
// zero (<= gap_lo) or bounded away from it (>= gap_hi), and the tails must
// agree so the pair is comparable at infinity.
inline bool is_fredholm_pair(const Projection& p, const Projection& q,
                             const ToleranceConfig& cfg = {}) {
    require(p.dim() == q.dim(), errc::dim_mismatch, "projection dims differ");
    if (p.tail().kind != q.tail().kind) return false;
    const Matrix bp = range_basis(p.block(), cfg);
    const Matrix bq = range_basis(q.block(), cfg);
    if (bp.cols() == 0 || bq.cols() == 0) return true;
    const Matrix m = bq.adjoint() * q.block() * p.block() * bp;
    const Eigen::VectorXd s = singular_values_of(m);
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cfg.gap_lo && s(i) < cfg.gap_hi) return false;
    return true;
}

// Index of the pair (P,Q): dim(N(Q) ∩ R(P)) - dim(R(Q) ∩ N(P)), computed by
// rank arithmetic on the blocks. Identity tails on both sides contribute
// nothing to either defect space.
inline EssCodimResult ess_codim(const Projection& p, const Projection& q,
                                const ToleranceConfig& cfg = {}) {
    require(p.tail().kind == q.tail().kind, errc::tail_mismatch,
            "essential codimension needs matching tails");
    require(is_fredholm_pair(p, q, cfg), errc::not_fredholm_pair,
            "gap test failed; the pair has no well-defined index here");
    const auto rp = rank_of(p.block(), cfg);
    const auto rq = rank_of(q.block(), cfg);
    const auto rqp = rank_of(q.block() * p.block(), cfg);
    const auto rpq = rank_of(p.block() * q.block(), cfg);
    EssCodimResult r;
    r.dim_kernel_side = static_cast<std::size_t>(rp - rqp);
    r.dim_cokernel_side = static_cast<std::size_t>(rq - rpq);
    r.value = static_cast<long>(rp - rqp) - static_cast<long>(rq - rpq);
    if (auto diff = projection_difference(p, q)) {
        if (op_in_ideal(*diff, IdealTag::schatten(1.0), cfg))
            r.trace_crosscheck = (p.block() - q.block()).trace().real();
    }
    return r;
}

namespace detail {

// Unitary polar part of a (possibly singular) square matrix.
inline Matrix polar_part(const Matrix& m) {
    if (m.rows() == 0) return m;
    SvdResult svd = svd_full(m);
    return svd.u * svd.v.adjoint();
}

// Complete `inner` (columns orthonormal) to exclude the span of `drop`:
// orthonormal basis of range(inner) minus range(drop).
inline Matrix complement_within(const Matrix& inner, const Matrix& drop,
                                const ToleranceConfig& cfg = {}) {
    if (inner.cols() == 0) return inner;
    Matrix residual = inner;
    if (drop.cols() > 0) residual -= drop * (drop.adjoint() * inner);
    SvdResult svd = svd_full(residual * residual.adjoint());
    const double thr = rank_threshold(svd.s, cfg);
    Eigen::Index r = 0;
    while (r < svd.s.size() && svd.s(r) > thr) ++r;
    return svd.u.leftCols(r);
}

}  // namespace detail

// Unitary U with UPU* = Q and U - I in the ideal, built by matching
// orthonormal bases of the ranges and of the kernels through the polar part
// of their Gram matrices (the minimal rotation, so U - I inherits the size of
// P - Q). Exists precisely when P - Q lies in the ideal and [P:Q] = 0; each
// failed direction is reported by name.
inline TruncOperator conjugating_unitary(const Projection& p, const Projection& q,
                                         const IdealTag& j, const ToleranceConfig& cfg = {}) {
    auto diff = projection_difference(p, q);
    require(diff.has_value() && op_in_ideal(*diff, j, cfg), errc::precondition_failed,
            "ideal-membership: P - Q is not in " + j.name());
    EssCodimResult codim = ess_codim(p, q, cfg);
    require(codim.value == 0, errc::precondition_failed,
            "codimension: [P:Q] = " + std::to_string(codim.value));

    const Matrix bp = range_basis(p.block(), cfg);
    const Matrix bq = range_basis(q.block(), cfg);
    const Matrix cp = null_basis(p.block(), cfg);
    const Matrix cq = null_basis(q.block(), cfg);
    require(bp.cols() == bq.cols(), errc::precondition_failed,
            "codimension: block ranks differ");
    Matrix u = Matrix::Zero(p.dim(), p.dim());
    if (bp.cols() > 0) u += bq * detail::polar_part(bq.adjoint() * bp) * bp.adjoint();
    if (cp.cols() > 0) u += cq * detail::polar_part(cq.adjoint() * cp) * cp.adjoint();
    TruncOperator result(std::move(u), OpTail::identity());
    require(spectral_norm(result.block() * p.block() * result.block().adjoint() - q.block()) <=
                cfg.residual_tol,
            errc::precondition_failed, "conjugation residual exceeded tolerance");
    return result;
}

// Unitary U with U V1 = V2 and U - I in the ideal; exists exactly when
// V1 - V2 lies in the ideal and the kernels agree. On infinite-rank ranges
// the orthocomplement is handled by conjugating the range projections; on
// finite-rank ranges the complement is aligned through an explicit
// orthonormal family spanning R(V1)^perp ∩ R(V2)^perp, which U fixes
// pointwise, with the leftover directions matched by minimal rotation.
inline TruncOperator intertwine_partial_isometries(const PartialIsometry& v1,
                                                   const PartialIsometry& v2, const IdealTag& j,
                                                   const ToleranceConfig& cfg = {}) {
    require(v1.dim() == v2.dim(), errc::dim_mismatch, "partial isometries must share the dim");
    const Projection n1 = v1.kernel_projection();
    const Projection n2 = v2.kernel_projection();
    require(n1.tail().kind == n2.tail().kind &&
                spectral_norm(n1.block() - n2.block()) <= 1e-9,
            errc::kernel_mismatch, "kernels differ");
    require(v1.op().tail().kind == v2.op().tail().kind, errc::precondition_failed,
            "ideal-membership: tails differ");
    TruncOperator diff = v1.op() - v2.op();
    require(op_in_ideal(diff, j, cfg), errc::precondition_failed,
            "ideal-membership: V1 - V2 is not in " + j.name());

    const Projection p1 = v1.final_projection();
    const Projection p2 = v2.final_projection();
    const std::size_t n = v1.dim();
    Matrix u;
    if (p1.infinite_rank()) {
        TruncOperator u2 = conjugating_unitary(p1, p2, j, cfg);
        u = v2.block() * v1.block().adjoint() +
            u2.block() * (Matrix::Identity(n, n) - p1.block());
    } else {
        // Orthonormal family spanning the common orthocomplement of the
        // ranges; the conjugator acts as the identity on it.
        const Matrix common = null_basis(p1.block() + p2.block(), cfg);
        const Matrix rem_p = detail::complement_within(null_basis(p1.block(), cfg), common, cfg);
        const Matrix rem_q = detail::complement_within(null_basis(p2.block(), cfg), common, cfg);
        require(rem_p.cols() == rem_q.cols(), errc::precondition_failed,
                "range complements have mismatched dimensions");
        u = v2.block() * v1.block().adjoint() + common * common.adjoint();
        if (rem_p.cols() > 0)
            u += rem_q * detail::polar_part(rem_q.adjoint() * rem_p) * rem_p.adjoint();
    }
    TruncOperator result(std::move(u), OpTail::identity());
    require(is_unitary(result, tol::unitary), errc::precondition_failed,
            "constructed intertwiner is not unitary");
    require(spectral_norm(result.block() * v1.block() - v2.block()) <= cfg.residual_tol,
            errc::precondition_failed, "intertwining residual exceeded tolerance");
    return result;
}

// Diagonal support (0-based coordinates) of a diagonal projection block.
inline std::vector<std::size_t> diagonal_support(const Matrix& block) {
    std::vector<std::size_t> s;
    for (Eigen::Index i = 0; i < block.rows(); ++i)
        if (block(i, i).real() > 0.5) s.push_back(static_cast<std::size_t>(i));
    return s;
}

// Rebalances a diagonal family so every pair has essential codimension zero,
// transferring rank-one diagonal coordinates from surplus parts to deficit
// parts in index order. Only finite-rank moves occur; a part flagged as
// `fixed` is never touched. Requires the total codimension to vanish.
inline IdentityDecomposition balance_codimensions(const IdentityDecomposition& ps,
                                                  const IdentityDecomposition& es,
                                                  const IdealTag& j,
                                                  std::optional<std::size_t> fixed = std::nullopt,
                                                  const ToleranceConfig& cfg = {}) {
    require(ps.size() == es.size(), errc::dim_mismatch, "families must have equal length");
    const std::size_t count = ps.size();
    std::vector<long> codim(count);
    long total = 0;
    for (std::size_t i = 0; i < count; ++i) {
        auto diff = projection_difference(ps.part(i), es.part(i));
        require(diff.has_value() && op_in_ideal(*diff, j, cfg), errc::precondition_failed,
                "ideal-membership: pair " + std::to_string(i));
        codim[i] = ess_codim(ps.part(i), es.part(i), cfg).value;
        total += codim[i];
    }
    require(total == 0, errc::total_codim_nonzero,
            "codimensions sum to " + std::to_string(total));

    std::vector<std::vector<std::size_t>> supports(count);
    for (std::size_t i = 0; i < count; ++i) {
        require(is_diagonal(es.part(i).op(), tol::decomposition), errc::precondition_failed,
                "diagonal-parts: part " + std::to_string(i));
        supports[i] = diagonal_support(es.part(i).block());
    }

    // codim[i] = rank(P_i) - rank(E_i): positive means E_i must gain
    // coordinates, negative means it has spares to give.
    for (std::size_t i = 0; i < count; ++i) {
        if (fixed && *fixed == i) continue;
        while (codim[i] > 0) {
            bool moved = false;
            for (std::size_t m = 0; m < count && !moved; ++m) {
                if (m == i || (fixed && *fixed == m)) continue;
                if (codim[m] < 0 && !supports[m].empty()) {
                    supports[i].push_back(supports[m].front());
                    supports[m].erase(supports[m].begin());
                    ++codim[m];
                    --codim[i];
                    moved = true;
                }
            }
            require(moved, errc::total_codim_nonzero, "no surplus part left to draw from");
        }
    }

    std::vector<Projection> parts;
    parts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::sort(supports[i].begin(), supports[i].end());
        parts.push_back(
            Projection::coordinate(es.dim(), supports[i], es.part(i).infinite_rank()));
    }
    auto rebuilt = es.is_decomposition() ? IdentityDecomposition::decomposition(std::move(parts))
                                         : IdentityDecomposition::family(std::move(parts));
    for (std::size_t i = 0; i < count; ++i) {
        require(ess_codim(ps.part(i), rebuilt.part(i), cfg).value == 0, errc::precondition_failed,
                "balancing failed to zero pair " + std::to_string(i));
    }
    return rebuilt;
}

}  // namespace restdiag
