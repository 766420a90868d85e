#pragma once

// Finite-truncation operator arithmetic: a dense N x N complex block plus a
// structured tail (zero / identity / declared diagonal profile) standing in
// for an operator on l^2. Coordinates beyond the block are indexed globally,
// so a diagonal tail evaluates its profile at the coordinate index itself;
// that makes enlarging the truncation exact rather than approximate.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "restdiag/errors.hpp"
#include "restdiag/ideals.hpp"
#include "restdiag/tolerances.hpp"

namespace restdiag {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// ---------------------------------------------------------------------------
// Dense-block helpers
// ---------------------------------------------------------------------------

struct SvdResult {
    Matrix u;
    Eigen::VectorXd s;
    Matrix v;  // columns are right singular vectors (block = u * diag(s) * v^*)
};

inline SvdResult svd_full(const Matrix& m) {
    if (m.rows() <= 96) {
        Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
    }
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

inline Eigen::VectorXd singular_values_of(const Matrix& m) {
    if (m.rows() <= 96) return Eigen::JacobiSVD<Matrix>(m).singularValues();
    return Eigen::BDCSVD<Matrix>(m).singularValues();
}

inline double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return singular_values_of(m)(0);
}

// Shared rank threshold: sigma <= rank_eps * max(1, sigma_max) counts as zero.
inline double rank_threshold(const Eigen::VectorXd& s, const ToleranceConfig& cfg = {}) {
    const double smax = s.size() ? s(0) : 0.0;
    return cfg.rank_eps * std::max(1.0, smax);
}

inline Eigen::Index rank_of(const Matrix& m, const ToleranceConfig& cfg = {}) {
    const Eigen::VectorXd s = singular_values_of(m);
    const double thr = rank_threshold(s, cfg);
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > thr) ++r;
    return r;
}

// Orthonormal basis of the range (columns) of a Hermitian projection block.
inline Matrix range_basis(const Matrix& proj, const ToleranceConfig& cfg = {}) {
    SvdResult svd = svd_full(proj);
    const double thr = rank_threshold(svd.s, cfg);
    Eigen::Index r = 0;
    while (r < svd.s.size() && svd.s(r) > thr) ++r;
    return svd.u.leftCols(r);
}

// Orthonormal basis of the nullspace of a Hermitian projection block.
inline Matrix null_basis(const Matrix& proj, const ToleranceConfig& cfg = {}) {
    SvdResult svd = svd_full(proj);
    const double thr = rank_threshold(svd.s, cfg);
    Eigen::Index r = 0;
    while (r < svd.s.size() && svd.s(r) > thr) ++r;
    return svd.u.rightCols(proj.cols() - r);
}

// ---------------------------------------------------------------------------
// Operator tails
// ---------------------------------------------------------------------------

struct OpTail {
    enum class Kind { Zero, Identity, Diag };

    Kind kind = Kind::Zero;
    SeqProfile profile;  // used when kind == Diag; evaluated at global indices

    static OpTail zero() { return {}; }
    static OpTail identity() { return {Kind::Identity, {}}; }
    static OpTail diag(SeqProfile p) { return {Kind::Diag, std::move(p)}; }

    bool is_zero() const { return kind == Kind::Zero; }
    bool is_identity() const { return kind == Kind::Identity; }
    bool is_diag() const { return kind == Kind::Diag; }

    // Diagonal entry at global coordinate n (> block dim).
    double entry(std::size_t n) const {
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Identity: return 1.0;
            case Kind::Diag: return profile.eval(n);
        }
        return 0.0;
    }
};

namespace detail {

inline SeqProfile combine_profiles(const SeqProfile& a, const SeqProfile& b, bool product,
                                   double sign = 1.0) {
    const std::size_t len = std::max(a.tail_start(), b.tail_start()) - 1;
    std::vector<double> prefix(len);
    for (std::size_t n = 1; n <= len; ++n) {
        const double v = product ? a.eval(n) * b.eval(n) : a.eval(n) + sign * b.eval(n);
        require(v >= -1e-15, errc::tail_unrepresentable, "negative diagonal tail");
        prefix[n - 1] = std::max(v, 0.0);
    }
    const TailModel& ta = a.tail();
    const TailModel& tb = b.tail();
    TailModel model;
    using K = TailModel::Kind;
    if (product) {
        if (ta.is_zero() || tb.is_zero()) {
            model = TailModel::zero();
        } else if (ta.kind == K::Geometric && tb.kind == K::Geometric) {
            model = TailModel::geometric(ta.r * tb.r, ta.scale * tb.scale);
        } else if (ta.kind != K::Geometric && tb.kind != K::Geometric) {
            model = TailModel::power_log(ta.p + tb.p, ta.k + tb.k, ta.scale * tb.scale);
        } else {
            fail(errc::tail_unrepresentable, "mixed geometric/polynomial tail product");
        }
    } else {
        if (tb.is_zero()) {
            model = ta;
        } else if (ta.is_zero()) {
            require(sign > 0, errc::tail_unrepresentable, "negative diagonal tail");
            model = tb;
        } else {
            require(ta.same_shape(tb), errc::tail_unrepresentable,
                    "tail sum needs matching decay shapes");
            const double s = ta.scale + sign * tb.scale;
            if (std::abs(s) <= 1e-15 * std::max(ta.scale, tb.scale)) {
                model = TailModel::zero();
            } else {
                require(s > 0, errc::tail_unrepresentable, "negative diagonal tail");
                model = ta.with_scale(s);
            }
        }
    }
    return SeqProfile::with_clamped_seam(std::move(prefix), model);
}

inline OpTail mul_tails(const OpTail& a, const OpTail& b) {
    using K = OpTail::Kind;
    if (a.kind == K::Zero || b.kind == K::Zero) return OpTail::zero();
    if (a.kind == K::Identity && b.kind == K::Identity) return OpTail::identity();
    if (a.kind == K::Identity) return b;
    if (b.kind == K::Identity) return a;
    return OpTail::diag(combine_profiles(a.profile, b.profile, /*product=*/true));
}

inline OpTail add_tails(const OpTail& a, const OpTail& b, double sign) {
    using K = OpTail::Kind;
    if (b.kind == K::Zero) return a;
    if (a.kind == K::Zero) {
        if (b.kind == K::Identity) {
            require(sign > 0, errc::tail_unrepresentable, "negative identity tail");
            return b;
        }
        if (sign > 0) return b;
        require(b.profile.is_identically_zero(), errc::tail_unrepresentable,
                "negative diagonal tail");
        return OpTail::zero();
    }
    if (a.kind == K::Identity && b.kind == K::Identity) {
        if (sign < 0) return OpTail::zero();
        fail(errc::tail_unrepresentable, "identity + identity tail is not representable");
    }
    if (a.kind == K::Identity || b.kind == K::Identity)
        fail(errc::tail_unrepresentable, "identity and diagonal tails do not combine");
    return OpTail::diag(combine_profiles(a.profile, b.profile, /*product=*/false, sign));
}

}  // namespace detail

inline bool tails_equal(const OpTail& a, const OpTail& b, std::size_t dim,
                        double tol = 1e-12) {
    if (a.kind != b.kind) return false;
    if (a.kind != OpTail::Kind::Diag) return true;
    for (std::size_t n = dim + 1; n <= dim + 64; ++n)
        if (std::abs(a.entry(n) - b.entry(n)) > tol * std::max(1.0, std::abs(a.entry(n))))
            return false;
    return a.profile.tail().same_shape(b.profile.tail());
}

// ---------------------------------------------------------------------------
// TruncOperator
// ---------------------------------------------------------------------------

class TruncOperator {
public:
    TruncOperator() = default;

    TruncOperator(Matrix block, OpTail tail) : block_(std::move(block)), tail_(std::move(tail)) {
        require(block_.rows() == block_.cols() && block_.rows() > 0, errc::dim_mismatch,
                "operator block must be square and non-empty");
    }

    static TruncOperator zero(std::size_t dim) {
        return TruncOperator(Matrix::Zero(dim, dim), OpTail::zero());
    }

    static TruncOperator identity(std::size_t dim) {
        return TruncOperator(Matrix::Identity(dim, dim), OpTail::identity());
    }

    static TruncOperator diagonal(const Vector& entries, OpTail tail = OpTail::zero()) {
        Matrix b = entries.asDiagonal();
        return TruncOperator(std::move(b), std::move(tail));
    }

    std::size_t dim() const { return static_cast<std::size_t>(block_.rows()); }
    const Matrix& block() const { return block_; }
    const OpTail& tail() const { return tail_; }

    TruncOperator adjoint() const { return TruncOperator(block_.adjoint(), tail_); }

    TruncOperator add(const TruncOperator& o) const {
        require(dim() == o.dim(), errc::dim_mismatch, "add needs equal truncation dims");
        return TruncOperator(block_ + o.block_, detail::add_tails(tail_, o.tail_, +1.0));
    }

    TruncOperator sub(const TruncOperator& o) const {
        require(dim() == o.dim(), errc::dim_mismatch, "sub needs equal truncation dims");
        return TruncOperator(block_ - o.block_, detail::add_tails(tail_, o.tail_, -1.0));
    }

    TruncOperator multiply(const TruncOperator& o) const {
        require(dim() == o.dim(), errc::dim_mismatch, "multiply needs equal truncation dims");
        return TruncOperator(block_ * o.block_, detail::mul_tails(tail_, o.tail_));
    }

    TruncOperator scale(Complex c) const {
        if (tail_.is_zero()) return TruncOperator(c * block_, tail_);
        if (c == Complex(1.0, 0.0)) return *this;
        if (c == Complex(0.0, 0.0)) return TruncOperator(Matrix::Zero(dim(), dim()).eval(), OpTail::zero());
        require(c.imag() == 0.0 && c.real() > 0.0, errc::tail_unrepresentable,
                "non-zero tails scale only by positive reals");
        if (tail_.is_identity())
            fail(errc::tail_unrepresentable, "scaled identity tail is not representable");
        SeqProfile p = tail_.profile;
        std::vector<double> prefix = p.prefix();
        for (double& v : prefix) v *= c.real();
        return TruncOperator(c * block_,
                             OpTail::diag(SeqProfile(std::move(prefix),
                                                     p.tail().with_scale(p.tail().scale * c.real()))));
    }

    // The same operator materialized at a larger truncation; exact because
    // diagonal tails are indexed by global coordinates.
    TruncOperator embed(std::size_t newdim) const {
        require(newdim >= dim(), errc::dim_mismatch, "embed cannot shrink the block");
        Matrix b = Matrix::Zero(newdim, newdim);
        b.topLeftCorner(dim(), dim()) = block_;
        for (std::size_t n = dim() + 1; n <= newdim; ++n)
            b(n - 1, n - 1) = tail_.entry(n);
        return TruncOperator(std::move(b), tail_);
    }

private:
    Matrix block_;
    OpTail tail_{};
};

inline TruncOperator operator+(const TruncOperator& a, const TruncOperator& b) { return a.add(b); }
inline TruncOperator operator-(const TruncOperator& a, const TruncOperator& b) { return a.sub(b); }
inline TruncOperator operator*(const TruncOperator& a, const TruncOperator& b) {
    return a.multiply(b);
}

// ---------------------------------------------------------------------------
// Norms and predicates
// ---------------------------------------------------------------------------

inline double operator_norm(const TruncOperator& a) {
    double tail_sup = 0.0;
    switch (a.tail().kind) {
        case OpTail::Kind::Zero: break;
        case OpTail::Kind::Identity: tail_sup = 1.0; break;
        case OpTail::Kind::Diag: tail_sup = a.tail().entry(a.dim() + 1); break;
    }
    return std::max(spectral_norm(a.block()), tail_sup);
}

inline bool is_diagonal(const TruncOperator& a, double tol) {
    Matrix off = a.block();
    off.diagonal().setZero();
    return spectral_norm(off) <= tol;
}

inline bool is_unitary(const TruncOperator& a, double tol) {
    if (!a.tail().is_identity()) return false;
    const std::size_t n = a.dim();
    const Matrix i = Matrix::Identity(n, n);
    return spectral_norm(a.block().adjoint() * a.block() - i) <= tol &&
           spectral_norm(a.block() * a.block().adjoint() - i) <= tol;
}

// Singular-value profile of a compact truncated operator: block singular
// values merged with the tail diagonal evaluated out to a cut index, the
// symbolic tail model carried over beyond the cut. Block values that fall
// below the model's seam value are dropped: in the non-increasing enumeration
// of an infinite-rank operator they would only appear beyond any finite
// index, and membership is unchanged by finitely many such terms.
inline SeqProfile singular_values(const TruncOperator& a, const ToleranceConfig& cfg = {}) {
    require(!a.tail().is_identity(), errc::non_compact_tail,
            "identity-tail operators are not compact; subtract I first");
    const Eigen::VectorXd s = singular_values_of(a.block());
    if (a.tail().is_zero()) {
        std::vector<double> vals(s.data(), s.data() + s.size());
        for (double& v : vals) v = std::max(v, 0.0);
        return SeqProfile::from_values(std::move(vals));
    }
    const SeqProfile& prof = a.tail().profile;
    const std::size_t dim = a.dim();
    const std::size_t cut = std::max({2 * dim, prof.tail_start() - 1,
                                      prof.tail().monotone_from()});
    const double seam = prof.tail().eval(cut + 1);
    std::vector<double> vals;
    vals.reserve(cut);
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) >= seam) vals.push_back(s(i));
    for (std::size_t n = dim + 1; n <= cut; ++n) vals.push_back(std::abs(prof.eval(n)));
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    // Pad so the model takes over exactly at the cut.
    while (vals.size() < cut) vals.push_back(seam);
    return SeqProfile(std::move(vals), prof.tail());
}

inline bool op_in_ideal(const TruncOperator& a, const IdealTag& j,
                        const ToleranceConfig& cfg = {}) {
    if (a.tail().is_identity()) return false;
    return in_ideal(singular_values(a, cfg), j);
}

inline double schatten_norm(const TruncOperator& a, double p, const ToleranceConfig& cfg = {}) {
    require(p >= 1.0, errc::out_of_range, "schatten norm needs p >= 1");
    require(!a.tail().is_identity(), errc::non_compact_tail, "identity tails have no Schatten norm");
    const Eigen::VectorXd s = singular_values_of(a.block());
    double sum = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) sum += std::pow(s(i), p);
    if (a.tail().is_diag()) sum += a.tail().profile.sum_from(a.dim() + 1, p);
    return std::pow(sum, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Polar decomposition and pseudoinverse
// ---------------------------------------------------------------------------

class PartialIsometry;

inline TruncOperator pinv(const TruncOperator& a, const ToleranceConfig& cfg = {}) {
    require(!a.tail().is_diag(), errc::tail_unrepresentable,
            "pseudoinverse of a diagonal tail is unbounded");
    SvdResult svd = svd_full(a.block());
    const double thr = rank_threshold(svd.s, cfg);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(svd.s.size());
    for (Eigen::Index i = 0; i < svd.s.size(); ++i)
        if (svd.s(i) > thr) inv(i) = 1.0 / svd.s(i);
    Matrix b = svd.v * inv.asDiagonal() * svd.u.adjoint();
    return TruncOperator(std::move(b), a.tail());
}

// ---------------------------------------------------------------------------
// Structured operator types
// ---------------------------------------------------------------------------

class Projection {
public:
    explicit Projection(TruncOperator op) : op_(std::move(op)) {
        require(!op_.tail().is_diag(), errc::tail_unrepresentable,
                "projections carry zero or identity tails");
        const Matrix& b = op_.block();
        require(spectral_norm(b * b - b) <= tol::projection, errc::invalid_profile,
                "block is not idempotent");
        require(spectral_norm(b - b.adjoint()) <= tol::projection, errc::invalid_profile,
                "block is not self-adjoint");
    }

    // Coordinate projection onto the span of the given 0-based indices.
    static Projection coordinate(std::size_t dim, const std::vector<std::size_t>& indices,
                                 bool identity_tail = false) {
        Matrix b = Matrix::Zero(dim, dim);
        for (std::size_t i : indices) {
            require(i < dim, errc::dim_mismatch, "coordinate index beyond truncation");
            b(i, i) = 1.0;
        }
        return Projection(TruncOperator(std::move(b),
                                        identity_tail ? OpTail::identity() : OpTail::zero()));
    }

    const TruncOperator& op() const { return op_; }
    const Matrix& block() const { return op_.block(); }
    std::size_t dim() const { return op_.dim(); }
    const OpTail& tail() const { return op_.tail(); }
    bool infinite_rank() const { return op_.tail().is_identity(); }

    Eigen::Index block_rank(const ToleranceConfig& cfg = {}) const {
        return rank_of(op_.block(), cfg);
    }

private:
    TruncOperator op_;
};

// Difference of two projections as a compact operator when the tails align:
// equal tails cancel, an identity-vs-zero mismatch is reported by the caller.
inline std::optional<TruncOperator> projection_difference(const Projection& p,
                                                          const Projection& q) {
    if (p.tail().kind != q.tail().kind) return std::nullopt;
    return p.op() - q.op();
}

class IdentityDecomposition {
public:
    enum class Completeness { Decomposition, Family };

    static IdentityDecomposition decomposition(std::vector<Projection> parts) {
        return IdentityDecomposition(std::move(parts), Completeness::Decomposition);
    }

    // A family of projections not required to be orthogonal or complete;
    // the pipeline's orthogonalization stages accept these.
    static IdentityDecomposition family(std::vector<Projection> parts) {
        return IdentityDecomposition(std::move(parts), Completeness::Family);
    }

    // Coordinate decomposition from 0-based index groups; `identity_part`
    // names the group that also absorbs every coordinate beyond the block.
    static IdentityDecomposition coordinate(std::size_t dim,
                                            const std::vector<std::vector<std::size_t>>& groups,
                                            std::optional<std::size_t> identity_part) {
        std::vector<Projection> parts;
        parts.reserve(groups.size());
        for (std::size_t g = 0; g < groups.size(); ++g)
            parts.push_back(Projection::coordinate(dim, groups[g],
                                                   identity_part && *identity_part == g));
        return decomposition(std::move(parts));
    }

    const std::vector<Projection>& parts() const { return parts_; }
    std::size_t size() const { return parts_.size(); }
    const Projection& part(std::size_t i) const { return parts_.at(i); }
    std::size_t dim() const { return parts_.empty() ? 0 : parts_.front().dim(); }
    bool is_decomposition() const { return completeness_ == Completeness::Decomposition; }

    std::optional<std::size_t> identity_part() const {
        for (std::size_t i = 0; i < parts_.size(); ++i)
            if (parts_[i].infinite_rank()) return i;
        return std::nullopt;
    }

    // Sum of the parts minus the identity, as a truncated operator.
    TruncOperator defect() const {
        TruncOperator sum = parts_.front().op();
        for (std::size_t i = 1; i < parts_.size(); ++i) sum = sum + parts_[i].op();
        return sum - TruncOperator::identity(dim());
    }

private:
    IdentityDecomposition(std::vector<Projection> parts, Completeness completeness)
        : parts_(std::move(parts)), completeness_(completeness) {
        require(!parts_.empty(), errc::dim_mismatch, "decomposition needs at least one part");
        const std::size_t d = parts_.front().dim();
        std::size_t identity_tails = 0;
        for (const auto& p : parts_) {
            require(p.dim() == d, errc::dim_mismatch, "decomposition parts must share the dim");
            if (p.infinite_rank()) ++identity_tails;
        }
        require(identity_tails <= 1, errc::invalid_profile,
                "at most one part may carry the identity tail");
        if (completeness_ == Completeness::Decomposition) {
            Matrix sum = Matrix::Zero(d, d);
            for (std::size_t i = 0; i < parts_.size(); ++i) {
                sum += parts_[i].block();
                for (std::size_t j = i + 1; j < parts_.size(); ++j) {
                    require(spectral_norm(parts_[i].block() * parts_[j].block()) <=
                                tol::decomposition,
                            errc::invalid_profile, "decomposition parts must be orthogonal");
                }
            }
            require(spectral_norm(sum - Matrix::Identity(d, d)) <= tol::decomposition,
                    errc::invalid_profile, "decomposition blocks must sum to the identity");
        }
    }

    std::vector<Projection> parts_;
    Completeness completeness_;
};

// Block-diagonal compression sum P_n A P_n by a family of mutually
// orthogonal projections. The singular values of the result are dominated by
// those of the input in the partial-sum order.
inline TruncOperator pinch(const TruncOperator& a, const IdentityDecomposition& p) {
    require(p.dim() == a.dim(), errc::dim_mismatch, "pinch needs matching dims");
    Matrix b = Matrix::Zero(a.dim(), a.dim());
    bool identity_part = false;
    for (const auto& part : p.parts()) {
        b += part.block() * a.block() * part.block();
        identity_part = identity_part || part.infinite_rank();
    }
    return TruncOperator(std::move(b), identity_part ? a.tail() : OpTail::zero());
}

class PartialIsometry {
public:
    explicit PartialIsometry(TruncOperator op) : op_(std::move(op)) {
        const Matrix& v = op_.block();
        require(spectral_norm(v * v.adjoint() * v - v) <= tol::partial_isometry,
                errc::invalid_profile, "block is not a partial isometry");
        require(!op_.tail().is_diag(), errc::tail_unrepresentable,
                "partial isometries carry zero or identity tails");
    }

    const TruncOperator& op() const { return op_; }
    const Matrix& block() const { return op_.block(); }
    std::size_t dim() const { return op_.dim(); }

    Projection initial_projection() const {
        return Projection(op_.adjoint() * op_);
    }

    Projection final_projection() const {
        return Projection(op_ * op_.adjoint());
    }

    Projection kernel_projection() const {
        return Projection(TruncOperator::identity(dim()) - op_.adjoint() * op_);
    }

private:
    TruncOperator op_;
};

// Polar decomposition a = V |a| with V the partial isometry supported on the
// closure of the range of |a|.
inline std::pair<PartialIsometry, TruncOperator> polar(const TruncOperator& a,
                                                       const ToleranceConfig& cfg = {}) {
    require(!a.tail().is_diag(), errc::tail_unrepresentable,
            "polar parts of diagonal tails are not representable here");
    SvdResult svd = svd_full(a.block());
    const double thr = rank_threshold(svd.s, cfg);
    Eigen::Index r = 0;
    while (r < svd.s.size() && svd.s(r) > thr) ++r;
    Matrix v = svd.u.leftCols(r) * svd.v.leftCols(r).adjoint();
    Matrix abs = svd.v * svd.s.asDiagonal() * svd.v.adjoint();
    return {PartialIsometry(TruncOperator(std::move(v), a.tail())),
            TruncOperator(std::move(abs), a.tail())};
}

class DiagonalizableOperator {
public:
    DiagonalizableOperator(std::vector<Complex> eigenvalues, IdentityDecomposition spectral)
        : eigenvalues_(std::move(eigenvalues)), spectral_(std::move(spectral)) {
        require(eigenvalues_.size() == spectral_.size(), errc::dim_mismatch,
                "one eigenvalue per spectral projection");
        require(spectral_.is_decomposition(), errc::invalid_profile,
                "spectral projections must decompose the identity");
        for (std::size_t i = 0; i < eigenvalues_.size(); ++i)
            for (std::size_t j = i + 1; j < eigenvalues_.size(); ++j)
                require(std::abs(eigenvalues_[i] - eigenvalues_[j]) > tol::eigen_gap,
                        errc::invalid_profile, "eigenvalues must be pairwise distinct");
    }

    const std::vector<Complex>& eigenvalues() const { return eigenvalues_; }
    const IdentityDecomposition& spectral() const { return spectral_; }
    std::size_t dim() const { return spectral_.dim(); }

    Matrix reconstruct_block() const {
        Matrix b = Matrix::Zero(dim(), dim());
        for (std::size_t i = 0; i < eigenvalues_.size(); ++i)
            b += eigenvalues_[i] * spectral_.part(i).block();
        return b;
    }

private:
    std::vector<Complex> eigenvalues_;
    IdentityDecomposition spectral_;
};

}  // namespace restdiag
