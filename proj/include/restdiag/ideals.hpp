#pragma once

// Calculus of singular-value profiles and symbolic operator-ideal membership.
//
// A profile models a non-negative, non-increasing sequence vanishing at
// infinity as a finite exact prefix plus a symbolic decay tail. Membership in
// the classical ideals (finite rank, Schatten-p, compacts) is then decidable
// exactly from the tail variant, which is what makes infinite-regime claims
// testable at truncation scale.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "restdiag/errors.hpp"
#include "restdiag/tolerances.hpp"

namespace restdiag {

// ---------------------------------------------------------------------------
// Tail models
// ---------------------------------------------------------------------------

struct TailModel {
    enum class Kind { Zero, Power, PowerLog, Geometric };

    Kind kind = Kind::Zero;
    double p = 0.0;      // exponent for Power / PowerLog
    int k = 0;           // log power for PowerLog
    double r = 0.0;      // ratio for Geometric
    double scale = 1.0;  // positive multiplier for non-zero variants

    static TailModel zero() { return TailModel{}; }

    static TailModel power(double p, double scale = 1.0) {
        require(p > 0, errc::invalid_profile, "power tail needs p > 0");
        require(scale > 0, errc::invalid_profile, "tail scale must be positive");
        TailModel t;
        t.kind = Kind::Power;
        t.p = p;
        t.scale = scale;
        return t;
    }

    static TailModel power_log(double p, int k, double scale = 1.0) {
        require(p > 0, errc::invalid_profile, "powerlog tail needs p > 0");
        require(k >= 0, errc::invalid_profile, "powerlog tail needs k >= 0");
        require(scale > 0, errc::invalid_profile, "tail scale must be positive");
        if (k == 0) return power(p, scale);
        TailModel t;
        t.kind = Kind::PowerLog;
        t.p = p;
        t.k = k;
        t.scale = scale;
        return t;
    }

    static TailModel geometric(double r, double scale = 1.0) {
        require(r > 0 && r < 1, errc::invalid_profile, "geometric tail needs r in (0,1)");
        require(scale > 0, errc::invalid_profile, "tail scale must be positive");
        TailModel t;
        t.kind = Kind::Geometric;
        t.r = r;
        t.scale = scale;
        return t;
    }

    bool is_zero() const { return kind == Kind::Zero; }

    // Term at (1-based) index n.
    double eval(std::size_t n) const {
        const double x = static_cast<double>(n);
        switch (kind) {
            case Kind::Zero: return 0.0;
            case Kind::Power: return scale * std::pow(x, -p);
            case Kind::PowerLog: return scale * std::pow(x, -p) * std::pow(std::log(x), k);
            case Kind::Geometric: return scale * std::pow(r, x);
        }
        return 0.0;
    }

    // Index from which the model is guaranteed non-increasing. Power and
    // Geometric decay everywhere; x^-p log^k x peaks at exp(k/p).
    std::size_t monotone_from() const {
        if (kind != Kind::PowerLog) return 1;
        return static_cast<std::size_t>(std::ceil(std::exp(static_cast<double>(k) / p)));
    }

    TailModel with_scale(double s) const {
        TailModel t = *this;
        t.scale = s;
        return t;
    }

    bool same_shape(const TailModel& o) const {
        if (kind != o.kind) return false;
        switch (kind) {
            case Kind::Zero: return true;
            case Kind::Power: return p == o.p;
            case Kind::PowerLog: return p == o.p && k == o.k;
            case Kind::Geometric: return r == o.r;
        }
        return false;
    }
};

// Sum of eval(n)^e over n >= from; +inf when the series diverges.
inline double tail_series_sum(const TailModel& t, std::size_t from, double e = 1.0) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (from < 1) from = 1;
    switch (t.kind) {
        case TailModel::Kind::Zero:
            return 0.0;
        case TailModel::Kind::Geometric: {
            const double q = std::pow(t.r, e);
            return std::pow(t.scale, e) * std::pow(t.r, e * static_cast<double>(from)) / (1.0 - q);
        }
        case TailModel::Kind::Power:
        case TailModel::Kind::PowerLog: {
            const double a = t.p * e;
            const double g = static_cast<double>(t.k) * e;
            if (a <= 1.0) return inf;
            // Explicit head, then an integration-by-parts remainder:
            //   int_M x^-a log^g x dx = M^(1-a) log^g(M)/(a-1) + g/(a-1) * int_M x^-a log^(g-1) x dx
            const std::size_t K = 1 << 16;
            double sum = 0.0;
            for (std::size_t n = from; n < from + K; ++n) sum += std::pow(t.eval(n), e);
            const double M = static_cast<double>(from + K);
            double rem = 0.0;
            double coef = 1.0;
            double gg = g;
            while (true) {
                const double term = coef * std::pow(M, 1.0 - a) * std::pow(std::log(M), std::max(gg, 0.0)) / (a - 1.0);
                rem += term;
                if (gg <= 0.0 || term < 1e-300) break;
                coef *= gg / (a - 1.0);
                gg -= 1.0;
            }
            return sum + std::pow(t.scale, e) * rem;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Sequence profiles
// ---------------------------------------------------------------------------

class SeqProfile {
public:
    SeqProfile() = default;

    // The prefix is re-sorted into non-increasing order; the tail takes over
    // at index prefix.size() + 1 and must not exceed the last prefix value.
    SeqProfile(std::vector<double> prefix, TailModel tail) : prefix_(std::move(prefix)), tail_(tail) {
        require(prefix_.size() <= tol::max_prefix, errc::invalid_profile,
                "prefix longer than the 2^16 bound");
        for (double v : prefix_) {
            require(std::isfinite(v) && v >= 0.0, errc::invalid_profile,
                    "prefix entries must be finite and non-negative");
        }
        std::sort(prefix_.begin(), prefix_.end(), std::greater<double>());
        require(tail_.is_zero() || tail_.monotone_from() <= tail_start(), errc::invalid_profile,
                "tail model not non-increasing from tail_start");
        if (!tail_.is_zero() && !prefix_.empty()) {
            const double seam = tail_.eval(tail_start());
            require(prefix_.back() >= seam * (1.0 - tol::profile_monotone), errc::invalid_profile,
                    "tail exceeds last prefix value at the seam");
        }
    }

    static SeqProfile zero() { return SeqProfile({}, TailModel::zero()); }

    static SeqProfile from_values(std::vector<double> values) {
        return SeqProfile(std::move(values), TailModel::zero());
    }

    // Clamps the tail scale at the seam instead of rejecting; used by derived
    // constructions whose symbolic tail is only asymptotically exact.
    static SeqProfile with_clamped_seam(std::vector<double> prefix, TailModel tail) {
        if (!tail.is_zero() && !prefix.empty()) {
            std::sort(prefix.begin(), prefix.end(), std::greater<double>());
            const std::size_t ts = prefix.size() + 1;
            const double shape = tail.eval(ts) / tail.scale;
            if (shape > 0.0 && tail.scale * shape > prefix.back()) {
                tail = tail.with_scale(std::max(prefix.back() / shape,
                                                std::numeric_limits<double>::min()));
            }
        }
        return SeqProfile(std::move(prefix), tail);
    }

    const std::vector<double>& prefix() const { return prefix_; }
    const TailModel& tail() const { return tail_; }
    std::size_t tail_start() const { return prefix_.size() + 1; }

    // Term at (1-based) index n.
    double eval(std::size_t n) const {
        if (n == 0) fail(errc::out_of_range, "profile indices are 1-based");
        if (n <= prefix_.size()) return prefix_[n - 1];
        return tail_.eval(n);
    }

    bool is_identically_zero() const {
        if (!tail_.is_zero()) return false;
        for (double v : prefix_)
            if (v != 0.0) return false;
        return true;
    }

    // Sum of eval(n)^e over n >= from (prefix part exact, tail symbolic).
    double sum_from(std::size_t from, double e = 1.0) const {
        if (from < 1) from = 1;
        double s = 0.0;
        for (std::size_t n = from; n <= prefix_.size(); ++n) s += std::pow(prefix_[n - 1], e);
        return s + tail_series_sum(tail_, std::max(from, tail_start()), e);
    }

    double total(double e = 1.0) const { return sum_from(1, e); }

private:
    std::vector<double> prefix_;
    TailModel tail_{};
};

// ---------------------------------------------------------------------------
// Ideal tags
// ---------------------------------------------------------------------------

struct IdealTag {
    enum class Kind { FiniteRank, Schatten, Compact };

    Kind kind = Kind::Compact;
    // Schatten exponent; values in (0,1) arise only as squares of Schatten
    // tags and use the same summability test.
    double p = 0.0;

    static IdealTag finite_rank() { return IdealTag{Kind::FiniteRank, 0.0}; }

    static IdealTag schatten(double p) {
        require(p > 0, errc::out_of_range, "Schatten exponent must be positive");
        return IdealTag{Kind::Schatten, p};
    }

    static IdealTag compact() { return IdealTag{Kind::Compact, 0.0}; }

    std::string name() const {
        switch (kind) {
            case Kind::FiniteRank: return "finite-rank";
            case Kind::Schatten: return "schatten:" + std::to_string(p);
            case Kind::Compact: return "compact";
        }
        return "";
    }

    // Schatten-p and compacts are arithmetic mean closed; finite rank is not.
    bool am_closed() const { return kind != Kind::FiniteRank; }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// m-fold repetition of each term. The symbolic tail keeps its variant: the
// repeated power tail equals scale*m^p*n^-p up to a ratio tending to one, and
// the repeated geometric tail is enveloped by ratio r^(1/m).
inline SeqProfile ampliate(const SeqProfile& s, std::size_t m) {
    require(m >= 1, errc::out_of_range, "ampliation order must be >= 1");
    if (m == 1) return s;
    std::vector<double> prefix;
    prefix.reserve(s.prefix().size() * m);
    for (double v : s.prefix())
        for (std::size_t i = 0; i < m; ++i) prefix.push_back(v);
    const double dm = static_cast<double>(m);
    TailModel t = s.tail();
    switch (t.kind) {
        case TailModel::Kind::Zero: break;
        case TailModel::Kind::Power:
        case TailModel::Kind::PowerLog:
            t = t.with_scale(t.scale * std::pow(dm, t.p));
            break;
        case TailModel::Kind::Geometric: {
            TailModel g = TailModel::geometric(std::pow(t.r, 1.0 / dm), t.scale);
            t = g;
            break;
        }
    }
    return SeqProfile::with_clamped_seam(std::move(prefix), t);
}

// Profile of running averages (a_1 + ... + a_n)/n. The prefix is computed
// exactly; the tail variant follows the symbolic rules
//   Zero, Power(p>1), Geometric -> Power(1)
//   Power(1) -> PowerLog(1,1),   Power(p<1) -> Power(p)
// with PowerLog following the rule of its p and k propagating (p<1) or
// collapsing to PowerLog(1,k+1) (p=1) / Power(1) (p>1).
inline SeqProfile arith_mean(const SeqProfile& s) {
    const TailModel& t = s.tail();
    TailModel out;
    bool convergent_total = false;
    const double one_eps = 1e-12;
    switch (t.kind) {
        case TailModel::Kind::Zero:
        case TailModel::Kind::Geometric:
            out = TailModel::power(1.0, 1.0);
            convergent_total = true;
            break;
        case TailModel::Kind::Power:
        case TailModel::Kind::PowerLog:
            if (t.p > 1.0 + one_eps) {
                out = TailModel::power(1.0, 1.0);
                convergent_total = true;
            } else if (t.p >= 1.0 - one_eps) {
                out = TailModel::power_log(1.0, t.k + 1, t.scale / (t.k + 1.0));
            } else {
                out = TailModel::power_log(t.p, t.k, t.scale / (1.0 - t.p));
            }
            break;
    }

    std::size_t len = std::max<std::size_t>({s.prefix().size(), 32, out.monotone_from() + 1});
    require(len <= tol::max_prefix, errc::invalid_profile,
            "mean profile needs a prefix beyond the 2^16 bound");
    std::vector<double> means(len);
    double run = 0.0;
    for (std::size_t n = 1; n <= len; ++n) {
        run += s.eval(n);
        means[n - 1] = run / static_cast<double>(n);
    }
    if (convergent_total) {
        const double total = run + tail_series_sum(t, std::max(len + 1, s.tail_start()), 1.0);
        out = out.with_scale(total);
    }
    // Keep the seam monotone: the asymptotic constant may exceed the true
    // mean at finite indices, so cap the scale there.
    const double shape = out.eval(len + 1) / out.scale;
    if (shape > 0.0) out = out.with_scale(std::min(out.scale, means.back() / shape));
    return SeqProfile(std::move(means), out);
}

namespace detail {

// Tail-class comparison for a = O(b); Zero fastest, then Geometric, then
// poly scales ordered by exponent and log power.
inline bool tail_big_o(const TailModel& a, const TailModel& b) {
    using K = TailModel::Kind;
    if (a.kind == K::Zero) return true;
    if (b.kind == K::Zero) return false;
    const bool a_geo = a.kind == K::Geometric;
    const bool b_geo = b.kind == K::Geometric;
    if (a_geo && b_geo) return a.r <= b.r + 1e-15;
    if (a_geo) return true;   // geometric beats any polynomial decay
    if (b_geo) return false;
    const double eps = 1e-12;
    if (a.p > b.p + eps) return true;
    if (a.p < b.p - eps) return false;
    return a.k <= b.k;
}

}  // namespace detail

// Decides a = O(b); when true and witness is non-null, stores a constant M
// with a_n <= M b_n over the probed horizon.
inline bool big_o_dominates(const SeqProfile& a, const SeqProfile& b, double* witness = nullptr) {
    if (!detail::tail_big_o(a.tail(), b.tail())) return false;
    const std::size_t horizon =
        std::max(a.tail_start(), b.tail_start()) + 4096;
    double best = 1.0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const double an = a.eval(n);
        const double bn = b.eval(n);
        if (bn == 0.0) {
            if (an != 0.0) return false;
            continue;
        }
        best = std::max(best, an / bn);
    }
    if (witness) *witness = best;
    return true;
}

// Membership of the profile in the tagged ideal, decided symbolically:
// finite rank needs a Zero tail; Schatten-p needs sum s_n^p < inf, i.e.
// q*p > 1 for Power/PowerLog(q,k) tails; geometric tails lie in every tag.
inline bool in_ideal(const SeqProfile& s, const IdealTag& j) {
    const TailModel& t = s.tail();
    switch (j.kind) {
        case IdealTag::Kind::FiniteRank:
            return t.is_zero();
        case IdealTag::Kind::Compact:
            return true;
        case IdealTag::Kind::Schatten:
            switch (t.kind) {
                case TailModel::Kind::Zero:
                case TailModel::Kind::Geometric:
                    return true;
                case TailModel::Kind::Power:
                case TailModel::Kind::PowerLog:
                    return t.p * j.p > 1.0;
            }
    }
    return false;
}

// Membership in the arithmetic mean closure of the tag. Schatten and compact
// tags are am-closed, so the test coincides with in_ideal; the closure of the
// finite-rank ideal is the trace class.
inline bool am_closure_member(const SeqProfile& s, const IdealTag& j) {
    if (j.kind == IdealTag::Kind::FiniteRank) return in_ideal(s, IdealTag::schatten(1.0));
    return in_ideal(s, j);
}

// Tag of the ideal spanned by products of two members.
inline IdealTag ideal_square(const IdealTag& j) {
    switch (j.kind) {
        case IdealTag::Kind::FiniteRank: return IdealTag::finite_rank();
        case IdealTag::Kind::Compact: return IdealTag::compact();
        case IdealTag::Kind::Schatten: return IdealTag::schatten(j.p / 2.0);
    }
    return j;
}

}  // namespace restdiag
