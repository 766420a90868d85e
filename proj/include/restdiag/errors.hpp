#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace restdiag {

// Every failure mode carries a stable machine-readable code (used by the CLI
// to name the violated condition) plus a human-readable message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
inline constexpr const char* dim_mismatch = "DimMismatch";
inline constexpr const char* tail_mismatch = "TailMismatch";
inline constexpr const char* tail_unrepresentable = "TailUnrepresentable";
inline constexpr const char* non_compact_tail = "NonCompactTail";
inline constexpr const char* not_fredholm_pair = "NotFredholmPair";
inline constexpr const char* precondition_failed = "PreconditionFailed";
inline constexpr const char* kernel_mismatch = "KernelMismatch";
inline constexpr const char* total_codim_nonzero = "TotalCodimNonzero";
inline constexpr const char* not_compact_defect = "NotCompactDefect";
inline constexpr const char* overlap_not_finite_rank = "OverlapNotFiniteRank";
inline constexpr const char* no_valid_index = "NoValidIndex";
inline constexpr const char* not_diagonalizing = "NotDiagonalizing";
inline constexpr const char* codim_nonzero = "CodimNonzero";
inline constexpr const char* conditions_fail = "ConditionsFail";
inline constexpr const char* not_orthonormal = "NotOrthonormal";
inline constexpr const char* out_of_range = "OutOfRange";
inline constexpr const char* distinctness_unreachable = "DistinctnessUnreachable";
inline constexpr const char* square_equals_ideal = "SquareEqualsIdeal";
inline constexpr const char* zero_coefficient = "ZeroCoefficient";
inline constexpr const char* spectrum_mismatch = "SpectrumMismatch";
inline constexpr const char* support_exceeds_dim = "SupportExceedsDim";
inline constexpr const char* unbounded_mismatch = "UnboundedMismatch";
inline constexpr const char* invalid_profile = "InvalidProfile";
inline constexpr const char* parse_error = "ParseError";
}  // namespace errc

[[noreturn]] inline void fail(const char* code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, const char* code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace restdiag
