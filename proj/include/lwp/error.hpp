#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lwp {

enum class ErrorCode {
    AtomAtZero,
    InvalidArgument,
    InfiniteMean,
    InfiniteSecondMoment,
    InfiniteMoment,
    DivergentExponentialMoment,
    NonFinite,
    LatticeCycle,
    LatticeSupport,
    MultipleClosedClasses,
    OutOfRange,
    BudgetExceeded,
    UnknownState,
    TransientState,
    NoHit,
    NoSamples,
    ParseError,
    ValidationError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it to a verdict without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace lwp
