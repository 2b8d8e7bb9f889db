#include "lwp/error.hpp"

namespace lwp {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::AtomAtZero: return "AtomAtZero";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InfiniteMean: return "InfiniteMean";
        case ErrorCode::InfiniteSecondMoment: return "InfiniteSecondMoment";
        case ErrorCode::InfiniteMoment: return "InfiniteMoment";
        case ErrorCode::DivergentExponentialMoment: return "DivergentExponentialMoment";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::LatticeCycle: return "LatticeCycle";
        case ErrorCode::LatticeSupport: return "LatticeSupport";
        case ErrorCode::MultipleClosedClasses: return "MultipleClosedClasses";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::UnknownState: return "UnknownState";
        case ErrorCode::TransientState: return "TransientState";
        case ErrorCode::NoHit: return "NoHit";
        case ErrorCode::NoSamples: return "NoSamples";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

}  // namespace lwp
