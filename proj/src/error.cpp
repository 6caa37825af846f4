#include "miscal/error.hpp"

namespace miscal {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotARotation: return "NotARotation";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::BehindPlane: return "BehindPlane";
    case ErrorCode::DegenerateBaseline: return "DegenerateBaseline";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::NoValidRect: return "NoValidRect";
    case ErrorCode::ZeroThreshold: return "ZeroThreshold";
    case ErrorCode::EmptyMatches: return "EmptyMatches";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::MissingIds: return "MissingIds";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace miscal
