#include "twinflip/error.hpp"

namespace twinflip {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedMatrix: return "MalformedMatrix";
    case ErrorCode::NonSphericalOrTooLarge: return "NonSphericalOrTooLarge";
    case ErrorCode::MixedSystems: return "MixedSystems";
    case ErrorCode::NotTwisted: return "NotTwisted";
    case ErrorCode::InvalidTwist: return "InvalidTwist";
    case ErrorCode::BadChamber: return "BadChamber";
    case ErrorCode::BadType: return "BadType";
    case ErrorCode::NotSpherical: return "NotSpherical";
    case ErrorCode::NotOpposite: return "NotOpposite";
    case ErrorCode::MixedAmbient: return "MixedAmbient";
    case ErrorCode::DependentFrame: return "DependentFrame";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::NoBypass: return "NoBypass";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::HypothesisNotMet: return "HypothesisNotMet";
    case ErrorCode::MismatchBug: return "MismatchBug";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

}  // namespace twinflip
