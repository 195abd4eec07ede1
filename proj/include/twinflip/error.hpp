#pragma once

#include <stdexcept>
#include <string>

namespace twinflip {

enum class ErrorCode {
  MalformedMatrix,
  NonSphericalOrTooLarge,
  MixedSystems,
  NotTwisted,
  InvalidTwist,
  BadChamber,
  BadType,
  NotSpherical,
  NotOpposite,
  MixedAmbient,
  DependentFrame,
  TooLarge,
  ValidationFailed,
  NoBypass,
  NotDivisible,
  NotFound,
  HypothesisNotMet,
  MismatchBug,
  Io,
  Usage,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace twinflip
