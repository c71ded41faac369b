#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shjb {

enum class ErrorCode {
  // model
  UnknownModel,
  NonPositiveEta,
  DegenerateDiffusion,
  NegativeIntensity,
  BadParameter,
  UnboundedRatio,
  // hamiltonian
  NonFiniteInput,
  NegativeValue,
  DegenerateDenominator,
  // envelopes
  OutsideDeltaWindow,
  EmptyWindow,
  // pdesolver
  BadGridParams,
  SingularTridiagonal,
  OutOfGrid,
  // odebench
  BlowupBackward,
  NotSeparable,
  // simulator
  SurfaceGapError,
  BadSimulationParams,
  // config / io
  UnknownKey,
  DuplicateKey,
  TypeMismatch,
  MissingRequired,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace shjb
