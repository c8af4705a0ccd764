#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace causalmamba {

enum class Errc {
  // data model
  TooSmall,
  NoRoot,
  MultipleRoots,
  DanglingParent,
  NegativeTimestamp,
  DuplicateNode,
  FileNotFound,
  SchemaViolation,
  MalformedLine,
  UnknownLabelString,
  InvalidConfig,
  EmptyClass,
  MixedFeatureWidth,
  // numerics
  NonSquare,
  NonFinite,
  ShapeMismatch,
  UnsupportedPrimitive,
  RepeatedBackward,
  NonFiniteEvaluation,
  // model
  IndexOutOfRange,
  AllMasked,
  EmptyGraph,
  NonConvergence,
  NonFiniteLoss,
  LengthMismatch,
  // intervention / io
  KTooLarge,
  IoError,
  UnknownEvent,
  BadCheckpoint,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace causalmamba
