#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hat {

enum class ErrorCode {
  // taxonomy
  CycleDetected,
  MultipleRoots,
  MultipleParents,
  DanglingEdge,
  LeafWithChildren,
  EmptyInternalNode,
  DuplicateNode,
  UnknownNode,
  InvalidParentKind,
  NotUnseenLeaf,
  // annotation / support sets
  EmptyClass,
  MissingSignature,
  UnknownAttribute,
  InactiveAttribute,
  NoContrast,
  EmptyPositives,
  // classifier
  EmptySet,
  NonFiniteFeature,
  DimensionMismatch,
  InvalidCost,
  FallbackCost,
  // transfer / baselines
  AttributeUntransferable,
  ClassUnscorable,
  TooFewSamples,
  MissingRootClassifier,
  NoActiveAttributes,
  // eval
  LengthMismatch,
  EmptyGtClass,
  DegenerateLabels,
  // synth / io
  InvalidSpec,
  ParseError,
  SchemaError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Validation errors come from malformed inputs; everything else is a runtime failure.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hat
