#include "hat/error.hpp"

namespace hat {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::MultipleRoots: return "MultipleRoots";
    case ErrorCode::MultipleParents: return "MultipleParents";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::LeafWithChildren: return "LeafWithChildren";
    case ErrorCode::EmptyInternalNode: return "EmptyInternalNode";
    case ErrorCode::DuplicateNode: return "DuplicateNode";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::InvalidParentKind: return "InvalidParentKind";
    case ErrorCode::NotUnseenLeaf: return "NotUnseenLeaf";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::MissingSignature: return "MissingSignature";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::InactiveAttribute: return "InactiveAttribute";
    case ErrorCode::NoContrast: return "NoContrast";
    case ErrorCode::EmptyPositives: return "EmptyPositives";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidCost: return "InvalidCost";
    case ErrorCode::FallbackCost: return "FallbackCost";
    case ErrorCode::AttributeUntransferable: return "AttributeUntransferable";
    case ErrorCode::ClassUnscorable: return "ClassUnscorable";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::MissingRootClassifier: return "MissingRootClassifier";
    case ErrorCode::NoActiveAttributes: return "NoActiveAttributes";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyGtClass: return "EmptyGtClass";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleDetected:
    case ErrorCode::MultipleRoots:
    case ErrorCode::MultipleParents:
    case ErrorCode::DanglingEdge:
    case ErrorCode::LeafWithChildren:
    case ErrorCode::EmptyInternalNode:
    case ErrorCode::DuplicateNode:
    case ErrorCode::UnknownNode:
    case ErrorCode::InvalidParentKind:
    case ErrorCode::NotUnseenLeaf:
    case ErrorCode::EmptyClass:
    case ErrorCode::MissingSignature:
    case ErrorCode::UnknownAttribute:
    case ErrorCode::NonFiniteFeature:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidCost:
    case ErrorCode::LengthMismatch:
    case ErrorCode::EmptyGtClass:
    case ErrorCode::InvalidSpec:
    case ErrorCode::ParseError:
    case ErrorCode::SchemaError:
      return true;
    default:
      return false;
  }
}

}  // namespace hat
