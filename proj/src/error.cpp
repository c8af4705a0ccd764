#include "causalmamba/error.hpp"

namespace causalmamba {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::TooSmall: return "TooSmall";
    case Errc::NoRoot: return "NoRoot";
    case Errc::MultipleRoots: return "MultipleRoots";
    case Errc::DanglingParent: return "DanglingParent";
    case Errc::NegativeTimestamp: return "NegativeTimestamp";
    case Errc::DuplicateNode: return "DuplicateNode";
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::UnknownLabelString: return "UnknownLabelString";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::EmptyClass: return "EmptyClass";
    case Errc::MixedFeatureWidth: return "MixedFeatureWidth";
    case Errc::NonSquare: return "NonSquare";
    case Errc::NonFinite: return "NonFinite";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::UnsupportedPrimitive: return "UnsupportedPrimitive";
    case Errc::RepeatedBackward: return "RepeatedBackward";
    case Errc::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::AllMasked: return "AllMasked";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::IoError: return "IoError";
    case Errc::UnknownEvent: return "UnknownEvent";
    case Errc::BadCheckpoint: return "BadCheckpoint";
  }
  return "Unknown";
}

}  // namespace causalmamba
