#include "qmt/error.hpp"

namespace qmt {

const char* err_name(Err e) {
  switch (e) {
    case Err::SumNotOne: return "SumNotOne";
    case Err::NegativeWeight: return "NegativeWeight";
    case Err::ForeignAtoms: return "ForeignAtoms";
    case Err::NullCarrier: return "NullCarrier";
    case Err::NotRefinement: return "NotRefinement";
    case Err::SpaceMismatch: return "SpaceMismatch";
    case Err::BoundViolation: return "BoundViolation";
    case Err::PreconditionViolated: return "PreconditionViolated";
    case Err::FluctuationCertificateMissing: return "FluctuationCertificateMissing";
    case Err::CertificateMissing: return "CertificateMissing";
    case Err::SearchExhausted: return "SearchExhausted";
    case Err::IndexOutOfRange: return "IndexOutOfRange";
    case Err::UnknownName: return "UnknownName";
    case Err::ParseError: return "ParseError";
    case Err::ValidationError: return "ValidationError";
    case Err::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace qmt
