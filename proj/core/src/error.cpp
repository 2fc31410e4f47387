#include "fleetrisk/error.hpp"

namespace fleetrisk {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "io error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Label: return "label error";
    case ErrorKind::Invariant: return "invariant violation";
    case ErrorKind::Count: return "count error";
    case ErrorKind::Uniqueness: return "uniqueness error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Split: return "split error";
    case ErrorKind::Extraction: return "extraction error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Mapping: return "mapping error";
    case ErrorKind::DegenerateTarget: return "degenerate-target error";
    case ErrorKind::Strategy: return "strategy error";
    case ErrorKind::TargetConstruction: return "target-construction error";
    case ErrorKind::Alignment: return "alignment error";
    case ErrorKind::DegenerateSubsample: return "degenerate-subsample error";
    case ErrorKind::Quota: return "quota error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace fleetrisk
