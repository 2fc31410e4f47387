#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fleetrisk {

enum class ErrorKind {
  Io,
  Schema,
  Parse,
  Label,
  Invariant,
  Count,
  Uniqueness,
  Config,
  Split,
  Extraction,
  Domain,
  Mapping,
  DegenerateTarget,
  Strategy,
  TargetConstruction,
  Alignment,
  DegenerateSubsample,
  Quota,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and tests)
// can tell a schema problem from a quota violation without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fleetrisk
