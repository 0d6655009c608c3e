#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace autotrack {

enum class Errc {
  PatchTooSmall,
  NonRealInverse,
  BankShapeMismatch,
  AdmmDiverged,
  InvalidInitBox,
  FrameDegenerate,
  SequenceMalformed,
  GtLengthMismatch,
  ConfigUnknownKey,
  ConfigInvalid,
  CorrespondenceFailed,
  RefineDegenerate,
  InvalidArgument,
  Io,
};

/// Stable identifier for an error code, e.g. "patch-too-small".
std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace autotrack
