#include "autotrack/error.hpp"

namespace autotrack {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::PatchTooSmall: return "patch-too-small";
    case Errc::NonRealInverse: return "non-real-inverse";
    case Errc::BankShapeMismatch: return "bank-shape-mismatch";
    case Errc::AdmmDiverged: return "admm-diverged";
    case Errc::InvalidInitBox: return "invalid-init-box";
    case Errc::FrameDegenerate: return "frame-degenerate";
    case Errc::SequenceMalformed: return "sequence-malformed";
    case Errc::GtLengthMismatch: return "gt-length-mismatch";
    case Errc::ConfigUnknownKey: return "config-unknown-key";
    case Errc::ConfigInvalid: return "config-invalid";
    case Errc::CorrespondenceFailed: return "correspondence-failed";
    case Errc::RefineDegenerate: return "refine-degenerate";
    case Errc::InvalidArgument: return "invalid-argument";
    case Errc::Io: return "io-error";
  }
  return "unknown";
}

namespace {
std::string compose(Errc code, const std::string& detail) {
  std::string msg(errc_name(code));
  if (!detail.empty()) {
    msg += ": ";
    msg += detail;
  }
  return msg;
}
}  // namespace

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(compose(code, detail)), code_(code), detail_(detail) {}

}  // namespace autotrack
