#include "rsir/error.hpp"

namespace rsir {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Contract: return "contract violation";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::EmptyCorpus: return "empty corpus";
    case ErrorKind::Load: return "load error";
  }
  return "error";
}

void ConfigProblems::raise() const {
  if (list_.empty()) return;
  std::string joined;
  for (const auto& p : list_) joined += (joined.empty() ? "" : "; ") + p;
  throw Error(ErrorKind::Config, joined);
}

}  // namespace rsir
