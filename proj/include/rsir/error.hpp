#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsir {

enum class ErrorKind {
  Parse,
  Io,
  Config,
  Contract,
  Domain,
  EmptyCorpus,
  Load,
};

const char* error_kind_name(ErrorKind kind);

/// Base error for everything the library throws. The kind is what the CLI
/// maps onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Collects validation failures so one Config error can list them all.
class ConfigProblems {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) list_.push_back(what);
  }
  /// Runs a validator and records its Config error instead of throwing.
  template <typename Fn>
  void absorb(Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Config) throw;
      list_.emplace_back(e.what());
    }
  }
  bool empty() const { return list_.empty(); }
  /// Throws Error(Config) joining every recorded problem with "; ".
  void raise() const;

 private:
  std::vector<std::string> list_;
};

}  // namespace rsir
