#pragma once

#include <stdexcept>
#include <string>

namespace lab {

enum class ErrorKind {
  SingularMatrix,
  RankDeficient,
  ZeroRank,
  NoComplement,
  NotCanonical,
  NotRogersAdmissible,
  DomainError,
  NumericalFailure,
  NotOnManifold,
  ToleranceNotMet,
  ConfigError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when an integral misses its tolerance; the best available value rides along.
class ToleranceError : public Error {
 public:
  ToleranceError(const std::string& what, double best, double error_estimate)
      : Error(ErrorKind::ToleranceNotMet, what), best_(best), error_(error_estimate) {}
  double best() const noexcept { return best_; }
  double error_estimate() const noexcept { return error_; }

 private:
  double best_;
  double error_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace lab
