#include "lab/error.hpp"

namespace lab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::ZeroRank: return "ZeroRank";
    case ErrorKind::NoComplement: return "NoComplement";
    case ErrorKind::NotCanonical: return "NotCanonical";
    case ErrorKind::NotRogersAdmissible: return "NotRogersAdmissible";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::NotOnManifold: return "NotOnManifold";
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace lab
