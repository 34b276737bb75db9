#include "symprox/errors.hpp"

#include <sstream>

namespace symprox {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::TooLarge: return "TooLarge";
    case Errc::InvalidGrid: return "InvalidGrid";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::DegenerateGrid: return "DegenerateGrid";
    case Errc::Unevaluable: return "Unevaluable";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::NoSolution: return "NoSolution";
    case Errc::BracketFailure: return "BracketFailure";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

static std::string no_conv_message(const std::string& where, long it, double r) {
  std::ostringstream os;
  os << where << ": no convergence after " << it << " iterations (residual " << r << ")";
  return os.str();
}

NoConvergence::NoConvergence(const std::string& where, long iterations, double residual)
    : Error(Errc::NoConvergence, no_conv_message(where, iterations, residual)),
      where_(where),
      iterations_(iterations),
      residual_(residual) {}

void fail(Errc code, const std::string& what) {
  throw Error(code, std::string(errc_name(code)) + ": " + what);
}

}  // namespace symprox
