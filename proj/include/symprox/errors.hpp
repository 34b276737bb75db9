#pragma once

#include <stdexcept>
#include <string>

namespace symprox {

enum class Errc {
  InvalidArgument,
  SizeMismatch,
  TooLarge,
  InvalidGrid,
  OutOfRange,
  DegenerateGrid,
  Unevaluable,
  NoConvergence,
  NoSolution,
  BracketFailure,
  Io,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& where, long iterations, double residual);
  const std::string& where() const { return where_; }
  long iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  std::string where_;
  long iterations_;
  double residual_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace symprox
