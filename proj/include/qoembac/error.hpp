#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qoembac {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based.
class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Well-formed input whose structure violates an invariant (ordering, lengths, GoP layout).
class StructureError : public Error {
  public:
    using Error::Error;
};

/// A computation had nothing to work on (empty window, no sessions, no traffic).
class NoDataError : public Error {
  public:
    using Error::Error;
};

/// Argument outside the domain of a function.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// β model evaluated outside (0, 1].
class OutOfRegionError : public DomainError {
  public:
    OutOfRegionError(double c_l_mbps, std::size_t n, double beta)
        : DomainError("beta model out of region at c_l=" + std::to_string(c_l_mbps) +
                      " Mbps, n=" + std::to_string(n) + " (beta=" + std::to_string(beta) + ")"),
          c_l_mbps_(c_l_mbps), n_(n), beta_(beta) {}
    double c_l_mbps() const noexcept { return c_l_mbps_; }
    std::size_t n() const noexcept { return n_; }
    double beta() const noexcept { return beta_; }

  private:
    double c_l_mbps_;
    std::size_t n_;
    double beta_;
};

/// Invalid simulation or scenario configuration.
class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace qoembac
