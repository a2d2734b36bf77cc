#pragma once

#include <stdexcept>
#include <string>

namespace wsro {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent or out-of-range configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An article or vertex that was expected to exist does not.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or version-mismatched input stream.
class DecodeError : public Error {
 public:
  using Error::Error;
};

class NegativeCycleError : public Error {
 public:
  NegativeCycleError(std::size_t source, std::size_t vertex)
      : Error("negative cycle reachable from source " + std::to_string(source) +
              " (affects vertex " + std::to_string(vertex) + ")"),
        source_(source),
        vertex_(vertex) {}

  std::size_t source() const noexcept { return source_; }
  std::size_t vertex() const noexcept { return vertex_; }

 private:
  std::size_t source_;
  std::size_t vertex_;
};

// Problem size exceeds what an exhaustive solver is allowed to enumerate.
class LimitError : public Error {
 public:
  using Error::Error;
};

// Statistic undefined for the given sample.
class StatsError : public Error {
 public:
  using Error::Error;
};

}  // namespace wsro
