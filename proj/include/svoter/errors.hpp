#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace svoter {

/// A chain hit its event budget before reaching an absorbing state.
class NonAbsorbed : public std::runtime_error {
 public:
  NonAbsorbed(const std::string& what, std::uint64_t events_used)
      : std::runtime_error(what), events_used_(events_used) {}
  std::uint64_t events_used() const noexcept { return events_used_; }

 private:
  std::uint64_t events_used_;
};

/// A request whose expected work exceeds a configured cap.
class SizingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric root-finder did not bracket or converge.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A walk path never entered the requested set.
class NeverVisits : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An evaluation point lies on (or numerically next to) a pole.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace svoter
