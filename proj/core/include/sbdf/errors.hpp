#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sbdf {

/// A NaN or Inf showed up in a grid function.
class NonFiniteError : public std::domain_error {
 public:
  NonFiniteError(const std::string& what, int i, int j)
      : std::domain_error(what + ": non-finite value at node (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")"),
        i_(i),
        j_(j) {}
  int i() const { return i_; }
  int j() const { return j_; }

 private:
  int i_;
  int j_;
};

/// The fixed-point iteration hit its cap.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_increment, double rho)
      : std::runtime_error(what), last_increment_(last_increment), rho_(rho) {}
  double last_increment() const { return last_increment_; }
  double rho() const { return rho_; }

 private:
  double last_increment_;
  double rho_;
};

/// Bad configuration; `key()` names the offending `section.key`.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& msg)
      : std::runtime_error(key.empty() ? msg : key + ": " + msg), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace sbdf
