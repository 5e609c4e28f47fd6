#pragma once
// errors.hpp - error taxonomy shared by all modules

#include <stdexcept>
#include <string>

namespace rieszgas {

// Invalid parameter combinations (pole at s = d, singular configurations, ...)
class pole_error : public std::domain_error {
  public:
    explicit pole_error(const std::string& msg) : std::domain_error(msg) {}
};

// Iterative schemes that failed to reach their tolerance.
class convergence_error : public std::runtime_error {
  public:
    explicit convergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rieszgas
