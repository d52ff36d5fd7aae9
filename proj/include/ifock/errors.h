#pragma once

#include <stdexcept>
#include <string>

namespace ifock {

/// An energy shell Δ(l,·)=0 with a (near-)tangent root: the golden-rule
/// density |∂Δ/∂k|⁻¹ diverges there.
class DegenerateShell : public std::runtime_error {
 public:
  DegenerateShell(double l, double root, double jacobian);

  double momentum() const { return l_; }
  double root() const { return root_; }
  double jacobian() const { return jacobian_; }

 private:
  double l_;
  double root_;
  double jacobian_;
};

class QuadratureFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ifock
