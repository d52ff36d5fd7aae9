#include "ifock/weyl.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ifock {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void check_dims(const WeylOp& w) {
  if (w.a.size() != w.b.size()) throw std::invalid_argument("WeylOp: a and b differ in dimension");
}

}  // namespace

WeylOp WeylOp::identity(std::size_t dim) {
  return WeylOp{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0), 0.0};
}

WeylOp WeylOp::adjoint() const {
  WeylOp out{a, b, -phase};
  for (auto& x : out.a) x = -x;
  for (auto& x : out.b) x = -x;
  return out;
}

double phase_distance(double theta1, double theta2) {
  return std::abs(std::remainder(theta1 - theta2, 2.0 * std::numbers::pi));
}

bool approx_equal(const WeylOp& x, const WeylOp& y, double tol) {
  if (x.dim() != y.dim()) return false;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (std::abs(x.a[i] - y.a[i]) > tol || std::abs(x.b[i] - y.b[i]) > tol) return false;
  }
  return phase_distance(x.phase, y.phase) <= tol;
}

WeylOp multiply(const WeylOp& left, const WeylOp& right, double hbar) {
  check_dims(left);
  check_dims(right);
  if (left.dim() != right.dim()) throw std::invalid_argument("multiply: dimension mismatch");
  WeylOp out{left.a, left.b, left.phase + right.phase};
  for (std::size_t i = 0; i < out.dim(); ++i) {
    out.a[i] += right.a[i];
    out.b[i] += right.b[i];
  }
  out.phase += 0.5 * hbar * (dot(left.a, right.b) - dot(right.a, left.b));
  return out;
}

WeylOp multiply_chain(std::span<const WeylOp> ops, double hbar) {
  if (ops.empty()) throw std::invalid_argument("multiply_chain: empty chain");
  WeylOp acc = ops.back();
  for (std::size_t j = ops.size() - 1; j-- > 0;) acc = multiply(acc, ops[j], hbar);
  return acc;
}

WeylOp evolve_free(const WeylOp& w, double t, double mass) {
  if (!(mass > 0.0)) throw std::invalid_argument("evolve_free: mass must be positive");
  WeylOp out = w;
  for (std::size_t i = 0; i < out.dim(); ++i) out.a[i] += (t / mass) * w.b[i];
  return out;
}

double momentum_action_phase(const WeylOp& w, std::span<const double> p, double hbar) {
  if (p.size() != w.dim()) throw std::invalid_argument("momentum_action: dimension mismatch");
  return w.phase + dot(w.a, p) + 0.5 * hbar * dot(w.a, w.b);
}

MomentumAction momentum_action(const WeylOp& w, std::span<const double> p, double hbar) {
  MomentumAction out;
  out.factor = std::polar(1.0, momentum_action_phase(w, p, hbar));
  out.momentum.assign(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size(); ++i) out.momentum[i] += hbar * w.b[i];
  return out;
}

}  // namespace ifock
