#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ifock {

/// e^{iθ} W(a,b) with W(a,b) = exp(i(a·p + b·q)), [q_j, p_l] = iħ δ_jl.
///
/// The phase is accumulated as a plain real angle; compare with
/// phase_distance, which works modulo 2π.
struct WeylOp {
  std::vector<double> a;
  std::vector<double> b;
  double phase = 0.0;

  static WeylOp identity(std::size_t dim);

  std::size_t dim() const { return a.size(); }
  WeylOp adjoint() const;
};

/// Distance between two angles on the circle, in [0, π].
double phase_distance(double theta1, double theta2);

/// True when (a,b) agree to `tol` componentwise and the phases agree mod 2π.
bool approx_equal(const WeylOp& x, const WeylOp& y, double tol);

/// left · right, using W(a₁,b₁)W(a₂,b₂) = W(a₁+a₂,b₁+b₂) e^{(iħ/2)(a₁·b₂ − a₂·b₁)}.
WeylOp multiply(const WeylOp& left, const WeylOp& right, double hbar);

/// W_n ⋯ W_2 W_1 for ops = {W_1, ..., W_n}: element 0 is the rightmost
/// factor.
WeylOp multiply_chain(std::span<const WeylOp> ops, double hbar);

/// Free-particle Heisenberg evolution: W(a,b) ↦ W(a + (t/m) b, b).
WeylOp evolve_free(const WeylOp& w, double t, double mass);

struct MomentumAction {
  std::complex<double> factor;
  std::vector<double> momentum;
};

/// e^{iθ}W(a,b)|p⟩ = e^{iθ} e^{i(a·p + ħ a·b/2)} |p + ħ b⟩.
MomentumAction momentum_action(const WeylOp& w, std::span<const double> p, double hbar);

/// The angle of the same action, unwrapped: θ + a·p + ħ a·b/2.
double momentum_action_phase(const WeylOp& w, std::span<const double> p, double hbar);

}  // namespace ifock
