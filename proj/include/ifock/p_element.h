#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>

#include "ifock/spectral_model.h"

namespace ifock {

/// Physical data shared by every shell-evaluating node of an expression.
struct SpectralContext {
  PhysParams phys;
  Dispersion dispersion;
};

// An element of the commutative algebra of functions of the particle
// momentum p on which correlators are diagonal.
//
// Represented as an immutable expression tree. Leaves are constants and
// energy-shell transforms F̃; interior nodes are sums, scalar multiples,
// pointwise products and the shifted convolution G̃∗F̃. Evaluation is lazy
// and memoized per node and per p (thread-safe), since shells move with p
// and any fixed grid would alias near shell edges.
class PElement {
 public:
  enum class Kind { Constant, Transform, Convolution, Sum, Product, Scale };

  /// The zero element.
  PElement();

  static PElement constant(cplx c);
  static PElement one() { return constant(1.0); }

  /// p ↦ 2π Σ_{Δ(p,k_r)=0} F(k_r)/|∂Δ/∂k(k_r)|.
  static PElement transform(std::shared_ptr<const SpectralContext> ctx, FormFactor density);

  /// (G̃∗F̃)(p) = 2π Σ_{Δ(p,k_r)=0} G̃(p − ħk_r) F(k_r)/|∂Δ/∂k(k_r)|.
  static PElement convolution(std::shared_ptr<const SpectralContext> ctx, PElement inner,
                              FormFactor density);

  Kind kind() const;
  bool is_zero() const;
  /// Value of a Constant node.
  cplx constant_value() const;

  /// Evaluates at momentum p (d = 1). Throws DegenerateShell if a shell met
  /// during evaluation is tangent.
  cplx operator()(double p) const;

  /// Human-readable expression, e.g. "((T0 * T1) # T2)" where # is ∗.
  std::string describe() const;

  friend PElement operator+(const PElement& x, const PElement& y);
  friend PElement operator-(const PElement& x, const PElement& y);
  /// Pointwise (ordinary algebra) product.
  friend PElement operator*(const PElement& x, const PElement& y);
  friend PElement operator*(cplx s, const PElement& x);

  struct Node;

 private:
  explicit PElement(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  friend PElement convolve(const PElement& lhs, const PElement& rhs);
  std::shared_ptr<const Node> node_;
};

/// lhs ∗ rhs for a right operand built from transforms: linear in rhs, with
/// lhs ∗ F̃ the shifted convolution and lhs ∗ (c ∗ F̃) = (lhs·c) ∗ F̃.
/// Throws std::invalid_argument when rhs contains a bare constant or
/// pointwise product at top level (no shell to convolve over).
PElement convolve(const PElement& lhs, const PElement& rhs);

/// |x(p) − y(p)| ≤ tol·(1 + max(|x(p)|, |y(p)|)) at every p in grid.
bool approx_equal(const PElement& x, const PElement& y, std::span<const double> grid, double tol);

}  // namespace ifock
