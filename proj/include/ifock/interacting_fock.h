#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ifock/p_element.h"
#include "ifock/partitions.h"
#include "ifock/spectral_model.h"

namespace ifock {

std::shared_ptr<const SpectralContext> make_context(const PhysParams& pp, const Dispersion& disp);

/// A step function Σ w_i χ_{[s_i, t_i)} on ℝ.
class TimeFactor {
 public:
  struct Step {
    double start;
    double end;
    cplx weight;
  };

  TimeFactor() = default;
  /// Throws std::invalid_argument on empty or overlapping steps.
  explicit TimeFactor(std::vector<Step> steps);

  /// χ_{[0,t]}
  static TimeFactor indicator(double t);

  const std::vector<Step>& steps() const { return steps_; }

  friend bool operator==(const TimeFactor& x, const TimeFactor& y);

 private:
  std::vector<Step> steps_;
};

/// ⟨α,β⟩ = ∫ ᾱβ, exact from interval overlaps.
cplx overlap(const TimeFactor& alpha, const TimeFactor& beta);

/// One elementary term coeff · (c ∗̲ (α ⊗ f)); `action` absent means c = 1.
struct ModuleTerm {
  cplx coeff{1.0, 0.0};
  TimeFactor time;
  FormFactor factor;
  std::optional<PElement> action;
};

// A finite sum of elementary terms α⊗f, each possibly carrying a left ∗̲
// action by a 𝒫-element.
class ModuleVector {
 public:
  ModuleVector() = default;
  ModuleVector(TimeFactor time, FormFactor factor);

  const std::vector<ModuleTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Adds a term, merging it into an existing term with the same time and
  /// form factor when neither carries an action.
  void add(ModuleTerm term);

  ModuleVector& operator+=(const ModuleVector& other);
  friend ModuleVector operator*(cplx s, const ModuleVector& v);

 private:
  std::vector<ModuleTerm> terms_;
};

/// c ∗̲ ψ, with b ∗̲ (c ∗̲ ψ) = (bc) ∗̲ ψ.
ModuleVector left_act(const PElement& c, const ModuleVector& psi);

/// (φ|ψ) ∈ 𝒫: Σ conj(a)·b·⟨α,β⟩·(c ∗ (f|g)) over term pairs. The bra must
/// not carry actions.
PElement inner(std::shared_ptr<const SpectralContext> ctx, const ModuleVector& phi,
               const ModuleVector& psi);

/// (φ₁⊙…⊙φₙ | ψ₁⊙…⊙ψₙ) in the nested form
/// (φₙ|(φₙ₋₁|…(φ₁|ψ₁)∗̲ψ₂…)∗̲ψₙ).
PElement nested_inner(std::shared_ptr<const SpectralContext> ctx,
                      const std::vector<ModuleVector>& phis,
                      const std::vector<ModuleVector>& psis);

// An element of the interacting Fock space truncated at max_level particles.
// Level 0 is a 𝒫-element. Each higher-level component is a sum of products
// s·(ψ₁⊙…⊙ψₙ), with s ∈ 𝒫 acting by the ordinary (right) module product.
class InteractingVector {
 public:
  struct Product {
    PElement scalar;
    std::vector<ModuleVector> factors;
  };

  explicit InteractingVector(std::size_t max_level);
  /// Φ = 1_𝒫 ⊕ 0 ⊕ 0 …
  static InteractingVector vacuum(std::size_t max_level);

  std::size_t max_level() const { return levels_.size(); }
  const PElement& level0() const { return level0_; }
  PElement& level0() { return level0_; }
  /// Products at level n ≥ 1.
  const std::vector<Product>& level(std::size_t n) const { return levels_.at(n - 1); }
  std::vector<Product>& level(std::size_t n) { return levels_.at(n - 1); }

 private:
  PElement level0_;
  std::vector<std::vector<Product>> levels_;
};

/// A†(φ): ψ₁⊙…⊙ψₙ ↦ φ⊙ψ₁⊙…⊙ψₙ. Throws std::length_error past max_level.
InteractingVector apply_creator(const ModuleVector& phi, const InteractingVector& v);

/// A(φ): ψ₁⊙…⊙ψₙ ↦ (φ|ψ₁)∗̲ψ₂⊙…⊙ψₙ, and 0 on level 0.
InteractingVector apply_annihilator(std::shared_ptr<const SpectralContext> ctx,
                                    const ModuleVector& phi, const InteractingVector& v);

/// ∏_j A^{ε_j}(φ_j) v, position 1 acting first.
InteractingVector apply_word(std::shared_ptr<const SpectralContext> ctx, const EpsilonSeq& eps,
                             const std::vector<ModuleVector>& phis, const InteractingVector& v);

/// (Φ | ∏_j A^{ε_j}(φ_j) Φ).
PElement vacuum_moment(std::shared_ptr<const SpectralContext> ctx, const EpsilonSeq& eps,
                       const std::vector<ModuleVector>& phis);

/// F̃ for F = f̄g.
PElement transform(std::shared_ptr<const SpectralContext> ctx, const FormFactor& f,
                   const FormFactor& g);

/// G̃ ∗ F̃ for F = f̄g.
PElement convolve(std::shared_ptr<const SpectralContext> ctx, const PElement& gt,
                  const FormFactor& f, const FormFactor& g);

}  // namespace ifock
