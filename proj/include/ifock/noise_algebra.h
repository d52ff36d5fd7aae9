#pragma once

#include <optional>
#include <vector>

#include "ifock/interacting_fock.h"
#include "ifock/partitions.h"
#include "ifock/weyl.h"

namespace ifock {

/// A(α⊗f) or A†(α⊗f).
struct NoiseSymbol {
  Role role;
  TimeFactor time;
  FormFactor factor;
};

/// Symbols by position: element 0 is the rightmost factor.
struct NoiseWord {
  std::vector<NoiseSymbol> symbols;

  EpsilonSeq pattern() const;
};

/// One contraction α(τ,k)α†(τ′,k′) = δ(2τ − τ′)δ(k − k′): the creator's
/// integration variables are replaced by τ′ = 2τ, k′ = k, and the two Weyl
/// factors of the pair collapse into `merged` (given at τ = 1, k = 1; it is
/// W(−τk/m, 0) e^{iħτk²/2m}, linear in τ and quadratic in k).
struct ContractionRecord {
  Pair pair;
  double tau_ratio = 2.0;
  WeylOp merged;
};

struct ContractionPlan {
  Pairing pairing;
  std::vector<ContractionRecord> records;
  /// ∏ ⟨α_{m̄}, α_m⟩ from the bra-ket rule.
  cplx scalar{1.0, 0.0};
};

/// Free normal-ordering of the word. nullopt when the word reduces to zero
/// (trivial pattern). Throws std::logic_error if the reduction produced a
/// crossing contraction.
std::optional<ContractionPlan> reduce_word(const NoiseWord& word, const PhysParams& pp);

/// Vacuum expectation of a reduced word at system momentum p: each pair's
/// merged Weyl factor acts on the momentum left by its enclosing emissions,
/// and its τ-integral becomes 2πδ of the resulting phase rate.
cplx evaluate_plan(const ContractionPlan& plan, const NoiseWord& word, const PhysParams& pp,
                   const Dispersion& disp, double p);

}  // namespace ifock
