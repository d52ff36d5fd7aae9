#include "ifock/noise_algebra.h"

#include <numbers>
#include <stdexcept>

#include "ifock/free_fock.h"

namespace ifock {

EpsilonSeq NoiseWord::pattern() const {
  std::vector<Role> roles;
  roles.reserve(symbols.size());
  for (const auto& s : symbols) roles.push_back(s.role);
  return EpsilonSeq(std::move(roles));
}

std::optional<ContractionPlan> reduce_word(const NoiseWord& word, const PhysParams& pp) {
  pp.validate();
  const std::size_t len = word.symbols.size();
  // written order, left to right: position len down to 1
  BraKetWord tokens;
  for (std::size_t j = len; j >= 1; --j) {
    tokens.push_back(word.symbols[j - 1].role == Role::Creator ? BraKetToken::ket(j)
                                                                 : BraKetToken::bra(j));
  }
  const auto table = [&](std::size_t bra, std::size_t ket) {
    return overlap(word.symbols[bra - 1].time, word.symbols[ket - 1].time);
  };
  const BraKetReduction red = braket_reduce(tokens, table);
  if (!red.residual.empty() || len == 0) return std::nullopt;

  ContractionPlan plan;
  std::vector<Pair> pairs;
  for (const auto& [bra, ket] : red.contractions) pairs.push_back({bra, ket});
  plan.pairing = Pairing(std::move(pairs));
  if (!is_noncrossing(plan.pairing)) {
    throw std::logic_error("reduce_word: free reduction produced a crossing contraction");
  }
  plan.scalar = red.scalar;
  for (const auto& pr : plan.pairing.pairs()) {
    ContractionRecord rec;
    rec.pair = pr;
    const WeylOp absorb{{1.0 / pp.mass}, {1.0}, 0.0};
    const WeylOp emit{{-rec.tau_ratio / pp.mass}, {-1.0}, 0.0};
    rec.merged = multiply(absorb, emit, pp.hbar);
    if (rec.merged.b[0] != 0.0) throw std::logic_error("reduce_word: unbalanced contraction");
    plan.records.push_back(rec);
  }
  return plan;
}

cplx evaluate_plan(const ContractionPlan& plan, const NoiseWord& word, const PhysParams& pp,
                   const Dispersion& disp, double p) {
  pp.validate();
  if (pp.dim != 1) throw std::invalid_argument("evaluate_plan: requires dim = 1");
  const Pairing& pairing = plan.pairing;
  const std::size_t n = pairing.size();
  if (plan.scalar == 0.0) return 0.0;

  std::vector<std::size_t> parent(n, static_cast<std::size_t>(-1));
  std::vector<std::vector<std::size_t>> children(n);
  std::vector<std::size_t> roots;
  for (std::size_t h = 0; h < n; ++h) {
    std::size_t best = static_cast<std::size_t>(-1);
    for (std::size_t r : enclosing_pairs(pairing, h)) {
      if (best == static_cast<std::size_t>(-1) || pairing[r].emitter > pairing[best].emitter) {
        best = r;
      }
    }
    if (best == static_cast<std::size_t>(-1)) {
      roots.push_back(h);
    } else {
      children[best].push_back(h);
    }
  }

  // Phase rate of pair h per unit τ at momentum l: e^{−iωτ}e^{iω·2τ} from
  // the reservoir kernels, plus the merged Weyl factor acting on |l⟩.
  auto rate = [&](std::size_t h, double l, double k) {
    const WeylOp& m = plan.records[h].merged;
    const double ratio = plan.records[h].tau_ratio;
    const WeylOp scaled{{m.a[0] * k}, {m.b[0] * k}, m.phase * k * k};
    return (ratio - 1.0) * disp(k) + momentum_action_phase(scaled, std::span<const double>(&l, 1),
                                                           pp.hbar);
  };

  auto subtree = [&](auto&& self, std::size_t h, double l) -> cplx {
    const Pair& pr = pairing[h];
    const FormFactor dens =
        pair_density(word.symbols[pr.absorber - 1].factor, word.symbols[pr.emitter - 1].factor);
    cplx s = 0.0;
    for (const auto& r : shell_roots(pp, disp, l)) {
      const double residual = rate(h, l, r.k);
      if (std::abs(residual) > 1e-8 * (1.0 + std::abs(l * r.k) + disp(r.k) + r.k * r.k)) {
        throw std::logic_error("evaluate_plan: merged Weyl phase off the energy shell");
      }
      cplx term = dens(r.k) / r.jacobian;
      // momentum after the emission vertex
      const WeylOp emit{{0.0}, {-r.k}, 0.0};
      const double inner_l = momentum_action(emit, std::span<const double>(&l, 1), pp.hbar).momentum[0];
      for (std::size_t c : children[h]) {
        if (term == 0.0) break;
        term *= self(self, c, inner_l);
      }
      s += term;
    }
    return 2.0 * std::numbers::pi * s;
  };

  cplx v = plan.scalar;
  for (std::size_t r : roots) {
    if (v == 0.0) break;
    v *= subtree(subtree, r, p);
  }
  return v;
}

}  // namespace ifock
