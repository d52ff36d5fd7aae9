#include "ifock/interacting_fock.h"

#include <algorithm>
#include <stdexcept>

namespace ifock {

std::shared_ptr<const SpectralContext> make_context(const PhysParams& pp, const Dispersion& disp) {
  pp.validate();
  if (pp.dim != 1) throw std::invalid_argument("interacting Fock space: requires dim = 1");
  return std::make_shared<const SpectralContext>(SpectralContext{pp, disp});
}

TimeFactor::TimeFactor(std::vector<Step> steps) : steps_(std::move(steps)) {
  std::sort(steps_.begin(), steps_.end(),
            [](const Step& a, const Step& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (!(steps_[i].end > steps_[i].start)) {
      throw std::invalid_argument("TimeFactor: empty or reversed step");
    }
    if (i > 0 && steps_[i].start < steps_[i - 1].end) {
      throw std::invalid_argument("TimeFactor: overlapping steps");
    }
  }
}

TimeFactor TimeFactor::indicator(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("TimeFactor::indicator: t must be >= 0");
  if (t == 0.0) return TimeFactor();
  return TimeFactor({{0.0, t, 1.0}});
}

bool operator==(const TimeFactor& x, const TimeFactor& y) {
  if (x.steps_.size() != y.steps_.size()) return false;
  for (std::size_t i = 0; i < x.steps_.size(); ++i) {
    const auto& a = x.steps_[i];
    const auto& b = y.steps_[i];
    if (a.start != b.start || a.end != b.end || a.weight != b.weight) return false;
  }
  return true;
}

cplx overlap(const TimeFactor& alpha, const TimeFactor& beta) {
  cplx s = 0.0;
  for (const auto& a : alpha.steps()) {
    for (const auto& b : beta.steps()) {
      const double len = std::min(a.end, b.end) - std::max(a.start, b.start);
      if (len > 0.0) s += std::conj(a.weight) * b.weight * len;
    }
  }
  return s;
}

namespace {

bool same_factor(const FormFactor& f, const FormFactor& g) {
  return f.amplitude == g.amplitude && f.center == g.center && f.width == g.width;
}

}  // namespace

ModuleVector::ModuleVector(TimeFactor time, FormFactor factor) {
  factor.validate();
  terms_.push_back({1.0, std::move(time), std::move(factor), std::nullopt});
}

void ModuleVector::add(ModuleTerm term) {
  if (term.coeff == 0.0) return;
  if (!term.action) {
    for (auto& t : terms_) {
      if (!t.action && t.time == term.time && same_factor(t.factor, term.factor)) {
        t.coeff += term.coeff;
        return;
      }
    }
  }
  terms_.push_back(std::move(term));
}

ModuleVector& ModuleVector::operator+=(const ModuleVector& other) {
  for (const auto& t : other.terms_) add(t);
  return *this;
}

ModuleVector operator*(cplx s, const ModuleVector& v) {
  ModuleVector out;
  for (auto t : v.terms_) {
    t.coeff *= s;
    out.add(std::move(t));
  }
  return out;
}

ModuleVector left_act(const PElement& c, const ModuleVector& psi) {
  ModuleVector out;
  for (auto t : psi.terms()) {
    t.action = t.action ? c * *t.action : c;
    out.add(std::move(t));
  }
  return out;
}

PElement transform(std::shared_ptr<const SpectralContext> ctx, const FormFactor& f,
                   const FormFactor& g) {
  return PElement::transform(std::move(ctx), pair_density(f, g));
}

PElement convolve(std::shared_ptr<const SpectralContext> ctx, const PElement& gt,
                  const FormFactor& f, const FormFactor& g) {
  return PElement::convolution(std::move(ctx), gt, pair_density(f, g));
}

PElement inner(std::shared_ptr<const SpectralContext> ctx, const ModuleVector& phi,
               const ModuleVector& psi) {
  PElement out;
  for (const auto& a : phi.terms()) {
    if (a.action) throw std::invalid_argument("inner: bra terms must not carry a left action");
    for (const auto& b : psi.terms()) {
      const cplx w = std::conj(a.coeff) * b.coeff * overlap(a.time, b.time);
      if (w == 0.0) continue;
      const PElement k = b.action ? convolve(ctx, *b.action, a.factor, b.factor)
                                  : transform(ctx, a.factor, b.factor);
      out = out + w * k;
    }
  }
  return out;
}

PElement nested_inner(std::shared_ptr<const SpectralContext> ctx,
                      const std::vector<ModuleVector>& phis,
                      const std::vector<ModuleVector>& psis) {
  if (phis.size() != psis.size() || phis.empty()) {
    throw std::invalid_argument("nested_inner: need equal, non-zero lengths");
  }
  PElement acc = inner(ctx, phis[0], psis[0]);
  for (std::size_t j = 1; j < phis.size(); ++j) {
    acc = inner(ctx, phis[j], left_act(acc, psis[j]));
  }
  return acc;
}

InteractingVector::InteractingVector(std::size_t max_level) : levels_(max_level) {}

InteractingVector InteractingVector::vacuum(std::size_t max_level) {
  InteractingVector v(max_level);
  v.level0_ = PElement::one();
  return v;
}

InteractingVector apply_creator(const ModuleVector& phi, const InteractingVector& v) {
  const std::size_t cap = v.max_level();
  InteractingVector out(cap);
  if (!v.level0().is_zero()) {
    if (cap < 1) throw std::length_error("apply_creator: level capacity exceeded");
    out.level(1).push_back({v.level0(), {phi}});
  }
  for (std::size_t n = 1; n <= cap; ++n) {
    if (v.level(n).empty()) continue;
    if (n + 1 > cap) throw std::length_error("apply_creator: level capacity exceeded");
    for (const auto& prod : v.level(n)) {
      auto factors = prod.factors;
      factors.insert(factors.begin(), phi);
      out.level(n + 1).push_back({prod.scalar, std::move(factors)});
    }
  }
  return out;
}

InteractingVector apply_annihilator(std::shared_ptr<const SpectralContext> ctx,
                                    const ModuleVector& phi, const InteractingVector& v) {
  const std::size_t cap = v.max_level();
  InteractingVector out(cap);
  for (std::size_t n = 1; n <= cap; ++n) {
    for (const auto& prod : v.level(n)) {
      const PElement head = inner(ctx, phi, prod.factors.front());
      if (n == 1) {
        out.level0() = out.level0() + head * prod.scalar;
        continue;
      }
      std::vector<ModuleVector> rest(prod.factors.begin() + 1, prod.factors.end());
      rest.front() = left_act(head, rest.front());
      out.level(n - 1).push_back({prod.scalar, std::move(rest)});
    }
  }
  return out;
}

InteractingVector apply_word(std::shared_ptr<const SpectralContext> ctx, const EpsilonSeq& eps,
                             const std::vector<ModuleVector>& phis, const InteractingVector& v) {
  if (phis.size() != eps.size()) throw std::invalid_argument("apply_word: length mismatch");
  InteractingVector cur = v;
  for (std::size_t j = 1; j <= eps.size(); ++j) {
    cur = eps.is_creator(j) ? apply_creator(phis[j - 1], cur)
                            : apply_annihilator(ctx, phis[j - 1], cur);
  }
  return cur;
}

PElement vacuum_moment(std::shared_ptr<const SpectralContext> ctx, const EpsilonSeq& eps,
                       const std::vector<ModuleVector>& phis) {
  if (!is_nontrivial(eps)) return PElement();
  return apply_word(ctx, eps, phis, InteractingVector::vacuum(eps.order())).level0();
}

}  // namespace ifock
