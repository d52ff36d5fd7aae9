#include "ifock/moment_engine.h"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "ifock/quadrature.h"

namespace ifock {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_dim1(const PhysParams& pp, const char* where) {
  pp.validate();
  if (pp.dim != 1) throw std::invalid_argument(std::string(where) + ": requires dim = 1");
}

// Nesting forest of a non-crossing pairing: parent[h] is the innermost pair
// enclosing h, or npos for a root.
struct Forest {
  std::vector<std::size_t> parent;
  std::vector<std::vector<std::size_t>> children;
  std::vector<std::size_t> roots;
};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

Forest build_forest(const Pairing& pairing) {
  Forest f;
  const std::size_t n = pairing.size();
  f.parent.assign(n, kNone);
  f.children.resize(n);
  for (std::size_t h = 0; h < n; ++h) {
    std::size_t best = kNone;
    for (std::size_t r : enclosing_pairs(pairing, h)) {
      // innermost enclosing pair has the narrowest interval
      if (best == kNone || pairing[r].absorber - pairing[r].emitter <
                               pairing[best].absorber - pairing[best].emitter) {
        best = r;
      }
    }
    f.parent[h] = best;
    if (best == kNone) {
      f.roots.push_back(h);
    } else {
      f.children[best].push_back(h);
    }
  }
  return f;
}

FormFactor pair_factor(const CorrelatorSpec& spec, const Pair& pr) {
  return pair_density(spec.factors[pr.absorber - 1], spec.factors[pr.emitter - 1]);
}

double time_factor(const CorrelatorSpec& spec, const Pairing& pairing) {
  double t = 1.0;
  for (const auto& pr : pairing.pairs()) {
    t *= std::min(spec.times[pr.absorber - 1], spec.times[pr.emitter - 1]);
  }
  return t;
}

}  // namespace

void CorrelatorSpec::validate() const {
  if (times.size() != eps.size() || factors.size() != eps.size()) {
    throw std::invalid_argument("CorrelatorSpec: times and factors must match the word length");
  }
  for (double t : times) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("CorrelatorSpec: times must be finite and non-negative");
    }
  }
  for (const auto& f : factors) f.validate();
  if (!std::isfinite(probe_p)) throw std::invalid_argument("CorrelatorSpec: probe_p not finite");
}

MomentResult limit_moment(const CorrelatorSpec& spec, const PhysParams& pp,
                          const Dispersion& disp) {
  require_dim1(pp, "limit_moment");
  spec.validate();
  MomentResult out;
  out.pairing = wigner_pairing(spec.eps);
  if (!out.pairing) return out;
  const Pairing& pairing = *out.pairing;
  out.time_factor = time_factor(spec, pairing);
  for (const auto& pr : pairing.pairs()) out.shells.push_back({pr, {}, {}});

  const Forest forest = build_forest(pairing);
  std::vector<FormFactor> density;
  for (const auto& pr : pairing.pairs()) density.push_back(pair_factor(spec, pr));

  auto subtree = [&](auto&& self, std::size_t h, double l) -> cplx {
    const auto roots = shell_roots(pp, disp, l);
    out.shells[h].momenta.push_back(l);
    out.shells[h].roots.push_back(roots);
    cplx s = 0.0;
    for (const auto& r : roots) {
      cplx term = density[h](r.k) / r.jacobian;
      for (std::size_t c : forest.children[h]) {
        if (term == 0.0) break;
        term *= self(self, c, l - pp.hbar * r.k);
      }
      s += term;
    }
    return kTwoPi * s;
  };

  cplx v = out.time_factor;
  for (std::size_t r : forest.roots) {
    if (v == 0.0) break;
    v *= subtree(subtree, r, spec.probe_p);
  }
  out.value = v;
  return out;
}

namespace {

cplx regulated_subtree(const PhysParams& pp, const Dispersion& disp, const Forest& forest,
                       const std::vector<FormFactor>& density, std::size_t h, double l,
                       double eta, double rel_tol) {
  const auto [lo, hi] = support_window(density[h]);
  auto delta = [&](double k) { return delta_energy(pp, disp, l, k); };
  std::vector<double> interior = quad::near_zeros(delta, lo, hi, 200);
  for (const auto& r : shell_roots_unchecked(pp, disp, l)) interior.push_back(r.k);
  const auto points = quad::make_breakpoints(lo, hi, interior);
  auto integrand = [&](double k) -> cplx {
    const double d = delta(k);
    cplx v = density[h](k) * (2.0 * eta / (d * d + eta * eta));
    for (std::size_t c : forest.children[h]) {
      if (v == 0.0) break;
      v *= regulated_subtree(pp, disp, forest, density, c, l - pp.hbar * k, eta, rel_tol * 10.0);
    }
    return v;
  };
  quad::Options opts;
  opts.rel_tol = rel_tol;
  opts.abs_tol = 1e-14 * std::abs(density[h].amplitude) * density[h].width;
  return quad::integrate(integrand, points, opts).value;
}

}  // namespace

cplx limit_moment_oscillatory(const CorrelatorSpec& spec, const PhysParams& pp,
                              const Dispersion& disp, double eta) {
  require_dim1(pp, "limit_moment_oscillatory");
  spec.validate();
  if (spec.eps.order() > 2) {
    throw std::invalid_argument("limit_moment_oscillatory: supports n <= 2 only");
  }
  const auto pairing = wigner_pairing(spec.eps);
  if (!pairing) return 0.0;
  const double tf = time_factor(spec, *pairing);
  if (tf == 0.0) return 0.0;
  const Forest forest = build_forest(*pairing);
  std::vector<FormFactor> density;
  for (const auto& pr : pairing->pairs()) density.push_back(pair_factor(spec, pr));
  if (!(eta > 0.0)) eta = default_eta(pp, disp, density[forest.roots.front()], spec.probe_p);

  auto at = [&](double e) {
    cplx v = tf;
    for (std::size_t r : forest.roots) {
      v *= regulated_subtree(pp, disp, forest, density, r, spec.probe_p, e, 1e-9);
    }
    return v;
  };
  return quad::richardson3(at(eta), at(eta / 2.0), at(eta / 4.0));
}

BoseResult bose_moment(const CorrelatorSpec& spec, double omega_probe, const PhysParams& pp,
                       const Dispersion& disp) {
  require_dim1(pp, "bose_moment");
  spec.validate();
  BoseResult out;
  const auto pairings = enumerate_pairings(spec.eps);
  out.pairing_count = pairings.size();
  for (const auto& pairing : pairings) {
    cplx term = time_factor(spec, pairing);
    for (const auto& pr : pairing.pairs()) {
      term *= bose_kernel(pp, disp, omega_probe, spec.factors[pr.absorber - 1],
                          spec.factors[pr.emitter - 1]);
    }
    out.value += term;
  }
  return out;
}

}  // namespace ifock
