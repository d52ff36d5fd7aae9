#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "gaussian_integral.h"
#include "ifock/moment_engine.h"
#include "ifock/quadrature.h"
#include "ifock/weyl.h"

namespace ifock {

namespace {

// Phase rate of one vertex as a quadratic form in the pair momenta:
// kᵀAk + b·k + c.
struct QuadForm {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double c = 0.0;

  explicit QuadForm(Eigen::Index n) : A(Eigen::MatrixXd::Zero(n, n)), b(Eigen::VectorXd::Zero(n)) {}

  double operator()(const Eigen::VectorXd& k) const { return k.dot(A * k) + b.dot(k) + c; }
  double scale() const { return A.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff() + std::abs(c); }

  QuadForm& operator+=(const QuadForm& o) {
    A += o.A;
    b += o.b;
    c += o.c;
    return *this;
  }
};

// sign · Δ(p + ħ Σ_r d_r k_r, k_h) for a dispersion ω₀ + a|k|².
void add_delta(QuadForm& q, double sign, const PhysParams& pp, double omega0, double curv,
               double p, const Eigen::VectorXd& d, Eigen::Index h) {
  q.A(h, h) += sign * (curv + pp.hbar / (2.0 * pp.mass));
  for (Eigen::Index r = 0; r < d.size(); ++r) {
    const double x = -sign * pp.hbar * d(r) / pp.mass;
    if (r == h) {
      q.A(h, h) += x;
    } else {
      q.A(h, r) += 0.5 * x;
      q.A(r, h) += 0.5 * x;
    }
  }
  q.b(h) += -sign * p / pp.mass;
  q.c += sign * omega0;
}

struct PairingPhase {
  // forms[j] multiplies t_j (position j+1)
  std::vector<QuadForm> forms;
  // pair index carried by each position
  std::vector<std::size_t> pair_of;
};

PairingPhase build_phase(const EpsilonSeq& eps, const Pairing& pairing, const PhysParams& pp,
                         const Dispersion& disp, double p) {
  const auto n = static_cast<Eigen::Index>(pairing.size());
  PairingPhase out;
  out.pair_of.assign(eps.size(), 0);
  for (std::size_t h = 0; h < pairing.size(); ++h) {
    out.pair_of[pairing[h].absorber - 1] = h;
    out.pair_of[pairing[h].emitter - 1] = h;
  }
  const double omega0 = disp.offset();
  const double curv = disp.curvature();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 1; j <= eps.size(); ++j) {
    const auto h = static_cast<Eigen::Index>(out.pair_of[j - 1]);
    QuadForm q(n);
    if (eps.is_creator(j)) {
      add_delta(q, 1.0, pp, omega0, curv, p, d, h);
      d(h) -= 1.0;
    } else {
      d(h) += 1.0;
      add_delta(q, -1.0, pp, omega0, curv, p, d, h);
    }
    out.forms.push_back(std::move(q));
  }
  return out;
}

// Evaluates the same phase by acting with the Weyl chain on |p⟩ and checks
// it against the quadratic forms at a sample point; also checks that the
// q-translations cancel.
void check_against_weyl(const EpsilonSeq& eps, const PairingPhase& ph, const PhysParams& pp,
                        const Dispersion& disp, double p, const Eigen::VectorXd& k) {
  std::vector<WeylOp> ops;
  double expected = 0.0;
  double scale = 1.0;
  for (std::size_t j = 1; j <= eps.size(); ++j) {
    const double t = 0.37 * static_cast<double>(j) - 0.5;
    const double kh = k(static_cast<Eigen::Index>(ph.pair_of[j - 1]));
    const double s = eps.is_creator(j) ? -1.0 : 1.0;
    WeylOp w{{s * t * kh / pp.mass}, {s * kh}, -s * disp(kh) * t};
    ops.push_back(w);
    expected += t * ph.forms[j - 1](k);
    scale += std::abs(t) * ph.forms[j - 1].scale() * (1.0 + k.squaredNorm());
  }
  const WeylOp total = multiply_chain(ops, pp.hbar);
  if (std::abs(total.b[0]) > 1e-12 * (1.0 + k.cwiseAbs().sum())) {
    throw std::logic_error("prelimit: momentum balance violated");
  }
  const double got = momentum_action_phase(total, std::span<const double>(&p, 1), pp.hbar);
  if (phase_distance(got, expected) > 1e-9 * scale) {
    throw std::logic_error("prelimit: Weyl phase disagrees with vertex energies");
  }
}

double interval_length(double lo, double hi) { return std::max(0.0, hi - lo); }

// Integration of f over [lo, hi] with extra breakpoints.
cplx integrate_range(const std::function<cplx(double)>& f, double lo, double hi,
                     std::vector<double> interior, double rel_tol, double abs_tol) {
  if (!(hi > lo)) return 0.0;
  const int uniform = 8;
  for (int i = 1; i < uniform; ++i) interior.push_back(lo + (hi - lo) * i / uniform);
  const auto points = quad::make_breakpoints(lo, hi, std::move(interior));
  quad::Options opts;
  opts.rel_tol = rel_tol;
  opts.abs_tol = abs_tol;
  opts.max_intervals = 50000;
  return quad::integrate(f, points, opts).value;
}

// Subrange of [lo, hi] outside of which |g| stays below eps·|g(0)|, found by
// a geometric scan away from 0.
std::pair<double, double> envelope_cut(const std::function<double(double)>& g, double lo,
                                       double hi, double eps) {
  const double peak = std::max(g(0.0), 1e-300);
  auto scan = [&](double end, double dir) {
    double last = 0.0;
    for (double x = 0.05; x < end * 1.3; x *= 1.3) {
      const double xc = std::min(x, end);
      if (g(dir * xc) > eps * peak) last = xc;
      if (xc == end) break;
    }
    return std::min(end, last * 1.3 + 0.1);
  };
  const double right = hi > 0.0 ? scan(hi, 1.0) : 0.0;
  const double left = lo < 0.0 ? scan(-lo, -1.0) : 0.0;
  return {std::max(lo, -left), std::min(hi, right)};
}

constexpr double kEnvelopeEps = 1e-11;

cplx single_pair(const CorrelatorSpec& spec, const Pair& pr, const PhysParams& pp,
                 const Dispersion& disp, double lambda2) {
  const double ta = spec.times[pr.absorber - 1] / lambda2;
  const double te = spec.times[pr.emitter - 1] / lambda2;
  const FormFactor& f = spec.factors[pr.absorber - 1];
  const FormFactor& g = spec.factors[pr.emitter - 1];
  auto kernel = [&](double tau) { return time_kernel(pp, disp, f, g, spec.probe_p, tau); };
  // t_absorber ∈ [0, ta], t_emitter = t_absorber + τ ∈ [0, te]
  auto length = [&](double tau) {
    return interval_length(std::max(0.0, -tau), std::min(ta, te - tau));
  };
  const auto [lo, hi] = envelope_cut([&](double x) { return std::abs(kernel(x)); }, -ta, te,
                                     kEnvelopeEps);
  const double peak = std::abs(kernel(0.0)) * std::max(ta, te);
  auto integrand = [&](double tau) -> cplx { return length(tau) * kernel(tau); };
  const double rel = std::max(pp.quad_tol, 1e-10);
  return lambda2 * integrate_range(integrand, lo, hi, {0.0, te - ta}, rel, 1e-13 * peak);
}

// n = 2 with a quadratic-form phase: integrates over τ_0, τ_1 (the
// emitter-minus-absorber time of each pair) and, unless the phase does not
// depend on it, the offset w between the two absorber times.
cplx two_pairs(const CorrelatorSpec& spec, const Pairing& pairing, const PhysParams& pp,
               const Dispersion& disp, double lambda2) {
  const PairingPhase ph = build_phase(spec.eps, pairing, pp, disp, spec.probe_p);
  {
    Eigen::VectorXd k(2);
    const auto d0 = pair_density(spec.factors[pairing[0].absorber - 1],
                                 spec.factors[pairing[0].emitter - 1]);
    const auto d1 = pair_density(spec.factors[pairing[1].absorber - 1],
                                 spec.factors[pairing[1].emitter - 1]);
    k << d0.center[0] + 0.3 * d0.width, d1.center[0] - 0.2 * d1.width;
    check_against_weyl(spec.eps, ph, pp, disp, spec.probe_p, k);
  }
  // the common time shift must drop out (energy telescopes along the walk)
  {
    QuadForm sum(2);
    double scale = 0.0;
    for (const auto& q : ph.forms) {
      sum += q;
      scale += q.scale();
    }
    if (sum.scale() > 1e-12 * (1.0 + scale)) {
      throw std::logic_error("prelimit: phase not invariant under a common time shift");
    }
  }
  const Pair& p0 = pairing[0];
  const Pair& p1 = pairing[1];
  const QuadForm& tau0 = ph.forms[p0.emitter - 1];
  const QuadForm& tau1 = ph.forms[p1.emitter - 1];
  QuadForm wform = ph.forms[p1.emitter - 1];
  wform += ph.forms[p1.absorber - 1];
  double wscale = 0.0;
  for (const auto& q : ph.forms) wscale += q.scale();
  const bool separable = wform.scale() <= 1e-12 * (1.0 + wscale);

  std::array<FormFactor, 2> dens{
      pair_density(spec.factors[p0.absorber - 1], spec.factors[p0.emitter - 1]),
      pair_density(spec.factors[p1.absorber - 1], spec.factors[p1.emitter - 1])};
  for (const auto& d : dens) {
    if (d.amplitude == 0.0) return 0.0;
  }
  Eigen::Vector2d prec(dens[0].precision(), dens[1].precision());
  Eigen::Vector2d center(dens[0].center[0], dens[1].center[0]);
  cplx gamma0 = std::log(dens[0].amplitude) + std::log(dens[1].amplitude);
  for (int h = 0; h < 2; ++h) gamma0 -= 0.5 * prec(h) * center(h) * center(h);

  auto kernel = [&](double x0, double x1, double w) {
    Eigen::MatrixXcd alpha(2, 2);
    Eigen::VectorXcd beta(2);
    const cplx I(0.0, 1.0);
    const Eigen::Matrix2d A = x0 * tau0.A + x1 * tau1.A + (separable ? 0.0 : w) * wform.A;
    const Eigen::Vector2d b = x0 * tau0.b + x1 * tau1.b + (separable ? 0.0 : w) * wform.b;
    const double c = x0 * tau0.c + x1 * tau1.c + (separable ? 0.0 : w) * wform.c;
    for (int i = 0; i < 2; ++i) {
      beta(i) = prec(i) * center(i) + I * b(i);
      for (int j = 0; j < 2; ++j) alpha(i, j) = (i == j ? 0.5 * prec(i) : 0.0) - I * A(i, j);
    }
    return detail::gaussian_integral(alpha, beta, gamma0 + I * c);
  };

  const double a0 = spec.times[p0.absorber - 1] / lambda2;
  const double e0 = spec.times[p0.emitter - 1] / lambda2;
  const double a1 = spec.times[p1.absorber - 1] / lambda2;
  const double e1 = spec.times[p1.emitter - 1] / lambda2;
  auto pair_length = [](double ta, double te, double tau) {
    return interval_length(std::max(0.0, -tau), std::min(ta, te - tau));
  };

  const auto r0 = envelope_cut([&](double x) { return std::abs(kernel(x, 0.0, 0.0)); }, -a0, e0,
                               kEnvelopeEps);
  const auto r1 = envelope_cut([&](double x) { return std::abs(kernel(0.0, x, 0.0)); }, -a1, e1,
                               kEnvelopeEps);
  const double tmax = std::max({a0, e0, a1, e1});
  const double rel = std::max(pp.quad_tol, 1e-9);
  // Natural size of the integral: the kernel nearly factorizes over the two
  // pairs, so a disconnected product of the one-pair envelopes bounds it.
  auto l1_norm = [](const auto& f, std::pair<double, double> r) {
    const int n = 2000;
    const double h = (r.second - r.first) / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) s += (i == 0 || i == n ? 0.5 : 1.0) * f(r.first + i * h);
    return s * h;
  };
  const double k00 = std::abs(kernel(0.0, 0.0, 0.0));
  const double scale =
      k00 == 0.0 ? 0.0
                 : tmax * tmax *
                       l1_norm([&](double x) { return std::abs(kernel(x, 0.0, 0.0)); }, r0) *
                       l1_norm([&](double x) { return std::abs(kernel(0.0, x, 0.0)); }, r1) / k00;
  const double abs_floor = 1e-3 * std::max(pp.quad_tol, 1e-9) * scale;

  if (separable) {
    auto outer = [&](double x0) -> cplx {
      const double l0 = pair_length(a0, e0, x0);
      if (l0 == 0.0) return 0.0;
      auto inner = [&](double x1) -> cplx {
        return pair_length(a1, e1, x1) * kernel(x0, x1, 0.0);
      };
      return l0 * integrate_range(inner, r1.first, r1.second, {0.0, e1 - a1}, rel * 0.1,
                                  abs_floor * 0.1);
    };
    return lambda2 * lambda2 *
           integrate_range(outer, r0.first, r0.second, {0.0, e0 - a0}, rel, abs_floor);
  }

  // s ranges over t_{absorber 0}; constraints (lower, upper) in the form
  // const − coef·w, for w = t_{absorber 1} − t_{absorber 0}.
  auto bounds = [&](double x0, double x1) {
    struct B {
      double c, coef;
    };
    std::vector<B> lower{{0.0, 0.0}, {-x0, 0.0}, {0.0, 1.0}, {-x1, 1.0}};
    std::vector<B> upper{{a0, 0.0}, {e0 - x0, 0.0}, {a1, 1.0}, {e1 - x1, 1.0}};
    return std::make_pair(lower, upper);
  };
  auto measure = [&](double x0, double x1, double w) {
    const auto [lower, upper] = bounds(x0, x1);
    double lo = -1e300, hi = 1e300;
    for (const auto& b : lower) lo = std::max(lo, b.c - b.coef * w);
    for (const auto& b : upper) hi = std::min(hi, b.c - b.coef * w);
    return interval_length(lo, hi);
  };
  auto kinks = [&](double x0, double x1) {
    const auto [lower, upper] = bounds(x0, x1);
    std::vector<double> out;
    std::vector<decltype(lower)::value_type> all = lower;
    all.insert(all.end(), upper.begin(), upper.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        if (all[i].coef != all[j].coef) out.push_back((all[i].c - all[j].c) / (all[i].coef - all[j].coef));
      }
    }
    return out;
  };
  const double wlo = -a0;
  const double whi = a1;
  auto outer = [&](double x0) -> cplx {
    auto middle = [&](double x1) -> cplx {
      auto inner = [&](double w) -> cplx {
        const double m = measure(x0, x1, w);
        return m == 0.0 ? cplx(0.0) : m * kernel(x0, x1, w);
      };
      return integrate_range(inner, wlo, whi, kinks(x0, x1), rel * 0.01, abs_floor * 0.01);
    };
    return integrate_range(middle, r1.first, r1.second, {0.0, e1 - a1}, rel * 0.1,
                           abs_floor * 0.1);
  };
  return lambda2 * lambda2 *
         integrate_range(outer, r0.first, r0.second, {0.0, e0 - a0}, rel, abs_floor);
}

}  // namespace

PrelimitResult prelimit_moment(const CorrelatorSpec& spec, const PhysParams& pp,
                               const Dispersion& disp, double lambda) {
  pp.validate();
  if (pp.dim != 1) throw std::invalid_argument("prelimit_moment: requires dim = 1");
  spec.validate();
  if (!(lambda > 0.0)) throw std::invalid_argument("prelimit_moment: lambda must be positive");
  const std::size_t n = spec.eps.order();
  if (n > 2) throw std::invalid_argument("prelimit_moment: supports n <= 2 only");
  if (n == 2 && disp.is_linear()) {
    throw std::invalid_argument("prelimit_moment: n = 2 needs Constant or Quadratic dispersion");
  }
  PrelimitResult out;
  const double lambda2 = lambda * lambda;
  for (const auto& pairing : enumerate_pairings(spec.eps)) {
    PairingContribution c{pairing, !is_noncrossing(pairing), 0.0};
    const bool empty = std::any_of(spec.times.begin(), spec.times.end(),
                                   [](double t) { return t == 0.0; });
    if (!empty) {
      c.value = n == 1 ? single_pair(spec, pairing[0], pp, disp, lambda2)
                       : two_pairs(spec, pairing, pp, disp, lambda2);
    }
    out.total += c.value;
    out.per_pairing.push_back(std::move(c));
  }
  return out;
}

}  // namespace ifock
