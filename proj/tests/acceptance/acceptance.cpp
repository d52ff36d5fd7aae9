// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include <json.hpp>

#include "ifock/free_fock.h"
#include "ifock/interacting_fock.h"
#include "ifock/moment_engine.h"
#include "ifock/noise_algebra.h"
#include "ifock/p_element.h"
#include "ifock/weyl.h"

using namespace ifock;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    v.pass = false;
    v.detail += " (over time budget)";
  }
  if (!v.pass) ++failures;
  std::printf("criterion %2d %s  %s: %s [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", title,
              v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double rel_dev(cplx x, cplx y) {
  const double scale = std::max(std::abs(x), std::abs(y));
  return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
}

std::vector<EpsilonSeq> all_sequences(std::size_t len) {
  std::vector<EpsilonSeq> out;
  for (unsigned mask = 0; mask < (1u << len); ++mask) {
    std::vector<int> b(len);
    for (std::size_t i = 0; i < len; ++i) b[i] = (mask >> i) & 1u;
    out.push_back(EpsilonSeq::from_bits(b));
  }
  return out;
}

// -- 1 --------------------------------------------------------------------------

// Highest Fock level visited when the word acts on the vacuum.
std::size_t peak_level(const EpsilonSeq& eps) {
  std::size_t h = 0, peak = 1;
  for (std::size_t j = 1; j <= eps.size(); ++j) {
    if (eps.is_creator(j)) {
      peak = std::max(peak, ++h);
    } else if (h == 0) {
      break;
    } else {
      --h;
    }
  }
  return peak;
}

Verdict free_moments() {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> n;
  double worst = 0.0;
  std::size_t cases = 0;
  bool trivial_ok = true;
  for (std::size_t len = 2; len <= 8; len += 2) {
    for (const auto& eps : all_sequences(len)) {
      for (int trial = 0; trial < 50; ++trial) {
        const std::size_t dim = 1 + static_cast<std::size_t>(trial % 4);
        const TestSpace space(dim);
        std::vector<Eigen::VectorXcd> gs;
        for (std::size_t j = 0; j < len; ++j) {
          Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
          for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = {n(rng), n(rng)};
          gs.push_back(v);
        }
        const cplx x = free_moment_combinatorial(space, eps, gs);
        const cplx y = free_moment_oracle(space, eps, gs, std::max(peak_level(eps), eps.order()));
        ++cases;
        if (!is_nontrivial(eps)) {
          trivial_ok = trivial_ok && x == 0.0 && y == 0.0;
        } else {
          worst = std::max(worst, rel_dev(x, y));
        }
      }
    }
  }
  return {worst <= 1e-10 && trivial_ok,
          std::to_string(cases) + " cases, max rel dev " + fmt("%.2e", worst) +
              (trivial_ok ? ", trivial sequences give 0" : ", trivial sequence nonzero")};
}

// -- 2 --------------------------------------------------------------------------

Verdict wigner_uniqueness() {
  std::size_t checked = 0;
  for (std::size_t len = 2; len <= 10; len += 2) {
    for (const auto& eps : all_sequences(len)) {
      std::vector<Pairing> noncrossing;
      for (const auto& p : enumerate_pairings(eps)) {
        if (is_noncrossing(p)) noncrossing.push_back(p);
      }
      const auto w = wigner_pairing(eps);
      ++checked;
      if (noncrossing.size() > 1) return {false, "several non-crossing pairings for " + eps.to_string()};
      if (noncrossing.empty() != !w.has_value()) return {false, "stack scan disagrees for " + eps.to_string()};
      if (w && !(noncrossing.front() == *w)) return {false, "stack scan disagrees for " + eps.to_string()};
    }
  }
  return {true, std::to_string(checked) + " sequences"};
}

// -- 3 --------------------------------------------------------------------------

Verdict weyl_algebra() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double tol = 1e-12;
  auto random_op = [&](std::size_t dim) {
    WeylOp w{std::vector<double>(dim), std::vector<double>(dim), u(rng)};
    for (std::size_t i = 0; i < dim; ++i) {
      w.a[i] = u(rng);
      w.b[i] = u(rng);
    }
    return w;
  };
  std::size_t bad_group = 0, bad_adjoint = 0, bad_chain = 0, bad_evolve = 0, bad_action = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + static_cast<std::size_t>(trial % 3);
    const double hbar = 0.5 + 0.001 * trial;
    const auto x = random_op(dim), y = random_op(dim), z = random_op(dim);
    if (!approx_equal(multiply(multiply(x, y, hbar), z, hbar), multiply(x, multiply(y, z, hbar), hbar), tol) ||
        !approx_equal(multiply(x, WeylOp::identity(dim), hbar), x, tol) ||
        !approx_equal(multiply(WeylOp::identity(dim), x, hbar), x, tol)) {
      ++bad_group;
    }
    if (!approx_equal(multiply(x.adjoint(), x, hbar), WeylOp::identity(dim), tol) ||
        !approx_equal(multiply(x, x.adjoint(), hbar), WeylOp::identity(dim), tol)) {
      ++bad_adjoint;
    }

    // closed-form chain phase against the left fold
    std::vector<WeylOp> ops;
    for (int i = 0; i < 2 + trial % 5; ++i) ops.push_back(random_op(dim));
    WeylOp closed = WeylOp::identity(dim);
    for (std::size_t i = 0; i < ops.size(); ++i) {
      closed.phase += ops[i].phase;
      for (std::size_t d = 0; d < dim; ++d) {
        closed.a[d] += ops[i].a[d];
        closed.b[d] += ops[i].b[d];
      }
      for (std::size_t j = 0; j < i; ++j) {
        for (std::size_t d = 0; d < dim; ++d) {
          closed.phase += 0.5 * hbar * (ops[i].a[d] * ops[j].b[d] - ops[j].a[d] * ops[i].b[d]);
        }
      }
    }
    WeylOp fold = ops.front();
    for (std::size_t i = 1; i < ops.size(); ++i) fold = multiply(ops[i], fold, hbar);
    if (!approx_equal(multiply_chain(ops, hbar), closed, tol) || !approx_equal(fold, closed, tol)) {
      ++bad_chain;
    }

    const double t = u(rng), mass = 0.5 + std::abs(u(rng));
    if (!approx_equal(evolve_free(multiply(x, y, hbar), t, mass),
                      multiply(evolve_free(x, t, mass), evolve_free(y, t, mass), hbar), tol) ||
        !approx_equal(evolve_free(evolve_free(x, t, mass), 0.5, mass), evolve_free(x, t + 0.5, mass),
                      tol)) {
      ++bad_evolve;
    }

    std::vector<double> p(dim);
    for (auto& c : p) c = u(rng);
    const auto direct = momentum_action(multiply(x, y, hbar), p, hbar);
    const auto first = momentum_action(y, p, hbar);
    const auto second = momentum_action(x, first.momentum, hbar);
    bool ok = std::abs(direct.factor - first.factor * second.factor) <= tol;
    for (std::size_t d = 0; d < dim; ++d) ok = ok && std::abs(direct.momentum[d] - second.momentum[d]) <= tol;
    if (!ok) ++bad_action;
  }
  const std::size_t bad = bad_group + bad_adjoint + bad_chain + bad_evolve + bad_action;
  return {bad == 0, "1000 instances per law; failures group " + std::to_string(bad_group) +
                        ", adjoint " + std::to_string(bad_adjoint) + ", chain " +
                        std::to_string(bad_chain) + ", evolution " + std::to_string(bad_evolve) +
                        ", momentum action " + std::to_string(bad_action)};
}

// -- shared random spectral data ------------------------------------------------

struct SpectralDraw {
  PhysParams pp;
  Dispersion disp = Dispersion::constant(1.0);
};

SpectralDraw draw_spectral(std::mt19937_64& rng, bool quadratic) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SpectralDraw s;
  s.pp.hbar = 0.6 + 0.8 * u(rng);
  s.pp.mass = 0.7 + 0.8 * u(rng);
  const double omega0 = 0.4 + 0.8 * u(rng);
  s.disp = quadratic ? Dispersion::quadratic(omega0, 1.0 + 2.0 * u(rng)) : Dispersion::constant(omega0);
  return s;
}

FormFactor draw_factor(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return FormFactor::gaussian({u(rng), u(rng)}, {0.8 + 0.6 * u(rng)}, 0.7 + 0.2 * u(rng));
}

// Smallest |l| with a real shell, sqrt(4 a c) m for Δ = a k² − (l/m) k + c.
double shell_threshold(const SpectralDraw& s) {
  const double a = s.pp.hbar / (2.0 * s.pp.mass) + s.disp.curvature();
  return s.pp.mass * std::sqrt(4.0 * a * s.disp.offset());
}

// -- 4 --------------------------------------------------------------------------

Verdict kernel_oracle() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int done = 0, attempts = 0;
  while (done < 20) {
    if (++attempts > 1000) return {false, "could not draw admissible configurations"};
    const auto s = draw_spectral(rng, done % 2 == 1);
    const auto f = draw_factor(rng);
    const auto g = draw_factor(rng);
    const double l = shell_threshold(s) * (1.15 + 0.8 * u(rng));
    const cplx shell = pairing_kernel(s.pp, s.disp, f, g, l);
    const auto dens = pair_density(f, g);
    const double mass = std::sqrt(M_PI) * std::abs(dens.amplitude) * dens.width;
    if (std::abs(shell) < 1e-2 * mass) continue;
    const cplx reg =
        pairing_kernel_extrapolated(s.pp, s.disp, f, g, l, default_eta(s.pp, s.disp, dens, l));
    worst = std::max(worst, rel_dev(shell, reg));
    ++done;
  }
  return {worst <= 1e-3, "20 configurations, max rel dev " + fmt("%.2e", worst)};
}

// -- 5 --------------------------------------------------------------------------

Verdict three_routes() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int configs = 0, attempts = 0;
  while (configs < 10) {
    if (++attempts > 500) return {false, "could not draw admissible configurations"};
    const auto s = draw_spectral(rng, configs % 2 == 0);
    std::vector<FormFactor> f;
    std::vector<double> t;
    for (int j = 0; j < 4; ++j) {
      f.push_back(draw_factor(rng));
      t.push_back(0.3 + 1.5 * u(rng));
    }
    const double p = shell_threshold(s) * (1.3 + 0.8 * u(rng));
    const auto ctx = make_context(s.pp, s.disp);
    double local = 0.0;
    bool usable = true;
    for (const char* text : {"1,0", "1,1,0,0", "1,0,1,0"}) {
      const auto eps = EpsilonSeq::parse(text);
      const std::vector<FormFactor> fs(f.begin(), f.begin() + static_cast<long>(eps.size()));
      const std::vector<double> ts(t.begin(), t.begin() + static_cast<long>(eps.size()));
      try {
        const cplx a = limit_moment({eps, ts, fs, p}, s.pp, s.disp).value;
        std::vector<ModuleVector> phis;
        NoiseWord word;
        for (std::size_t j = 0; j < eps.size(); ++j) {
          phis.emplace_back(TimeFactor::indicator(ts[j]), fs[j]);
          word.symbols.push_back({eps.at(j + 1), TimeFactor::indicator(ts[j]), fs[j]});
        }
        const cplx b = vacuum_moment(ctx, eps, phis)(p);
        const auto plan = reduce_word(word, s.pp);
        const cplx c = plan ? evaluate_plan(*plan, word, s.pp, s.disp, p) : cplx(0.0);
        if (std::abs(a) < 1e-8) {
          usable = false;
          break;
        }
        local = std::max({local, rel_dev(a, b), rel_dev(a, c), rel_dev(b, c)});
      } catch (const DegenerateShell&) {
        usable = false;
        break;
      }
    }
    if (!usable) continue;
    worst = std::max(worst, local);
    ++configs;
  }
  return {worst <= 1e-6, "10 configurations x 3 sequences, max pairwise rel dev " + fmt("%.2e", worst)};
}

// -- 6 --------------------------------------------------------------------------

Verdict oscillatory_form() {
  const PhysParams unit{};
  struct Case {
    PhysParams pp;
    Dispersion disp;
    std::vector<FormFactor> f;
    double p;
  };
  PhysParams heavy;
  heavy.mass = 1.4;
  heavy.hbar = 0.8;
  const std::vector<Case> cases{
      {unit, Dispersion::constant(1.0), std::vector<FormFactor>(4, FormFactor::gaussian(1.0, {0.0}, 1.0)), 3.0},
      {unit, Dispersion::constant(0.8),
       {FormFactor::gaussian(1.0, {0.5}, 0.8), FormFactor::gaussian({0.6, 0.4}, {0.8}, 0.9),
        FormFactor::gaussian({0.9, -0.2}, {0.6}, 0.7), FormFactor::gaussian(1.0, {0.4}, 0.8)},
       2.8},
      {heavy, Dispersion::quadratic(0.6, 2.0),
       {FormFactor::gaussian(1.0, {0.6}, 0.8), FormFactor::gaussian(1.0, {0.7}, 0.9),
        FormFactor::gaussian(1.0, {0.5}, 0.8), FormFactor::gaussian(1.0, {0.6}, 0.7)},
       3.2},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    const CorrelatorSpec spec{EpsilonSeq::parse("1,1,0,0"), {1.0, 1.0, 1.0, 1.0}, c.f, c.p};
    const cplx shell = limit_moment(spec, c.pp, c.disp).value;
    const cplx osc = limit_moment_oscillatory(spec, c.pp, c.disp);
    worst = std::max(worst, rel_dev(shell, osc));
  }
  return {worst <= 1e-2, "3 rainbow configurations, max rel dev " + fmt("%.2e", worst)};
}

// -- 7 --------------------------------------------------------------------------

Verdict prelimit_convergence() {
  const PhysParams pp{};
  const auto disp = Dispersion::constant(1.0);
  const auto g = FormFactor::gaussian(1.0, {0.5}, 0.3);
  const CorrelatorSpec spec{EpsilonSeq::parse("1,0"), {1.0, 1.0}, {g, g}, 2.5};
  const cplx limit = limit_moment(spec, pp, disp).value;
  std::vector<double> err;
  std::string detail = "errors";
  for (double lambda : {0.5, 0.3, 0.2, 0.1}) {
    err.push_back(std::abs(prelimit_moment(spec, pp, disp, lambda).total - limit));
    detail += fmt(" %.3e", err.back());
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < err.size(); ++i) decreasing = decreasing && err[i] < err[i - 1];
  const double ratio = err.back() / err.front();
  return {decreasing && ratio < 0.1, detail + ", ratio " + fmt("%.3f", ratio)};
}

// -- 8 --------------------------------------------------------------------------

Verdict crossing_suppression() {
  const PhysParams pp{};
  const auto disp = Dispersion::constant(1.0);
  const auto g = FormFactor::gaussian(1.0, {0.5}, 0.3);
  const CorrelatorSpec spec{EpsilonSeq::parse("1,1,0,0"), {1.0, 1.0, 1.0, 1.0},
                            std::vector<FormFactor>(4, g), 2.5};
  const cplx limit = limit_moment(spec, pp, disp).value;
  double crossing[2] = {0.0, 0.0}, dev[2] = {0.0, 0.0};
  const double lambdas[2] = {0.5, 0.1};
  for (int i = 0; i < 2; ++i) {
    const auto r = prelimit_moment(spec, pp, disp, lambdas[i]);
    for (const auto& c : r.per_pairing) {
      if (c.crossing) {
        crossing[i] = std::abs(c.value);
      } else {
        dev[i] = rel_dev(c.value, limit);
      }
    }
  }
  const double ratio = crossing[1] / crossing[0];
  return {ratio < 0.25 && dev[1] < dev[0],
          "crossing |.| " + fmt("%.3e", crossing[0]) + " -> " + fmt("%.3e", crossing[1]) +
              " (ratio " + fmt("%.2e", ratio) + "), non-crossing rel dev " + fmt("%.3e", dev[0]) +
              " -> " + fmt("%.3e", dev[1])};
}

// -- 9 --------------------------------------------------------------------------

Verdict bose_contrast() {
  const PhysParams pp{};
  const auto disp = Dispersion::quadratic(0.5, 1.0);
  const double omega = 1.2;
  const std::vector<FormFactor> f{FormFactor::gaussian({1.0, 0.3}, {0.4}, 0.9),
                                  FormFactor::gaussian({0.7, -0.2}, {0.9}, 0.8),
                                  FormFactor::gaussian({-0.5, 0.6}, {0.6}, 1.1),
                                  FormFactor::gaussian({0.8, 0.1}, {1.2}, 0.7)};
  const std::vector<double> t{0.9, 1.4, 0.6, 1.2};
  const double p = 3.0;

  const auto rainbow = EpsilonSeq::parse("1,1,0,0");
  const auto bose_r = bose_moment({rainbow, t, f, p}, omega, pp, disp);
  const auto free_r = limit_moment({rainbow, t, f, p}, pp, disp);
  const bool counts = bose_r.pairing_count == 2 && free_r.pairing.has_value() &&
                      free_r.pairing->size() == 2 && enumerate_pairings(rainbow).size() == 2;

  const auto alt = EpsilonSeq::parse("1,0,1,0");
  const auto two = EpsilonSeq::parse("1,0");
  const std::vector<FormFactor> f21{f[0], f[1]}, f43{f[2], f[3]};
  const std::vector<double> t21{t[0], t[1]}, t43{t[2], t[3]};
  const cplx bose4 = bose_moment({alt, t, f, p}, omega, pp, disp).value;
  const cplx bose_prod = bose_moment({two, t21, f21, p}, omega, pp, disp).value *
                         bose_moment({two, t43, f43, p}, omega, pp, disp).value;
  const cplx free4 = limit_moment({alt, t, f, p}, pp, disp).value;
  const cplx free_prod = limit_moment({two, t21, f21, p}, pp, disp).value *
                         limit_moment({two, t43, f43, p}, pp, disp).value;
  const double d_bose = rel_dev(bose4, bose_prod), d_free = rel_dev(free4, free_prod);
  const bool nonzero = std::abs(bose4) > 0.0 && std::abs(free4) > 0.0;
  return {counts && nonzero && d_bose <= 1e-9 && d_free <= 1e-9,
          "Bose pairings " + std::to_string(bose_r.pairing_count) + ", free pairings 1" +
              ", factorization dev Bose " + fmt("%.1e", d_bose) + " free " + fmt("%.1e", d_free)};
}

// -- 10 -------------------------------------------------------------------------

FormFactor factor_from_json(const nlohmann::json& j) {
  return FormFactor::gaussian({j.at("re_amp").get<double>(), j.at("im_amp").get<double>()},
                              j.at("center").get<std::vector<double>>(), j.at("width").get<double>());
}

Verdict nonassociativity() {
  std::ifstream in(IFOCK_WITNESS_FIXTURE);
  if (!in) return {false, "missing witness fixture"};
  const auto j = nlohmann::json::parse(in);
  const auto& d = j.at("dispersion");
  const auto ctx = make_context(PhysParams{}, Dispersion::constant(d.at("omega0").get<double>()));
  const auto& fs = j.at("form_factors");
  const auto F = PElement::transform(ctx, factor_from_json(fs.at(0)));
  const auto G = PElement::transform(ctx, factor_from_json(fs.at(1)));
  const auto H = PElement::transform(ctx, factor_from_json(fs.at(2)));
  const auto left = convolve(convolve(F, G), H);
  const auto right = convolve(F, convolve(G, H));

  const auto& grid = j.at("grid");
  const double start = grid.at("start"), stop = grid.at("stop");
  const int count = grid.at("count");
  double scale = 0.0, best = 0.0, best_p = start;
  for (int i = 0; i < count; ++i) {
    const double p = start + (stop - start) * i / (count - 1);
    const cplx a = left(p), b = right(p);
    scale = std::max({scale, std::abs(a), std::abs(b)});
    if (std::abs(a - b) > best) {
      best = std::abs(a - b);
      best_p = p;
    }
  }
  const double witness_p = j.at("witness").at("p");
  const double recorded = j.at("witness").at("abs_diff");
  const double at_witness = std::abs(left(witness_p) - right(witness_p));
  const bool reproduced = std::abs(at_witness - recorded) <= 1e-9 * recorded;
  return {at_witness > 1e-3 * scale && reproduced,
          "witness p " + fmt("%.6g", witness_p) + ", |diff| " + fmt("%.6e", at_witness) +
              " vs 1e-3 x max " + fmt("%.3e", scale) + (reproduced ? ", matches record" : ", record mismatch") +
              "; grid max at p " + fmt("%.6g", best_p)};
}

}  // namespace

int main() {
  report(1, "free-moment oracle equivalence", 10, free_moments);
  report(2, "Wigner uniqueness", 5, wigner_uniqueness);
  report(3, "Weyl algebra", 60, weyl_algebra);
  report(4, "kernel oracle", 60, kernel_oracle);
  report(5, "three-route agreement", 120, three_routes);
  report(6, "oscillatory form vs shell form", 600, oscillatory_form);
  report(7, "pre-limit convergence", 300, prelimit_convergence);
  report(8, "crossing suppression", 900, crossing_suppression);
  report(9, "Bose vs free contrast", 60, bose_contrast);
  report(10, "non-associativity witness", 60, nonassociativity);
  return failures == 0 ? 0 : 1;
}
