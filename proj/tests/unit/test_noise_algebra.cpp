#include <catch_amalgamated.hpp>

#include "ifock/moment_engine.h"
#include "ifock/noise_algebra.h"

using namespace ifock;

namespace {

const PhysParams unit_params{};
const Dispersion flat = Dispersion::constant(1.0);
const FormFactor g0 = FormFactor::gaussian(1.0, {0.0}, 1.0);

NoiseWord word(const char* eps, std::vector<double> times, std::vector<FormFactor> f) {
  const auto e = EpsilonSeq::parse(eps);
  NoiseWord w;
  for (std::size_t j = 1; j <= e.size(); ++j) {
    w.symbols.push_back({e.at(j), TimeFactor::indicator(times[j - 1]), f[j - 1]});
  }
  return w;
}

}  // namespace

TEST_CASE("two-point plan") {
  const auto w = word("1,0", {1.0, 0.5}, {g0, g0});
  CHECK(w.pattern().to_string() == "1,0");
  const auto plan = reduce_word(w, unit_params);
  REQUIRE(plan.has_value());
  CHECK(plan->pairing == Pairing({{2, 1}}));
  CHECK(plan->scalar == cplx(0.5));
  REQUIRE(plan->records.size() == 1);
  // W(τk/m, k)W(−2τk/m, −k) = W(−τk/m, 0) e^{iħτk²/2m}
  CHECK(approx_equal(plan->records[0].merged, WeylOp{{-1.0}, {0.0}, 0.5}, 1e-15));
  CHECK(plan->records[0].tau_ratio == 2.0);
}

TEST_CASE("trivial words reduce to zero") {
  CHECK_FALSE(reduce_word(word("1,0,0,1", {1, 1, 1, 1}, {g0, g0, g0, g0}), unit_params));
  CHECK_FALSE(reduce_word(word("0,1", {1, 1}, {g0, g0}), unit_params));
}

TEST_CASE("nested plan") {
  const auto plan = reduce_word(word("1,1,0,0", {1.0, 2.0, 0.5, 3.0}, {g0, g0, g0, g0}), unit_params);
  REQUIRE(plan.has_value());
  CHECK(plan->pairing == Pairing({{3, 2}, {4, 1}}));
  // ⟨α₄,α₁⟩⟨α₃,α₂⟩
  CHECK(plan->scalar == cplx(1.0 * 0.5));
}

TEST_CASE("plan values") {
  const auto w2 = word("1,0", {1.0, 1.0}, {g0, g0});
  CHECK(std::abs(evaluate_plan(*reduce_word(w2, unit_params), w2, unit_params, flat, 2.0) -
                 3.1524184810535445) < 1e-13);
  const auto w4 = word("1,1,0,0", {1.0, 1.0, 1.0, 1.0}, {g0, g0, g0, g0});
  CHECK(std::abs(evaluate_plan(*reduce_word(w4, unit_params), w4, unit_params, flat, 3.0) -
                 4.9766030246172024) < 1e-12);

  ContractionPlan zero = *reduce_word(w2, unit_params);
  zero.scalar = 0.0;
  CHECK(evaluate_plan(zero, w2, unit_params, flat, 2.0) == 0.0);
}

TEST_CASE("plans agree with the limit correlator") {
  const std::vector<FormFactor> f{
      FormFactor::gaussian({1.0, 0.2}, {0.3}, 0.9), FormFactor::gaussian({0.5, -0.4}, {1.1}, 0.7),
      FormFactor::gaussian({-0.8, 0.1}, {0.7}, 1.2), FormFactor::gaussian({0.6, 0.6}, {1.6}, 0.8),
      FormFactor::gaussian({0.9, 0.0}, {0.2}, 1.0), FormFactor::gaussian({0.4, 0.3}, {1.3}, 0.6)};
  const std::vector<double> t{0.8, 1.3, 0.6, 1.1, 0.9, 1.7};
  PhysParams pp;
  pp.hbar = 0.7;
  pp.mass = 1.3;
  const auto disp = Dispersion::quadratic(0.6, 2.0);
  for (const char* eps : {"1,0", "1,1,0,0", "1,0,1,0", "1,1,0,1,0,0"}) {
    const auto e = EpsilonSeq::parse(eps);
    std::vector<FormFactor> fs(f.begin(), f.begin() + static_cast<long>(e.size()));
    std::vector<double> ts(t.begin(), t.begin() + static_cast<long>(e.size()));
    const auto w = word(eps, ts, fs);
    const auto plan = reduce_word(w, pp);
    REQUIRE(plan.has_value());
    for (double p : {2.5, 3.0, 4.0}) {
      const cplx a = evaluate_plan(*plan, w, pp, disp, p);
      const cplx b = limit_moment({e, ts, fs, p}, pp, disp).value;
      CHECK(std::abs(a - b) <= 1e-10 * std::max(1e-12, std::abs(b)));
    }
  }
}
