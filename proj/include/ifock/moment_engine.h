#pragma once

#include <optional>
#include <vector>

#include "ifock/partitions.h"
#include "ifock/spectral_model.h"

namespace ifock {

/// ⟨∏_j C^{ε_j}(g_j, T_j)⟩ at system momentum p (d = 1). times[j-1] and
/// factors[j-1] belong to position j of eps.
struct CorrelatorSpec {
  EpsilonSeq eps;
  std::vector<double> times;
  std::vector<FormFactor> factors;
  double probe_p = 0.0;

  void validate() const;
};

/// The shells met by one pair: each entry is an effective momentum l at
/// which the pair was evaluated, with the roots of Δ(l,·) used there.
struct PairShellData {
  Pair pair;
  std::vector<double> momenta;
  std::vector<std::vector<ShellRoot>> roots;
};

struct MomentResult {
  cplx value{0.0, 0.0};
  std::optional<Pairing> pairing;
  std::vector<PairShellData> shells;
  /// ∏ (T_{m̄} ∧ T_m) over the Wigner pairs.
  double time_factor = 0.0;
};

/// The limit correlator in vertex form: nested energy-shell sums over the
/// non-crossing forest, outermost pairs first, with the momentum of each
/// inner pair shifted by −ħk of every enclosing emission.
MomentResult limit_moment(const CorrelatorSpec& spec, const PhysParams& pp,
                          const Dispersion& disp);

/// The same correlator from the explicit phase form: each τ-integral is
/// damped by e^{−η|τ|}, which turns it into the Lorentzian 2η/(φ² + η²) of
/// its total phase rate φ, and the remaining k-integrals are done by nested
/// adaptive quadrature. Richardson-extrapolated over η, η/2, η/4; eta ≤ 0
/// picks a default from the outermost shell. n ≤ 2 only.
cplx limit_moment_oscillatory(const CorrelatorSpec& spec, const PhysParams& pp,
                              const Dispersion& disp, double eta = 0.0);

struct BoseResult {
  cplx value{0.0, 0.0};
  std::size_t pairing_count = 0;
};

/// Responseless moment: the Wick sum over every pairing of
/// ∏ (T_{m̄} ∧ T_m) · bose_kernel(ω_probe, g_{m̄}, g_m).
BoseResult bose_moment(const CorrelatorSpec& spec, double omega_probe, const PhysParams& pp,
                       const Dispersion& disp);

struct PairingContribution {
  Pairing pairing;
  bool crossing = false;
  cplx value{0.0, 0.0};
};

struct PrelimitResult {
  cplx total{0.0, 0.0};
  std::vector<PairingContribution> per_pairing;
};

/// Finite-coupling collective correlator ⟨Ψ_R, ∏ c^{ε_j}_{T_j,λ}(g_j) Ψ_R⟩
/// at momentum p, split by reservoir pairing. The k-integrals are done in
/// closed form for Constant and Quadratic dispersion (and for a Linear
/// dispersion at n = 1 through time_kernel); the time differences by
/// adaptive quadrature over the rescaled box [0, T_j/λ²]. n ≤ 2, d = 1.
PrelimitResult prelimit_moment(const CorrelatorSpec& spec, const PhysParams& pp,
                               const Dispersion& disp, double lambda);

}  // namespace ifock
