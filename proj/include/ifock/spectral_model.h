#pragma once

#include <complex>
#include <span>
#include <variant>
#include <vector>

#include "ifock/errors.h"

namespace ifock {

using cplx = std::complex<double>;

struct PhysParams {
  double hbar = 1.0;
  double mass = 1.0;
  int dim = 1;
  /// Shell roots with |∂Δ/∂k| below this are reported as DegenerateShell.
  double root_tol = 1e-6;
  /// Relative tolerance for adaptive quadrature.
  double quad_tol = 1e-9;

  void validate() const;
};

struct ConstantDispersion {
  double omega0;
};

/// ω(k) = ω₀ + |k|²/2μ
struct QuadraticDispersion {
  double omega0;
  double mu;
};

/// ω(k) = c|k|
struct LinearDispersion {
  double c;
};

class Dispersion {
 public:
  using Kind = std::variant<ConstantDispersion, QuadraticDispersion, LinearDispersion>;

  static Dispersion constant(double omega0);
  static Dispersion quadratic(double omega0, double mu);
  static Dispersion linear(double c);

  const Kind& kind() const { return kind_; }
  bool is_linear() const { return std::holds_alternative<LinearDispersion>(kind_); }

  double operator()(std::span<const double> k) const;
  double operator()(double k) const;

  /// Coefficient of |k|² in ω, zero for Constant and Linear.
  double curvature() const;
  /// ω(0) for Constant and Quadratic, zero for Linear.
  double offset() const;

 private:
  explicit Dispersion(Kind kind) : kind_(kind) {}
  Kind kind_;
};

/// g(k) = A exp(−|k − k₀|²/(2σ²)).
///
/// The family is closed under conjugation and pointwise products, so the
/// pair products ḡf that enter every kernel stay Gaussian.
struct FormFactor {
  cplx amplitude{1.0, 0.0};
  std::vector<double> center{0.0};
  double width = 1.0;

  static FormFactor gaussian(cplx amplitude, std::vector<double> center, double width);

  std::size_t dim() const { return center.size(); }
  /// 1/σ²
  double precision() const { return 1.0 / (width * width); }

  cplx operator()(std::span<const double> k) const;
  cplx operator()(double k) const;

  FormFactor conj() const;
  FormFactor scaled(cplx factor) const;

  void validate() const;
};

/// Pointwise product f·g (no conjugation).
FormFactor pointwise_product(const FormFactor& f, const FormFactor& g);

/// The kernel integrand f̄g of (f|g).
FormFactor pair_density(const FormFactor& f, const FormFactor& g);

/// Δ(l,k) = −(1/m) l·k + ω(k) + (ħ/2m)|k|².
double delta_energy(const PhysParams& pp, const Dispersion& disp, std::span<const double> l,
                    std::span<const double> k);
double delta_energy(const PhysParams& pp, const Dispersion& disp, double l, double k);

struct ShellRoot {
  double k;
  /// |∂Δ/∂k| at the root. For the kink of a Linear dispersion at k = 0 this
  /// is the harmonic mean of the one-sided slopes.
  double jacobian;
};

/// Real roots of k ↦ Δ(l,k) in d = 1, ascending.
/// Throws DegenerateShell when a root has jacobian below pp.root_tol.
std::vector<ShellRoot> shell_roots(const PhysParams& pp, const Dispersion& disp, double l);

/// Same roots without the degeneracy check (used for quadrature breakpoints).
std::vector<ShellRoot> shell_roots_unchecked(const PhysParams& pp, const Dispersion& disp,
                                             double l);

/// 2π Σ_roots F(k_r)/|∂Δ/∂k|(k_r): the energy-shell transform of F at l.
cplx shell_transform(const PhysParams& pp, const Dispersion& disp, const FormFactor& density,
                     double l);

/// (f|g)_l = 2π Σ_roots f̄(k_r) g(k_r) / jacobian_r, with ∫dτ e^{iΔτ} := 2πδ(Δ).
cplx pairing_kernel(const PhysParams& pp, const Dispersion& disp, const FormFactor& f,
                    const FormFactor& g, double l);

/// ∫dk f̄g · 2η/(Δ(l,k)² + η²) by adaptive quadrature.
cplx pairing_kernel_regulated(const PhysParams& pp, const Dispersion& disp, const FormFactor& f,
                              const FormFactor& g, double l, double eta);

/// Default starting regulator: 1e-2 times the spread of Δ(l,·) over the
/// support of f̄g.
double default_eta(const PhysParams& pp, const Dispersion& disp, const FormFactor& density,
                   double l);

/// pairing_kernel_regulated at η₀, η₀/2, η₀/4, Richardson-extrapolated to η → 0.
cplx pairing_kernel_extrapolated(const PhysParams& pp, const Dispersion& disp,
                                 const FormFactor& f, const FormFactor& g, double l,
                                 double eta0);

/// 2π Σ_{ω(k_r)=ω_probe} f̄(k_r)g(k_r)/|ω′(k_r)|, the responseless kernel.
/// Throws std::invalid_argument for Constant dispersion.
cplx bose_kernel(const PhysParams& pp, const Dispersion& disp, double omega_probe,
                 const FormFactor& f, const FormFactor& g);

/// K(v) = ∫dk f̄(k)g(k) e^{iΔ(l,k)v}. Closed form for Constant and Quadratic
/// dispersion in any dimension; quadrature for Linear (d = 1 only).
cplx time_kernel(const PhysParams& pp, const Dispersion& disp, const FormFactor& f,
                 const FormFactor& g, std::span<const double> l, double v);
cplx time_kernel(const PhysParams& pp, const Dispersion& disp, const FormFactor& f,
                 const FormFactor& g, double l, double v);

/// [lo, hi] outside which |F| is below e^{-50} of its peak.
std::pair<double, double> support_window(const FormFactor& density);

}  // namespace ifock
