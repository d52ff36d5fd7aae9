#include "ifock/spectral_model.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gaussian_integral.h"
#include "ifock/quadrature.h"

namespace ifock {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void require_dim1(const PhysParams& pp, const char* what) {
  if (pp.dim != 1) {
    throw std::invalid_argument(std::string(what) + " is only available in dimension 1");
  }
}

// Roots of a k² + b k + c (a > 0) with |2ak + b| as jacobian.
void quadratic_roots(double a, double b, double c, std::vector<ShellRoot>& out) {
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return;
  const double s = std::sqrt(disc);
  if (s == 0.0) {
    out.push_back({-b / (2.0 * a), 0.0});
    return;
  }
  const double q = -0.5 * (b + std::copysign(s, b));
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : -r1;
  if (r1 > r2) std::swap(r1, r2);
  out.push_back({r1, s});
  out.push_back({r2, s});
}

void check_roots(const PhysParams& pp, double l, const std::vector<ShellRoot>& roots) {
  for (const auto& r : roots) {
    if (r.jacobian < pp.root_tol) throw DegenerateShell(l, r.k, r.jacobian);
  }
}

}  // namespace

DegenerateShell::DegenerateShell(double l, double root, double jacobian)
    : std::runtime_error([&] {
        std::ostringstream os;
        os.precision(17);
        os << "degenerate energy shell at l=" << l << ": root k=" << root
           << " has |dDelta/dk|=" << jacobian;
        return os.str();
      }()),
      l_(l),
      root_(root),
      jacobian_(jacobian) {}

void PhysParams::validate() const {
  if (!(hbar > 0.0) || !(mass > 0.0)) throw std::invalid_argument("hbar and mass must be positive");
  if (dim != 1 && dim != 3) throw std::invalid_argument("dim must be 1 or 3");
  if (!(root_tol > 0.0) || !(quad_tol > 0.0)) {
    throw std::invalid_argument("root_tol and quad_tol must be positive");
  }
}

Dispersion Dispersion::constant(double omega0) {
  if (!(omega0 >= 0.0)) throw std::invalid_argument("constant dispersion needs omega0 >= 0");
  return Dispersion(ConstantDispersion{omega0});
}

Dispersion Dispersion::quadratic(double omega0, double mu) {
  if (!(omega0 >= 0.0) || !(mu > 0.0)) {
    throw std::invalid_argument("quadratic dispersion needs omega0 >= 0 and mu > 0");
  }
  return Dispersion(QuadraticDispersion{omega0, mu});
}

Dispersion Dispersion::linear(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("linear dispersion needs c > 0");
  return Dispersion(LinearDispersion{c});
}

double Dispersion::operator()(std::span<const double> k) const {
  const double k2 = dot(k, k);
  if (auto* d = std::get_if<ConstantDispersion>(&kind_)) return d->omega0;
  if (auto* d = std::get_if<QuadraticDispersion>(&kind_)) return d->omega0 + k2 / (2.0 * d->mu);
  return std::get<LinearDispersion>(kind_).c * std::sqrt(k2);
}

double Dispersion::operator()(double k) const { return (*this)(std::span<const double>(&k, 1)); }

double Dispersion::curvature() const {
  if (auto* d = std::get_if<QuadraticDispersion>(&kind_)) return 1.0 / (2.0 * d->mu);
  return 0.0;
}

double Dispersion::offset() const {
  if (auto* d = std::get_if<ConstantDispersion>(&kind_)) return d->omega0;
  if (auto* d = std::get_if<QuadraticDispersion>(&kind_)) return d->omega0;
  return 0.0;
}

FormFactor FormFactor::gaussian(cplx amplitude, std::vector<double> center, double width) {
  FormFactor f{amplitude, std::move(center), width};
  f.validate();
  return f;
}

void FormFactor::validate() const {
  if (!(width > 0.0)) throw std::invalid_argument("form factor width must be positive");
  if (center.empty()) throw std::invalid_argument("form factor center must be non-empty");
}

cplx FormFactor::operator()(std::span<const double> k) const {
  double r2 = 0.0;
  for (std::size_t i = 0; i < center.size(); ++i) {
    const double d = k[i] - center[i];
    r2 += d * d;
  }
  return amplitude * std::exp(-0.5 * r2 * precision());
}

cplx FormFactor::operator()(double k) const { return (*this)(std::span<const double>(&k, 1)); }

FormFactor FormFactor::conj() const { return {std::conj(amplitude), center, width}; }

FormFactor FormFactor::scaled(cplx factor) const { return {amplitude * factor, center, width}; }

FormFactor pointwise_product(const FormFactor& f, const FormFactor& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("form factor dimension mismatch");
  const double pf = f.precision(), pg = g.precision();
  const double p = pf + pg;
  FormFactor out;
  out.width = 1.0 / std::sqrt(p);
  out.center.resize(f.dim());
  double sep2 = 0.0;
  for (std::size_t i = 0; i < f.dim(); ++i) {
    out.center[i] = (pf * f.center[i] + pg * g.center[i]) / p;
    const double d = f.center[i] - g.center[i];
    sep2 += d * d;
  }
  out.amplitude = f.amplitude * g.amplitude *
                  std::exp(-0.5 * sep2 / (f.width * f.width + g.width * g.width));
  return out;
}

FormFactor pair_density(const FormFactor& f, const FormFactor& g) {
  return pointwise_product(f.conj(), g);
}

double delta_energy(const PhysParams& pp, const Dispersion& disp, std::span<const double> l,
                    std::span<const double> k) {
  if (l.size() != k.size()) throw std::invalid_argument("delta_energy: dimension mismatch");
  return -dot(l, k) / pp.mass + disp(k) + pp.hbar / (2.0 * pp.mass) * dot(k, k);
}

double delta_energy(const PhysParams& pp, const Dispersion& disp, double l, double k) {
  return delta_energy(pp, disp, std::span<const double>(&l, 1), std::span<const double>(&k, 1));
}

std::vector<ShellRoot> shell_roots_unchecked(const PhysParams& pp, const Dispersion& disp,
                                             double l) {
  require_dim1(pp, "shell_roots");
  const double recoil = pp.hbar / (2.0 * pp.mass);
  const double lm = l / pp.mass;
  std::vector<ShellRoot> roots;
  if (auto* lin = std::get_if<LinearDispersion>(&disp.kind())) {
    // Δ = recoil k² − (l/m) k + c|k| is piecewise quadratic with a kink at 0.
    const double c = lin->c;
    const double slope_right = c - lm;
    const double slope_left = -(c + lm);
    const double k_left = (c + lm) / recoil;
    if (k_left < 0.0) roots.push_back({k_left, std::abs(c + lm)});
    const double harmonic =
        (slope_right == 0.0 || slope_left == 0.0)
            ? 0.0
            : 2.0 / (1.0 / std::abs(slope_right) + 1.0 / std::abs(slope_left));
    roots.push_back({0.0, harmonic});
    const double k_right = (lm - c) / recoil;
    if (k_right > 0.0) roots.push_back({k_right, std::abs(lm - c)});
    return roots;
  }
  quadratic_roots(recoil + disp.curvature(), -lm, disp.offset(), roots);
  return roots;
}

std::vector<ShellRoot> shell_roots(const PhysParams& pp, const Dispersion& disp, double l) {
  auto roots = shell_roots_unchecked(pp, disp, l);
  check_roots(pp, l, roots);
  return roots;
}

cplx shell_transform(const PhysParams& pp, const Dispersion& disp, const FormFactor& density,
                     double l) {
  cplx s = 0.0;
  for (const auto& r : shell_roots(pp, disp, l)) s += density(r.k) / r.jacobian;
  return kTwoPi * s;
}

cplx pairing_kernel(const PhysParams& pp, const Dispersion& disp, const FormFactor& f,
                    const FormFactor& g, double l) {
  return shell_transform(pp, disp, pair_density(f, g), l);
}

std::pair<double, double> support_window(const FormFactor& density) {
  const double half = 10.0 * density.width;
  return {density.center.at(0) - half, density.center.at(0) + half};
}

cplx pairing_kernel_regulated(const PhysParams& pp, const Dispersion& disp, const FormFactor& f,
                              const FormFactor& g, double l, double eta) {
  require_dim1(pp, "pairing_kernel_regulated");
  if (!(eta > 0.0)) throw std::invalid_argument("pairing_kernel_regulated: eta must be positive");
  const FormFactor density = pair_density(f, g);
  const auto [lo, hi] = support_window(density);
  auto delta = [&](double k) { return delta_energy(pp, disp, l, k); };
  std::vector<double> interior = quad::near_zeros(delta, lo, hi);
  for (const auto& r : shell_roots_unchecked(pp, disp, l)) interior.push_back(r.k);
  const auto points = quad::make_breakpoints(lo, hi, interior);
  auto integrand = [&](double k) {
    const double d = delta(k);
    return density(k) * (2.0 * eta / (d * d + eta * eta));
  };
  quad::Options opts;
  opts.rel_tol = std::max(1e-10, 0.1 * pp.quad_tol);
  return quad::integrate(integrand, points, opts).value;
}

double default_eta(const PhysParams& pp, const Dispersion& disp, const FormFactor& density,
                   double l) {
  const double c = density.center.at(0);
  const double s = density.width;
  const double d0 = delta_energy(pp, disp, l, c);
  double spread = std::max(std::abs(delta_energy(pp, disp, l, c - s) - d0),
                           std::abs(delta_energy(pp, disp, l, c + s) - d0));
  if (!(spread > 0.0)) spread = 1.0;
  return 1e-2 * spread;
}

cplx pairing_kernel_extrapolated(const PhysParams& pp, const Dispersion& disp,
                                 const FormFactor& f, const FormFactor& g, double l,
                                 double eta0) {
  return quad::richardson3(pairing_kernel_regulated(pp, disp, f, g, l, eta0),
                           pairing_kernel_regulated(pp, disp, f, g, l, eta0 / 2.0),
                           pairing_kernel_regulated(pp, disp, f, g, l, eta0 / 4.0));
}

cplx bose_kernel(const PhysParams& pp, const Dispersion& disp, double omega_probe,
                 const FormFactor& f, const FormFactor& g) {
  require_dim1(pp, "bose_kernel");
  std::vector<ShellRoot> roots;
  if (std::holds_alternative<ConstantDispersion>(disp.kind())) {
    throw std::invalid_argument("bose_kernel: constant dispersion has no simple probing shell");
  }
  if (auto* lin = std::get_if<LinearDispersion>(&disp.kind())) {
    if (omega_probe > 0.0) {
      roots = {{-omega_probe / lin->c, lin->c}, {omega_probe / lin->c, lin->c}};
    } else if (omega_probe == 0.0) {
      roots = {{0.0, lin->c}};
    }
  } else {
    const auto& q = std::get<QuadraticDispersion>(disp.kind());
    const double excess = omega_probe - q.omega0;
    if (excess >= 0.0) {
      const double k = std::sqrt(2.0 * q.mu * excess);
      roots = {{-k, k / q.mu}, {k, k / q.mu}};
      if (k == 0.0) roots.resize(1);
    }
  }
  check_roots(pp, omega_probe, roots);
  const FormFactor density = pair_density(f, g);
  cplx s = 0.0;
  for (const auto& r : roots) s += density(r.k) / r.jacobian;
  return kTwoPi * s;
}

cplx time_kernel(const PhysParams& pp, const Dispersion& disp, const FormFactor& f,
                 const FormFactor& g, std::span<const double> l, double v) {
  const FormFactor density = pair_density(f, g);
  const std::size_t d = density.dim();
  if (l.size() != d) throw std::invalid_argument("time_kernel: dimension mismatch");

  if (!disp.is_linear()) {
    const double a = pp.hbar / (2.0 * pp.mass) + disp.curvature();
    const double prec = density.precision();
    const cplx alpha_diag = cplx(0.5 * prec, -v * a);
    Eigen::MatrixXcd alpha = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    Eigen::VectorXcd beta(static_cast<Eigen::Index>(d));
    cplx gamma(0.0, v * disp.offset());
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      alpha(ii, ii) = alpha_diag;
      beta(ii) = cplx(prec * density.center[i], -v * l[i] / pp.mass);
      gamma -= 0.5 * prec * density.center[i] * density.center[i];
    }
    if (density.amplitude == 0.0) return 0.0;
    return density.amplitude * detail::gaussian_integral(alpha, beta, gamma);
  }

  if (d != 1) throw std::invalid_argument("time_kernel: linear dispersion supported in d = 1 only");
  const double lv = l[0];
  const auto [lo, hi] = support_window(density);
  double dmin = delta_energy(pp, disp, lv, lo), dmax = dmin;
  for (int i = 1; i <= 64; ++i) {
    const double x = delta_energy(pp, disp, lv, lo + (hi - lo) * i / 64.0);
    dmin = std::min(dmin, x);
    dmax = std::max(dmax, x);
  }
  const auto pieces = static_cast<std::size_t>(
      std::clamp(std::ceil(std::abs(v) * (dmax - dmin) / kTwoPi), 1.0, 4000.0));
  std::vector<double> interior{0.0};
  for (std::size_t i = 1; i < pieces; ++i) {
    interior.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(pieces));
  }
  const auto points = quad::make_breakpoints(lo, hi, interior);
  auto integrand = [&](double k) {
    return density(k) * std::polar(1.0, v * delta_energy(pp, disp, lv, k));
  };
  quad::Options opts;
  opts.rel_tol = pp.quad_tol;
  opts.abs_tol = 1e-15 * std::abs(density.amplitude) * density.width;
  return quad::integrate(integrand, points, opts).value;
}

cplx time_kernel(const PhysParams& pp, const Dispersion& disp, const FormFactor& f,
                 const FormFactor& g, double l, double v) {
  return time_kernel(pp, disp, f, g, std::span<const double>(&l, 1), v);
}

}  // namespace ifock
