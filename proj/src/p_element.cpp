#include "ifock/p_element.h"

#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ifock {

struct PElement::Node {
  Kind kind = Kind::Constant;
  cplx value{0.0, 0.0};  // Constant value, or the factor of a Scale node
  std::shared_ptr<const SpectralContext> ctx;
  FormFactor density;
  std::shared_ptr<const Node> left;
  std::shared_ptr<const Node> right;

  mutable std::mutex cache_mutex;
  mutable std::map<double, cplx> cache;

  cplx eval(double p) const;
  cplx compute(double p) const;
};

namespace {

using NodePtr = std::shared_ptr<const PElement::Node>;

std::shared_ptr<PElement::Node> make_node(PElement::Kind kind) {
  auto n = std::make_shared<PElement::Node>();
  n->kind = kind;
  return n;
}

bool is_const(const NodePtr& n) { return n->kind == PElement::Kind::Constant; }

}  // namespace

cplx PElement::Node::eval(double p) const {
  if (kind == Kind::Constant) return value;
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(p); it != cache.end()) return it->second;
  }
  const cplx v = compute(p);
  std::lock_guard lock(cache_mutex);
  cache.emplace(p, v);
  return v;
}

cplx PElement::Node::compute(double p) const {
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::Sum:
      return left->eval(p) + right->eval(p);
    case Kind::Product:
      return left->eval(p) * right->eval(p);
    case Kind::Scale:
      return value * left->eval(p);
    case Kind::Transform:
    case Kind::Convolution: {
      const auto& pp = ctx->phys;
      cplx s = 0.0;
      for (const auto& r : shell_roots(pp, ctx->dispersion, p)) {
        const cplx inner = kind == Kind::Transform ? cplx(1.0) : left->eval(p - pp.hbar * r.k);
        s += inner * density(r.k) / r.jacobian;
      }
      return 2.0 * std::numbers::pi * s;
    }
  }
  throw std::logic_error("PElement: unknown node kind");
}

PElement::PElement() : node_(make_node(Kind::Constant)) {}

PElement PElement::constant(cplx c) {
  auto n = make_node(Kind::Constant);
  n->value = c;
  return PElement(n);
}

PElement PElement::transform(std::shared_ptr<const SpectralContext> ctx, FormFactor density) {
  if (!ctx) throw std::invalid_argument("PElement::transform: null context");
  if (density.amplitude == 0.0) return PElement();
  auto n = make_node(Kind::Transform);
  n->ctx = std::move(ctx);
  n->density = std::move(density);
  return PElement(n);
}

PElement PElement::convolution(std::shared_ptr<const SpectralContext> ctx, PElement inner,
                               FormFactor density) {
  if (inner.is_zero() || density.amplitude == 0.0) return PElement();
  if (inner.kind() == Kind::Constant) {
    // c ∗ F̃ = c F̃ exactly
    return inner.constant_value() * transform(std::move(ctx), std::move(density));
  }
  if (!ctx) throw std::invalid_argument("PElement::convolution: null context");
  auto n = make_node(Kind::Convolution);
  n->ctx = std::move(ctx);
  n->density = std::move(density);
  n->left = inner.node_;
  return PElement(n);
}

PElement::Kind PElement::kind() const { return node_->kind; }

bool PElement::is_zero() const { return is_const(node_) && node_->value == 0.0; }

cplx PElement::constant_value() const {
  if (!is_const(node_)) throw std::logic_error("PElement: not a constant");
  return node_->value;
}

cplx PElement::operator()(double p) const { return node_->eval(p); }

std::string PElement::describe() const {
  std::ostringstream os;
  auto rec = [&os](auto&& self, const NodePtr& n) -> void {
    switch (n->kind) {
      case Kind::Constant:
        os << n->value;
        break;
      case Kind::Transform:
        os << "T[" << n->density.amplitude << ",c=" << n->density.center[0]
           << ",w=" << n->density.width << "]";
        break;
      case Kind::Convolution:
        os << '(';
        self(self, n->left);
        os << " # T[" << n->density.amplitude << ",c=" << n->density.center[0]
           << ",w=" << n->density.width << "])";
        break;
      case Kind::Sum:
        os << '(';
        self(self, n->left);
        os << " + ";
        self(self, n->right);
        os << ')';
        break;
      case Kind::Product:
        os << '(';
        self(self, n->left);
        os << " * ";
        self(self, n->right);
        os << ')';
        break;
      case Kind::Scale:
        os << n->value << '*';
        self(self, n->left);
        break;
    }
  };
  rec(rec, node_);
  return os.str();
}

PElement operator+(const PElement& x, const PElement& y) {
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  if (is_const(x.node_) && is_const(y.node_)) return PElement::constant(x.node_->value + y.node_->value);
  auto n = make_node(PElement::Kind::Sum);
  n->left = x.node_;
  n->right = y.node_;
  return PElement(n);
}

PElement operator-(const PElement& x, const PElement& y) { return x + cplx(-1.0) * y; }

PElement operator*(cplx s, const PElement& x) {
  if (s == 0.0 || x.is_zero()) return PElement();
  if (s == 1.0) return x;
  if (is_const(x.node_)) return PElement::constant(s * x.node_->value);
  auto n = make_node(PElement::Kind::Scale);
  n->value = s;
  n->left = x.node_;
  return PElement(n);
}

PElement operator*(const PElement& x, const PElement& y) {
  if (is_const(x.node_)) return x.node_->value * y;
  if (is_const(y.node_)) return y.node_->value * x;
  auto n = make_node(PElement::Kind::Product);
  n->left = x.node_;
  n->right = y.node_;
  return PElement(n);
}

PElement convolve(const PElement& lhs, const PElement& rhs) {
  const auto& r = rhs.node_;
  switch (r->kind) {
    case PElement::Kind::Constant:
      if (r->value == 0.0) return PElement();
      throw std::invalid_argument("convolve: right operand is a bare constant");
    case PElement::Kind::Transform:
      return PElement::convolution(r->ctx, lhs, r->density);
    case PElement::Kind::Convolution:
      return PElement::convolution(r->ctx, lhs * PElement(r->left), r->density);
    case PElement::Kind::Sum:
      return convolve(lhs, PElement(r->left)) + convolve(lhs, PElement(r->right));
    case PElement::Kind::Scale:
      return r->value * convolve(lhs, PElement(r->left));
    case PElement::Kind::Product:
      throw std::invalid_argument("convolve: right operand is a pointwise product");
  }
  throw std::logic_error("convolve: unknown node kind");
}

bool approx_equal(const PElement& x, const PElement& y, std::span<const double> grid, double tol) {
  for (double p : grid) {
    const cplx a = x(p), b = y(p);
    if (std::abs(a - b) > tol * (1.0 + std::max(std::abs(a), std::abs(b)))) return false;
  }
  return true;
}

}  // namespace ifock
