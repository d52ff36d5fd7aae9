#include "ifock/free_fock.h"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace ifock {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  while (exp--) out *= base;
  return out;
}

Eigen::MatrixXcd kron_power(const Eigen::MatrixXcd& g, std::size_t n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::MatrixXcd next(out.rows() * g.rows(), out.cols() * g.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) {
        next.block(i * g.rows(), j * g.cols(), g.rows(), g.cols()) = out(i, j) * g;
      }
    }
    out = std::move(next);
  }
  return out;
}

void check_dim(const TestSpace& space, const Eigen::VectorXcd& g, const FockVector& v) {
  if (static_cast<std::size_t>(g.size()) != space.dim() || v.dim() != space.dim()) {
    throw std::invalid_argument("dimension mismatch between test vector and Fock space");
  }
}

}  // namespace

TestSpace::TestSpace(std::size_t dim) : gram_(Eigen::MatrixXcd::Identity(dim, dim)) {
  if (dim == 0) throw std::invalid_argument("TestSpace: dimension must be positive");
}

TestSpace::TestSpace(Eigen::MatrixXcd gram) : gram_(std::move(gram)) {
  if (gram_.rows() == 0 || gram_.rows() != gram_.cols()) {
    throw std::invalid_argument("TestSpace: Gram matrix must be square and non-empty");
  }
  if (!gram_.isApprox(gram_.adjoint(), 1e-12)) {
    throw std::invalid_argument("TestSpace: Gram matrix is not Hermitian");
  }
  Eigen::LLT<Eigen::MatrixXcd> llt(gram_);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("TestSpace: Gram matrix is not positive definite");
  }
}

cplx TestSpace::inner(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) const {
  return x.dot(gram_ * y);  // Eigen's dot conjugates the left operand
}

FockVector::FockVector(std::size_t dim, std::size_t max_level) : dim_(dim) {
  levels_.reserve(max_level + 1);
  for (std::size_t n = 0; n <= max_level; ++n) {
    levels_.push_back(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ipow(dim, n))));
  }
}

FockVector FockVector::vacuum(std::size_t dim, std::size_t max_level) {
  FockVector v(dim, max_level);
  v.level(0)(0) = 1.0;
  return v;
}

void FockVector::add_truncation_loss(double norm) {
  truncation_loss_ = std::hypot(truncation_loss_, norm);
}

FockVector apply_creator(const TestSpace& space, const Eigen::VectorXcd& g, const FockVector& v) {
  check_dim(space, g, v);
  const std::size_t d = v.dim();
  FockVector out(d, v.max_level());
  out.add_truncation_loss(v.truncation_loss());
  for (std::size_t n = 0; n < v.max_level(); ++n) {
    const auto& in = v.level(n);
    auto& dst = out.level(n + 1);
    const auto block = in.size();
    for (std::size_t i = 0; i < d; ++i) {
      dst.segment(static_cast<Eigen::Index>(i) * block, block) = g(static_cast<Eigen::Index>(i)) * in;
    }
  }
  const auto& top = v.level(v.max_level());
  if (top.squaredNorm() > 0.0) {
    const std::size_t n = v.max_level() + 1;
    Eigen::VectorXcd lost(static_cast<Eigen::Index>(ipow(d, n)));
    for (std::size_t i = 0; i < d; ++i) {
      lost.segment(static_cast<Eigen::Index>(i) * top.size(), top.size()) =
          g(static_cast<Eigen::Index>(i)) * top;
    }
    out.add_truncation_loss(std::sqrt(std::abs(lost.dot(kron_power(space.gram(), n) * lost))));
  }
  return out;
}

FockVector apply_annihilator(const TestSpace& space, const Eigen::VectorXcd& g,
                             const FockVector& v) {
  check_dim(space, g, v);
  const std::size_t d = v.dim();
  FockVector out(d, v.max_level());
  out.add_truncation_loss(v.truncation_loss());
  // w_i = ⟨g, e_i⟩
  const Eigen::RowVectorXcd w = g.adjoint() * space.gram();
  for (std::size_t n = 1; n <= v.max_level(); ++n) {
    const auto& in = v.level(n);
    auto& dst = out.level(n - 1);
    const auto block = dst.size();
    for (std::size_t i = 0; i < d; ++i) {
      dst += w(static_cast<Eigen::Index>(i)) * in.segment(static_cast<Eigen::Index>(i) * block, block);
    }
  }
  return out;
}

cplx fock_inner(const TestSpace& space, const FockVector& u, const FockVector& v) {
  if (u.dim() != v.dim() || u.max_level() != v.max_level() || u.dim() != space.dim()) {
    throw std::invalid_argument("fock_inner: incompatible vectors");
  }
  cplx s = 0.0;
  for (std::size_t n = 0; n <= u.max_level(); ++n) {
    s += u.level(n).dot(kron_power(space.gram(), n) * v.level(n));
  }
  return s;
}

cplx free_moment_oracle(const TestSpace& space, const EpsilonSeq& eps,
                        const std::vector<Eigen::VectorXcd>& gs, std::size_t max_level) {
  if (gs.size() != eps.size()) throw std::invalid_argument("free_moment_oracle: need one vector per position");
  if (max_level < eps.order()) {
    throw std::invalid_argument("free_moment_oracle: truncation below the word order");
  }
  FockVector v = FockVector::vacuum(space.dim(), max_level);
  for (std::size_t pos = 1; pos <= eps.size(); ++pos) {
    v = eps.is_creator(pos) ? apply_creator(space, gs[pos - 1], v)
                            : apply_annihilator(space, gs[pos - 1], v);
  }
  if (v.truncation_loss() > 0.0) {
    throw std::runtime_error("free_moment_oracle: truncation loss, raise max_level");
  }
  return v.level(0)(0);
}

cplx free_moment_combinatorial(const TestSpace& space, const EpsilonSeq& eps,
                               const std::vector<Eigen::VectorXcd>& gs) {
  if (gs.size() != eps.size()) {
    throw std::invalid_argument("free_moment_combinatorial: need one vector per position");
  }
  auto pairing = wigner_pairing(eps);
  if (!pairing) return 0.0;
  cplx value = 1.0;
  for (const auto& p : pairing->pairs()) value *= space.inner(gs[p.absorber - 1], gs[p.emitter - 1]);
  return value;
}

std::vector<std::size_t> braket_redexes(const BraKetWord& word) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (word[i].kind == BraKetToken::Kind::Bra && word[i + 1].kind == BraKetToken::Kind::Ket) {
      out.push_back(i);
    }
  }
  return out;
}

BraKetWord braket_contract_at(const BraKetWord& word, std::size_t i, const ScalarTable& table,
                              BraKetReduction& into) {
  if (i + 1 >= word.size() || word[i].kind != BraKetToken::Kind::Bra ||
      word[i + 1].kind != BraKetToken::Kind::Ket) {
    throw std::invalid_argument("braket_contract_at: no bra-ket redex at this position");
  }
  into.scalar *= table(word[i].label, word[i + 1].label);
  into.contractions.emplace_back(word[i].label, word[i + 1].label);
  BraKetWord out;
  out.reserve(word.size() - 2);
  out.insert(out.end(), word.begin(), word.begin() + static_cast<std::ptrdiff_t>(i));
  out.insert(out.end(), word.begin() + static_cast<std::ptrdiff_t>(i + 2), word.end());
  return out;
}

BraKetReduction braket_reduce(const BraKetWord& word, const ScalarTable& table) {
  // A stack of pending tokens: a ket meeting a bra on top of the stack is
  // exactly an adjacent redex of the partially reduced word.
  BraKetReduction out;
  for (const auto& tok : word) {
    if (tok.kind == BraKetToken::Kind::Ket && !out.residual.empty() &&
        out.residual.back().kind == BraKetToken::Kind::Bra) {
      out.scalar *= table(out.residual.back().label, tok.label);
      out.contractions.emplace_back(out.residual.back().label, tok.label);
      out.residual.pop_back();
    } else {
      out.residual.push_back(tok);
    }
  }
  return out;
}

}  // namespace ifock
