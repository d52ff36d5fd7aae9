#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ifock/partitions.h"

namespace ifock {

using cplx = std::complex<double>;

// Finite-dimensional test space with ⟨x,y⟩ = x^H G y, G Hermitian positive
// definite (identity by default).
class TestSpace {
 public:
  explicit TestSpace(std::size_t dim);
  explicit TestSpace(Eigen::MatrixXcd gram);

  std::size_t dim() const { return static_cast<std::size_t>(gram_.rows()); }
  const Eigen::MatrixXcd& gram() const { return gram_; }

  cplx inner(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) const;

 private:
  Eigen::MatrixXcd gram_;
};

// Vector in the full Fock space over a TestSpace, truncated at `max_level`.
// Level n holds the D^n coordinates of an element of T^{⊗n}; for
// φ₁⊗…⊗φₙ the first factor is the most significant index.
class FockVector {
 public:
  FockVector(std::size_t dim, std::size_t max_level);

  static FockVector vacuum(std::size_t dim, std::size_t max_level);

  std::size_t dim() const { return dim_; }
  std::size_t max_level() const { return levels_.size() - 1; }

  Eigen::VectorXcd& level(std::size_t n) { return levels_.at(n); }
  const Eigen::VectorXcd& level(std::size_t n) const { return levels_.at(n); }

  /// Norm of everything pushed past max_level by creators so far.
  double truncation_loss() const { return truncation_loss_; }
  void add_truncation_loss(double norm);

 private:
  std::size_t dim_;
  std::vector<Eigen::VectorXcd> levels_;
  double truncation_loss_ = 0.0;
};

/// b†(g): φ₁⊗…⊗φₙ ↦ g⊗φ₁⊗…⊗φₙ. The top level is dropped and its norm added
/// to the truncation loss.
FockVector apply_creator(const TestSpace& space, const Eigen::VectorXcd& g, const FockVector& v);

/// b(g): φ₁⊗…⊗φₙ ↦ ⟨g,φ₁⟩ φ₂⊗…⊗φₙ.
FockVector apply_annihilator(const TestSpace& space, const Eigen::VectorXcd& g,
                             const FockVector& v);

cplx fock_inner(const TestSpace& space, const FockVector& u, const FockVector& v);

/// ⟨Ψ, ∏ b^{ε_j}(g_j) Ψ⟩ by direct evaluation on the truncated space.
/// Throws std::invalid_argument if max_level < n, std::runtime_error on any
/// truncation loss.
cplx free_moment_oracle(const TestSpace& space, const EpsilonSeq& eps,
                        const std::vector<Eigen::VectorXcd>& gs, std::size_t max_level);

/// ∏_j ⟨g_{m̄_j}, g_{m_j}⟩ over the Wigner pairing, 0 for trivial eps.
cplx free_moment_combinatorial(const TestSpace& space, const EpsilonSeq& eps,
                               const std::vector<Eigen::VectorXcd>& gs);

// -- bra-ket words ----------------------------------------------------------

struct BraKetToken {
  enum class Kind { Bra, Ket };
  Kind kind;
  std::size_t label;

  static BraKetToken bra(std::size_t label) { return {Kind::Bra, label}; }
  static BraKetToken ket(std::size_t label) { return {Kind::Ket, label}; }

  friend bool operator==(const BraKetToken&, const BraKetToken&) = default;
};

/// Tokens in written order, left to right.
using BraKetWord = std::vector<BraKetToken>;

/// ⟨bra_label, ket_label⟩.
using ScalarTable = std::function<cplx(std::size_t, std::size_t)>;

struct BraKetReduction {
  cplx scalar{1.0, 0.0};
  /// (bra label, ket label) of every scalar product formed.
  std::vector<std::pair<std::size_t, std::size_t>> contractions;
  BraKetWord residual;
};

/// Positions i with word[i] a bra immediately left of the ket word[i+1].
std::vector<std::size_t> braket_redexes(const BraKetWord& word);

/// Fires the redex at position i, recording it into `into`.
BraKetWord braket_contract_at(const BraKetWord& word, std::size_t i, const ScalarTable& table,
                              BraKetReduction& into);

/// Fires bra-immediately-left-of-ket redexes until none remain.
BraKetReduction braket_reduce(const BraKetWord& word, const ScalarTable& table);

}  // namespace ifock
