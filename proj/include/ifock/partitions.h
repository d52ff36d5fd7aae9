#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ifock {

enum class Role { Annihilator = 0, Creator = 1 };

// Creator/annihilator pattern of an operator word.
//
// IMPORTANT: position 1 is the RIGHTMOST factor of the product, i.e. the
// operator that acts on the vacuum first. A word X_{2n} ... X_2 X_1 is stored
// as roles = {role(X_1), role(X_2), ..., role(X_{2n})}. Reversing this silently
// changes every moment.
class EpsilonSeq {
 public:
  EpsilonSeq() = default;
  explicit EpsilonSeq(std::vector<Role> roles);

  /// From 0/1 digits in position order (ε₁, ε₂, ...), 1 = creator.
  static EpsilonSeq from_bits(const std::vector<int>& bits);
  /// Parses "1,1,0,0" (comma list in position order).
  static EpsilonSeq parse(std::string_view text);

  std::size_t size() const { return roles_.size(); }
  std::size_t order() const { return roles_.size() / 2; }
  /// 1-based position.
  Role at(std::size_t position) const { return roles_.at(position - 1); }
  bool is_creator(std::size_t position) const { return at(position) == Role::Creator; }
  const std::vector<Role>& roles() const { return roles_; }

  std::string to_string() const;

  friend bool operator==(const EpsilonSeq&, const EpsilonSeq&) = default;

 private:
  std::vector<Role> roles_;
};

/// A contraction of the annihilator at `absorber` with the creator at
/// `emitter` (1-based positions, absorber > emitter).
struct Pair {
  std::size_t absorber;
  std::size_t emitter;

  friend bool operator==(const Pair&, const Pair&) = default;
  friend auto operator<=>(const Pair&, const Pair&) = default;
};

// Pairs are kept sorted by emitter position, so pair index h corresponds to
// the h-th creator m_h counted from the right.
class Pairing {
 public:
  Pairing() = default;
  explicit Pairing(std::vector<Pair> pairs);

  const std::vector<Pair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  const Pair& operator[](std::size_t h) const { return pairs_[h]; }

  /// Ordered creator positions m_1 < m_2 < ...
  std::vector<std::size_t> emitters() const;

  /// Throws std::invalid_argument unless this is a perfect matching of
  /// 1..eps.size() compatible with the roles of eps.
  void validate(const EpsilonSeq& eps) const;

  std::string to_string() const;

  friend bool operator==(const Pairing&, const Pairing&) = default;

 private:
  std::vector<Pair> pairs_;
};

/// Largest word length accepted by enumerate_pairings.
inline constexpr std::size_t kMaxEnumerationLength = 16;

bool is_nontrivial(const EpsilonSeq& eps);

/// All pairings with absorber > emitter. Empty for trivial sequences.
/// Exponential; throws std::length_error beyond kMaxEnumerationLength.
std::vector<Pairing> enumerate_pairings(const EpsilonSeq& eps);

bool is_noncrossing(const Pairing& pairing);

/// The unique non-crossing pairing (stack scan), or nullopt when eps is
/// trivial.
std::optional<Pairing> wigner_pairing(const EpsilonSeq& eps);

/// Indices r of the pairs whose interval strictly contains the interval of
/// pair h. Throws std::invalid_argument on a crossing pairing.
std::vector<std::size_t> enclosing_pairs(const Pairing& pairing, std::size_t h);

}  // namespace ifock
