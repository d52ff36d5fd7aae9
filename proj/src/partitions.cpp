#include "ifock/partitions.h"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace ifock {

EpsilonSeq::EpsilonSeq(std::vector<Role> roles) : roles_(std::move(roles)) {
  if (roles_.size() < 2 || roles_.size() % 2 != 0) {
    throw std::invalid_argument("epsilon sequence must have even length >= 2");
  }
}

EpsilonSeq EpsilonSeq::from_bits(const std::vector<int>& bits) {
  std::vector<Role> roles;
  roles.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::invalid_argument("epsilon entries must be 0 or 1");
    roles.push_back(b == 1 ? Role::Creator : Role::Annihilator);
  }
  return EpsilonSeq(std::move(roles));
}

EpsilonSeq EpsilonSeq::parse(std::string_view text) {
  std::vector<int> bits;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto token = text.substr(start, end - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    int value = -1;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      throw std::invalid_argument("cannot parse epsilon entry '" + std::string(token) + "'");
    }
    bits.push_back(value);
    start = end + 1;
  }
  return from_bits(bits);
}

std::string EpsilonSeq::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < roles_.size(); ++i) {
    if (i) out += ',';
    out += roles_[i] == Role::Creator ? '1' : '0';
  }
  return out;
}

Pairing::Pairing(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end(),
            [](const Pair& x, const Pair& y) { return x.emitter < y.emitter; });
}

std::vector<std::size_t> Pairing::emitters() const {
  std::vector<std::size_t> out;
  out.reserve(pairs_.size());
  for (const auto& p : pairs_) out.push_back(p.emitter);
  return out;
}

void Pairing::validate(const EpsilonSeq& eps) const {
  if (2 * pairs_.size() != eps.size()) {
    throw std::invalid_argument("pairing does not cover the sequence");
  }
  std::vector<bool> seen(eps.size() + 1, false);
  for (const auto& p : pairs_) {
    if (p.absorber <= p.emitter) throw std::invalid_argument("pair with absorber <= emitter");
    for (std::size_t pos : {p.absorber, p.emitter}) {
      if (pos == 0 || pos > eps.size() || seen[pos]) {
        throw std::invalid_argument("pairing is not a perfect matching");
      }
      seen[pos] = true;
    }
    if (!eps.is_creator(p.emitter) || eps.is_creator(p.absorber)) {
      throw std::invalid_argument("pair roles do not match the sequence");
    }
  }
}

std::string Pairing::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t h = 0; h < pairs_.size(); ++h) {
    if (h) os << ',';
    os << '(' << pairs_[h].absorber << ',' << pairs_[h].emitter << ')';
  }
  os << '}';
  return os.str();
}

bool is_nontrivial(const EpsilonSeq& eps) {
  long depth = 0;
  for (Role r : eps.roles()) {
    depth += r == Role::Creator ? 1 : -1;
    if (depth < 0) return false;
  }
  return depth == 0;
}

namespace {

void extend_pairings(const EpsilonSeq& eps, std::size_t position,
                     std::vector<std::size_t>& open, std::vector<Pair>& current,
                     std::vector<Pairing>& out) {
  if (position > eps.size()) {
    if (open.empty()) out.emplace_back(current);
    return;
  }
  if (eps.is_creator(position)) {
    open.push_back(position);
    extend_pairings(eps, position + 1, open, current, out);
    open.pop_back();
    return;
  }
  // any currently unmatched creator to the right may be absorbed here
  for (std::size_t i = 0; i < open.size(); ++i) {
    std::size_t emitter = open[i];
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(i));
    current.push_back({position, emitter});
    extend_pairings(eps, position + 1, open, current, out);
    current.pop_back();
    open.insert(open.begin() + static_cast<std::ptrdiff_t>(i), emitter);
  }
}

}  // namespace

std::vector<Pairing> enumerate_pairings(const EpsilonSeq& eps) {
  if (eps.size() > kMaxEnumerationLength) {
    throw std::length_error("enumerate_pairings: word longer than " +
                            std::to_string(kMaxEnumerationLength));
  }
  std::vector<Pairing> out;
  if (!is_nontrivial(eps)) return out;
  std::vector<std::size_t> open;
  std::vector<Pair> current;
  extend_pairings(eps, 1, open, current, out);
  return out;
}

namespace {

bool crosses(const Pair& x, const Pair& y) {
  auto inside = [](std::size_t pos, const Pair& p) {
    return p.emitter < pos && pos < p.absorber;
  };
  return inside(y.emitter, x) != inside(y.absorber, x);
}

}  // namespace

bool is_noncrossing(const Pairing& pairing) {
  const auto& ps = pairing.pairs();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      if (crosses(ps[i], ps[j])) return false;
    }
  }
  return true;
}

std::optional<Pairing> wigner_pairing(const EpsilonSeq& eps) {
  std::vector<std::size_t> stack;
  std::vector<Pair> pairs;
  for (std::size_t pos = 1; pos <= eps.size(); ++pos) {
    if (eps.is_creator(pos)) {
      stack.push_back(pos);
    } else {
      if (stack.empty()) return std::nullopt;
      pairs.push_back({pos, stack.back()});
      stack.pop_back();
    }
  }
  if (!stack.empty()) return std::nullopt;
  return Pairing(std::move(pairs));
}

std::vector<std::size_t> enclosing_pairs(const Pairing& pairing, std::size_t h) {
  if (!is_noncrossing(pairing)) {
    throw std::invalid_argument("enclosing_pairs: pairing is crossing");
  }
  const auto& ps = pairing.pairs();
  const Pair& inner = ps.at(h);
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < ps.size(); ++r) {
    if (ps[r].emitter < inner.emitter && inner.absorber < ps[r].absorber) out.push_back(r);
  }
  return out;
}

}  // namespace ifock
