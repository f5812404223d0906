#include "orthochan/pairings.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "orthochan/error.hpp"

namespace orthochan {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  std::vector<int> component_sizes() {
    std::vector<int> sizes;
    for (int i = 0; i < static_cast<int>(parent_.size()); ++i) {
      if (find(i) == i) sizes.push_back(size_[i]);
    }
    return sizes;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

void require_same_size(const Pairing& a, const Pairing& b) {
  if (a.points() != b.points()) {
    throw ValidationError("pairings act on different point counts: " + std::to_string(a.points()) +
                          " vs " + std::to_string(b.points()));
  }
}

void require_layout(const Pairing& sigma, int p, int r) {
  if (p < 1 || r < 1) throw ValidationError("p and r must be positive");
  if (sigma.points() != 2 * p * r) {
    throw ValidationError("pairing has " + std::to_string(sigma.points()) + " points, expected 2pr = " +
                          std::to_string(2 * p * r));
  }
}

Side side_of(int index) { return (index & 1) ? Side::R : Side::L; }

void enumerate_pairings_rec(std::vector<int>& images, std::vector<bool>& used, int points,
                            std::vector<Pairing>& out) {
  int first = 0;
  while (first < points && used[first]) ++first;
  if (first == points) {
    out.emplace_back(Permutation(images));
    return;
  }
  used[first] = true;
  for (int j = first + 1; j < points; ++j) {
    if (used[j]) continue;
    used[j] = true;
    images[first] = j;
    images[j] = first;
    enumerate_pairings_rec(images, used, points, out);
    used[j] = false;
  }
  used[first] = false;
}

void enumerate_partial_rec(int r, std::vector<bool>& used, std::vector<std::pair<int, int>>& pairs,
                           int from, std::vector<PartialPairing>& out) {
  int first = from;
  while (first < r && used[first]) ++first;
  if (first >= r) {
    out.emplace_back(r, pairs);
    return;
  }
  used[first] = true;
  enumerate_partial_rec(r, used, pairs, first + 1, out);
  for (int j = first + 1; j < r; ++j) {
    if (used[j]) continue;
    used[j] = true;
    pairs.emplace_back(first, j);
    enumerate_partial_rec(r, used, pairs, first + 1, out);
    pairs.pop_back();
    used[j] = false;
  }
  used[first] = false;
}

std::size_t double_factorial_odd(int m) {
  std::size_t v = 1;
  for (int k = 2 * m - 1; k > 1; k -= 2) v *= static_cast<std::size_t>(k);
  return v;
}

}  // namespace

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (int v : images_) {
    if (v < 0 || v >= size() || seen[v]) throw ValidationError("image array is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(int size) {
  std::vector<int> images(static_cast<std::size_t>(size));
  std::iota(images.begin(), images.end(), 0);
  return Permutation(std::move(images));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(images_.size());
  for (int i = 0; i < size(); ++i) inv[images_[i]] = i;
  return Permutation(std::move(inv));
}

Permutation Permutation::operator*(const Permutation& rhs) const {
  if (size() != rhs.size()) throw ValidationError("composing permutations of different sizes");
  std::vector<int> out(images_.size());
  for (int i = 0; i < size(); ++i) out[i] = images_[rhs.images_[i]];
  return Permutation(std::move(out));
}

std::vector<int> Permutation::cycle_lengths() const {
  std::vector<int> lengths;
  std::vector<bool> seen(images_.size(), false);
  for (int i = 0; i < size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (int j = i; !seen[j]; j = images_[j]) {
      seen[j] = true;
      ++len;
    }
    lengths.push_back(len);
  }
  std::sort(lengths.rbegin(), lengths.rend());
  return lengths;
}

int Permutation::cycle_count() const { return static_cast<int>(cycle_lengths().size()); }

int length(const Permutation& sigma) { return sigma.size() - sigma.cycle_count(); }

Pairing::Pairing(Permutation sigma) : perm_(std::move(sigma)) {
  for (int i = 0; i < perm_.size(); ++i) {
    if (perm_(i) == i || perm_(perm_(i)) != i) {
      throw ValidationError("permutation is not a fixed-point-free involution");
    }
  }
}

Pairing Pairing::from_pairs(int points, std::span<const std::pair<int, int>> pairs) {
  if (points < 0 || points % 2 != 0) throw ValidationError("a pairing needs an even number of points");
  std::vector<int> images(static_cast<std::size_t>(points), -1);
  for (auto [a, b] : pairs) {
    if (a < 0 || b < 0 || a >= points || b >= points || a == b || images[a] != -1 || images[b] != -1) {
      throw ValidationError("invalid or overlapping pair in pairing");
    }
    images[a] = b;
    images[b] = a;
  }
  if (std::find(images.begin(), images.end(), -1) != images.end()) {
    throw ValidationError("pairs do not cover every point");
  }
  return Pairing(Permutation(std::move(images)));
}

std::vector<std::pair<int, int>> Pairing::pairs() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(half_size()));
  for (int i = 0; i < points(); ++i) {
    if (i < perm_(i)) out.emplace_back(i, perm_(i));
  }
  return out;
}

std::size_t pairing_count(int m) {
  if (m < 0) throw ValidationError("pairing_count needs m >= 0");
  return double_factorial_odd(m);
}

std::vector<Pairing> enumerate_pairings(int m, const Limits& limits) {
  if (m < 1) throw ValidationError("enumerate_pairings needs m >= 1");
  if (m > 12 || pairing_count(m) > limits.max_pairings) {
    throw BudgetError("pairing enumeration limit exceeded: (2m-1)!! for m = " + std::to_string(m) +
                      " is above the cap of " + std::to_string(limits.max_pairings));
  }
  std::vector<Pairing> out;
  out.reserve(pairing_count(m));
  std::vector<int> images(static_cast<std::size_t>(2 * m), 0);
  std::vector<bool> used(static_cast<std::size_t>(2 * m), false);
  enumerate_pairings_rec(images, used, 2 * m, out);
  return out;
}

std::size_t canonical_index(const Pairing& pairing) {
  std::vector<int> open(static_cast<std::size_t>(pairing.points()));
  std::iota(open.begin(), open.end(), 0);
  std::size_t index = 0;
  while (!open.empty()) {
    const int first = open.front();
    const int partner = pairing.partner(first);
    const auto pos = static_cast<std::size_t>(std::find(open.begin(), open.end(), partner) - open.begin());
    const int remaining_half = static_cast<int>(open.size()) / 2 - 1;
    index += (pos - 1) * double_factorial_odd(remaining_half);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pos));
    open.erase(open.begin());
  }
  return index;
}

int connected_components(const Pairing& a, const Pairing& b) {
  require_same_size(a, b);
  DisjointSets sets(a.points());
  for (int i = 0; i < a.points(); ++i) {
    sets.unite(i, a.partner(i));
    sets.unite(i, b.partner(i));
  }
  return static_cast<int>(sets.component_sizes().size());
}

std::vector<int> loop_type(const Pairing& a, const Pairing& b) {
  require_same_size(a, b);
  DisjointSets sets(a.points());
  for (int i = 0; i < a.points(); ++i) {
    sets.unite(i, a.partner(i));
    sets.unite(i, b.partner(i));
  }
  std::vector<int> type = sets.component_sizes();
  for (int& s : type) s /= 2;
  std::sort(type.rbegin(), type.rend());
  return type;
}

std::int64_t catalan(int n) {
  if (n < 0) throw ValidationError("catalan index must be non-negative");
  std::int64_t c = 1;
  for (int i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

std::int64_t mobius(const Pairing& a, const Pairing& b) {
  std::int64_t value = 1;
  for (int c : loop_type(a, b)) {
    value *= ((c - 1) % 2 == 0 ? 1 : -1) * catalan(c - 1);
  }
  return value;
}

int BoxLayout::encode(const BoxLabel& label) const {
  if (label.copy < 0 || label.copy >= p || label.channel < 0 || label.channel >= r) {
    throw ValidationError("box label out of range");
  }
  return ((label.copy * r) + label.channel) * 2 + static_cast<int>(label.side);
}

BoxLabel BoxLayout::decode(int index) const {
  if (index < 0 || index >= points()) throw ValidationError("box index out of range");
  const int cell = index / 2;
  return BoxLabel{cell / r, cell % r, side_of(index)};
}

int bumps(const Pairing& beta, int p, int r) {
  require_layout(beta, p, r);
  int count = 0;
  for (auto [a, b] : beta.pairs()) {
    if (side_of(a) == Side::R && side_of(b) == Side::R) ++count;
  }
  return count;
}

int left_bumps(const Pairing& beta, int p, int r) {
  require_layout(beta, p, r);
  int count = 0;
  for (auto [a, b] : beta.pairs()) {
    if (side_of(a) == Side::L && side_of(b) == Side::L) ++count;
  }
  return count;
}

bool is_transverse(const Pairing& tau, int p, int r) {
  require_layout(tau, p, r);
  for (int i = 0; i < tau.points(); ++i) {
    if (side_of(i) == side_of(tau.partner(i))) return false;
  }
  return true;
}

TransverseMinimum min_transverse_distance(const Pairing& beta, int p, int r, const Limits& limits) {
  require_layout(beta, p, r);
  const int cells = p * r;
  if (cells > limits.max_transverse_cells) {
    throw BudgetError("transverse brute force limited to p*r <= " +
                      std::to_string(limits.max_transverse_cells) + ", got " + std::to_string(cells));
  }
  // A transverse pairing is a bijection from L boxes (even) to R boxes (odd).
  std::vector<int> targets(static_cast<std::size_t>(cells));
  for (int c = 0; c < cells; ++c) targets[c] = 2 * c + 1;

  TransverseMinimum result;
  result.distance = beta.points() + 1;
  std::vector<int> images(static_cast<std::size_t>(beta.points()));
  do {
    for (int c = 0; c < cells; ++c) {
      images[2 * c] = targets[c];
      images[targets[c]] = 2 * c;
    }
    Pairing tau{Permutation(images)};
    const int dist = length(tau * beta);
    if (dist < result.distance) {
      result.distance = dist;
      result.minimizers.clear();
    }
    if (dist == result.distance) result.minimizers.push_back(std::move(tau));
  } while (std::next_permutation(targets.begin(), targets.end()));
  std::sort(result.minimizers.begin(), result.minimizers.end());
  return result;
}

bool is_bump_resolving(const Pairing& tau, const Pairing& beta, int p, int r) {
  require_layout(beta, p, r);
  require_same_size(tau, beta);
  if (!is_transverse(tau, p, r)) return false;
  for (auto [a, b] : beta.pairs()) {
    if (side_of(a) != side_of(b)) {
      if (tau.partner(a) != b) return false;
    } else if (side_of(a) == Side::R) {
      const int la = tau.partner(a);
      const int lb = tau.partner(b);
      if (beta.partner(la) != lb) return false;
    }
  }
  return true;
}

PartialPairing::PartialPairing(int size, std::vector<std::pair<int, int>> pairs)
    : size_(size), pairs_(std::move(pairs)) {
  if (size_ < 0) throw ValidationError("partial pairing size must be non-negative");
  std::vector<bool> used(static_cast<std::size_t>(size_), false);
  for (auto& [a, b] : pairs_) {
    if (a > b) std::swap(a, b);
    if (a < 0 || b >= size_ || a == b || used[a] || used[b]) {
      throw ValidationError("partial pairing has overlapping or out-of-range pairs");
    }
    used[a] = used[b] = true;
  }
  std::sort(pairs_.begin(), pairs_.end());
}

std::vector<int> PartialPairing::singles() const {
  std::vector<bool> used(static_cast<std::size_t>(size_), false);
  for (auto [a, b] : pairs_) used[a] = used[b] = true;
  std::vector<int> out;
  for (int i = 0; i < size_; ++i) {
    if (!used[i]) out.push_back(i);
  }
  return out;
}

bool PartialPairing::is_subset_of(const PartialPairing& other) const {
  return size_ == other.size_ &&
         std::includes(other.pairs_.begin(), other.pairs_.end(), pairs_.begin(), pairs_.end());
}

std::size_t partial_pairing_count(int r) {
  if (r < 0) throw ValidationError("partial_pairing_count needs r >= 0");
  // Telephone numbers: T(r) = T(r-1) + (r-1) T(r-2).
  std::size_t prev = 1, cur = 1;
  for (int n = 2; n <= r; ++n) {
    const std::size_t next = cur + static_cast<std::size_t>(n - 1) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<PartialPairing> enumerate_partial_pairings(int r, const Limits& limits) {
  if (r < 1) throw ValidationError("enumerate_partial_pairings needs r >= 1");
  if (r > limits.max_partial_pairing_points) {
    throw BudgetError("partial pairing enumeration limited to r <= " +
                      std::to_string(limits.max_partial_pairing_points) + ", got " + std::to_string(r));
  }
  std::vector<PartialPairing> out;
  out.reserve(partial_pairing_count(r));
  std::vector<bool> used(static_cast<std::size_t>(r), false);
  std::vector<std::pair<int, int>> pairs;
  enumerate_partial_rec(r, used, pairs, 0, out);
  return out;
}

std::vector<PartialPairing> maximal_partial_pairings(int r) {
  std::vector<PartialPairing> out;
  for (auto& b : enumerate_partial_pairings(r)) {
    if (b.pair_count() == r / 2) out.push_back(std::move(b));
  }
  return out;
}

PartialPairing canonical_maximal_partial_pairing(int r) {
  if (r < 1) throw ValidationError("r must be positive");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < r; i += 2) pairs.emplace_back(i, i + 1);
  return PartialPairing(r, std::move(pairs));
}

Wiring delta_gamma(int p, int r) {
  if (p < 1 || r < 1) throw ValidationError("delta_gamma needs p, r >= 1");
  const BoxLayout layout{p, r};
  std::vector<std::pair<int, int>> delta_pairs, gamma_pairs;
  for (int i = 0; i < p; ++i) {
    for (int x = 0; x < r; ++x) {
      const int left = layout.encode({i, x, Side::L});
      delta_pairs.emplace_back(left, layout.encode({i, x, Side::R}));
      gamma_pairs.emplace_back(left, layout.encode({(i + p - 1) % p, x, Side::R}));
    }
  }
  return Wiring{Pairing::from_pairs(layout.points(), delta_pairs),
                Pairing::from_pairs(layout.points(), gamma_pairs)};
}

Pairing bump_pairing(const PartialPairing& cells, int p, int r) {
  if (cells.size() != p * r) throw ValidationError("cell partial pairing must cover p*r cells");
  std::vector<std::pair<int, int>> pairs;
  for (auto [c1, c2] : cells.pairs()) {
    pairs.emplace_back(2 * c1, 2 * c2);
    pairs.emplace_back(2 * c1 + 1, 2 * c2 + 1);
  }
  for (int c : cells.singles()) pairs.emplace_back(2 * c, 2 * c + 1);
  return Pairing::from_pairs(2 * p * r, pairs);
}

int inward_pair_count(const PartialPairing& cells, int r) {
  int count = 0;
  for (auto [c1, c2] : cells.pairs()) {
    if (c1 / r == c2 / r) ++count;
  }
  return count;
}

bool is_inward(const PartialPairing& cells, int r) { return inward_pair_count(cells, r) == cells.pair_count(); }

std::vector<DominantPair> dominant_pairs(int p, int r, bool inward_only, const Limits& limits) {
  if (p < 1 || r < 1) throw ValidationError("dominant_pairs needs p, r >= 1");
  if (p * r > limits.max_dominant_cells) {
    throw BudgetError("dominant pair enumeration limited to p*r <= " +
                      std::to_string(limits.max_dominant_cells) + ", got " + std::to_string(p * r));
  }
  Limits cell_limits = limits;
  cell_limits.max_partial_pairing_points = std::max(limits.max_partial_pairing_points, p * r);
  std::vector<DominantPair> out;
  for (const auto& b : enumerate_partial_pairings(p * r, cell_limits)) {
    if (inward_only && !is_inward(b, r)) continue;
    const auto& pairs = b.pairs();
    const std::size_t subsets = std::size_t{1} << pairs.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      std::vector<std::pair<int, int>> chosen;
      for (std::size_t j = 0; j < pairs.size(); ++j) {
        if (mask & (std::size_t{1} << j)) chosen.push_back(pairs[j]);
      }
      out.push_back({PartialPairing(p * r, std::move(chosen)), b});
    }
  }
  return out;
}

}  // namespace orthochan
