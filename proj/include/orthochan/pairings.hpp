#pragma once

/**
 * Permutation and pairing combinatorics behind orthogonal Weingarten calculus.
 *
 * Permutations are zero-indexed image arrays, composed right to left:
 * (a * b)(i) == a(b(i)). A Pairing is a fixed-point-free involution of
 * {0, ..., 2m-1}, i.e. a perfect matching of 2m points.
 *
 * Moment diagrams for p copies of an r-fold channel tensor power carry 2pr
 * boxes labelled by (copy, channel, side). They are packed into integers as
 * ((copy * r) + channel) * 2 + side with side L = 0, R = 1; see BoxLayout.
 */

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace orthochan {

// Brute-force caps. Exceeding one throws BudgetError instead of truncating.
struct Limits {
  std::size_t max_pairings = 10395;    // (2m-1)!! for m = 6
  int max_partial_pairing_points = 8;  // r in enumerate_partial_pairings
  int max_transverse_cells = 5;        // p*r in min_transverse_distance
  int max_dominant_cells = 8;          // p*r in dominant_pairs
  std::size_t max_wg_table = 945;      // pairings per dense Weingarten table (m <= 5)
};

class Permutation {
 public:
  Permutation() = default;
  // Throws ValidationError unless images is a bijection of {0, ..., N-1}.
  explicit Permutation(std::vector<int> images);

  static Permutation identity(int size);

  int size() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
  std::span<const int> images() const { return images_; }

  Permutation inverse() const;
  Permutation operator*(const Permutation& rhs) const;

  int cycle_count() const;
  std::vector<int> cycle_lengths() const;  // descending

  bool operator==(const Permutation&) const = default;
  auto operator<=>(const Permutation&) const = default;

 private:
  std::vector<int> images_;
};

// |sigma| = N - #cycles(sigma): the minimal number of transpositions.
int length(const Permutation& sigma);

class Pairing {
 public:
  Pairing() = default;
  // Throws ValidationError unless sigma is an involution without fixed points.
  explicit Pairing(Permutation sigma);

  // Builds a pairing of `points` points from an explicit list of pairs.
  static Pairing from_pairs(int points, std::span<const std::pair<int, int>> pairs);

  const Permutation& permutation() const { return perm_; }
  int points() const { return perm_.size(); }
  int half_size() const { return perm_.size() / 2; }
  int partner(int i) const { return perm_(i); }

  // Pairs {i, j} with i < j, sorted by i.
  std::vector<std::pair<int, int>> pairs() const;

  bool operator==(const Pairing&) const = default;
  auto operator<=>(const Pairing&) const = default;

 private:
  Permutation perm_;
};

inline Permutation operator*(const Pairing& a, const Pairing& b) {
  return a.permutation() * b.permutation();
}

// (2m-1)!!
std::size_t pairing_count(int m);

// All pairings of 2m points, smallest unmatched point first, partners tried
// in increasing order. Index in this list is the canonical pairing index.
std::vector<Pairing> enumerate_pairings(int m, const Limits& limits = {});

// Position of `pairing` in enumerate_pairings(pairing.half_size()).
std::size_t canonical_index(const Pairing& pairing);

// Number of connected components of the multigraph G_{a,b} on 2m vertices
// whose edges are the pairs of a and of b. Computed by graph traversal.
int connected_components(const Pairing& a, const Pairing& b);

// Half-lengths c of the loops of G_{a,b} (each loop has 2c vertices and
// carries two a*b cycles of length c), sorted descending. This is the coset
// type of (a, b); it sums to m.
std::vector<int> loop_type(const Pairing& a, const Pairing& b);

std::int64_t catalan(int n);

// Product over loops of G_{a,b} of (-1)^(c-1) Cat_(c-1).
std::int64_t mobius(const Pairing& a, const Pairing& b);

enum class Side : int { L = 0, R = 1 };

struct BoxLabel {
  int copy = 0;     // i in [0, p)
  int channel = 0;  // x in [0, r)
  Side side = Side::L;

  bool operator==(const BoxLabel&) const = default;
};

struct BoxLayout {
  int p = 1;
  int r = 1;

  int points() const { return 2 * p * r; }
  int cells() const { return p * r; }
  int encode(const BoxLabel& label) const;
  BoxLabel decode(int index) const;
};

// Pairs of beta joining two R-side boxes.
int bumps(const Pairing& beta, int p, int r);
// Pairs of beta joining two L-side boxes; always equal to bumps().
int left_bumps(const Pairing& beta, int p, int r);

bool is_transverse(const Pairing& tau, int p, int r);

struct TransverseMinimum {
  int distance = 0;
  std::vector<Pairing> minimizers;  // sorted
};

// min over transverse tau of |tau * beta|, with every minimizer, by brute
// force over all (pr)! transverse pairings.
TransverseMinimum min_transverse_distance(const Pairing& beta, int p, int r,
                                          const Limits& limits = {});

// Structural form of a minimizer: tau keeps every L-R pair of beta, and maps
// each R-bump of beta onto an L-bump of beta.
bool is_bump_resolving(const Pairing& tau, const Pairing& beta, int p, int r);

// A set of disjoint unordered pairs on {0, ..., size-1}; points not covered
// are singles.
class PartialPairing {
 public:
  PartialPairing() = default;
  // Normalizes pair order; throws ValidationError on overlap or range errors.
  PartialPairing(int size, std::vector<std::pair<int, int>> pairs);

  int size() const { return size_; }
  int pair_count() const { return static_cast<int>(pairs_.size()); }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  std::vector<int> singles() const;
  bool is_subset_of(const PartialPairing& other) const;

  bool operator==(const PartialPairing&) const = default;
  auto operator<=>(const PartialPairing&) const = default;

 private:
  int size_ = 0;
  std::vector<std::pair<int, int>> pairs_;
};

// sum_j r! / (j! 2^j (r-2j)!)
std::size_t partial_pairing_count(int r);

// Canonical order: the smallest open point is first left single, then paired
// with each larger open point in turn. The empty partial pairing comes first.
std::vector<PartialPairing> enumerate_partial_pairings(int r, const Limits& limits = {});

// Maximal partial pairings: floor(r/2) pairs.
std::vector<PartialPairing> maximal_partial_pairings(int r);

// {(0,1), (2,3), ...}, leaving r-1 single when r is odd.
PartialPairing canonical_maximal_partial_pairing(int r);

struct Wiring {
  Pairing delta;  // [i,x,L] <-> [i,x,R]: partial traces
  Pairing gamma;  // [i,x,L] <-> [i-1,x,R] (cyclic in i): the matrix trace
};

Wiring delta_gamma(int p, int r);

// For a partial pairing of the p*r cells (cell index i*r + x): the pairing
// with a symmetric bump ([c1,L],[c2,L])([c1,R],[c2,R]) for every cell pair
// and a horizontal wire ([c,L],[c,R]) on every single cell.
Pairing bump_pairing(const PartialPairing& cells, int p, int r);

// True when every cell pair stays inside one copy index i.
bool is_inward(const PartialPairing& cells, int r);

// Number of cell pairs that stay inside one copy index.
int inward_pair_count(const PartialPairing& cells, int r);

struct DominantPair {
  PartialPairing a;  // subset of b
  PartialPairing b;
};

// All (A, B) with B a partial pairing of the p*r cells and A a subset of B;
// with inward_only, B is restricted to inward cell pairings.
std::vector<DominantPair> dominant_pairs(int p, int r, bool inward_only,
                                         const Limits& limits = {});

}  // namespace orthochan
