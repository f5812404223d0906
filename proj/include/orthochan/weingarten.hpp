#pragma once

// Exact and leading-order orthogonal Weingarten functions.
//
// Wg_n is the (pseudo-)inverse of the loop-counting Gram matrix
// G(a, b) = n^{#loops of G_{a,b}} over pairings of 2m points.

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "orthochan/pairings.hpp"

namespace orthochan {

struct WeingartenTable {
  int m = 0;
  double n = 0.0;
  std::vector<Pairing> pairings;  // canonical order
  Eigen::MatrixXd values;         // symmetric, indexed like `pairings`
  int rank = 0;                   // rank of the Gram matrix after the cutoff

  bool is_full_rank() const { return rank == static_cast<int>(pairings.size()); }
  double operator()(std::size_t a, std::size_t b) const {
    return values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
};

// Relative eigenvalue cutoff for the pseudo-inverse.
inline constexpr double kPseudoInverseCutoff = 1e-12;

// G(a, b) = n^{connected_components(a, b)} in canonical pairing order.
Eigen::MatrixXd gram_matrix(int m, double n, const Limits& limits = {});

// Pseudo-inverse of the Gram matrix via a symmetric eigendecomposition.
// Tables are cached per (m, n) in a bounded LRU cache shared by all threads.
std::shared_ptr<const WeingartenTable> wg_exact(int m, double n, const Limits& limits = {});

// Uncached construction, for callers that manage their own lifetime.
WeingartenTable build_weingarten_table(int m, double n, const Limits& limits = {});

// Leading large-n term n^{-m - |ab|/2} Mob(a, b).
double wg_asymptotic(const Pairing& a, const Pairing& b, double n);

// Wg_n as a function of the loop type of (a, b), obtained from a p(m) x p(m)
// linear system instead of the full Gram matrix. Only valid where the Gram
// matrix is invertible; throws ValidationError when the reduced system is
// singular.
class WeingartenClassFunction {
 public:
  WeingartenClassFunction(int m, double n, const Limits& limits = {});

  int m() const { return m_; }
  double n() const { return n_; }
  double operator()(const Pairing& a, const Pairing& b) const;
  double value(const std::vector<int>& loop_type) const;
  const std::map<std::vector<int>, double>& by_type() const { return by_type_; }

 private:
  int m_;
  double n_;
  std::map<std::vector<int>, double> by_type_;
};

// Cache control, mostly for tests.
void set_wg_cache_capacity(std::size_t capacity);
std::size_t wg_cache_size();
void clear_wg_cache();

// Haar average over O(n) of U[i_1 j_1] ... U[i_q j_q], with (i_s, j_s) given
// as index_rows. Odd q gives zero. Indices are zero-based and must be < n.
double integrate_monomial(std::span<const std::pair<int, int>> index_rows, int n,
                          const Limits& limits = {});

}  // namespace orthochan
