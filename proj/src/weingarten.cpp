#include "orthochan/weingarten.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <mutex>
#include <string>

#include "orthochan/error.hpp"

namespace orthochan {
namespace {

struct CacheEntry {
  int m;
  double n;
  std::shared_ptr<const WeingartenTable> table;
};

struct WgCache {
  std::mutex mutex;
  std::list<CacheEntry> entries;  // most recently used first
  std::size_t capacity = 32;
};

WgCache& cache() {
  static WgCache instance;
  return instance;
}

void check_table_budget(int m, const Limits& limits) {
  if (m < 1) throw ValidationError("Weingarten tables need m >= 1");
  if (m > 12 || pairing_count(m) > limits.max_wg_table) {
    throw BudgetError("dense Weingarten table for m = " + std::to_string(m) + " exceeds the cap of " +
                      std::to_string(limits.max_wg_table) + " pairings");
  }
}

}  // namespace

Eigen::MatrixXd gram_matrix(int m, double n, const Limits& limits) {
  check_table_budget(m, limits);
  const auto pairings = enumerate_pairings(m, limits);
  const auto size = static_cast<Eigen::Index>(pairings.size());
  Eigen::MatrixXd gram(size, size);
  for (Eigen::Index a = 0; a < size; ++a) {
    for (Eigen::Index b = a; b < size; ++b) {
      const double v = std::pow(n, connected_components(pairings[a], pairings[b]));
      gram(a, b) = v;
      gram(b, a) = v;
    }
  }
  return gram;
}

WeingartenTable build_weingarten_table(int m, double n, const Limits& limits) {
  if (!(n > 0.0)) throw ValidationError("Weingarten tables need n > 0");
  WeingartenTable table;
  table.m = m;
  table.n = n;
  const Eigen::MatrixXd gram = gram_matrix(m, n, limits);
  table.pairings = enumerate_pairings(m, limits);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition of the Gram matrix failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double cutoff = kPseudoInverseCutoff * lambda.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv(lambda.size());
  table.rank = 0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda(i)) > cutoff) {
      inv(i) = 1.0 / lambda(i);
      ++table.rank;
    } else {
      inv(i) = 0.0;
    }
  }
  const Eigen::MatrixXd& vecs = eig.eigenvectors();
  table.values = vecs * inv.asDiagonal() * vecs.transpose();
  // Symmetrize away rounding asymmetry so lookups agree both ways.
  table.values = 0.5 * (table.values + table.values.transpose()).eval();
  return table;
}

std::shared_ptr<const WeingartenTable> wg_exact(int m, double n, const Limits& limits) {
  auto& c = cache();
  {
    std::lock_guard lock(c.mutex);
    for (auto it = c.entries.begin(); it != c.entries.end(); ++it) {
      if (it->m == m && it->n == n) {
        c.entries.splice(c.entries.begin(), c.entries, it);
        return c.entries.front().table;
      }
    }
  }
  auto table = std::make_shared<const WeingartenTable>(build_weingarten_table(m, n, limits));
  std::lock_guard lock(c.mutex);
  for (const auto& e : c.entries) {
    if (e.m == m && e.n == n) return e.table;
  }
  c.entries.push_front({m, n, table});
  while (c.entries.size() > c.capacity) c.entries.pop_back();
  return table;
}

void set_wg_cache_capacity(std::size_t capacity) {
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  c.capacity = std::max<std::size_t>(1, capacity);
  while (c.entries.size() > c.capacity) c.entries.pop_back();
}

std::size_t wg_cache_size() {
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  return c.entries.size();
}

void clear_wg_cache() {
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  c.entries.clear();
}

double wg_asymptotic(const Pairing& a, const Pairing& b, double n) {
  if (a.points() != b.points()) throw ValidationError("pairings act on different point counts");
  if (!(n > 0.0)) throw ValidationError("wg_asymptotic needs n > 0");
  const int m = a.half_size();
  const int half_length = length(a * b) / 2;
  return std::pow(n, -m - half_length) * static_cast<double>(mobius(a, b));
}

WeingartenClassFunction::WeingartenClassFunction(int m, double n, const Limits& limits) : m_(m), n_(n) {
  if (!(n > 0.0)) throw ValidationError("Weingarten functions need n > 0");
  const auto pairings = enumerate_pairings(m, limits);
  const Pairing& base = pairings.front();  // (0 1)(2 3)...

  // Loop type of every pairing relative to the base pairing, and one
  // representative per type.
  std::map<std::vector<int>, int> type_index;
  std::vector<std::size_t> representatives;
  std::vector<int> type_of(pairings.size());
  for (std::size_t i = 0; i < pairings.size(); ++i) {
    auto type = loop_type(pairings[i], base);
    auto [it, inserted] = type_index.try_emplace(type, static_cast<int>(type_index.size()));
    if (inserted) representatives.push_back(i);
    type_of[i] = it->second;
  }

  // Row lambda: sum_b G(rep_lambda, b) w(type(b, base)) = [rep_lambda == base].
  const auto types = static_cast<Eigen::Index>(representatives.size());
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(types, types);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(types);
  for (Eigen::Index row = 0; row < types; ++row) {
    const Pairing& rep = pairings[representatives[row]];
    for (std::size_t b = 0; b < pairings.size(); ++b) {
      system(row, type_of[b]) += std::pow(n, connected_components(rep, pairings[b]));
    }
    if (rep == base) rhs(row) = 1.0;
  }
  // Row equilibration keeps the pivoting meaningful at large n.
  for (Eigen::Index row = 0; row < types; ++row) {
    const double scale = system.row(row).cwiseAbs().maxCoeff();
    system.row(row) /= scale;
    rhs(row) /= scale;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw ValidationError("Gram matrix is singular at m = " + std::to_string(m) + ", n = " + std::to_string(n) +
                          "; use the pseudo-inverse table");
  }
  const Eigen::VectorXd w = lu.solve(rhs);
  for (const auto& [type, idx] : type_index) by_type_[type] = w(idx);
}

double WeingartenClassFunction::value(const std::vector<int>& loop_type) const {
  const auto it = by_type_.find(loop_type);
  if (it == by_type_.end()) throw ValidationError("loop type does not partition m");
  return it->second;
}

double WeingartenClassFunction::operator()(const Pairing& a, const Pairing& b) const {
  if (a.half_size() != m_) throw ValidationError("pairing size does not match the Weingarten function");
  return value(loop_type(a, b));
}

double integrate_monomial(std::span<const std::pair<int, int>> index_rows, int n, const Limits& limits) {
  if (n < 1) throw ValidationError("integrate_monomial needs n >= 1");
  for (auto [i, j] : index_rows) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw ValidationError("matrix index out of range");
  }
  if (index_rows.empty()) return 1.0;
  if (index_rows.size() % 2 != 0) return 0.0;
  const int m = static_cast<int>(index_rows.size()) / 2;
  const auto table = wg_exact(m, n, limits);

  auto respects = [&](const Pairing& sigma, bool rows) {
    for (int s = 0; s < sigma.points(); ++s) {
      const auto& lhs = index_rows[static_cast<std::size_t>(s)];
      const auto& rhs = index_rows[static_cast<std::size_t>(sigma.partner(s))];
      if ((rows ? lhs.first : lhs.second) != (rows ? rhs.first : rhs.second)) return false;
    }
    return true;
  };

  std::vector<std::size_t> row_ok, col_ok;
  for (std::size_t k = 0; k < table->pairings.size(); ++k) {
    if (respects(table->pairings[k], true)) row_ok.push_back(k);
    if (respects(table->pairings[k], false)) col_ok.push_back(k);
  }
  double total = 0.0;
  for (std::size_t a : row_ok) {
    for (std::size_t b : col_ok) total += (*table)(a, b);
  }
  return total;
}

}  // namespace orthochan
