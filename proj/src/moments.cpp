#include "orthochan/moments.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <string>

#include "orthochan/error.hpp"
#include "orthochan/parallel.hpp"
#include "orthochan/weingarten.hpp"

namespace orthochan {
namespace {

std::size_t checked_tuples(int d, int pairs, std::size_t cap) {
  std::size_t total = 1;
  for (int i = 0; i < pairs; ++i) {
    if (total > cap / static_cast<std::size_t>(d)) {
      throw BudgetError("contraction over d^" + std::to_string(pairs) + " index tuples exceeds the cap of " +
                        std::to_string(cap));
    }
    total *= static_cast<std::size_t>(d);
  }
  return total;
}

// Walks every assignment of [d] to the pairs of beta and sums
// prod_c rho(ket_c, bra_c); ket digits sit on L boxes, bra digits on R boxes.
template <class Entry>
Complex contract(const Pairing& beta, int d, int r, int p, const MomentOptions& options, const Entry& entry) {
  const BoxLayout layout{p, r};
  if (beta.points() != layout.points()) {
    throw ValidationError("pairing acts on " + std::to_string(beta.points()) + " points, expected 2pr = " +
                          std::to_string(layout.points()));
  }
  const auto pairs = beta.pairs();
  const int pair_total = static_cast<int>(pairs.size());
  const std::size_t tuples = checked_tuples(d, pair_total, options.max_contraction);

  std::vector<int> pair_of(static_cast<std::size_t>(layout.points()));
  for (int q = 0; q < pair_total; ++q) {
    pair_of[static_cast<std::size_t>(pairs[q].first)] = q;
    pair_of[static_cast<std::size_t>(pairs[q].second)] = q;
  }
  // ket_pair[c][x], bra_pair[c][x]: pair carrying digit x of copy c.
  std::vector<int> ket_pair(static_cast<std::size_t>(p * r)), bra_pair(static_cast<std::size_t>(p * r));
  for (int c = 0; c < p; ++c) {
    for (int x = 0; x < r; ++x) {
      ket_pair[c * r + x] = pair_of[layout.encode({c, x, Side::L})];
      bra_pair[c * r + x] = pair_of[layout.encode({c, x, Side::R})];
    }
  }

  std::vector<int> value(static_cast<std::size_t>(pair_total), 0);
  Complex total = 0.0;
  for (std::size_t t = 0; t < tuples; ++t) {
    Complex term = 1.0;
    for (int c = 0; c < p && term != Complex(0.0, 0.0); ++c) {
      Eigen::Index ket = 0, bra = 0;
      for (int x = 0; x < r; ++x) {
        ket = ket * d + value[ket_pair[c * r + x]];
        bra = bra * d + value[bra_pair[c * r + x]];
      }
      term *= entry(ket, bra);
    }
    total += term;
    for (int q = pair_total - 1; q >= 0; --q) {
      if (++value[q] < d) break;
      value[q] = 0;
    }
  }
  return total;
}

void check_moment_arguments(int p, int r, int k, int n, double t, const InputState& rho) {
  if (p < 1 || r < 1) throw ValidationError("moments need p >= 1 and r >= 1");
  if (k < 1 || n < 1) throw ValidationError("channel dimensions k and n must be positive");
  if (!(t > 0.0 && t <= 1.0)) throw ValidationError("aspect ratio t must lie in (0, 1]");
  const int d = input_dimension(k, n, t);
  if (d < 1) throw ValidationError("degenerate channel: floor(t k n) = 0");
  if (rho.d() != d || rho.sites() != r) {
    throw ValidationError("input state lives on (C^" + std::to_string(rho.d()) + ")^" +
                          std::to_string(rho.sites()) + ", expected (C^" + std::to_string(d) + ")^" +
                          std::to_string(r));
  }
}

void check_points(int points, const MomentOptions& options) {
  if (options.max_points > kMaxExactPoints) {
    throw ValidationError("exact-engine cap " + std::to_string(options.max_points) + " exceeds the hard maximum " +
                          std::to_string(kMaxExactPoints));
  }
  if (points > options.max_points) {
    throw BudgetError("2pr = " + std::to_string(points) + " exceeds the exact-engine cap of " +
                      std::to_string(options.max_points));
  }
}

// Wg_{kn} lookup by canonical index: the dense table where it fits, the
// class-function solve beyond.
class WgSource {
 public:
  WgSource(int m, double n, const std::vector<Pairing>& pairings, const Limits& limits) : pairings_(pairings) {
    if (pairing_count(m) <= limits.max_wg_table) {
      table_ = wg_exact(m, n, limits);
    } else {
      cls_.emplace(m, n, limits);
    }
  }
  double operator()(std::size_t a, std::size_t b) const {
    return table_ ? (*table_)(a, b) : (*cls_)(pairings_[a], pairings_[b]);
  }

 private:
  const std::vector<Pairing>& pairings_;
  std::shared_ptr<const WeingartenTable> table_;
  std::optional<WeingartenClassFunction> cls_;
};

// f_beta for every canonical pairing beta.
std::vector<Complex> all_f_beta(const std::vector<Pairing>& pairings, const InputState& rho, int p,
                                const MomentOptions& options) {
  std::vector<Complex> f(pairings.size());
  parallel_for(pairings.size(), [&](std::size_t b) { f[b] = f_beta(pairings[b], rho, p, options); });
  return f;
}

}  // namespace

Complex f_beta(const Pairing& beta, const InputState& rho, int p, const MomentOptions& options) {
  const int d = rho.d();
  const int r = rho.sites();
  std::size_t side = 1;
  for (int i = 0; i < r && side <= options.dense.max_entries; ++i) side *= static_cast<std::size_t>(d);
  if (side <= options.dense.max_entries / side) {
    const ComplexMatrix dense = rho.density(options.dense);
    return contract(beta, d, r, p, options, [&](Eigen::Index i, Eigen::Index j) { return dense(i, j); });
  }
  return contract(beta, d, r, p, options, [&](Eigen::Index i, Eigen::Index j) { return rho.entry(i, j); });
}

Complex f_beta(const Pairing& beta, const ComplexMatrix& rho, int d, int r, int p, const MomentOptions& options) {
  if (d < 1 || r < 1 || p < 1) throw ValidationError("f_beta needs d, r, p >= 1");
  Eigen::Index side = 1;
  for (int i = 0; i < r; ++i) side *= d;
  if (rho.rows() != side || rho.cols() != side) throw ValidationError("matrix does not act on (C^d)^r");
  return contract(beta, d, r, p, options, [&](Eigen::Index i, Eigen::Index j) { return rho(i, j); });
}

double exact_trace_moment(int p, int r, int k, int n, double t, const InputState& rho,
                          const MomentOptions& options) {
  check_moment_arguments(p, r, k, n, t, rho);
  const int m = p * r;
  check_points(2 * m, options);

  const auto pairings = enumerate_pairings(m, options.limits);
  const auto f = all_f_beta(pairings, rho, p, options);
  const WgSource wg(m, static_cast<double>(k) * n, pairings, options.limits);
  const Wiring wiring = delta_gamma(p, r);

  std::vector<std::size_t> nonzero;
  for (std::size_t b = 0; b < f.size(); ++b) {
    if (f[b] != Complex(0.0, 0.0)) nonzero.push_back(b);
  }
  std::vector<Complex> row(pairings.size());
  parallel_for(pairings.size(), [&](std::size_t a) {
    Complex s = 0.0;
    for (std::size_t b : nonzero) s += f[b] * wg(a, b);
    const int n_exp = connected_components(wiring.delta, pairings[a]);
    const int k_exp = connected_components(wiring.gamma, pairings[a]);
    row[a] = std::pow(static_cast<double>(n), n_exp) * std::pow(static_cast<double>(k), k_exp) * s;
  });
  Complex total = 0.0;
  for (const auto& v : row) total += v;
  return total.real();
}

ComplexMatrix exact_mean_output(int r, int k, int n, double t, const InputState& rho,
                                const MomentOptions& options) {
  check_moment_arguments(1, r, k, n, t, rho);
  check_points(2 * r, options);
  Eigen::Index side = 1;
  for (int i = 0; i < r; ++i) side *= k;
  if (static_cast<std::size_t>(side) * static_cast<std::size_t>(side) > options.dense.max_entries) {
    throw BudgetError("output matrix k^r x k^r exceeds the dense budget");
  }

  const auto pairings = enumerate_pairings(r, options.limits);
  const auto f = all_f_beta(pairings, rho, 1, options);
  const WgSource wg(r, static_cast<double>(k) * n, pairings, options.limits);
  const Wiring wiring = delta_gamma(1, r);
  const BoxLayout layout{1, r};

  std::vector<Complex> weight(pairings.size());
  parallel_for(pairings.size(), [&](std::size_t a) {
    Complex s = 0.0;
    for (std::size_t b = 0; b < pairings.size(); ++b) s += f[b] * wg(a, b);
    weight[a] = std::pow(static_cast<double>(n), connected_components(wiring.delta, pairings[a])) * s;
  });

  // T_alpha[row, col] = 1 iff every pair of alpha joins boxes carrying equal
  // digits; box [x, L] carries digit x of row, [x, R] digit x of col.
  ComplexMatrix out = ComplexMatrix::Zero(side, side);
  std::vector<int> digit(static_cast<std::size_t>(2 * r));
  for (Eigen::Index i = 0; i < side; ++i) {
    for (Eigen::Index j = 0; j < side; ++j) {
      Eigen::Index ri = i, cj = j;
      for (int x = r - 1; x >= 0; --x) {
        digit[layout.encode({0, x, Side::L})] = static_cast<int>(ri % k);
        digit[layout.encode({0, x, Side::R})] = static_cast<int>(cj % k);
        ri /= k;
        cj /= k;
      }
      Complex s = 0.0;
      for (std::size_t a = 0; a < pairings.size(); ++a) {
        bool ok = true;
        for (int q = 0; q < 2 * r && ok; ++q) ok = digit[q] == digit[pairings[a].partner(q)];
        if (ok) s += weight[a];
      }
      out(i, j) = s;
    }
  }
  return out;
}

std::vector<MomentTerm> term_report(int p, int r, int k, int n, double t, const InputState& rho,
                                    const MomentOptions& options) {
  check_moment_arguments(p, r, k, n, t, rho);
  const int m = p * r;
  check_points(2 * m, options);
  const auto table = wg_exact(m, static_cast<double>(k) * n, options.limits);
  const auto& pairings = table->pairings;
  const auto f = all_f_beta(pairings, rho, p, options);
  const Wiring wiring = delta_gamma(p, r);

  std::vector<MomentTerm> terms;
  terms.reserve(pairings.size() * pairings.size());
  for (std::size_t a = 0; a < pairings.size(); ++a) {
    const int n_exp = connected_components(wiring.delta, pairings[a]);
    const int k_exp = connected_components(wiring.gamma, pairings[a]);
    const double scale = std::pow(static_cast<double>(n), n_exp) * std::pow(static_cast<double>(k), k_exp);
    for (std::size_t b = 0; b < pairings.size(); ++b) {
      MomentTerm term;
      term.alpha = a;
      term.beta = b;
      term.n_exp = n_exp;
      term.k_exp = k_exp;
      term.f_beta = f[b];
      term.wg = (*table)(a, b);
      term.value = scale * term.wg * f[b];
      terms.push_back(term);
    }
  }
  std::stable_sort(terms.begin(), terms.end(), [](const MomentTerm& x, const MomentTerm& y) {
    return std::abs(x.value) > std::abs(y.value);
  });
  return terms;
}

int leading_exponent(const Pairing& alpha, const Pairing& beta, int p, int r) {
  const Wiring wiring = delta_gamma(p, r);
  if (alpha.points() != 2 * p * r || beta.points() != 2 * p * r) {
    throw ValidationError("pairings must act on 2pr points");
  }
  return connected_components(wiring.delta, alpha) + bumps(beta, p, r) - p * r - length(alpha * beta) / 2;
}

double asymptotic_trace_moment(int p, int r, int k, double t, const GFunction& g) {
  if (p < 1 || r < 1 || k < 1) throw ValidationError("asymptotic moments need p, r, k >= 1");
  if (!(t > 0.0 && t <= 1.0)) throw ValidationError("aspect ratio t must lie in (0, 1]");
  const auto pairs = dominant_pairs(p, r, p <= 2);
  const Wiring wiring = delta_gamma(p, r);

  double total = 0.0;
  const PartialPairing* current = nullptr;
  double g_value = 0.0;
  for (const auto& [a, b] : pairs) {
    if (current == nullptr || !(*current == b)) {
      current = &b;
      g_value = g(b);
      if (!(g_value >= 0.0 && g_value <= 1.0)) {
        throw ValidationError("g_B = " + std::to_string(g_value) + " lies outside [0, 1]");
      }
    }
    const Pairing alpha = bump_pairing(a, p, r);
    const int k_exp = connected_components(wiring.gamma, alpha) + a.pair_count() - p * r;
    const double sign = (b.pair_count() - a.pair_count()) % 2 == 0 ? 1.0 : -1.0;
    total += sign * std::pow(static_cast<double>(k), k_exp) * std::pow(t, b.pair_count()) * g_value;
  }
  return total;
}

double asymptotic_trace_moment(int p, int r, int k, double t, const std::map<PartialPairing, double>& g) {
  const GFunction lookup = [&](const PartialPairing& cells) {
    if (const auto it = g.find(cells); it != g.end()) return it->second;
    if (!is_inward(cells, r)) throw ValidationError("no g value for a trespassing partial pairing");
    // Split into per-copy partial pairings of r points.
    std::vector<std::vector<std::pair<int, int>>> per_copy(static_cast<std::size_t>(p));
    for (auto [u, v] : cells.pairs()) per_copy[u / r].emplace_back(u % r, v % r);
    double product = 1.0;
    for (int c = 0; c < p; ++c) {
      const PartialPairing part(r, per_copy[c]);
      const auto it = g.find(part);
      if (it == g.end()) throw ValidationError("missing g value for a partial pairing");
      product *= it->second;
    }
    return product;
  };
  return asymptotic_trace_moment(p, r, k, t, lookup);
}

GFunction g_from_input(const InputState& rho, int p, int k, int n, double t, const MomentOptions& options) {
  check_moment_arguments(p, rho.sites(), k, n, t, rho);
  const int r = rho.sites();
  const double scale = t * static_cast<double>(n) * static_cast<double>(k);
  auto memo = std::make_shared<std::map<PartialPairing, double>>();
  auto mutex = std::make_shared<std::mutex>();
  return [=](const PartialPairing& cells) {
    {
      std::lock_guard lock(*mutex);
      if (const auto it = memo->find(cells); it != memo->end()) return it->second;
    }
    const Pairing beta = bump_pairing(cells, p, r);
    const double f = f_beta(beta, rho, p, options).real();
    double value = f / std::pow(scale, cells.pair_count());
    // f_beta >= 0 for bump pairings; clear rounding at the edges.
    if (value < 0.0 && value > -1e-12) value = 0.0;
    std::lock_guard lock(*mutex);
    memo->emplace(cells, value);
    return value;
  };
}

}  // namespace orthochan
