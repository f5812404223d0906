#include "orthochan/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "orthochan/error.hpp"
#include "orthochan/parallel.hpp"
#include "orthochan/statistics.hpp"

namespace orthochan {
namespace {

using Triplet = Eigen::Triplet<double>;

// Nonzero entries of one tensor factor, in local indices over its sites
// (first site most significant).
struct Factor {
  std::vector<int> sites;
  std::vector<Triplet> entries;
};

std::vector<Triplet> omega_entries(int dim, double scale) {
  std::vector<Triplet> out;
  out.reserve(static_cast<std::size_t>(dim) * dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) out.emplace_back(i * dim + i, j * dim + j, scale);
  }
  return out;
}

std::vector<Triplet> identity_entries(int size, double scale) {
  std::vector<Triplet> out;
  out.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) out.emplace_back(i, i, scale);
  return out;
}

std::vector<Triplet> dense_entries(const Eigen::MatrixXd& m) {
  std::vector<Triplet> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) out.emplace_back(static_cast<int>(i), static_cast<int>(j), m(i, j));
    }
  }
  return out;
}

Eigen::Index checked_side(int dim, int r) {
  Eigen::Index side = 1;
  for (int i = 0; i < r; ++i) {
    if (side > (Eigen::Index{1} << 24) / dim) throw BudgetError("operator dimension exceeds 2^24");
    side *= dim;
  }
  return side;
}

SparseOperator tensor_operator(int dim, int r, const std::vector<Factor>& factors) {
  const Eigen::Index side = checked_side(dim, r);
  std::size_t nnz = 1;
  for (const auto& f : factors) nnz *= f.entries.size();
  if (nnz > (std::size_t{1} << 26)) throw BudgetError("operator has too many nonzero entries");

  std::vector<Triplet> triplets;
  triplets.reserve(nnz);
  std::vector<std::size_t> pos(factors.size(), 0);
  std::vector<int> row_digit(static_cast<std::size_t>(r)), col_digit(static_cast<std::size_t>(r));
  for (std::size_t e = 0; e < nnz; ++e) {
    double value = 1.0;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const auto& entry = factors[f].entries[pos[f]];
      value *= entry.value();
      int li = entry.row(), lj = entry.col();
      const auto& sites = factors[f].sites;
      for (auto s = sites.rbegin(); s != sites.rend(); ++s) {
        row_digit[*s] = li % dim;
        col_digit[*s] = lj % dim;
        li /= dim;
        lj /= dim;
      }
    }
    Eigen::Index row = 0, col = 0;
    for (int s = 0; s < r; ++s) {
      row = row * dim + row_digit[s];
      col = col * dim + col_digit[s];
    }
    triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
    for (std::size_t f = factors.size(); f-- > 0;) {
      if (++pos[f] < factors[f].entries.size()) break;
      pos[f] = 0;
    }
  }
  SparseOperator out(side, side);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SparseOperator family_operator(const PartialPairing& b, int dim, const std::vector<Triplet>& pair_factor,
                               const std::vector<Triplet>& single_factor) {
  if (dim < 1) throw ValidationError("operator dimension must be positive");
  if (b.size() < 1) throw ValidationError("partial pairing must act on r >= 1 sites");
  std::vector<Factor> factors;
  for (auto [i, j] : b.pairs()) factors.push_back({{i, j}, pair_factor});
  for (int s : b.singles()) factors.push_back({{s}, single_factor});
  return tensor_operator(dim, b.size(), factors);
}

void check_k_t(int k, double t) {
  if (k < 1) throw ValidationError("k must be positive");
  if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("t must lie in [0, 1]");
}

double log_in(double x, LogBase base) { return base == LogBase::Two ? std::log2(x) : std::log(x); }

double h(double x, LogBase base) { return x > 0.0 ? -x * log_in(x, base) : 0.0; }

double entropy_of_spectrum(const Eigen::VectorXd& lambda, LogBase base) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -kEntropyClip) {
      throw InvalidStateError("eigenvalue " + std::to_string(lambda(i)) + " is below the clipping window");
    }
    s += h(std::max(lambda(i), 0.0), base);
  }
  return s;
}

}  // namespace

SparseOperator op_T(const PartialPairing& a, int dim) {
  return family_operator(a, dim, omega_entries(dim, 1.0), identity_entries(dim, 1.0));
}

SparseOperator op_T_tilde(const PartialPairing& b, int d) {
  return family_operator(b, d, omega_entries(d, 1.0 / d), identity_entries(d, 1.0));
}

SparseOperator op_R_tilde(const PartialPairing& b, int k, double t) {
  check_k_t(k, t);
  const double kk = static_cast<double>(k) * k;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(k * k, k * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) omega(i * k + i, j * k + j) = 1.0;
  }
  const Eigen::MatrixXd pair = t * (omega / k - Eigen::MatrixXd::Identity(k * k, k * k) / kk);
  return family_operator(b, k, dense_entries(pair), identity_entries(k, 1.0 / k));
}

SparseOperator op_S_tilde(const PartialPairing& b, int k, double t) {
  check_k_t(k, t);
  return family_operator(b, k, dense_entries(isotropic_eta(k, t)), identity_entries(k, 1.0 / k));
}

SparseOperator op_G(const PartialPairing& b, int d) {
  return family_operator(b, d, omega_entries(d, 1.0 / d), identity_entries(d, 1.0 / d));
}

SparseOperator op_Q_tilde(const PartialPairing& a, int d, const Limits& limits) {
  const Eigen::Index side = checked_side(d, a.size());
  SparseOperator q(side, side);
  for (const auto& b : enumerate_partial_pairings(a.size(), limits)) {
    if (!a.is_subset_of(b)) continue;
    const double sign = (b.pair_count() - a.pair_count()) % 2 == 0 ? 1.0 : -1.0;
    q += sign * op_T_tilde(b, d);
  }
  return q;
}

Eigen::MatrixXd isotropic_eta(int k, double t) {
  if (k < 1) throw ValidationError("k must be positive");
  if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("t must lie in [0, 1]");
  const double kk = static_cast<double>(k) * k;
  Eigen::MatrixXd eta = (1.0 - t) / kk * Eigen::MatrixXd::Identity(k * k, k * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) eta(i * k + i, j * k + j) += t / k;
  }
  return eta;
}

Complex pairing_with(const SparseOperator& x, const InputState& rho) {
  const Eigen::Index side = checked_side(rho.d(), rho.sites());
  if (x.rows() != side || x.cols() != side) throw ValidationError("operator and state dimensions differ");
  Complex total = 0.0;
  for (int col = 0; col < x.outerSize(); ++col) {
    for (SparseOperator::InnerIterator it(x, col); it; ++it) total += it.value() * rho.entry(it.col(), it.row());
  }
  return total;
}

MeanOutputExpansions mean_output_asymptotic(const InputState& rho, int k, double t, const Limits& limits) {
  check_k_t(k, t);
  const int r = rho.sites();
  const int d = rho.d();
  const auto family = enumerate_partial_pairings(r, limits);
  std::vector<double> tb(family.size());
  parallel_for(family.size(), [&](std::size_t i) { tb[i] = pairing_with(op_T_tilde(family[i], d), rho).real(); });

  const Eigen::Index side = checked_side(k, r);
  MeanOutputExpansions out;
  out.via_r = Eigen::MatrixXd::Zero(side, side);
  out.via_s = Eigen::MatrixXd::Zero(side, side);
  for (std::size_t i = 0; i < family.size(); ++i) {
    out.via_r += tb[i] * Eigen::MatrixXd(op_R_tilde(family[i], k, t));
    double q = 0.0;
    for (std::size_t j = 0; j < family.size(); ++j) {
      if (!family[i].is_subset_of(family[j])) continue;
      q += ((family[j].pair_count() - family[i].pair_count()) % 2 == 0 ? 1.0 : -1.0) * tb[j];
    }
    out.via_s += q * Eigen::MatrixXd(op_S_tilde(family[i], k, t));
  }
  return out;
}

InputState bell_input(const PartialPairing& b0, int d) {
  const int r = b0.size();
  if (r < 1 || d < 1) throw ValidationError("bell_input needs r, d >= 1");
  if (b0.pair_count() != r / 2) throw ValidationError("bell_input needs a maximal partial pairing");
  std::vector<InputState::Block> blocks;
  ComplexVector omega = ComplexVector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) omega(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  for (auto [i, j] : b0.pairs()) blocks.push_back({{i, j}, omega});
  for (int s : b0.singles()) {
    blocks.push_back({{s}, ComplexMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d))});
  }
  return InputState(d, r, std::move(blocks));
}

double von_neumann_entropy(const ComplexMatrix& rho, LogBase base) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw ValidationError("entropy needs a non-empty square matrix");
  const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(herm, Eigen::EigenvaluesOnly);
  return entropy_of_spectrum(eig.eigenvalues(), base);
}

double von_neumann_entropy(const Eigen::MatrixXd& rho, LogBase base) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw ValidationError("entropy needs a non-empty square matrix");
  const Eigen::MatrixXd sym = 0.5 * (rho + rho.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  return entropy_of_spectrum(eig.eigenvalues(), base);
}

double isotropic_entropy(int k, double t, LogBase base) {
  check_k_t(k, t);
  const double kk = static_cast<double>(k) * k;
  // omega has eigenvalue k on Omega, so the top eigenvalue of eta is t + (1-t)/k^2.
  return h(t + (1.0 - t) / kk, base) + (kk - 1.0) * h((1.0 - t) / kk, base);
}

double entropy_extremal(const PartialPairing& b, int k, double t, LogBase base) {
  const int pairs = b.pair_count();
  return pairs * isotropic_entropy(k, t, base) + (b.size() - 2 * pairs) * log_in(static_cast<double>(k), base);
}

double q_tilde_spectrum_gap(const PartialPairing& a, int d, const Limits& limits) {
  const Eigen::MatrixXd q(op_Q_tilde(a, d, limits));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q, Eigen::EigenvaluesOnly);
  double gap = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double l = eig.eigenvalues()(i);
    gap = std::max(gap, std::min(std::abs(l), std::abs(l - 1.0)));
  }
  return gap;
}

ConvexBody make_convex_body(int r, int k, double t, const Limits& limits) {
  check_k_t(k, t);
  ConvexBody body;
  body.r = r;
  body.k = k;
  body.t = t;
  body.labels = enumerate_partial_pairings(r, limits);
  for (const auto& b : body.labels) body.vertices.emplace_back(op_S_tilde(b, k, t));
  return body;
}

BodyDistance distance_to_body(const ComplexMatrix& x, const ConvexBody& body, double tol, int max_iterations) {
  const auto count = static_cast<Eigen::Index>(body.vertices.size());
  if (count == 0) throw ValidationError("convex body has no vertices");
  const Eigen::Index side = body.vertices.front().rows();
  if (x.rows() != side || x.cols() != side) throw ValidationError("matrix does not match the body's dimension");
  if ((x - x.adjoint()).cwiseAbs().maxCoeff() > 1e-8) throw ValidationError("distance_to_body needs Hermitian X");

  const Eigen::MatrixXd re = x.real();
  const double im2 = x.imag().squaredNorm();
  Eigen::MatrixXd gram(count, count);
  Eigen::VectorXd b(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    b(i) = (body.vertices[i].array() * re.array()).sum();
    for (Eigen::Index j = 0; j <= i; ++j) {
      gram(i, j) = gram(j, i) = (body.vertices[i].array() * body.vertices[j].array()).sum();
    }
  }

  // Start from the nearest vertex; ties go to the canonical order.
  Eigen::Index start = 0;
  double best = gram(0, 0) - 2.0 * b(0);
  for (Eigen::Index i = 1; i < count; ++i) {
    const double v = gram(i, i) - 2.0 * b(i);
    if (v < best) {
      best = v;
      start = i;
    }
  }
  BodyDistance out;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(count);
  w(start) = 1.0;

  for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
    const Eigen::VectorXd grad = 2.0 * (gram * w - b);
    Eigen::Index s = 0;
    for (Eigen::Index i = 1; i < count; ++i) {
      if (grad(i) < grad(s)) s = i;
    }
    out.gap = grad.dot(w) - grad(s);
    if (out.gap <= tol) {
      out.converged = true;
      break;
    }
    Eigen::Index v = -1;
    for (Eigen::Index i = 0; i < count; ++i) {
      if (w(i) > 0.0 && (v < 0 || grad(i) > grad(v))) v = i;
    }
    const double slope = grad(s) - grad(v);
    const double curvature = 2.0 * (gram(s, s) + gram(v, v) - 2.0 * gram(s, v));
    double step = w(v);
    if (curvature > 0.0) step = std::min(step, -slope / curvature);
    w(s) += step;
    w(v) -= step;
    if (w(v) < 1e-15) w(v) = 0.0;
  }

  Eigen::MatrixXd closest = Eigen::MatrixXd::Zero(side, side);
  for (Eigen::Index i = 0; i < count; ++i) closest += w(i) * body.vertices[i];
  out.distance = std::sqrt((re - closest).squaredNorm() + im2);
  out.weights = w;
  return out;
}

SampleSummary summarize(const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("cannot summarize an empty sample");
  Accumulator acc;
  for (double v : values) acc.add(v);
  SampleSummary s;
  s.mean = acc.mean;
  s.standard_error = acc.standard_error();
  s.median = quantile(values, 0.5);
  s.q10 = quantile(values, 0.1);
  s.q90 = quantile(values, 0.9);
  return s;
}

ExperimentResult convergence_experiment(const ExperimentConfig& config) {
  if (config.r < 1) throw ValidationError("r must be positive");
  if (config.k < 2) throw ValidationError("k must be at least 2");
  if (!(config.t > 0.0 && config.t <= 1.0)) throw ValidationError("aspect ratio t must lie in (0, 1]");
  if (config.n_grid.empty()) throw ValidationError("the n grid is empty");
  if (config.samples == 0) throw ValidationError("need at least one sample per n");
  if (config.rule == InputRule::Custom && !config.custom) throw ValidationError("custom rule without an input");

  const ConvexBody body = make_convex_body(config.r, config.k, config.t);
  std::vector<InputState> inputs;
  for (int n : config.n_grid) {
    if (n < 1 || static_cast<std::uint64_t>(n) >= (std::uint64_t{1} << 31)) {
      throw ValidationError("n must lie in [1, 2^31)");
    }
    const int d = input_dimension(config.k, n, config.t);
    if (d < 1) throw ValidationError("degenerate channel: floor(t k n) = 0 at n = " + std::to_string(n));
    switch (config.rule) {
      case InputRule::Bell:
        inputs.push_back(bell_input(canonical_maximal_partial_pairing(config.r), d));
        break;
      case InputRule::Product:
        inputs.push_back(product_input(d, config.r));
        break;
      case InputRule::Custom:
        inputs.push_back(config.custom(d, config.r));
        break;
    }
  }

  ExperimentResult result;
  result.rows.resize(config.n_grid.size() * config.samples);
  parallel_for(result.rows.size(), [&](std::size_t idx) {
    const std::size_t g = idx / config.samples;
    const std::size_t s = idx % config.samples;
    const int n = config.n_grid[g];
    const RngStream rng{config.seed, (static_cast<std::uint64_t>(n) << 32) | s};
    const ChannelSpec spec = make_channel(config.k, n, config.t, rng);
    const ComplexMatrix z = apply_channel_power(spec, inputs[g], config.dense);
    auto& row = result.rows[idx];
    row.n = n;
    row.sample = s;
    row.dist = distance_to_body(z, body).distance;
    row.entropy = von_neumann_entropy(z, config.base);
  });

  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    std::vector<double> dist, entropy;
    for (std::size_t s = 0; s < config.samples; ++s) {
      dist.push_back(result.rows[g * config.samples + s].dist);
      entropy.push_back(result.rows[g * config.samples + s].entropy);
    }
    ExperimentSummary summary;
    summary.n = config.n_grid[g];
    summary.d = input_dimension(config.k, summary.n, config.t);
    summary.dist = summarize(dist);
    summary.entropy = summarize(entropy);
    result.summaries.push_back(summary);
  }
  return result;
}

InputRule parse_input_rule(const std::string& name) {
  if (name == "bell") return InputRule::Bell;
  if (name == "product") return InputRule::Product;
  if (name == "custom") return InputRule::Custom;
  throw ValidationError("unknown input rule '" + name + "' (expected bell, product or custom)");
}

}  // namespace orthochan
