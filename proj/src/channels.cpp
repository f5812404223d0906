#include "orthochan/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "orthochan/error.hpp"

namespace orthochan {
namespace {

using RowMajorComplex = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t checked_power(std::size_t base, int exponent, const DenseBudget& budget, const char* what) {
  std::size_t v = 1;
  for (int i = 0; i < exponent; ++i) {
    if (base != 0 && v > budget.max_entries / base) {
      throw BudgetError(std::string(what) + " exceeds the dense budget of " + std::to_string(budget.max_entries) +
                        " entries");
    }
    v *= base;
  }
  return v;
}

std::size_t product(const std::vector<int>& dims, std::size_t begin, std::size_t end) {
  std::size_t v = 1;
  for (std::size_t i = begin; i < end; ++i) v *= static_cast<std::size_t>(dims[i]);
  return v;
}

// Applies `op` (out x in) to leg `leg` of a row-major tensor with shape dims.
ComplexVector apply_to_leg(const ComplexVector& data, std::vector<int>& dims, std::size_t leg,
                           const ComplexMatrix& op, const DenseBudget& budget) {
  const std::size_t left = product(dims, 0, leg);
  const std::size_t right = product(dims, leg + 1, dims.size());
  const auto in = static_cast<Eigen::Index>(dims[leg]);
  const auto out = op.rows();
  if (op.cols() != in) throw ValidationError("operator does not match tensor leg dimension");
  const std::size_t total = left * static_cast<std::size_t>(out) * right;
  if (total > budget.max_entries) {
    throw BudgetError("intermediate tensor of " + std::to_string(total) + " entries exceeds the dense budget of " +
                      std::to_string(budget.max_entries));
  }
  ComplexVector result(static_cast<Eigen::Index>(total));
  const auto r = static_cast<Eigen::Index>(right);
  for (std::size_t l = 0; l < left; ++l) {
    Eigen::Map<const RowMajorComplex> slice(data.data() + l * in * right, in, r);
    Eigen::Map<RowMajorComplex> target(result.data() + l * out * right, out, r);
    target.noalias() = op * slice;
  }
  dims[leg] = static_cast<int>(out);
  return result;
}

ComplexVector flatten_row_major(const ComplexMatrix& m) {
  ComplexVector v(m.size());
  Eigen::Map<RowMajorComplex>(v.data(), m.rows(), m.cols()) = m;
  return v;
}

ComplexMatrix unflatten_row_major(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const RowMajorComplex>(v.data(), rows, cols);
}

void require_channel_input(const ChannelSpec& spec, int r, Eigen::Index dim) {
  if (r < 1) throw ValidationError("tensor power r must be positive");
  std::size_t expected = 1;
  for (int i = 0; i < r; ++i) expected *= static_cast<std::size_t>(spec.d);
  if (static_cast<std::size_t>(dim) != expected) {
    throw ValidationError("input dimension " + std::to_string(dim) + " does not match d^r = " +
                          std::to_string(expected));
  }
}

ComplexMatrix block_density(const InputState::Block& block) {
  if (const auto* psi = std::get_if<ComplexVector>(&block.state)) return (*psi) * psi->adjoint();
  return std::get<ComplexMatrix>(block.state);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 RngStream::engine() const { return std::mt19937_64(splitmix64(splitmix64(seed) ^ stream)); }

std::string state_violation(const ComplexMatrix& matrix, double tolerance) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) return "not a non-empty square matrix";
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tolerance) return "not Hermitian";
  const Complex tr = matrix.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tolerance) return "trace " + std::to_string(tr.real()) + " is not 1";
  const ComplexMatrix herm = 0.5 * (matrix + matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(herm, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -tolerance) {
    return "negative eigenvalue " + std::to_string(eig.eigenvalues().minCoeff());
  }
  return {};
}

DensityMatrix::DensityMatrix(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (auto why = state_violation(matrix_); !why.empty()) throw InvalidStateError("invalid density matrix: " + why);
}

DensityMatrix DensityMatrix::from_pure(const ComplexVector& psi) {
  if (std::abs(psi.norm() - 1.0) > kStateTolerance) throw InvalidStateError("state vector is not normalized");
  return DensityMatrix(psi * psi.adjoint());
}

Eigen::MatrixXd sample_haar_isometry(int rows, int cols, const RngStream& rng) {
  if (rows < 1 || cols < 1 || cols > rows) throw ValidationError("isometry shape must satisfy 1 <= cols <= rows");
  auto engine = rng.engine();
  std::normal_distribution<double> normal;
  Eigen::MatrixXd gauss(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) gauss(i, j) = normal(engine);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const auto diag = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (diag(j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Eigen::MatrixXd sample_haar_orthogonal(int dim, const RngStream& rng) {
  if (dim < 1) throw ValidationError("sample_haar_orthogonal needs dim >= 1");
  return sample_haar_isometry(dim, dim, rng);
}

int input_dimension(int k, int n, double t) {
  return static_cast<int>(std::floor(t * static_cast<double>(k) * static_cast<double>(n) + 1e-9));
}

double ChannelSpec::isometry_defect() const {
  return (V.transpose() * V - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
}

ChannelSpec make_channel(int k, int n, double t, const RngStream& rng) {
  if (k < 1 || n < 1) throw ValidationError("channel dimensions k and n must be positive");
  if (!(t > 0.0 && t <= 1.0)) throw ValidationError("aspect ratio t must lie in (0, 1]");
  ChannelSpec spec;
  spec.k = k;
  spec.n = n;
  spec.t = t;
  spec.d = input_dimension(k, n, t);
  if (spec.d < 1) throw ValidationError("degenerate channel: floor(t k n) = 0");
  spec.V = sample_haar_isometry(k * n, spec.d, rng);
  return spec;
}

ComplexMatrix apply_channel(const ChannelSpec& spec, const ComplexMatrix& x) {
  if (x.rows() != spec.d || x.cols() != spec.d) {
    throw ValidationError("channel input must be " + std::to_string(spec.d) + " x " + std::to_string(spec.d));
  }
  const ComplexMatrix v = spec.V.cast<Complex>();
  const ComplexMatrix w = v * x * v.transpose();
  ComplexMatrix out = ComplexMatrix::Zero(spec.k, spec.k);
  for (int a = 0; a < spec.k; ++a) {
    for (int ap = 0; ap < spec.k; ++ap) {
      Complex s = 0.0;
      for (int b = 0; b < spec.n; ++b) s += w(a * spec.n + b, ap * spec.n + b);
      out(a, ap) = s;
    }
  }
  return out;
}

ComplexMatrix apply_channel_power(const ChannelSpec& spec, int r, const ComplexVector& psi,
                                  const DenseBudget& budget) {
  require_channel_input(spec, r, psi.size());
  const int kn = spec.k * spec.n;
  checked_power(static_cast<std::size_t>(kn), r, budget, "output tensor (kn)^r");

  const ComplexMatrix v = spec.V.cast<Complex>();
  std::vector<int> dims(static_cast<std::size_t>(r), spec.d);
  ComplexVector y = psi;
  for (std::size_t leg = 0; leg < dims.size(); ++leg) y = apply_to_leg(y, dims, leg, v, budget);

  // Split each leg index a * n + b and regroup as (a_1..a_r) x (b_1..b_r).
  const auto k_dim = static_cast<Eigen::Index>(checked_power(spec.k, r, budget, "k^r"));
  const auto n_dim = static_cast<Eigen::Index>(checked_power(spec.n, r, budget, "n^r"));
  ComplexMatrix grouped(k_dim, n_dim);
  for (Eigen::Index flat = 0; flat < y.size(); ++flat) {
    Eigen::Index rest = flat, row = 0, col = 0, k_weight = 1, n_weight = 1;
    for (int leg = r - 1; leg >= 0; --leg) {
      const Eigen::Index digit = rest % kn;
      rest /= kn;
      row += (digit / spec.n) * k_weight;
      col += (digit % spec.n) * n_weight;
      k_weight *= spec.k;
      n_weight *= spec.n;
    }
    grouped(row, col) = y(flat);
  }
  return grouped * grouped.adjoint();
}

ComplexMatrix apply_channel_power(const ChannelSpec& spec, int r, const ComplexMatrix& rho,
                                  const DenseBudget& budget) {
  require_channel_input(spec, r, rho.rows());
  if (rho.rows() != rho.cols()) throw ValidationError("input matrix must be square");
  checked_power(static_cast<std::size_t>(std::max(spec.d, spec.k)), 2 * r, budget, "input matrix");

  std::vector<ComplexMatrix> kraus(static_cast<std::size_t>(spec.n), ComplexMatrix(spec.k, spec.d));
  for (int b = 0; b < spec.n; ++b) {
    for (int a = 0; a < spec.k; ++a) kraus[b].row(a) = spec.V.row(a * spec.n + b).cast<Complex>();
  }

  std::vector<int> dims(static_cast<std::size_t>(2 * r), spec.d);
  ComplexVector data = flatten_row_major(rho);
  for (std::size_t leg = 0; leg < static_cast<std::size_t>(r); ++leg) {
    ComplexVector next;
    std::vector<int> next_dims;
    for (int b = 0; b < spec.n; ++b) {
      std::vector<int> d_work = dims;
      ComplexVector t = apply_to_leg(data, d_work, leg, kraus[b], budget);
      t = apply_to_leg(t, d_work, leg + static_cast<std::size_t>(r), kraus[b], budget);
      if (b == 0) {
        next = std::move(t);
        next_dims = d_work;
      } else {
        next += t;
      }
    }
    data = std::move(next);
    dims = std::move(next_dims);
  }
  const auto out = static_cast<Eigen::Index>(product(dims, 0, static_cast<std::size_t>(r)));
  return unflatten_row_major(data, out, out);
}

InputState::InputState(int d, int r, std::vector<Block> blocks) : d_(d), r_(r), blocks_(std::move(blocks)) {
  if (d < 1 || r < 1) throw ValidationError("input state needs d, r >= 1");
  std::vector<bool> covered(static_cast<std::size_t>(r), false);
  for (auto& block : blocks_) {
    if (block.sites.empty()) throw ValidationError("input block without sites");
    std::sort(block.sites.begin(), block.sites.end());
    for (int s : block.sites) {
      if (s < 0 || s >= r || covered[s]) throw ValidationError("input blocks must partition the sites");
      covered[s] = true;
    }
    std::size_t dim = 1;
    for (std::size_t i = 0; i < block.sites.size(); ++i) dim *= static_cast<std::size_t>(d);
    if (const auto* psi = std::get_if<ComplexVector>(&block.state)) {
      if (static_cast<std::size_t>(psi->size()) != dim) throw ValidationError("pure block has the wrong dimension");
      if (std::abs(psi->norm() - 1.0) > kStateTolerance) throw InvalidStateError("pure block is not normalized");
    } else {
      const auto& rho = std::get<ComplexMatrix>(block.state);
      if (static_cast<std::size_t>(rho.rows()) != dim) throw ValidationError("mixed block has the wrong dimension");
      if (auto why = state_violation(rho); !why.empty()) throw InvalidStateError("mixed block: " + why);
    }
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
    throw ValidationError("input blocks must cover every site");
  }
}

InputState InputState::pure(int d, int r, ComplexVector psi) {
  std::vector<int> sites(static_cast<std::size_t>(r));
  std::iota(sites.begin(), sites.end(), 0);
  return InputState(d, r, {Block{std::move(sites), std::move(psi)}});
}

InputState InputState::mixed(int d, int r, ComplexMatrix rho) {
  std::vector<int> sites(static_cast<std::size_t>(r));
  std::iota(sites.begin(), sites.end(), 0);
  return InputState(d, r, {Block{std::move(sites), std::move(rho)}});
}

bool InputState::is_pure() const {
  return blocks_.size() == 1 && std::holds_alternative<ComplexVector>(blocks_.front().state);
}

const ComplexVector& InputState::vector() const {
  if (!is_pure()) throw ValidationError("input state is not a single pure vector");
  return std::get<ComplexVector>(blocks_.front().state);
}

ComplexMatrix InputState::density(const DenseBudget& budget) const {
  checked_power(static_cast<std::size_t>(d_), 2 * r_, budget, "input density matrix");
  ComplexMatrix full = ComplexMatrix::Ones(1, 1);
  std::vector<int> order;
  for (const auto& block : blocks_) {
    full = kron(full, block_density(block));
    order.insert(order.end(), block.sites.begin(), block.sites.end());
  }
  return reorder_factors(full, d_, order);
}

Complex InputState::entry(Eigen::Index row, Eigen::Index col) const {
  // Site digits, site 0 most significant.
  std::vector<Eigen::Index> row_digit(static_cast<std::size_t>(r_)), col_digit(static_cast<std::size_t>(r_));
  for (int s = r_ - 1; s >= 0; --s) {
    row_digit[s] = row % d_;
    col_digit[s] = col % d_;
    row /= d_;
    col /= d_;
  }
  Complex value = 1.0;
  for (const auto& block : blocks_) {
    Eigen::Index i = 0, j = 0;
    for (int s : block.sites) {
      i = i * d_ + row_digit[s];
      j = j * d_ + col_digit[s];
    }
    if (const auto* psi = std::get_if<ComplexVector>(&block.state)) {
      value *= (*psi)(i)*std::conj((*psi)(j));
    } else {
      value *= std::get<ComplexMatrix>(block.state)(i, j);
    }
    if (value == Complex(0.0, 0.0)) break;
  }
  return value;
}

InputState product_input(int d, int r) {
  std::vector<InputState::Block> blocks;
  for (int s = 0; s < r; ++s) {
    ComplexVector e0 = ComplexVector::Zero(d);
    e0(0) = 1.0;
    blocks.push_back({{s}, std::move(e0)});
  }
  return InputState(d, r, std::move(blocks));
}

InputState maximally_mixed_input(int d, int r) {
  std::vector<InputState::Block> blocks;
  for (int s = 0; s < r; ++s) {
    blocks.push_back({{s}, ComplexMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d))});
  }
  return InputState(d, r, std::move(blocks));
}

ComplexMatrix apply_channel_power(const ChannelSpec& spec, const InputState& input, const DenseBudget& budget) {
  if (input.d() != spec.d) {
    throw ValidationError("input local dimension " + std::to_string(input.d()) + " does not match channel d = " +
                          std::to_string(spec.d));
  }
  checked_power(static_cast<std::size_t>(spec.k), 2 * input.sites(), budget, "output matrix k^r x k^r");
  ComplexMatrix full = ComplexMatrix::Ones(1, 1);
  std::vector<int> order;
  for (const auto& block : input.blocks()) {
    const int q = static_cast<int>(block.sites.size());
    ComplexMatrix out;
    if (const auto* psi = std::get_if<ComplexVector>(&block.state)) {
      out = apply_channel_power(spec, q, *psi, budget);
    } else {
      out = apply_channel_power(spec, q, std::get<ComplexMatrix>(block.state), budget);
    }
    full = kron(full, out);
    order.insert(order.end(), block.sites.begin(), block.sites.end());
  }
  return reorder_factors(full, spec.k, order);
}

double trace_power(const ComplexMatrix& z, int p) {
  if (p < 1) throw ValidationError("moment order p must be positive");
  if (p == 1) return z.trace().real();
  ComplexMatrix acc = z;
  for (int i = 1; i < p - 1; ++i) acc = acc * z;
  // Tr(acc * z) without forming the product.
  return (acc.transpose().cwiseProduct(z)).sum().real();
}

McEstimate mc_trace_moment(int p, int r, int k, int n, double t, const InputState& input, std::size_t samples,
                           std::uint64_t seed, const DenseBudget& budget) {
  if (samples < 2) throw ValidationError("Monte Carlo needs at least 2 samples");
  if (p < 1) throw ValidationError("moment order p must be positive");
  if (input.sites() != r) throw ValidationError("input state has the wrong number of sites");
  if (input.d() != input_dimension(k, n, t)) throw ValidationError("input local dimension does not match floor(tkn)");
  const Accumulator acc = accumulate_samples(samples, [&](std::size_t i) {
    const ChannelSpec spec = make_channel(k, n, t, RngStream{seed, i});
    return trace_power(apply_channel_power(spec, input, budget), p);
  });
  return McEstimate{acc.mean, acc.standard_error(), acc.count};
}

ArrayAccumulator mc_mean_output(int r, int k, int n, double t, const InputState& input, std::size_t samples,
                                std::uint64_t seed, const DenseBudget& budget) {
  if (samples < 2) throw ValidationError("Monte Carlo needs at least 2 samples");
  if (input.sites() != r) throw ValidationError("input state has the wrong number of sites");
  return accumulate_array_samples(samples, [&](std::size_t i) {
    const ChannelSpec spec = make_channel(k, n, t, RngStream{seed, i});
    const ComplexMatrix z = apply_channel_power(spec, input, budget);
    const auto entries = z.size();
    Eigen::ArrayXd out(2 * entries);
    for (Eigen::Index row = 0; row < z.rows(); ++row) {
      for (Eigen::Index col = 0; col < z.cols(); ++col) {
        out(row * z.cols() + col) = z(row, col).real();
        out(entries + row * z.cols() + col) = z(row, col).imag();
      }
    }
    return out;
  });
}

namespace {

// Maps a flat index with factors in `order` to the flat index in site order.
std::vector<Eigen::Index> factor_permutation(Eigen::Index size, int dim, const std::vector<int>& order) {
  const int factors = static_cast<int>(order.size());
  std::vector<Eigen::Index> site_weight(static_cast<std::size_t>(factors));
  Eigen::Index w = 1;
  for (int s = factors - 1; s >= 0; --s) {
    site_weight[s] = w;
    w *= dim;
  }
  if (w != size) throw ValidationError("factor order does not match the tensor dimension");
  std::vector<Eigen::Index> target(static_cast<std::size_t>(size));
  for (Eigen::Index flat = 0; flat < size; ++flat) {
    Eigen::Index rest = flat, out = 0;
    for (int j = factors - 1; j >= 0; --j) {
      out += (rest % dim) * site_weight[order[j]];
      rest /= dim;
    }
    target[flat] = out;
  }
  return target;
}

bool is_identity_order(const std::vector<int>& order) {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] != static_cast<int>(i)) return false;
  }
  return true;
}

}  // namespace

ComplexVector reorder_factors(const ComplexVector& v, int dim, const std::vector<int>& order) {
  if (is_identity_order(order)) return v;
  const auto target = factor_permutation(v.size(), dim, order);
  ComplexVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(target[i]) = v(i);
  return out;
}

ComplexMatrix reorder_factors(const ComplexMatrix& m, int dim, const std::vector<int>& order) {
  if (is_identity_order(order)) return m;
  const auto target = factor_permutation(m.rows(), dim, order);
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(target[i], target[j]) = m(i, j);
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

}  // namespace orthochan
