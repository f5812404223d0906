#pragma once

/**
 * Random orthogonal quantum channels Phi(X) = [id_k (x) Tr_n](V X V^T), where
 * V is the first d = floor(t k n) columns of a Haar orthogonal matrix of size
 * kn. Output rows of V are indexed a * n + b with a in [k], b in [n].
 *
 * Multi-site vectors and matrices use Kronecker ordering: site 0 is the most
 * significant digit of the flattened index.
 */

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "orthochan/statistics.hpp"

namespace orthochan {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Tolerances shared by the state checks.
inline constexpr double kStateTolerance = 1e-10;

// Dense-memory cap, in complex entries, for intermediate tensors.
struct DenseBudget {
  std::size_t max_entries = std::size_t{1} << 24;
};

// Independent random stream: draws are a pure function of (seed, stream).
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::mt19937_64 engine() const;
};

std::uint64_t splitmix64(std::uint64_t x);

// Checked quantum state: Hermitian, PSD and unit trace to kStateTolerance.
class DensityMatrix {
 public:
  // Throws InvalidStateError when the checks fail.
  explicit DensityMatrix(ComplexMatrix matrix);

  static DensityMatrix from_pure(const ComplexVector& psi);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

// Reasons a matrix fails to be a state, or an empty string when it is one.
std::string state_violation(const ComplexMatrix& matrix, double tolerance = kStateTolerance);

// Haar orthogonal matrix of size dim: QR of a standard Gaussian matrix with
// the columns of Q multiplied by sign(diag R).
Eigen::MatrixXd sample_haar_orthogonal(int dim, const RngStream& rng);

// The first `cols` columns of a Haar orthogonal matrix of size `rows`. Built
// from the first `cols` Gaussian columns only; Householder QR makes these
// columns identical to those of the full construction.
Eigen::MatrixXd sample_haar_isometry(int rows, int cols, const RngStream& rng);

// floor(t k n), guarded against representation error in t.
int input_dimension(int k, int n, double t);

struct ChannelSpec {
  int k = 0;
  int n = 0;
  double t = 0.0;
  int d = 0;
  Eigen::MatrixXd V;  // (k n) x d, V^T V = I_d

  // Max entry of |V^T V - I|.
  double isometry_defect() const;
};

ChannelSpec make_channel(int k, int n, double t, const RngStream& rng);

// Phi(X) for any d x d matrix X.
ComplexMatrix apply_channel(const ChannelSpec& spec, const ComplexMatrix& x);

// Phi^{(x) r}(psi psi^*) for a unit vector psi on (C^d)^{(x) r}. V is applied
// one tensor factor at a time; V (x) V is never formed.
ComplexMatrix apply_channel_power(const ChannelSpec& spec, int r, const ComplexVector& psi,
                                  const DenseBudget& budget = {});

// Phi^{(x) r}(rho) for a matrix on (C^d)^{(x) r}, one factor at a time through
// the Kraus operators K_b = V[(a, b), :].
ComplexMatrix apply_channel_power(const ChannelSpec& spec, int r, const ComplexMatrix& rho,
                                  const DenseBudget& budget = {});

// Input state on (C^d)^{(x) r} given as a tensor product of blocks, each
// supported on a set of sites and either pure or mixed. Blocks partition the
// sites.
class InputState {
 public:
  struct Block {
    std::vector<int> sites;  // ascending
    std::variant<ComplexVector, ComplexMatrix> state;
  };

  InputState() = default;
  InputState(int d, int r, std::vector<Block> blocks);

  static InputState pure(int d, int r, ComplexVector psi);
  static InputState mixed(int d, int r, ComplexMatrix rho);

  int d() const { return d_; }
  int sites() const { return r_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  // Single pure block covering every site.
  bool is_pure() const;
  // Full state vector; requires is_pure().
  const ComplexVector& vector() const;
  // Full d^r x d^r density matrix.
  ComplexMatrix density(const DenseBudget& budget = {}) const;
  // One entry of the density matrix, without forming it.
  Complex entry(Eigen::Index row, Eigen::Index col) const;

 private:
  int d_ = 0;
  int r_ = 0;
  std::vector<Block> blocks_;
};

// e_0 (x) ... (x) e_0.
InputState product_input(int d, int r);
// I / d^r, one mixed block per site.
InputState maximally_mixed_input(int d, int r);

// Phi^{(x) r}(input), block by block, reassembled in site order.
ComplexMatrix apply_channel_power(const ChannelSpec& spec, const InputState& input,
                                  const DenseBudget& budget = {});

// Re Tr(Z^p) of a square matrix.
double trace_power(const ComplexMatrix& z, int p);

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

// Mean and standard error of Tr Z^p over independent channel draws; draw i
// uses RngStream{seed, i}.
McEstimate mc_trace_moment(int p, int r, int k, int n, double t, const InputState& input,
                           std::size_t samples, std::uint64_t seed, const DenseBudget& budget = {});

// Entrywise mean of Z over channel draws, with per-entry standard errors.
// Real parts first, then imaginary parts, row-major.
ArrayAccumulator mc_mean_output(int r, int k, int n, double t, const InputState& input,
                                std::size_t samples, std::uint64_t seed, const DenseBudget& budget = {});

// Reorders tensor factors: `order[j]` is the site carried by factor j of the
// input; the result has factors in ascending site order.
ComplexVector reorder_factors(const ComplexVector& v, int dim, const std::vector<int>& order);
ComplexMatrix reorder_factors(const ComplexMatrix& m, int dim, const std::vector<int>& order);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace orthochan
