#pragma once

// Large-n operator family on r tensor factors, the convex body K_{r,k,t} and
// the entropy statements built on it.
//
// For a partial pairing B of the r sites, an operator is a tensor product of
// one factor per pair of B (acting on the two paired sites) and one factor
// per single site. omega = Omega Omega^* with Omega = sum_i e_i (x) e_i.
//
//   T_B        omega      on pairs, I      on singles
//   T~_B(d)    omega / d  on pairs, I      on singles
//   R~_B(k,t)  t (omega/k - I/k^2) on pairs, I/k on singles
//   S~_B(k,t)  eta        on pairs, I/k    on singles
//   G_B(d)     omega / d  on pairs, I/d    on singles
//   Q~_A(d)    sum_{B >= A} (-1)^{|B|-|A|} T~_B
//
// with eta = t omega/k + (1-t) I/k^2.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orthochan/channels.hpp"
#include "orthochan/pairings.hpp"

namespace orthochan {

using SparseOperator = Eigen::SparseMatrix<double>;

// Entropy clipping window: eigenvalues in [-kEntropyClip, 0] count as zero.
inline constexpr double kEntropyClip = 1e-10;

SparseOperator op_T(const PartialPairing& a, int dim);
SparseOperator op_T_tilde(const PartialPairing& b, int d);
SparseOperator op_R_tilde(const PartialPairing& b, int k, double t);
SparseOperator op_S_tilde(const PartialPairing& b, int k, double t);
SparseOperator op_Q_tilde(const PartialPairing& a, int d, const Limits& limits = {});
SparseOperator op_G(const PartialPairing& b, int d);

// eta on C^k (x) C^k; t in [0, 1].
Eigen::MatrixXd isotropic_eta(int k, double t);

// M(rho) in both expansions; they agree up to rounding.
struct MeanOutputExpansions {
  Eigen::MatrixXd via_r;  // sum_B <T~_B, rho> R~_B
  Eigen::MatrixXd via_s;  // sum_A <Q~_A, rho> S~_A
};

MeanOutputExpansions mean_output_asymptotic(const InputState& rho, int k, double t,
                                            const Limits& limits = {});

// <X, rho> = Tr(X rho) for real symmetric X.
Complex pairing_with(const SparseOperator& x, const InputState& rho);

// G_{B0} as a block input: Omega/sqrt(d) on each pair, I/d on each single.
// Throws ValidationError unless B0 is maximal.
InputState bell_input(const PartialPairing& b0, int d);

enum class LogBase { Natural, Two };

// -sum lambda log lambda over the spectrum of the Hermitian part of rho.
// Throws InvalidStateError for eigenvalues below -kEntropyClip.
double von_neumann_entropy(const ComplexMatrix& rho, LogBase base = LogBase::Natural);
double von_neumann_entropy(const Eigen::MatrixXd& rho, LogBase base = LogBase::Natural);

// H(eta) = h(t + (1-t)/k^2) + (k^2 - 1) h((1-t)/k^2), h(x) = -x log x.
double isotropic_entropy(int k, double t, LogBase base = LogBase::Natural);

// |B| H(eta) + (r - 2|B|) log k, r = b.size().
double entropy_extremal(const PartialPairing& b, int k, double t, LogBase base = LogBase::Natural);

// Largest distance from an eigenvalue of Q~_A(d) to {0, 1}.
double q_tilde_spectrum_gap(const PartialPairing& a, int d, const Limits& limits = {});

// conv{S~_B : B a partial pairing of r sites}.
struct ConvexBody {
  int r = 0;
  int k = 0;
  double t = 0.0;
  std::vector<PartialPairing> labels;    // canonical order
  std::vector<Eigen::MatrixXd> vertices;  // S~_B, k^r x k^r
};

ConvexBody make_convex_body(int r, int k, double t, const Limits& limits = {});

struct BodyDistance {
  double distance = 0.0;
  double gap = 0.0;  // final Frank-Wolfe duality gap
  int iterations = 0;
  bool converged = false;
  Eigen::VectorXd weights;  // convex weights of the closest point
};

// Frobenius distance from X to the body by pairwise Frank-Wolfe with exact
// line search on the simplex weights; stops when the duality gap falls to tol.
BodyDistance distance_to_body(const ComplexMatrix& x, const ConvexBody& body, double tol = 1e-8,
                              int max_iterations = 10000);

enum class InputRule { Bell, Product, Custom };

struct ExperimentConfig {
  InputRule rule = InputRule::Bell;
  int r = 2;
  int k = 2;
  double t = 0.5;
  std::vector<int> n_grid;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  std::function<InputState(int d, int r)> custom;  // for InputRule::Custom
  LogBase base = LogBase::Natural;
  DenseBudget dense;
};

struct ExperimentRow {
  int n = 0;
  std::size_t sample = 0;
  double dist = 0.0;
  double entropy = 0.0;
};

struct SampleSummary {
  double mean = 0.0;
  double standard_error = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

SampleSummary summarize(const std::vector<double>& values);

struct ExperimentSummary {
  int n = 0;
  int d = 0;
  SampleSummary dist;
  SampleSummary entropy;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;  // by n, then sample
  std::vector<ExperimentSummary> summaries;
};

// Draw (n, s) uses RngStream{seed, (n << 32) | s}.
ExperimentResult convergence_experiment(const ExperimentConfig& config);

InputRule parse_input_rule(const std::string& name);

}  // namespace orthochan
