#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "orthochan/asymptotics.hpp"
#include "orthochan/error.hpp"
#include "orthochan/parallel.hpp"

namespace orthochan {
namespace {

using testing::Engine;

Eigen::MatrixXd dense(const SparseOperator& x) { return Eigen::MatrixXd(x); }

Eigen::MatrixXd omega(int k) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k * k, k * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) w(i * k + i, j * k + j) = 1.0;
  }
  return w;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

TEST(Eta, EndpointsAndSpectrum) {
  EXPECT_LT((isotropic_eta(3, 0.0) - Eigen::MatrixXd::Identity(9, 9) / 9.0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((isotropic_eta(3, 1.0) - omega(3) / 3.0).cwiseAbs().maxCoeff(), 1e-15);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(isotropic_eta(2, 0.5));
  const Eigen::Vector4d expected(0.125, 0.125, 0.125, 0.625);
  EXPECT_LT((eig.eigenvalues() - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(isotropic_eta(2, 1.2), ValidationError);
}

TEST(Family, SingleFactorsAndExplicitTensorProducts) {
  const int k = 3;
  const double t = 0.4;
  EXPECT_LT((dense(op_S_tilde(PartialPairing(2, {}), k, t)) - Eigen::MatrixXd::Identity(9, 9) / 9.0)
                .cwiseAbs()
                .maxCoeff(),
            1e-15);
  EXPECT_LT((dense(op_S_tilde(PartialPairing(2, {{0, 1}}), k, t)) - isotropic_eta(k, t)).cwiseAbs().maxCoeff(), 1e-15);
  // r = 3, B = {(0, 2)}: eta on sites 0 and 2, I/k on site 1.
  const Eigen::MatrixXd s = dense(op_S_tilde(PartialPairing(3, {{0, 2}}), k, t));
  const Eigen::MatrixXd eta = isotropic_eta(k, t);
  for (int a0 = 0; a0 < k; ++a0) {
    for (int a1 = 0; a1 < k; ++a1) {
      for (int a2 = 0; a2 < k; ++a2) {
        for (int b0 = 0; b0 < k; ++b0) {
          for (int b1 = 0; b1 < k; ++b1) {
            for (int b2 = 0; b2 < k; ++b2) {
              const double expected = eta(a0 * k + a2, b0 * k + b2) * (a1 == b1 ? 1.0 / k : 0.0);
              EXPECT_NEAR(s((a0 * k + a1) * k + a2, (b0 * k + b1) * k + b2), expected, 1e-15);
            }
          }
        }
      }
    }
  }
  EXPECT_LT((dense(op_T(PartialPairing(4, {{0, 1}, {2, 3}}), 2)) - kron(omega(2), omega(2))).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(Family, VerticesAreStatesAndRTracesAreDeltas) {
  for (int r = 1; r <= 4; ++r) {
    for (const auto& b : enumerate_partial_pairings(r)) {
      const Eigen::MatrixXd s = dense(op_S_tilde(b, 2, 0.7));
      EXPECT_NEAR(s.trace(), 1.0, 1e-13);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
      EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-14);
      EXPECT_NEAR(dense(op_R_tilde(b, 3, 0.3)).trace(), b.pair_count() == 0 ? 1.0 : 0.0, 1e-13);
    }
  }
}

TEST(Family, MobiusRoundTrip) {
  for (int r = 1; r <= 4; ++r) {
    const auto family = enumerate_partial_pairings(r);
    for (const auto& b : family) {
      Eigen::MatrixXd s_sum = Eigen::MatrixXd::Zero(std::pow(2, r), std::pow(2, r));
      Eigen::MatrixXd r_sum = s_sum;
      for (const auto& a : family) {
        if (!a.is_subset_of(b)) continue;
        s_sum += dense(op_R_tilde(a, 2, 0.6));
        r_sum += ((b.pair_count() - a.pair_count()) % 2 == 0 ? 1.0 : -1.0) * dense(op_S_tilde(a, 2, 0.6));
      }
      EXPECT_LT((s_sum - dense(op_S_tilde(b, 2, 0.6))).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((r_sum - dense(op_R_tilde(b, 2, 0.6))).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(QTilde, PartitionOfIdentity) {
  for (int r = 1; r <= 3; ++r) {
    for (int d : {2, 5}) {
      Eigen::MatrixXd total = Eigen::MatrixXd::Zero(std::pow(d, r), std::pow(d, r));
      for (const auto& a : enumerate_partial_pairings(r)) total += dense(op_Q_tilde(a, d));
      EXPECT_LT((total - Eigen::MatrixXd::Identity(total.rows(), total.cols())).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(QTilde, ProjectorsAtTwoSites) {
  for (int d : {3, 8}) {
    for (const auto& a : enumerate_partial_pairings(2)) {
      const Eigen::MatrixXd q = dense(op_Q_tilde(a, d));
      EXPECT_LT((q * q - q).cwiseAbs().maxCoeff(), 1e-13);
    }
  }
}

TEST(QTilde, SpectrumApproachesZeroOneAtThreeSites) {
  // Three overlapping pair projectors: the empty Q~ is only near-projective,
  // and the defect shrinks as d grows.
  double previous = 1.0;
  for (int d : {4, 6, 8}) {
    double gap = 0.0;
    for (const auto& a : enumerate_partial_pairings(3)) gap = std::max(gap, q_tilde_spectrum_gap(a, d));
    EXPECT_GT(gap, 1e-6);
    EXPECT_LT(gap, previous);
    EXPECT_LT(gap * d, 3.0);
    previous = gap;
  }
}

TEST(MeanOutputAsymptotic, ExpansionsAgreeOnRandomInputs) {
  Engine g(51);
  for (auto [d, r] : {std::pair{3, 2}, {2, 3}, {3, 3}, {2, 4}}) {
    const int side = static_cast<int>(std::pow(d, r));
    const InputState rho = InputState::mixed(d, r, testing::random_density(g, side, 3));
    for (int k : {2, 3}) {
      const auto m = mean_output_asymptotic(rho, k, 0.35);
      EXPECT_LT((m.via_r - m.via_s).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_NEAR(m.via_r.trace(), 1.0, 1e-12);
    }
  }
}

TEST(MeanOutputAsymptotic, BellGivesEtaAndMixedGivesDecayingCorrection) {
  for (int d : {4, 16}) {
    const auto m = mean_output_asymptotic(bell_input(PartialPairing(2, {{0, 1}}), d), 2, 0.5);
    EXPECT_LT((m.via_r - isotropic_eta(2, 0.5)).cwiseAbs().maxCoeff(), 1e-13);
    // I/d^2: <T~_pair, rho> = Tr(omega)/d^3 = 1/d^2.
    const auto mixed = mean_output_asymptotic(maximally_mixed_input(d, 2), 2, 0.5);
    const Eigen::MatrixXd expected =
        dense(op_R_tilde(PartialPairing(2, {}), 2, 0.5)) + dense(op_R_tilde(PartialPairing(2, {{0, 1}}), 2, 0.5)) / (d * d);
    EXPECT_LT((mixed.via_r - expected).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(BellInput, ShapesAndValidation) {
  const int d = 3;
  const auto two = bell_input(PartialPairing(2, {{0, 1}}), d).density();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(two);
  EXPECT_NEAR(eig.eigenvalues().maxCoeff(), 1.0, 1e-13);
  EXPECT_NEAR(eig.eigenvalues().cwiseAbs().sum(), 1.0, 1e-12);
  for (const auto& b0 : maximal_partial_pairings(3)) {
    const auto rho = bell_input(b0, d).density();
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-13);
    EXPECT_LT((rho.real() - dense(op_G(b0, d))).cwiseAbs().maxCoeff(), 1e-15);
  }
  EXPECT_THROW(bell_input(PartialPairing(4, {{0, 1}}), d), ValidationError);
}

TEST(Entropy, BasicValuesClippingAndBase) {
  const ComplexVector psi = ComplexVector::Unit(4, 2);
  EXPECT_NEAR(von_neumann_entropy(ComplexMatrix(psi * psi.adjoint())), 0.0, 1e-15);
  for (int r = 1; r <= 3; ++r) {
    const Eigen::MatrixXd mixed = Eigen::MatrixXd::Identity(std::pow(2, r), std::pow(2, r)) / std::pow(2, r);
    EXPECT_NEAR(von_neumann_entropy(mixed), r * std::log(2.0), 1e-13);
    EXPECT_NEAR(von_neumann_entropy(mixed, LogBase::Two), r, 1e-13);
  }
  Eigen::MatrixXd clip = Eigen::MatrixXd::Zero(2, 2);
  clip(0, 0) = 1.0 + 1e-11;
  clip(1, 1) = -1e-11;
  EXPECT_NEAR(von_neumann_entropy(clip), 0.0, 1e-9);
  clip(1, 1) = -1e-8;
  EXPECT_THROW(von_neumann_entropy(clip), InvalidStateError);
  EXPECT_NEAR(isotropic_entropy(2, 0.5), -0.625 * std::log(0.625) - 0.375 * std::log(0.125), 1e-14);
  EXPECT_NEAR(isotropic_entropy(3, 1.0), 0.0, 1e-15);
}

TEST(Entropy, ClosedFormMatchesSpectrumAndOrdersVertices) {
  for (int r = 1; r <= 4; ++r) {
    for (int k : {2, 3}) {
      for (double t : {0.2, 0.8}) {
        const double h = isotropic_entropy(k, t);
        EXPECT_LT(h, 2.0 * std::log(k));
        for (const auto& b : enumerate_partial_pairings(r)) {
          const double closed = entropy_extremal(b, k, t);
          EXPECT_NEAR(von_neumann_entropy(dense(op_S_tilde(b, k, t))), closed, 1e-10);
          // Strictly decreasing in |B|.
          EXPECT_NEAR(closed, r * std::log(k) - b.pair_count() * (2.0 * std::log(k) - h), 1e-12);
        }
      }
    }
  }
}

TEST(Body, VertexCountAndDistanceToVertices) {
  const ConvexBody body = make_convex_body(3, 2, 0.5);
  EXPECT_EQ(body.vertices.size(), partial_pairing_count(3));
  for (std::size_t i = 0; i < body.vertices.size(); ++i) {
    const auto result = distance_to_body(body.vertices[i].cast<Complex>(), body);
    EXPECT_NEAR(result.distance, 0.0, 1e-7);
    EXPECT_TRUE(result.converged);
    const Eigen::MatrixXd mid = 0.5 * (body.vertices[i] + body.vertices[(i + 1) % body.vertices.size()]);
    EXPECT_NEAR(distance_to_body(mid.cast<Complex>(), body).distance, 0.0, 1e-7);
  }
}

TEST(Body, OrthogonalPerturbationDistance) {
  // r = 2, k = 2: the body is the segment [I/4, eta]. A traceless symmetric P
  // orthogonal to eta - I/4 moves I/4 straight away from the segment.
  Engine g(52);
  const ConvexBody body = make_convex_body(2, 2, 0.5);
  const Eigen::MatrixXd base = Eigen::MatrixXd::Identity(4, 4) / 4.0;
  const Eigen::MatrixXd dir = isotropic_eta(2, 0.5) - base;
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd p(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j <= i; ++j) p(i, j) = p(j, i) = normal(g);
    }
    p -= p.trace() / 4.0 * Eigen::MatrixXd::Identity(4, 4);
    p -= (p.array() * dir.array()).sum() / dir.squaredNorm() * dir;
    p /= p.norm();
    for (double eps : {1e-3, 0.05}) {
      const auto result = distance_to_body((base + eps * p).cast<Complex>(), body);
      EXPECT_NEAR(result.distance, eps, 1e-7);
    }
  }
  // Imaginary parts count toward the distance.
  ComplexMatrix x = base.cast<Complex>();
  x(0, 1) = Complex(0.0, 0.1);
  x(1, 0) = Complex(0.0, -0.1);
  EXPECT_NEAR(distance_to_body(x, body).distance, std::sqrt(0.02), 1e-7);
}

TEST(Body, IterationCapReportsNonConvergence) {
  const ConvexBody body = make_convex_body(3, 2, 0.5);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(8, 8);
  for (const auto& v : body.vertices) x += v / static_cast<double>(body.vertices.size());
  const auto result = distance_to_body(x.cast<Complex>(), body, 1e-8, 0);
  EXPECT_FALSE(result.converged);
  EXPECT_GT(distance_to_body(x.cast<Complex>(), body, 1e-14, 10000).iterations, 0);
  EXPECT_THROW(distance_to_body(ComplexMatrix::Identity(4, 4), body), ValidationError);
}

TEST(Experiment, DeterministicAcrossThreadsAndOrdered) {
  ExperimentConfig config;
  config.n_grid = {6, 12};
  config.samples = 12;
  config.seed = 9;
  ExperimentResult one, many;
  {
    ThreadCountOverride guard(1);
    one = convergence_experiment(config);
  }
  {
    ThreadCountOverride guard(3);
    many = convergence_experiment(config);
  }
  ASSERT_EQ(one.rows.size(), 24u);
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    EXPECT_EQ(one.rows[i].dist, many.rows[i].dist);
    EXPECT_EQ(one.rows[i].entropy, many.rows[i].entropy);
    EXPECT_EQ(one.rows[i].n, config.n_grid[i / 12]);
    EXPECT_EQ(one.rows[i].sample, i % 12);
  }
  for (const auto& s : one.summaries) {
    EXPECT_LE(s.dist.q10, s.dist.median);
    EXPECT_LE(s.dist.median, s.dist.q90);
    EXPECT_GT(s.entropy.mean, 0.0);
  }
}

TEST(Experiment, CustomRuleAndValidation) {
  ExperimentConfig config;
  config.rule = InputRule::Custom;
  config.n_grid = {6};
  config.samples = 3;
  EXPECT_THROW(convergence_experiment(config), ValidationError);
  config.custom = [](int d, int r) { return maximally_mixed_input(d, r); };
  const auto result = convergence_experiment(config);
  EXPECT_EQ(result.rows.size(), 3u);
  config.n_grid = {};
  EXPECT_THROW(convergence_experiment(config), ValidationError);
  EXPECT_THROW(parse_input_rule("ghz"), ValidationError);
}

}  // namespace
}  // namespace orthochan
