#include <gtest/gtest.h>

#include "generators.hpp"
#include "orthochan/channels.hpp"
#include "orthochan/error.hpp"
#include "orthochan/parallel.hpp"

namespace orthochan {
namespace {

using testing::Engine;

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  auto a = RngStream{5, 1}.engine();
  auto b = RngStream{5, 1}.engine();
  auto c = RngStream{5, 2}.engine();
  auto d = RngStream{6, 1}.engine();
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(Haar, IsometryIsOrthonormalAndDeterministic) {
  for (auto [rows, cols] : {std::pair{6, 3}, {8, 8}, {20, 7}}) {
    const auto v = sample_haar_isometry(rows, cols, {9, 4});
    EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(cols, cols)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(v, sample_haar_isometry(rows, cols, {9, 4}));
  }
  EXPECT_THROW(sample_haar_isometry(3, 4, {}), ValidationError);
}

TEST(Haar, IsometryEqualsLeadingColumnsOfTheFullMatrix) {
  const auto full = sample_haar_orthogonal(9, {3, 3});
  const auto thin = sample_haar_isometry(9, 9, {3, 3});
  EXPECT_EQ(full, thin);
}

TEST(Haar, EntryMomentsMatchSphereMoments) {
  constexpr int n = 4;
  constexpr std::size_t samples = 40000;
  const Accumulator second = accumulate_samples(samples, [](std::size_t i) {
    const auto u = sample_haar_orthogonal(n, {21, i});
    return u(0, 0) * u(0, 0);
  });
  const Accumulator fourth = accumulate_samples(samples, [](std::size_t i) {
    const auto u = sample_haar_orthogonal(n, {21, i});
    return std::pow(u(1, 2), 4);
  });
  EXPECT_NEAR(second.mean, 1.0 / n, 4.0 * second.standard_error());
  EXPECT_NEAR(fourth.mean, 3.0 / (n * (n + 2.0)), 4.0 * fourth.standard_error());
}

TEST(Haar, DeterminantTakesBothSigns) {
  int negative = 0;
  for (std::uint64_t i = 0; i < 200; ++i) negative += sample_haar_orthogonal(3, {1, i}).determinant() < 0.0;
  EXPECT_GT(negative, 60);
  EXPECT_LT(negative, 140);
}

TEST(Channel, InputDimensionFloors) {
  EXPECT_EQ(input_dimension(2, 3, 0.5), 3);
  EXPECT_EQ(input_dimension(3, 10, 0.3), 9);  // 0.3 * 30 is 8.999... in binary
  EXPECT_EQ(input_dimension(2, 1, 0.4), 0);
  EXPECT_THROW(make_channel(2, 1, 0.4, {}), ValidationError);
  EXPECT_THROW(make_channel(2, 4, 0.0, {}), ValidationError);
  EXPECT_THROW(make_channel(2, 4, 1.5, {}), ValidationError);
}

TEST(Channel, TracePreservingAndPositive) {
  Engine g(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = make_channel(3, 4, 0.5, {7, static_cast<std::uint64_t>(trial)});
    const auto rho = testing::random_density(g, spec.d, 2);
    const auto out = apply_channel(spec, rho);
    EXPECT_NEAR(out.trace().real(), 1.0, 1e-12);
    EXPECT_EQ(state_violation(out), "");
    EXPECT_LT(spec.isometry_defect(), 1e-12);
  }
}

TEST(Channel, PowerPathsAgree) {
  Engine g(32);
  const auto spec = make_channel(2, 3, 0.5, {8, 0});
  const int d = spec.d;
  // Product input: the r = 2 output factorizes.
  const auto a = testing::random_unit_vector(g, d);
  const auto b = testing::random_unit_vector(g, d);
  ComplexVector ab(d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) ab(i * d + j) = a(i) * b(j);
  }
  const auto z = apply_channel_power(spec, 2, ab);
  const auto expected = kron(apply_channel(spec, a * a.adjoint()), apply_channel(spec, b * b.adjoint()));
  EXPECT_LT((z - expected).cwiseAbs().maxCoeff(), 1e-12);

  // Pure and Kraus paths agree on an entangled input.
  const auto psi = testing::random_unit_vector(g, d * d);
  const ComplexMatrix rho = psi * psi.adjoint();
  EXPECT_LT((apply_channel_power(spec, 2, psi) - apply_channel_power(spec, 2, rho)).cwiseAbs().maxCoeff(), 1e-12);

  // Block input with sites in a non-trivial order.
  const auto m = testing::random_density(g, d, 2);
  const InputState blocks(d, 3, {{{0, 2}, psi}, {{1}, m}});
  const ComplexMatrix dense = blocks.density();
  EXPECT_LT((apply_channel_power(spec, blocks) - apply_channel_power(spec, 3, dense)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(apply_channel_power(spec, blocks).trace().real(), 1.0, 1e-12);
}

TEST(InputState, EntryMatchesDensity) {
  Engine g(33);
  const int d = 3;
  const auto psi = testing::random_unit_vector(g, d * d);
  const auto m = testing::random_density(g, d, 3);
  const InputState s(d, 3, {{{2, 0}, psi}, {{1}, m}});
  const ComplexMatrix dense = s.density();
  EXPECT_NEAR(dense.trace().real(), 1.0, 1e-12);
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) EXPECT_LT(std::abs(s.entry(i, j) - dense(i, j)), 1e-14);
  }
}

TEST(InputState, Validation) {
  const int d = 2;
  ComplexVector bad = ComplexVector::Ones(d);
  EXPECT_THROW(InputState(d, 1, {{{0}, bad}}), InvalidStateError);
  ComplexMatrix neg = ComplexMatrix::Identity(d, d);
  neg(1, 1) = -1.0;
  neg(0, 0) = 2.0;
  EXPECT_THROW(InputState(d, 1, {{{0}, neg}}), InvalidStateError);
  const ComplexVector e0 = ComplexVector::Unit(d, 0);
  EXPECT_THROW(InputState(d, 2, {{{0}, e0}}), ValidationError);
  EXPECT_THROW(InputState(d, 2, {{{0}, e0}, {{0}, e0}}), ValidationError);
  EXPECT_THROW(DensityMatrix{neg}, InvalidStateError);
  EXPECT_NE(state_violation(neg), "");
}

TEST(ReorderFactors, PermutesTensorLegs) {
  Engine g(34);
  const int d = 2;
  const auto a = testing::random_unit_vector(g, d);
  const auto b = testing::random_unit_vector(g, d);
  const auto c = testing::random_unit_vector(g, d);
  // Input factors carry sites (2, 0, 1); output is a (x) b (x) c in site order.
  const ComplexMatrix in = kron(kron(c, a), b);
  const ComplexMatrix expected = kron(kron(a, b), c);
  const ComplexVector out = reorder_factors(ComplexVector(in.col(0)), d, {2, 0, 1});
  EXPECT_LT((out - expected.col(0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(TracePower, MatchesEigenvalues) {
  Engine g(35);
  const auto rho = testing::random_density(g, 5, 5);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(rho);
  for (int p = 1; p <= 4; ++p) {
    EXPECT_NEAR(trace_power(rho, p), eig.eigenvalues().array().pow(p).sum(), 1e-13);
  }
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  const InputState rho = product_input(3, 2);
  McEstimate one, many;
  {
    ThreadCountOverride guard(1);
    one = mc_trace_moment(2, 2, 2, 3, 0.5, rho, 700, 42);
  }
  {
    ThreadCountOverride guard(4);
    many = mc_trace_moment(2, 2, 2, 3, 0.5, rho, 700, 42);
  }
  EXPECT_EQ(one.mean, many.mean);
  EXPECT_EQ(one.standard_error, many.standard_error);
  EXPECT_EQ(one.samples, 700u);
}

TEST(MonteCarlo, DenseBudgetIsEnforced) {
  DenseBudget tiny;
  tiny.max_entries = 50;
  const auto spec = make_channel(2, 4, 0.5, {});
  EXPECT_THROW(apply_channel_power(spec, product_input(spec.d, 3), tiny), BudgetError);
}

TEST(Statistics, AccumulatorMergeMatchesSequential) {
  Engine g(36);
  std::normal_distribution<double> normal;
  std::vector<double> xs(1000);
  for (auto& x : xs) x = normal(g);
  Accumulator all, left, right;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    all.add(xs[i]);
    (i < 377 ? left : right).add(xs[i]);
  }
  left.merge(right);
  EXPECT_NEAR(left.mean, all.mean, 1e-14);
  EXPECT_NEAR(left.variance(), all.variance(), 1e-12);
  EXPECT_NEAR(quantile({3.0, 1.0, 2.0, 4.0}, 0.5), 2.5, 1e-15);
  EXPECT_NEAR(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.1), 1.4, 1e-15);
}

}  // namespace
}  // namespace orthochan
