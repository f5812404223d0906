#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "orthochan/error.hpp"
#include "orthochan/weingarten.hpp"

namespace orthochan {
namespace {

TEST(Weingarten, FirstOrderIsOneOverN) {
  for (double n : {1.0, 2.0, 7.0, 100.0}) {
    const auto table = wg_exact(1, n);
    EXPECT_NEAR((*table)(0, 0), 1.0 / n, 1e-15);
  }
}

TEST(Weingarten, SecondOrderClosedForm) {
  for (double n : {2.0, 3.0, 10.0, 50.0}) {
    const auto table = wg_exact(2, n);
    const double denom = n * (n - 1.0) * (n + 2.0);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        const double expected = a == b ? (n + 1.0) / denom : -1.0 / denom;
        EXPECT_NEAR((*table)(a, b), expected, 1e-12 * std::abs(expected)) << n;
      }
    }
  }
}

TEST(Weingarten, InvertsTheGramMatrixWhenFullRank) {
  for (int m = 1; m <= 4; ++m) {
    for (double n : {double(m) + 1.0, 9.0}) {
      const auto table = wg_exact(m, n);
      ASSERT_TRUE(table->is_full_rank());
      const Eigen::MatrixXd product = table->values * gram_matrix(m, n);
      const double err = (product - Eigen::MatrixXd::Identity(product.rows(), product.cols())).cwiseAbs().maxCoeff();
      EXPECT_LT(err, 1e-9) << "m=" << m << " n=" << n;
    }
  }
}

TEST(Weingarten, PseudoInverseOnSingularGram) {
  // At n = 1 every Gram entry is 1: rank one.
  const auto table = wg_exact(2, 1.0);
  EXPECT_EQ(table->rank, 1);
  const Eigen::MatrixXd g = gram_matrix(2, 1.0);
  EXPECT_LT((g * table->values * g - g).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(WeingartenClassFunction(2, 1.0), ValidationError);
}

TEST(Weingarten, TableIsSymmetricAndInvariant) {
  const auto table = wg_exact(3, 6.0);
  EXPECT_LT((table->values - table->values.transpose()).cwiseAbs().maxCoeff(), 1e-18);
  // Wg depends on (a, b) only through the loop type.
  const auto& ps = table->pairings;
  std::map<std::vector<int>, double> by_type;
  for (std::size_t a = 0; a < ps.size(); ++a) {
    for (std::size_t b = 0; b < ps.size(); ++b) {
      const auto [it, inserted] = by_type.try_emplace(loop_type(ps[a], ps[b]), (*table)(a, b));
      if (!inserted) EXPECT_NEAR(it->second, (*table)(a, b), 1e-15);
    }
  }
}

TEST(Weingarten, ClassFunctionMatchesDenseTable) {
  for (int m = 2; m <= 4; ++m) {
    for (double n : {5.0, 12.0, 40.0}) {
      const auto table = wg_exact(m, n);
      const WeingartenClassFunction cls(m, n);
      double worst = 0.0;
      for (std::size_t a = 0; a < table->pairings.size(); ++a) {
        for (std::size_t b = 0; b < table->pairings.size(); ++b) {
          const double ref = (*table)(a, b);
          worst = std::max(worst, std::abs(cls(table->pairings[a], table->pairings[b]) - ref) / std::abs(ref));
        }
      }
      EXPECT_LT(worst, 1e-9) << "m=" << m << " n=" << n;
    }
  }
}

TEST(Weingarten, AsymptoticRatioApproachesOne) {
  const auto a = enumerate_pairings(3);
  for (double n : {1e3, 1e4}) {
    const auto table = wg_exact(3, n);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < a.size(); ++j) {
        EXPECT_NEAR((*table)(i, j) / wg_asymptotic(a[i], a[j], n), 1.0, 20.0 / n);
      }
    }
  }
}

TEST(Weingarten, CacheIsBoundedLru) {
  clear_wg_cache();
  set_wg_cache_capacity(2);
  const auto first = wg_exact(2, 3.0);
  wg_exact(2, 4.0);
  EXPECT_EQ(wg_exact(2, 3.0), first);  // refreshed, still cached
  wg_exact(2, 5.0);                     // evicts n = 4
  EXPECT_EQ(wg_cache_size(), 2u);
  EXPECT_EQ(wg_exact(2, 3.0), first);
  set_wg_cache_capacity(32);
  clear_wg_cache();
  EXPECT_EQ(wg_cache_size(), 0u);
}

TEST(Weingarten, DenseTableBudget) {
  EXPECT_THROW(wg_exact(6, 10.0), BudgetError);
  EXPECT_THROW(wg_exact(0, 10.0), ValidationError);
  EXPECT_THROW(wg_exact(2, 0.0), ValidationError);
}

TEST(Integrate, SphereMoments) {
  using Rows = std::vector<std::pair<int, int>>;
  for (int n : {2, 3, 5, 8}) {
    const double nd = n;
    EXPECT_NEAR(integrate_monomial(Rows{{0, 0}, {0, 0}}, n), 1.0 / nd, 1e-14);
    EXPECT_NEAR(integrate_monomial(Rows{{0, 0}, {0, 0}, {0, 0}, {0, 0}}, n), 3.0 / (nd * (nd + 2.0)), 1e-14);
    EXPECT_NEAR(integrate_monomial(Rows{{0, 0}, {0, 0}, {0, 1}, {0, 1}}, n), 1.0 / (nd * (nd + 2.0)), 1e-14);
    EXPECT_NEAR(integrate_monomial(Rows{{0, 0}, {0, 0}, {1, 1}, {1, 1}}, n),
                (nd + 1.0) / (nd * (nd - 1.0) * (nd + 2.0)), 1e-14);
    // E U00 U11 U01 U10 = -1 / (n (n-1) (n+2))
    EXPECT_NEAR(integrate_monomial(Rows{{0, 0}, {1, 1}, {0, 1}, {1, 0}}, n), -1.0 / (nd * (nd - 1.0) * (nd + 2.0)),
                1e-14);
    EXPECT_EQ(integrate_monomial(Rows{{0, 0}}, n), 0.0);
    EXPECT_EQ(integrate_monomial(Rows{{0, 0}, {0, 1}}, n), 0.0);
    EXPECT_EQ(integrate_monomial(Rows{}, n), 1.0);
  }
  EXPECT_THROW(integrate_monomial(Rows{{0, 3}, {0, 3}}, 2), ValidationError);
}

}  // namespace
}  // namespace orthochan
