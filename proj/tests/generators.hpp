#pragma once

// Hand-rolled generators for property tests. Every generator draws from an
// explicit engine so failures reproduce from the seed alone.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "orthochan/channels.hpp"
#include "orthochan/pairings.hpp"

namespace orthochan::testing {

using Engine = std::mt19937_64;

inline int uniform_int(Engine& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }

inline Permutation random_permutation(Engine& g, int size) {
  std::vector<int> images(static_cast<std::size_t>(size));
  std::iota(images.begin(), images.end(), 0);
  std::shuffle(images.begin(), images.end(), g);
  return Permutation(images);
}

// Uniform over pairings of 2m points: shuffle, then pair neighbours.
inline Pairing random_pairing(Engine& g, int m) {
  std::vector<int> points(static_cast<std::size_t>(2 * m));
  std::iota(points.begin(), points.end(), 0);
  std::shuffle(points.begin(), points.end(), g);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i) pairs.emplace_back(points[2 * i], points[2 * i + 1]);
  return Pairing::from_pairs(2 * m, pairs);
}

inline PartialPairing random_partial_pairing(Engine& g, int size) {
  std::vector<int> points(static_cast<std::size_t>(size));
  std::iota(points.begin(), points.end(), 0);
  std::shuffle(points.begin(), points.end(), g);
  const int pairs = uniform_int(g, 0, size / 2);
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < pairs; ++i) out.emplace_back(points[2 * i], points[2 * i + 1]);
  return PartialPairing(size, out);
}

inline ComplexMatrix random_complex(Engine& g, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = {normal(g), normal(g)};
  }
  return m;
}

// Induced-measure density matrix: G G^* / Tr, G of size dim x rank.
inline ComplexMatrix random_density(Engine& g, Eigen::Index dim, Eigen::Index rank) {
  const ComplexMatrix x = random_complex(g, dim, rank);
  ComplexMatrix rho = x * x.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline ComplexVector random_unit_vector(Engine& g, Eigen::Index dim) {
  ComplexVector v = random_complex(g, dim, 1).col(0);
  return v / v.norm();
}

}  // namespace orthochan::testing
