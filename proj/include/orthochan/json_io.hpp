#pragma once

// Text serialization: complex numbers as [re, im], matrices as arrays of
// rows, pairings as arrays of [i, j] pairs.

#include <json.hpp>
#include <string>

#include "orthochan/channels.hpp"
#include "orthochan/pairings.hpp"

namespace orthochan {

nlohmann::json complex_to_json(Complex z);
Complex complex_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const ComplexMatrix& m);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const nlohmann::json& j);

nlohmann::json pairs_to_json(const std::vector<std::pair<int, int>>& pairs);
std::string pairs_to_string(const std::vector<std::pair<int, int>>& pairs);

// Input state description. Accepted forms:
//   {"vector": [...]}                          pure state on all sites
//   {"matrix": [[...], ...]}                   density matrix on all sites
//   {"blocks": [{"sites": [...], "vector" | "matrix": ...}, ...]}
// Dimensions must match (C^d)^{(x) r}.
InputState input_from_json(const nlohmann::json& j, int d, int r);

// bell, product, mixed, or file:<path> holding the JSON form above.
InputState make_input(const std::string& rule, int d, int r);

// Shortest round-trip decimal form of a double, for CSV output.
std::string format_double(double x);

}  // namespace orthochan
