#include "orthochan/json_io.hpp"

#include <charconv>
#include <fstream>

#include "orthochan/asymptotics.hpp"
#include "orthochan/error.hpp"

namespace orthochan {

using nlohmann::json;

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ValidationError("expected a number or an [re, im] pair");
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrix_to_json(const Eigen::MatrixXd& m) { return matrix_to_json(ComplexMatrix(m.cast<Complex>())); }

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ValidationError("expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols) {
      throw ValidationError("matrix rows have different lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[i][c]);
  }
  return m;
}

json vector_to_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

ComplexVector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("expected a non-empty array");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

json pairs_to_json(const std::vector<std::pair<int, int>>& pairs) {
  json out = json::array();
  for (auto [a, b] : pairs) out.push_back(json::array({a, b}));
  return out;
}

std::string pairs_to_string(const std::vector<std::pair<int, int>>& pairs) { return pairs_to_json(pairs).dump(); }

InputState input_from_json(const json& j, int d, int r) {
  if (!j.is_object()) throw ValidationError("input description must be a JSON object");
  if (j.contains("vector")) return InputState::pure(d, r, vector_from_json(j.at("vector")));
  if (j.contains("matrix")) return InputState::mixed(d, r, matrix_from_json(j.at("matrix")));
  if (!j.contains("blocks") || !j.at("blocks").is_array()) {
    throw ValidationError("input description needs 'vector', 'matrix' or 'blocks'");
  }
  std::vector<InputState::Block> blocks;
  for (const auto& b : j.at("blocks")) {
    InputState::Block block;
    block.sites = b.at("sites").get<std::vector<int>>();
    if (b.contains("vector")) {
      block.state = vector_from_json(b.at("vector"));
    } else if (b.contains("matrix")) {
      block.state = matrix_from_json(b.at("matrix"));
    } else {
      throw ValidationError("input block needs 'vector' or 'matrix'");
    }
    blocks.push_back(std::move(block));
  }
  return InputState(d, r, std::move(blocks));
}

InputState make_input(const std::string& rule, int d, int r) {
  if (rule == "bell") return bell_input(canonical_maximal_partial_pairing(r), d);
  if (rule == "product") return product_input(d, r);
  if (rule == "mixed") return maximally_mixed_input(d, r);
  if (rule.rfind("file:", 0) == 0) {
    const std::string path = rule.substr(5);
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read input file '" + path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::parse_error& e) {
      throw ValidationError("input file '" + path + "' is not valid JSON: " + e.what());
    }
    return input_from_json(j, d, r);
  }
  throw ValidationError("unknown input '" + rule + "' (expected bell, product, mixed or file:<path>)");
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace orthochan
