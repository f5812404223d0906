#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "generators.hpp"
#include "orthochan/error.hpp"
#include "orthochan/json_io.hpp"

namespace orthochan {
namespace {

TEST(Json, MatrixAndVectorRoundTrip) {
  testing::Engine g(61);
  const ComplexMatrix m = testing::random_complex(g, 3, 4);
  EXPECT_EQ(matrix_from_json(nlohmann::json::parse(matrix_to_json(m).dump())), m);
  const ComplexVector v = testing::random_unit_vector(g, 5);
  EXPECT_EQ(vector_from_json(nlohmann::json::parse(vector_to_json(v).dump())), v);
  EXPECT_EQ(complex_from_json(nlohmann::json(2.5)), Complex(2.5, 0.0));
  EXPECT_THROW(complex_from_json(nlohmann::json::array({1, 2, 3})), ValidationError);
  EXPECT_THROW(matrix_from_json(nlohmann::json::parse("[[1, 2], [3]]")), ValidationError);
}

TEST(Json, PairsFormat) { EXPECT_EQ(pairs_to_string({{0, 1}, {2, 3}}), "[[0,1],[2,3]]"); }

TEST(Json, InputForms) {
  const auto pure = input_from_json(nlohmann::json::parse(R"({"vector": [[0.6, 0], [0, 0.8]]})"), 2, 1);
  EXPECT_TRUE(pure.is_pure());
  const auto mixed = input_from_json(nlohmann::json::parse(R"({"matrix": [[0.5, 0], [0, 0.5]]})"), 2, 1);
  EXPECT_NEAR(mixed.density()(1, 1).real(), 0.5, 1e-15);
  const auto blocks = input_from_json(
      nlohmann::json::parse(R"({"blocks": [{"sites": [1], "vector": [1, 0]}, {"sites": [0], "matrix": [[1, 0], [0, 0]]}]})"),
      2, 2);
  EXPECT_EQ(blocks.blocks().size(), 2u);
  EXPECT_THROW(input_from_json(nlohmann::json::parse(R"({"vector": [1, 1]})"), 2, 1), InvalidStateError);
  EXPECT_THROW(input_from_json(nlohmann::json::parse(R"({"other": 1})"), 2, 1), ValidationError);
}

TEST(Json, MakeInputRulesAndFiles) {
  EXPECT_EQ(make_input("bell", 3, 2).blocks().size(), 1u);
  EXPECT_EQ(make_input("product", 3, 2).blocks().size(), 2u);
  EXPECT_NEAR(make_input("mixed", 2, 2).density()(0, 0).real(), 0.25, 1e-15);
  EXPECT_THROW(make_input("ghz", 2, 2), ValidationError);
  EXPECT_THROW(make_input("file:/nonexistent/input.json", 2, 2), ValidationError);
  const std::string path = ::testing::TempDir() + "orthochan_input.json";
  {
    std::ofstream out(path);
    out << R"({"vector": [[1, 0], [0, 0]]})";
  }
  EXPECT_TRUE(make_input("file:" + path, 2, 1).is_pure());
  {
    std::ofstream out(path);
    out << "{not json";
  }
  EXPECT_THROW(make_input("file:" + path, 2, 1), ValidationError);
  std::remove(path.c_str());
}

TEST(Json, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) EXPECT_EQ(std::stod(format_double(x)), x);
}

}  // namespace
}  // namespace orthochan
