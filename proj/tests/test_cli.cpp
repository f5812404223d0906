#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded; captures stdout and the exit status.
Outcome run(const std::string& args, const std::string& env = "") {
  const std::string command = env + " \"" ORTHOCHAN_CLI_PATH "\" " + args + " 2>/dev/null";
  Outcome result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  char buffer[4096];
  std::size_t got = 0;
  while ((got = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) result.out.append(buffer, got);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

TEST(Cli, WeingartenTableHasHeaderAndOneRowPerPair) {
  const auto r = run("wg --m 2 --n 10");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("# config: ", 0), 0u);
  EXPECT_EQ(count_lines(r.out), 2 + 9);
}

TEST(Cli, FirstMomentIsOne) {
  const auto r = run("moment --p 1 --r 2 --k 2 --n 6 --t 0.5 --input product");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["exact"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(j["config"]["input"], "product");
  EXPECT_TRUE(j.contains("mean_output"));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("moment --p 2 --r 2 --k 2 --n 4 --t 1.5").code, 2);
  EXPECT_EQ(run("moment --p 3 --r 2 --k 2 --n 4 --t 0.5").code, 3);
  EXPECT_EQ(run("--max-pairing-size 14 moment --p 1 --r 2 --k 2 --n 4 --t 0.5").code, 2);
  EXPECT_EQ(run("moment --p 2").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("verify --only 1").code, 0);
}

TEST(Cli, ExperimentIsByteIdenticalAcrossRunsAndThreads) {
  const std::string args = "experiment --r 2 --k 2 --t 0.5 --n 4,8 --samples 6 --seed 3";
  const auto a = run(args, "ORTHOCHAN_THREADS=1");
  const auto b = run(args, "ORTHOCHAN_THREADS=1");
  const auto c = run(args, "ORTHOCHAN_THREADS=3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  EXPECT_EQ(count_lines(a.out), 2 + 12);
  EXPECT_NE(a.out.find("\"seed\":3"), std::string::npos);
}

TEST(Cli, ArtifactAndMetadataFiles) {
  const std::string out = ::testing::TempDir() + "orthochan_body.json";
  ASSERT_EQ(run("body --r 2 --k 2 --t 0.5 --out " + out).code, 0);
  const auto artifact = nlohmann::json::parse(read_file(out));
  EXPECT_EQ(artifact["config"]["subcommand"], "body");
  EXPECT_EQ(artifact["vertices"].size(), 2u);
  const auto meta = nlohmann::json::parse(read_file(out + ".meta.json"));
  EXPECT_TRUE(meta.contains("wall_time_seconds"));
  std::remove(out.c_str());
  std::remove((out + ".meta.json").c_str());
}

TEST(Cli, VerifyIsByteIdenticalAcrossRuns) {
  const auto a = run("verify");
  const auto b = run("verify", "ORTHOCHAN_THREADS=2");
  EXPECT_EQ(a.code, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(count_lines(a.out), 1 + 11 + 1);
}

}  // namespace
