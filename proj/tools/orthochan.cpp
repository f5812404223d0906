// Command-line entry point. Every artifact embeds its generating config; the
// wall time goes to a separate metadata record so artifacts stay
// byte-identical across runs.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "orthochan/acceptance.hpp"
#include "orthochan/asymptotics.hpp"
#include "orthochan/channels.hpp"
#include "orthochan/error.hpp"
#include "orthochan/json_io.hpp"
#include "orthochan/moments.hpp"
#include "orthochan/pairings.hpp"
#include "orthochan/weingarten.hpp"

namespace {

using nlohmann::json;
using namespace orthochan;

constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;
constexpr int kExitVerify = 4;

constexpr int kHardMaxPairingSize = kMaxExactPoints;
constexpr int kHardMaxDenseDim = 8192;

struct Run {
  std::string out;
  std::string meta;
  int max_pairing_size = 8;
  int max_dense_dim = 4096;

  int p = 2, r = 2, k = 2, n = 4, m = 2;
  double t = 0.5;
  std::string input = "bell";
  std::string report;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::string rule = "bell";
  std::string custom_input;
  std::vector<int> n_grid;
  std::string format = "csv";
  std::string summary;
  bool bits = false;
  std::vector<int> only;
};

MomentOptions moment_options(const Run& run) {
  if (run.max_pairing_size < 2 || run.max_pairing_size > kHardMaxPairingSize) {
    throw ValidationError("--max-pairing-size must lie in [2, " + std::to_string(kHardMaxPairingSize) + "]");
  }
  if (run.max_dense_dim < 1 || run.max_dense_dim > kHardMaxDenseDim) {
    throw ValidationError("--max-dense-dim must lie in [1, " + std::to_string(kHardMaxDenseDim) + "]");
  }
  MomentOptions options;
  options.max_points = run.max_pairing_size;
  options.dense.max_entries = static_cast<std::size_t>(run.max_dense_dim) * run.max_dense_dim;
  return options;
}

void validate_channel(const Run& run) {
  if (run.k < 2) throw ValidationError("k must be at least 2");
  if (!(run.t > 0.0 && run.t < 1.0)) throw ValidationError("t must lie in (0, 1)");
  if (run.n < 1) throw ValidationError("n must be positive");
  if (run.r < 1 || run.p < 1) throw ValidationError("p and r must be positive");
  if (input_dimension(run.k, run.n, run.t) < 1) throw ValidationError("floor(t k n) must be at least 1");
}

json base_config(const std::string& sub, const Run& run) {
  return {{"subcommand", sub},
          {"version", ORTHOCHAN_VERSION},
          {"max_pairing_size", run.max_pairing_size},
          {"max_dense_dim", run.max_dense_dim}};
}

// Writes the artifact to --out (or stdout) and the metadata record next to it.
void emit(const Run& run, const json& config, const std::string& body, double seconds) {
  if (run.out.empty()) {
    std::cout << body;
  } else {
    std::ofstream file(run.out, std::ios::binary);
    if (!file) throw ValidationError("cannot write '" + run.out + "'");
    file << body;
  }
  const json meta = {{"config", config},
                     {"seed", config.value("seed", json(nullptr))},
                     {"version", ORTHOCHAN_VERSION},
                     {"wall_time_seconds", seconds}};
  std::string meta_path = run.meta;
  if (meta_path.empty() && !run.out.empty()) meta_path = run.out + ".meta.json";
  if (meta_path.empty()) {
    std::cerr << meta.dump() << '\n';
  } else {
    std::ofstream file(meta_path, std::ios::binary);
    if (!file) throw ValidationError("cannot write '" + meta_path + "'");
    file << meta.dump(2) << '\n';
  }
}

std::string csv_header(const json& config) { return "# config: " + config.dump() + "\n"; }

std::string json_body(json j) { return j.dump(2) + "\n"; }

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int cmd_pairings(const Run& run, bool layout) {
  const auto start = Clock::now();
  json config = base_config("pairings", run);
  config["m"] = run.m;
  if (layout) {
    if (run.p < 1 || run.r < 1 || run.p * run.r != run.m) throw ValidationError("--p and --r need p r = m");
    config["p"] = run.p;
    config["r"] = run.r;
  }
  std::string body = csv_header(config);
  body += layout ? "index,pairing,bumps,transverse\n" : "index,pairing\n";
  const auto pairings = enumerate_pairings(run.m);
  for (std::size_t i = 0; i < pairings.size(); ++i) {
    body += std::to_string(i) + ",\"" + pairs_to_string(pairings[i].pairs()) + "\"";
    if (layout) {
      body += "," + std::to_string(bumps(pairings[i], run.p, run.r)) + "," +
              (is_transverse(pairings[i], run.p, run.r) ? "1" : "0");
    }
    body += "\n";
  }
  emit(run, config, body, elapsed(start));
  return 0;
}

int cmd_wg(const Run& run) {
  const auto start = Clock::now();
  if (run.n < 1) throw ValidationError("n must be positive");
  json config = base_config("wg", run);
  config["m"] = run.m;
  config["n"] = run.n;
  Limits limits;
  const auto table = wg_exact(run.m, run.n, limits);
  std::string body = csv_header(config);
  body += "alpha_index,beta_index,alpha,beta,exact,asymptotic,ratio\n";
  for (std::size_t a = 0; a < table->pairings.size(); ++a) {
    for (std::size_t b = 0; b < table->pairings.size(); ++b) {
      const double exact = (*table)(a, b);
      const double asym = wg_asymptotic(table->pairings[a], table->pairings[b], run.n);
      body += std::to_string(a) + "," + std::to_string(b) + ",\"" + pairs_to_string(table->pairings[a].pairs()) +
              "\",\"" + pairs_to_string(table->pairings[b].pairs()) + "\"," + format_double(exact) + "," +
              format_double(asym) + "," + format_double(exact / asym) + "\n";
    }
  }
  emit(run, config, body, elapsed(start));
  return 0;
}

json channel_config(const std::string& sub, const Run& run) {
  json config = base_config(sub, run);
  config["p"] = run.p;
  config["r"] = run.r;
  config["k"] = run.k;
  config["n"] = run.n;
  config["t"] = run.t;
  config["d"] = input_dimension(run.k, run.n, run.t);
  config["input"] = run.input;
  return config;
}

int cmd_moment(const Run& run) {
  const auto start = Clock::now();
  validate_channel(run);
  const MomentOptions options = moment_options(run);
  json config = channel_config("moment", run);
  if (!run.report.empty()) config["report"] = run.report;
  const int d = input_dimension(run.k, run.n, run.t);
  const InputState rho = make_input(run.input, d, run.r);

  if (run.report == "terms") {
    const auto terms = term_report(run.p, run.r, run.k, run.n, run.t, rho, options);
    std::string body = csv_header(config);
    body += "alpha,beta,n_exp,k_exp,f_beta_re,f_beta_im,wg,value_re,value_im\n";
    for (const auto& term : terms) {
      body += std::to_string(term.alpha) + "," + std::to_string(term.beta) + "," + std::to_string(term.n_exp) + "," +
              std::to_string(term.k_exp) + "," + format_double(term.f_beta.real()) + "," +
              format_double(term.f_beta.imag()) + "," + format_double(term.wg) + "," +
              format_double(term.value.real()) + "," + format_double(term.value.imag()) + "\n";
    }
    emit(run, config, body, elapsed(start));
    return 0;
  }
  if (!run.report.empty()) throw ValidationError("unknown report '" + run.report + "' (expected terms)");

  json result = {{"config", config}};
  result["exact"] = exact_trace_moment(run.p, run.r, run.k, run.n, run.t, rho, options);
  if (run.p * run.r <= Limits{}.max_dominant_cells) {
    result["leading_order"] =
        asymptotic_trace_moment(run.p, run.r, run.k, run.t, g_from_input(rho, run.p, run.k, run.n, run.t, options));
  }
  if (run.p == 1) {
    result["mean_output"] = matrix_to_json(exact_mean_output(run.r, run.k, run.n, run.t, rho, options));
  }
  emit(run, config, json_body(result), elapsed(start));
  return 0;
}

int cmd_simulate(const Run& run) {
  const auto start = Clock::now();
  validate_channel(run);
  const MomentOptions options = moment_options(run);
  json config = channel_config("simulate", run);
  config["samples"] = run.samples;
  config["seed"] = run.seed;
  if (run.samples < 2) throw ValidationError("simulate needs at least 2 samples");
  const int d = input_dimension(run.k, run.n, run.t);
  const InputState rho = make_input(run.input, d, run.r);

  const McEstimate mc = mc_trace_moment(run.p, run.r, run.k, run.n, run.t, rho, run.samples, run.seed, options.dense);
  const ArrayAccumulator mean = mc_mean_output(run.r, run.k, run.n, run.t, rho, run.samples, run.seed, options.dense);
  const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(mean.mean.size() / 2))));
  ComplexMatrix z(side, side), se(side, side);
  const Eigen::ArrayXd err = mean.standard_error();
  const Eigen::Index half = side * side;
  for (Eigen::Index i = 0; i < side; ++i) {
    for (Eigen::Index j = 0; j < side; ++j) {
      z(i, j) = {mean.mean(i * side + j), mean.mean(half + i * side + j)};
      se(i, j) = {err(i * side + j), err(half + i * side + j)};
    }
  }
  json result = {{"config", config}};
  result["trace_moment"] = {{"mean", mc.mean}, {"standard_error", mc.standard_error}, {"samples", mc.samples}};
  if (2 * run.p * run.r <= options.max_points) {
    result["trace_moment"]["exact"] = exact_trace_moment(run.p, run.r, run.k, run.n, run.t, rho, options);
  }
  result["mean_output"] = matrix_to_json(z);
  result["mean_output_standard_error"] = matrix_to_json(se);
  emit(run, config, json_body(result), elapsed(start));
  return 0;
}

int cmd_body(const Run& run) {
  const auto start = Clock::now();
  if (run.k < 2) throw ValidationError("k must be at least 2");
  if (!(run.t > 0.0 && run.t < 1.0)) throw ValidationError("t must lie in (0, 1)");
  json config = base_config("body", run);
  config["r"] = run.r;
  config["k"] = run.k;
  config["t"] = run.t;
  config["log_base"] = run.bits ? "2" : "e";
  const LogBase base = run.bits ? LogBase::Two : LogBase::Natural;
  const ConvexBody body = make_convex_body(run.r, run.k, run.t);
  json vertices = json::array();
  double min_entropy = 0.0;
  std::vector<double> entropies;
  for (std::size_t i = 0; i < body.labels.size(); ++i) {
    const double h = von_neumann_entropy(body.vertices[i], base);
    entropies.push_back(h);
    min_entropy = i == 0 ? h : std::min(min_entropy, h);
    vertices.push_back({{"B", pairs_to_json(body.labels[i].pairs())},
                        {"entropy", h},
                        {"entropy_closed_form", entropy_extremal(body.labels[i], run.k, run.t, base)},
                        {"matrix", matrix_to_json(body.vertices[i])}});
  }
  // Every vertex within rounding of the minimum is reported; ties are not
  // resolved.
  json minimizers = json::array();
  for (std::size_t i = 0; i < entropies.size(); ++i) {
    if (entropies[i] <= min_entropy + 1e-10) minimizers.push_back(pairs_to_json(body.labels[i].pairs()));
  }
  json result = {{"config", config},
                 {"isotropic_entropy", isotropic_entropy(run.k, run.t, base)},
                 {"eta", matrix_to_json(isotropic_eta(run.k, run.t))},
                 {"vertices", vertices},
                 {"minimal_entropy_vertices", minimizers}};
  emit(run, config, json_body(result), elapsed(start));
  return 0;
}

json summary_json(const SampleSummary& s) {
  return {{"mean", s.mean}, {"standard_error", s.standard_error}, {"median", s.median}, {"q10", s.q10},
          {"q90", s.q90}};
}

int cmd_experiment(const Run& run) {
  const auto start = Clock::now();
  if (run.k < 2) throw ValidationError("k must be at least 2");
  if (!(run.t > 0.0 && run.t < 1.0)) throw ValidationError("t must lie in (0, 1)");
  const MomentOptions options = moment_options(run);
  json config = base_config("experiment", run);
  config["rule"] = run.rule;
  config["r"] = run.r;
  config["k"] = run.k;
  config["t"] = run.t;
  config["n"] = run.n_grid;
  config["samples"] = run.samples;
  config["seed"] = run.seed;
  config["log_base"] = run.bits ? "2" : "e";
  ExperimentConfig ec;
  ec.rule = parse_input_rule(run.rule);
  ec.r = run.r;
  ec.k = run.k;
  ec.t = run.t;
  ec.n_grid = run.n_grid;
  ec.samples = run.samples;
  ec.seed = run.seed;
  ec.base = run.bits ? LogBase::Two : LogBase::Natural;
  ec.dense = options.dense;
  if (ec.rule == InputRule::Custom) {
    if (run.custom_input.empty()) throw ValidationError("--rule custom needs --input-file");
    config["input_file"] = run.custom_input;
    const std::string path = run.custom_input;
    ec.custom = [path](int d, int r) { return make_input("file:" + path, d, r); };
  }
  const ExperimentResult result = convergence_experiment(ec);

  json summaries = json::array();
  for (const auto& s : result.summaries) {
    summaries.push_back({{"n", s.n}, {"d", s.d}, {"dist", summary_json(s.dist)}, {"entropy", summary_json(s.entropy)}});
  }
  const json summary = {{"config", config}, {"summaries", summaries}};
  if (!run.summary.empty()) {
    std::ofstream file(run.summary, std::ios::binary);
    if (!file) throw ValidationError("cannot write '" + run.summary + "'");
    file << json_body(summary);
  }
  std::string body;
  if (run.format == "json") {
    json rows = json::array();
    for (const auto& row : result.rows) {
      rows.push_back({{"n", row.n}, {"sample", row.sample}, {"dist", row.dist}, {"entropy", row.entropy}});
    }
    json full = summary;
    full["rows"] = rows;
    body = json_body(full);
  } else if (run.format == "csv") {
    body = csv_header(config) + "n,sample,dist,entropy\n";
    for (const auto& row : result.rows) {
      body += std::to_string(row.n) + "," + std::to_string(row.sample) + "," + format_double(row.dist) + "," +
              format_double(row.entropy) + "\n";
    }
  } else {
    throw ValidationError("unknown format '" + run.format + "' (expected csv or json)");
  }
  emit(run, config, body, elapsed(start));
  return 0;
}

int cmd_verify(const Run& run) {
  const auto start = Clock::now();
  json config = base_config("verify", run);
  config["seed"] = run.seed;
  config["only"] = run.only;
  AcceptanceOptions options;
  options.seed = run.seed;
  options.only = run.only;
  const auto results = run_acceptance(options);
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  std::string body = "# config: " + config.dump() + "\n" + format_report(results);
  body += all ? "verdict: PASS\n" : "verdict: FAIL\n";
  emit(run, config, body, elapsed(start));
  return all ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random orthogonal quantum channels: Weingarten moments, asymptotics and experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Run run;
  app.add_option("--out", run.out, "Write the artifact here instead of stdout");
  app.add_option("--meta", run.meta, "Metadata record path (default: <out>.meta.json, or stderr)");
  app.add_option("--max-pairing-size", run.max_pairing_size, "Exact-engine cap on 2pr (hard maximum 12)");
  app.add_option("--max-dense-dim", run.max_dense_dim, "Largest dense matrix side (hard maximum 8192)");

  auto* pairings = app.add_subcommand("pairings", "List the pairings of 2m points in canonical order");
  pairings->add_option("--m", run.m, "Half the number of points")->required();
  auto* layout_p = pairings->add_option("--p", run.p, "Copies, for the bump and transverse columns (needs p r = m)");
  auto* layout_r = pairings->add_option("--r", run.r, "Tensor power, for the bump and transverse columns");
  layout_p->needs(layout_r);
  layout_r->needs(layout_p);

  auto* wg = app.add_subcommand("wg", "Exact and leading-order Weingarten table");
  wg->add_option("--m", run.m, "Half the number of points")->required();
  wg->add_option("--n", run.n, "Matrix size")->required();

  auto add_channel = [&](CLI::App* sub) {
    sub->add_option("--p", run.p, "Moment order");
    sub->add_option("--r", run.r, "Tensor power");
    sub->add_option("--k", run.k, "Output dimension")->required();
    sub->add_option("--n", run.n, "Environment dimension")->required();
    sub->add_option("--t", run.t, "Aspect ratio, d = floor(t k n)")->required();
    sub->add_option("--input", run.input, "bell, product, mixed or file:<path>");
  };
  auto* moment = app.add_subcommand("moment", "Exact E Tr Z^p and its leading-order value");
  add_channel(moment);
  moment->add_option("--report", run.report, "terms: dump every (alpha, beta) term as CSV");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo E Tr Z^p and E Z");
  add_channel(simulate);
  simulate->add_option("--samples", run.samples, "Channel draws");
  simulate->add_option("--seed", run.seed, "Random seed");

  auto* body = app.add_subcommand("body", "Vertices of the convex body and their entropies");
  body->add_option("--r", run.r, "Tensor power")->required();
  body->add_option("--k", run.k, "Output dimension")->required();
  body->add_option("--t", run.t, "Aspect ratio")->required();
  body->add_flag("--bits", run.bits, "Entropies in bits");

  auto* experiment = app.add_subcommand("experiment", "Distance to the body and entropy over channel draws");
  experiment->add_option("--rule", run.rule, "bell, product or custom");
  experiment->add_option("--input-file", run.custom_input, "JSON input for --rule custom");
  experiment->add_option("--r", run.r, "Tensor power")->required();
  experiment->add_option("--k", run.k, "Output dimension")->required();
  experiment->add_option("--t", run.t, "Aspect ratio")->required();
  experiment->add_option("--n", run.n_grid, "Comma-separated n grid")->required()->delimiter(',');
  experiment->add_option("--samples", run.samples, "Channel draws per n");
  experiment->add_option("--seed", run.seed, "Random seed");
  experiment->add_option("--format", run.format, "csv (rows) or json (rows and summary)");
  experiment->add_option("--summary", run.summary, "Also write the JSON summary here");
  experiment->add_flag("--bits", run.bits, "Entropies in bits");

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  run.seed = AcceptanceOptions{}.seed;
  verify->add_option("--seed", run.seed, "Random seed");
  verify->add_option("--only", run.only, "Comma-separated criterion ids")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*pairings) return cmd_pairings(run, layout_p->count() > 0);
    if (*wg) return cmd_wg(run);
    if (*moment) return cmd_moment(run);
    if (*simulate) return cmd_simulate(run);
    if (*body) return cmd_body(run);
    if (*experiment) return cmd_experiment(run);
    if (*verify) return cmd_verify(run);
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
