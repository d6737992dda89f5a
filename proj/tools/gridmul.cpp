#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridmul/bench.hpp"
#include "gridmul/corrector.hpp"
#include "gridmul/rank_analysis.hpp"
#include "gridmul/rng.hpp"
#include "gridmul/syndrome.hpp"

namespace {

constexpr int kConfigError = 2;

std::vector<gridmul::Scenario> parse_scenarios(const std::string& text) {
  std::vector<gridmul::Scenario> scenarios;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token.size() != 1) throw CLI::ValidationError("scenarios", "expected letters a-f");
    scenarios.push_back(gridmul::scenario_from_letter(token[0]));
  }
  if (scenarios.empty()) throw CLI::ValidationError("scenarios", "no scenarios given");
  return scenarios;
}

std::vector<gridmul::Method> parse_methods(const std::string& text) {
  std::vector<gridmul::Method> methods;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    methods.push_back(gridmul::method_from_name(token));
  }
  if (methods.empty()) throw CLI::ValidationError("methods", "no methods given");
  return methods;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw CLI::ValidationError("out", "cannot open " + path);
  out << text;
}

int run_bench(std::size_t n, std::size_t k, std::size_t m, const std::vector<double>& deltas,
              const std::string& scenarios, std::size_t trials, std::uint64_t seed,
              const std::string& methods, const std::string& format, const std::string& out,
              double noise_delta, bool paper_scale) {
  gridmul::ExperimentConfig config;
  config.n = n;
  config.k = k;
  config.m = m;
  if (paper_scale) {
    config.n = 1024;
    config.k = 4096;
    config.m = 1024;
  }
  if (!deltas.empty()) config.deltas = deltas;
  config.scenarios = parse_scenarios(scenarios);
  config.trials = trials;
  config.seed = seed;
  config.methods = parse_methods(methods);
  config.noise_delta = noise_delta;

  const gridmul::ExperimentResult result = gridmul::run_experiment(config);
  const gridmul::TableFormat table_format =
      format == "markdown" ? gridmul::TableFormat::Markdown : gridmul::TableFormat::Csv;
  emit(gridmul::render_table(result.cells, table_format), out);
  return 0;
}

int run_demo(std::size_t size, double delta, std::uint64_t seed, char scenario_letter,
             bool dump) {
  using namespace gridmul;
  const Dims dims{size, 2 * size, size};
  const GridCodeSpec spec = GridCodeSpec::for_dims(dims);
  const DenseMatrix a = random_matrix(dims.n, dims.k, derive_seed(seed, 1));
  const DenseMatrix b = random_matrix(dims.k, dims.m, derive_seed(seed, 2));
  const DenseMatrix plain = multiply(a, b);

  const Scenario scenario = scenario_from_letter(scenario_letter);
  const ErrorPattern pattern = sample_scenario(scenario, dims, delta, derive_seed(seed, 3));
  auto [product, report] = inject(a, b, pattern, spec, derive_seed(seed, 4));

  std::cout << "pattern: " << pattern_to_json(pattern, report.seed) << "\n";
  const Syndrome syndrome = compute_syndrome(product, spec, delta);
  if (dump) dump_syndrome(syndrome, std::cout);

  std::cout << "flagged rows: " << syndrome.flagged_rows.size()
            << ", flagged cols: " << syndrome.flagged_cols.size() << "\n";
  const CorrectionOutcome outcome = correct(product, syndrome, spec);
  switch (outcome.kind) {
    case OutcomeKind::Clean:
      std::cout << "outcome: clean\n";
      break;
    case OutcomeKind::Corrected:
      std::cout << "outcome: corrected\n";
      break;
    case OutcomeKind::ParityRepair:
      std::cout << "outcome: parity-repair\n";
      break;
    case OutcomeKind::Uncorrectable:
      std::cout << "outcome: uncorrectable (" << outcome.reason << ")\n";
      break;
  }
  if (!outcome.repairs.empty()) {
    write_repair_log_csv(outcome.repairs, std::cout);
  }
  if (outcome.corrected) {
    double deviation = 0.0;
    for (std::size_t i = 0; i < dims.n; ++i)
      for (std::size_t j = 0; j < dims.m; ++j)
        deviation = std::max(deviation, std::abs(outcome.corrected->data(i, j) - plain(i, j)));
    std::cout << "max deviation from clean product: " << deviation << "\n";
  }
  return 0;
}

int run_rank_sweep(std::size_t trials, std::uint64_t seed, std::size_t n, std::size_t m,
                   const std::string& out) {
  using namespace gridmul;
  if (n < 3 || m < 3) throw CLI::ValidationError("rank-sweep", "n and m must be at least 3");
  Uniform rng(seed);
  std::string text = "s1,s2,s3,t1,t2,t3,rank\n";
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto draw_triple = [&](std::size_t limit) {
      std::array<std::size_t, 3> idx{};
      idx[0] = 1 + rng.index(limit - 2);
      idx[1] = idx[0] + 1 + rng.index(limit - idx[0] - 1);
      idx[2] = idx[1] + 1 + rng.index(limit - idx[1]);
      return idx;
    };
    const auto s = draw_triple(n);
    const auto t = draw_triple(m);
    const ConstraintSystem system = build_e33_system(s, t);
    const std::size_t rank = numerical_rank(system, 1e-9);
    text += std::to_string(s[0]) + ',' + std::to_string(s[1]) + ',' + std::to_string(s[2]) + ',' +
            std::to_string(t[0]) + ',' + std::to_string(t[1]) + ',' + std::to_string(t[2]) + ',' +
            std::to_string(rank) + '\n';
  }
  emit(text, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checksum-coded matrix multiplication with multi-symbol error correction"};
  app.require_subcommand(1);

  // bench
  auto* bench = app.add_subcommand("bench", "Run the correction-rate and latency experiment");
  std::size_t n = 256, k = 512, m = 256, trials = 1000;
  std::uint64_t seed = 1;
  std::vector<double> deltas;
  std::string scenarios = "a,b,c,d,e,f";
  std::string methods = "grid,checksum";
  std::string format = "csv";
  std::string out_path;
  double noise_delta = 0.0;
  bool paper_scale = false;
  bench->add_option("--n", n, "Output rows");
  bench->add_option("--k", k, "Inner dimension");
  bench->add_option("--m", m, "Output columns");
  bench->add_option("--delta", deltas, "Detection thresholds (default 0.5 0.1 0.01)");
  bench->add_option("--scenarios", scenarios, "Comma-separated scenario letters a-f");
  bench->add_option("--trials", trials, "Trials per cell");
  bench->add_option("--seed", seed, "Base seed");
  bench->add_option("--methods", methods, "Comma-separated: grid,checksum");
  bench->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "markdown"}));
  bench->add_option("--out", out_path, "Output path (stdout when omitted)");
  bench->add_option("--noise-delta", noise_delta,
                    "Bound of the analog noise field added to every trial (default 0)");
  bench->add_flag("--paper-scale", paper_scale, "Use n=1024, k=4096, m=1024");

  // demo
  auto* demo = app.add_subcommand("demo", "Worked small example with syndrome dump");
  std::size_t demo_size = 8;
  double demo_delta = 0.1;
  std::uint64_t demo_seed = 7;
  std::string demo_scenario = "f";
  bool dump_syndrome_flag = false;
  demo->add_option("--size", demo_size, "Data block side length");
  demo->add_option("--delta", demo_delta, "Detection threshold");
  demo->add_option("--seed", demo_seed, "Seed");
  demo->add_option("--scenario", demo_scenario, "Scenario letter a-f");
  demo->add_flag("--dump-syndrome", dump_syndrome_flag, "Print the per-line residual dump");

  // rank-sweep
  auto* sweep = app.add_subcommand("rank-sweep", "Rank of the 3x3-support constraint system");
  std::size_t sweep_trials = 200;
  std::uint64_t sweep_seed = 1;
  std::size_t sweep_n = 50, sweep_m = 50;
  std::string sweep_out;
  sweep->add_option("--trials", sweep_trials, "Number of random index tuples");
  sweep->add_option("--seed", sweep_seed, "Seed");
  sweep->add_option("--n", sweep_n, "Row index bound");
  sweep->add_option("--m", sweep_m, "Column index bound");
  sweep->add_option("--out", sweep_out, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
    if (bench->parsed()) {
      return run_bench(n, k, m, deltas, scenarios, trials, seed, methods, format, out_path,
                       noise_delta, paper_scale);
    }
    if (demo->parsed()) {
      if (demo_scenario.size() != 1) throw CLI::ValidationError("scenario", "one letter a-f");
      return run_demo(demo_size, demo_delta, demo_seed, demo_scenario[0], dump_syndrome_flag);
    }
    if (sweep->parsed()) {
      return run_rank_sweep(sweep_trials, sweep_seed, sweep_n, sweep_m, sweep_out);
    }
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : kConfigError;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kConfigError;
  }
  return 0;
}
