#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridmul/fault_injection.hpp"

namespace gridmul {

enum class Method { Grid, Checksum };

std::string method_name(Method method);
Method method_from_name(const std::string& name);

enum class TrialOutcome { CorrectedExact, CorrectedInexact, Missed, Refused, Miscorrected };

std::string trial_outcome_name(TrialOutcome outcome);

struct ExperimentConfig {
  std::size_t n = 256;
  std::size_t k = 512;
  std::size_t m = 256;
  std::vector<double> deltas = {0.5, 0.1, 0.01};
  std::vector<Scenario> scenarios = {Scenario::ASingle, Scenario::BSingle, Scenario::CSingle,
                                     Scenario::AAndC,   Scenario::BAndC,   Scenario::CDouble};
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::vector<Method> methods = {Method::Grid, Method::Checksum};
  /// Bound of the analog noise field added to every trial's output block.
  /// Defaults to 0: with a dense noise field at the detection threshold, the
  /// per-line residual sums exceed the threshold and exact correction is
  /// unattainable, so noisy runs are an explicit opt-in.
  double noise_delta = 0.0;
  std::size_t threads = 0;  // 0 = hardware concurrency, capped by GRIDMUL_THREADS
};

struct TrialRecord {
  Method method = Method::Grid;
  Scenario scenario = Scenario::CSingle;
  double delta = 0.0;
  std::uint64_t seed = 0;
  TrialOutcome outcome = TrialOutcome::Refused;
  double coded_seconds = 0.0;  // encode + coded multiply + detect + correct
  double plain_seconds = 0.0;  // unprotected multiply of the same dims
};

struct AggregateCell {
  Method method = Method::Grid;
  Scenario scenario = Scenario::CSingle;
  double delta = 0.0;
  std::size_t trials = 0;
  std::size_t corrected_exact = 0;
  std::size_t corrected_inexact = 0;
  std::size_t missed = 0;
  std::size_t refused = 0;
  std::size_t miscorrected = 0;
  double rate = 0.0;           // corrected-exact fraction
  double latency_ratio = 0.0;  // mean coded time / mean plain time
  bool all_refused = false;    // rendered as "-"
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<AggregateCell> cells;
};

/// Per (method, scenario, delta): seeds inputs, injects the scenario, runs
/// detect + correct and classifies each trial conservatively (a repair that
/// touches entries outside the true support counts as miscorrected, never as
/// success). The checksum baseline covers single-error scenarios a-c;
/// scenarios d-f are refused. Deterministic in the config apart from the
/// timing fields.
ExperimentResult run_experiment(const ExperimentConfig& config);

enum class TableFormat { Csv, Markdown };

/// One line per scenario x method x delta with Rate (percent) and Latency
/// (ratio suffixed "x"); fully refused cells render as "-".
std::string render_table(const std::vector<AggregateCell>& cells, TableFormat format);

}  // namespace gridmul
