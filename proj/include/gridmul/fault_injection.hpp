#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gridmul/grid_code.hpp"

namespace gridmul {

/// The six benchmark scenarios, lettered a..f: a single symbol error in the
/// left input, the right input or the output, one input error combined with
/// an output error, and two output errors.
enum class Scenario { ASingle, BSingle, CSingle, AAndC, BAndC, CDouble };

char scenario_letter(Scenario scenario);
Scenario scenario_from_letter(char letter);

enum class FaultTarget { LeftMatrix, RightMatrix, OutputMatrix };

struct Fault {
  FaultTarget target = FaultTarget::OutputMatrix;
  std::size_t row = 0;  // coordinates inside the target's data region
  std::size_t col = 0;
  double magnitude = 0.0;
};

struct ErrorPattern {
  Scenario scenario = Scenario::CSingle;
  std::vector<Fault> faults;
  double noise_delta = 0.0;  // bound of the per-entry analog noise field
};

/// Ground truth about one injection: which output data-block entries differ
/// from the fault-free pipeline. An input-side fault spreads across a full
/// row (left input) or column (right input) of the output.
struct InjectionReport {
  ErrorPattern pattern;
  std::vector<std::pair<std::size_t, std::size_t>> effective_support;
  std::uint64_t seed = 0;
};

/// Injection floor: faults below this magnitude are not guaranteed to clear
/// the detection threshold over the noise field, so sampled patterns stay at
/// or above it.
double min_fault_magnitude(double delta);

/// n x m noise field with entries i.i.d. uniform on [-delta, delta].
DenseMatrix sample_noise(const Dims& dims, double delta, std::uint64_t seed);

/// Seed of the noise sub-stream used by inject() for a given injection seed,
/// so callers can reproduce the same noise field independently.
std::uint64_t noise_stream_seed(std::uint64_t seed);

/// Draws fault locations and magnitudes for a scenario. Magnitudes are
/// uniform on [min_fault_magnitude(delta), 100] with random sign; locations
/// are uniform and distinct where the scenario requires it.
ErrorPattern sample_scenario(Scenario scenario, const Dims& dims, double delta,
                             std::uint64_t seed);

/// Runs the coded pipeline with the pattern's faults applied:
///  - input-side faults corrupt one stored symbol of the encoded factor's
///    data region (its parity rows/columns were computed beforehand and stay
///    intact, which is what makes the corruption observable downstream);
///  - output faults are added to the computed data block;
///  - the noise field is added to the data block last.
/// Returns the corrupted product and the ground-truth report.
std::pair<GridCodedProduct, InjectionReport> inject(const DenseMatrix& a, const DenseMatrix& b,
                                                    const ErrorPattern& pattern,
                                                    const GridCodeSpec& spec, std::uint64_t seed);

/// Stable JSON record for experiment logs: scenario, faults[], noise_delta,
/// seed. Targets serialize as "A", "B", "C".
std::string pattern_to_json(const ErrorPattern& pattern, std::uint64_t seed);
std::pair<ErrorPattern, std::uint64_t> pattern_from_json(const std::string& text);

}  // namespace gridmul
