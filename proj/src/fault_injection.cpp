#include "gridmul/fault_injection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "gridmul/rng.hpp"

namespace gridmul {

namespace {

constexpr std::uint64_t kNoiseStream = 0x4f5cdd2c0a3f1bb1ULL;
constexpr double kMaxFaultMagnitude = 100.0;

const char* target_name(FaultTarget target) {
  switch (target) {
    case FaultTarget::LeftMatrix:
      return "A";
    case FaultTarget::RightMatrix:
      return "B";
    case FaultTarget::OutputMatrix:
      return "C";
  }
  return "?";
}

FaultTarget target_from_name(const std::string& name) {
  if (name == "A") return FaultTarget::LeftMatrix;
  if (name == "B") return FaultTarget::RightMatrix;
  if (name == "C") return FaultTarget::OutputMatrix;
  throw std::invalid_argument("unknown fault target: " + name);
}

void validate_pattern(const ErrorPattern& pattern, const Dims& dims) {
  const double floor = min_fault_magnitude(pattern.noise_delta);
  for (const Fault& fault : pattern.faults) {
    if (std::abs(fault.magnitude) < floor) {
      throw std::invalid_argument("fault magnitude " + std::to_string(fault.magnitude) +
                                  " is below the detectability floor " + std::to_string(floor));
    }
    std::size_t row_limit = 0;
    std::size_t col_limit = 0;
    switch (fault.target) {
      case FaultTarget::LeftMatrix:
        row_limit = dims.n;
        col_limit = dims.k;
        break;
      case FaultTarget::RightMatrix:
        row_limit = dims.k;
        col_limit = dims.m;
        break;
      case FaultTarget::OutputMatrix:
        row_limit = dims.n;
        col_limit = dims.m;
        break;
    }
    if (fault.row >= row_limit || fault.col >= col_limit) {
      throw std::invalid_argument("fault coordinates (" + std::to_string(fault.row) + "," +
                                  std::to_string(fault.col) + ") outside target " +
                                  target_name(fault.target));
    }
  }
}

}  // namespace

char scenario_letter(Scenario scenario) {
  switch (scenario) {
    case Scenario::ASingle:
      return 'a';
    case Scenario::BSingle:
      return 'b';
    case Scenario::CSingle:
      return 'c';
    case Scenario::AAndC:
      return 'd';
    case Scenario::BAndC:
      return 'e';
    case Scenario::CDouble:
      return 'f';
  }
  return '?';
}

Scenario scenario_from_letter(char letter) {
  switch (letter) {
    case 'a':
      return Scenario::ASingle;
    case 'b':
      return Scenario::BSingle;
    case 'c':
      return Scenario::CSingle;
    case 'd':
      return Scenario::AAndC;
    case 'e':
      return Scenario::BAndC;
    case 'f':
      return Scenario::CDouble;
    default:
      throw std::invalid_argument(std::string("unknown scenario letter: ") + letter);
  }
}

double min_fault_magnitude(double delta) { return std::max(10.0 * delta, 1.0); }

DenseMatrix sample_noise(const Dims& dims, double delta, std::uint64_t seed) {
  if (delta < 0.0) throw std::invalid_argument("noise delta must be non-negative");
  DenseMatrix out(dims.n, dims.m);
  if (delta == 0.0) return out;
  Uniform rng(seed);
  for (std::size_t i = 0; i < dims.n; ++i)
    for (std::size_t j = 0; j < dims.m; ++j) out(i, j) = rng.range(-delta, delta);
  return out;
}

std::uint64_t noise_stream_seed(std::uint64_t seed) { return derive_seed(seed, kNoiseStream); }

ErrorPattern sample_scenario(Scenario scenario, const Dims& dims, double delta,
                             std::uint64_t seed) {
  Uniform rng(seed);
  const double floor = min_fault_magnitude(delta);
  auto magnitude = [&] { return rng.signed_range(floor, kMaxFaultMagnitude); };
  auto left = [&] {
    return Fault{FaultTarget::LeftMatrix, rng.index(dims.n), rng.index(dims.k), magnitude()};
  };
  auto right = [&] {
    return Fault{FaultTarget::RightMatrix, rng.index(dims.k), rng.index(dims.m), magnitude()};
  };
  auto output = [&] {
    return Fault{FaultTarget::OutputMatrix, rng.index(dims.n), rng.index(dims.m), magnitude()};
  };

  ErrorPattern pattern;
  pattern.scenario = scenario;
  switch (scenario) {
    case Scenario::ASingle:
      pattern.faults = {left()};
      break;
    case Scenario::BSingle:
      pattern.faults = {right()};
      break;
    case Scenario::CSingle:
      pattern.faults = {output()};
      break;
    case Scenario::AAndC:
      pattern.faults = {left(), output()};
      break;
    case Scenario::BAndC:
      pattern.faults = {right(), output()};
      break;
    case Scenario::CDouble: {
      const Fault first = output();
      Fault second = output();
      while (second.row == first.row && second.col == first.col) second = output();
      pattern.faults = {first, second};
      break;
    }
  }
  return pattern;
}

std::pair<GridCodedProduct, InjectionReport> inject(const DenseMatrix& a, const DenseMatrix& b,
                                                    const ErrorPattern& pattern,
                                                    const GridCodeSpec& spec, std::uint64_t seed) {
  validate_pattern(pattern, spec.dims);

  DenseMatrix a_bar = encode_left(a, spec);
  DenseMatrix b_bar = encode_right(b, spec);

  // Input-side faults strike the stored data symbols after the parity lines
  // were attached; the parity lines stay intact, so the corruption surfaces
  // in the opposite side's checks of the coded product.
  for (const Fault& fault : pattern.faults) {
    if (fault.target == FaultTarget::LeftMatrix) {
      a_bar(fault.row, fault.col) += fault.magnitude;
    } else if (fault.target == FaultTarget::RightMatrix) {
      b_bar(fault.row, fault.col) += fault.magnitude;
    }
  }

  GridCodedProduct product = coded_multiply(a_bar, b_bar, spec);

  for (const Fault& fault : pattern.faults) {
    if (fault.target == FaultTarget::OutputMatrix) {
      product.set_data(fault.row, fault.col, product.data(fault.row, fault.col) + fault.magnitude);
    }
  }

  if (pattern.noise_delta > 0.0) {
    const DenseMatrix noise = sample_noise(spec.dims, pattern.noise_delta, noise_stream_seed(seed));
    for (std::size_t i = 0; i < spec.dims.n; ++i)
      for (std::size_t j = 0; j < spec.dims.m; ++j)
        product.set_data(i, j, product.data(i, j) + noise(i, j));
  }

  InjectionReport report;
  report.pattern = pattern;
  report.seed = seed;
  for (const Fault& fault : pattern.faults) {
    switch (fault.target) {
      case FaultTarget::LeftMatrix:
        for (std::size_t j = 0; j < spec.dims.m; ++j) {
          if (fault.magnitude * b_bar(fault.col, j) != 0.0) {
            report.effective_support.emplace_back(fault.row, j);
          }
        }
        break;
      case FaultTarget::RightMatrix:
        for (std::size_t i = 0; i < spec.dims.n; ++i) {
          if (fault.magnitude * a_bar(i, fault.row) != 0.0) {
            report.effective_support.emplace_back(i, fault.col);
          }
        }
        break;
      case FaultTarget::OutputMatrix:
        report.effective_support.emplace_back(fault.row, fault.col);
        break;
    }
  }
  std::sort(report.effective_support.begin(), report.effective_support.end());
  report.effective_support.erase(
      std::unique(report.effective_support.begin(), report.effective_support.end()),
      report.effective_support.end());
  return {std::move(product), std::move(report)};
}

std::string pattern_to_json(const ErrorPattern& pattern, std::uint64_t seed) {
  nlohmann::ordered_json record;
  record["scenario"] = std::string(1, scenario_letter(pattern.scenario));
  nlohmann::ordered_json faults = nlohmann::ordered_json::array();
  for (const Fault& fault : pattern.faults) {
    faults.push_back({{"target", target_name(fault.target)},
                      {"row", fault.row},
                      {"col", fault.col},
                      {"magnitude", fault.magnitude}});
  }
  record["faults"] = std::move(faults);
  record["noise_delta"] = pattern.noise_delta;
  record["seed"] = seed;
  return record.dump();
}

std::pair<ErrorPattern, std::uint64_t> pattern_from_json(const std::string& text) {
  const nlohmann::json record = nlohmann::json::parse(text);
  ErrorPattern pattern;
  const std::string scenario = record.at("scenario").get<std::string>();
  if (scenario.size() != 1) throw std::invalid_argument("scenario must be a single letter");
  pattern.scenario = scenario_from_letter(scenario[0]);
  for (const auto& entry : record.at("faults")) {
    Fault fault;
    fault.target = target_from_name(entry.at("target").get<std::string>());
    fault.row = entry.at("row").get<std::size_t>();
    fault.col = entry.at("col").get<std::size_t>();
    fault.magnitude = entry.at("magnitude").get<double>();
    pattern.faults.push_back(fault);
  }
  pattern.noise_delta = record.at("noise_delta").get<double>();
  return {std::move(pattern), record.at("seed").get<std::uint64_t>()};
}

}  // namespace gridmul
