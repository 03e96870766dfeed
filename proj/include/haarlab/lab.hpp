#pragma once

#include "haarlab/grid.hpp"
#include "haarlab/haar.hpp"
#include "haarlab/kernels.hpp"
#include "haarlab/median.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace haarlab {

using json = nlohmann::json;

struct TestPair {
  int s = 1;        // sector 1..4
  std::size_t q = 0;  // child of I
  SampledFunction e;  // |I(q)|^{1/2} 1_{F_s} / |I|
  SampledFunction f;  // 1_{I(q) cap E_s} / |I(q)|^{1/2}
};

struct NecessityFrame {
  Cube I;
  Cube partner;  // I-hat
  BallPair ball;
  MedianResult median;  // complex median of b's atoms on the partner cube
  cd alpha;             // median center
  double theta = 0.0;   // rotation used in the sector tests: -theta_L - pi/4
  std::array<std::vector<std::size_t>, 4> E;  // leaves of I
  std::array<std::vector<std::size_t>, 4> F;  // leaves of the partner
  std::vector<TestPair> pairs;
};

// n = 1, unshifted grid; the partner lies at distance A * side(I) inside the window
NecessityFrame necessity_frame(const SampledFunction& b, const Cube& I, const KernelSpec& K, double A);

struct ExperimentConfig {
  std::string name;
  std::optional<std::uint64_t> seed;
  json params = json::object();  // overrides of the experiment defaults
  std::string out;
};

// {"experiment": ..., "seed": ..., "out": ..., "params": {...}}; unknown keys are rejected
ExperimentConfig parse_config(const json& j);

struct ExperimentInfo {
  std::string name;
  std::string criterion;  // pass criterion, as stated in the acceptance list
  json defaults;
  bool randomized = true;
};

const std::vector<ExperimentInfo>& experiments();
const ExperimentInfo& experiment_info(const std::string& name);

struct Report {
  json doc;  // experiment, config, criterion, trials, summary, verdicts, pass
  bool pass() const { return doc.value("pass", false); }
  std::string csv() const;  // flat per-trial records
};

Report run_experiment(const ExperimentConfig& cfg);

// internal dispatch targets, one per experiment
namespace exp {
using Runner = std::function<Report(const json& params, std::uint64_t seed)>;
Report decomposition_identity(const json& p, std::uint64_t seed);
Report paraproduct_equivalence(const json& p, std::uint64_t seed);
Report commutator_paraproduct_bound(const json& p, std::uint64_t seed);
Report shift_contraction(const json& p, std::uint64_t seed);
Report weak_type_tail(const json& p, std::uint64_t seed);
Report nwo_upper(const json& p, std::uint64_t seed);
Report nwo_lower(const json& p, std::uint64_t seed);
Report median_stress(const json& p, std::uint64_t seed);
Report janson_wolff(const json& p, std::uint64_t seed);
Report necessity_lowerbound(const json& p, std::uint64_t seed);
Report mo_equivalence(const json& p, std::uint64_t seed);
Report besov_intersection(const json& p, std::uint64_t seed);
Report covering_check(const json& p, std::uint64_t seed);

// min/max/median summary of a sample
json summarize(std::vector<double> v);
// endpoints of per-level windows move by at most `factor`
bool window_stable(const std::vector<std::pair<double, double>>& windows, double factor);
}  // namespace exp

}  // namespace haarlab
