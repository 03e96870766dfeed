#include "haarlab/errors.hpp"
#include "haarlab/lab.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace haarlab {

namespace {

json inf_index(double p, const char* q) { return json::array({p, q}); }

std::vector<ExperimentInfo> build_registry() {
  std::vector<ExperimentInfo> r;
  r.push_back({"decomposition_identity",
               "Exact operator identities: π_b+Λ_b+R_b = M_b − M_{E₀b}E₀ and [π_a,R_b]+Ψ_{a,b}+π_aπ_b+π_aM_{E₀b}E₀ = 0, entrywise ≤ 1e−11, 20 random (a,b), d ∈ {2,3}, L=5.",
               {{"ds", {2, 3}}, {"L", 5}, {"trials", 20}, {"tol", 1e-11}, {"s", 0.5}}});
  r.push_back({"paraproduct_equivalence",
               "Paraproduct/Besov equivalence: ratios ‖π_b‖_{S_p}/‖b‖_{B_p^d} over 50 random b lie in a positive window whose endpoints move by ≤ factor 2 as L goes 3→5, for p ∈ {1.5,2,3}, d ∈ {2,3}; same for Λ_b and for ‖[π_a,M_b]‖_{S_p}/(BMO^d(a)·B_p^d(b)).",
               {{"ds", {2, 3}}, {"ps", {1.5, 2.0, 3.0}}, {"levels", {3, 4, 5}}, {"trials", 50}, {"factor", 2.0}, {"s", 0.5}}});
  r.push_back({"commutator_paraproduct_bound",
               "Paraproduct/Besov equivalence: ratios ‖π_b‖_{S_p}/‖b‖_{B_p^d} over 50 random b lie in a positive window whose endpoints move by ≤ factor 2 as L goes 3→5, for p ∈ {1.5,2,3}, d ∈ {2,3}; same for Λ_b and for ‖[π_a,M_b]‖_{S_p}/(BMO^d(a)·B_p^d(b)).",
               {{"ds", {2, 3}}, {"ps", {1.5, 2.0, 3.0}}, {"levels", {3, 4, 5}}, {"trials", 50}, {"factor", 2.0}, {"s", 0.5}}});
  r.push_back({"shift_contraction",
               "Shift contraction and block structure: 100 random max-magnitude shifts at L=5 have spectral norm ≤ 1+1e−9; Φ*Φ for Φ=[S^{ij},R_b] is block-diagonal with cross-block mass ≤ 1e−10 of total, (i,j) ∈ {(1,1),(2,1)}.",
               {{"L", 5},
                {"trials", 100},
                {"tol", 1e-9},
                {"depths", {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}, {2, 2}}},
                {"block_pairs", {{1, 1}, {2, 1}}},
                {"block_trials", 4},
                {"block_tol", 1e-10}}});
  r.push_back({"weak_type_tail",
               "Weak-type eigenvalue tail: per-block s_m(K) ≤ Tr(B_K*B_K)/m holds exactly (≤ 1e−12 slack) for all blocks, random b, L=6.",
               {{"L", 6}, {"i", 2}, {"j", 2}, {"trials", 4}, {"tol", 1e-12}}});
  r.push_back({"nwo_upper",
               "NWO upper and lower: for random localized frames (‖e_I‖_∞ ≤ |I|^{−1/2}) the bounds ‖Σλ_I⟨e_I,·⟩f_I‖_{S_{p,q}} ≤ C‖λ‖_{ℓ_{p,q}} and Σ_I|⟨e_I,Vf_I⟩|^p ≤ C′‖V‖_{S_p}^p hold with recorded C, C′ stable (≤ factor 2) across L ∈ {3,4,5}, (p,q) ∈ {(2,2),(4,4),(2,∞)}.",
               {{"levels", {3, 4, 5}}, {"indices", {{2, 2}, {4, 4}, inf_index(2, "inf")}}, {"trials", 20}, {"factor", 2.0}}});
  r.push_back({"nwo_lower",
               "NWO upper and lower: for random localized frames (‖e_I‖_∞ ≤ |I|^{−1/2}) the bounds ‖Σλ_I⟨e_I,·⟩f_I‖_{S_{p,q}} ≤ C‖λ‖_{ℓ_{p,q}} and Σ_I|⟨e_I,Vf_I⟩|^p ≤ C′‖V‖_{S_p}^p hold with recorded C, C′ stable (≤ factor 2) across L ∈ {3,4,5}, (p,q) ∈ {(2,2),(4,4),(2,∞)}.",
               {{"levels", {3, 4, 5}}, {"indices", {{2, 2}, {4, 4}, inf_index(2, "inf")}}, {"trials", 20}, {"factor", 2.0}}});
  r.push_back({"median_stress",
               "Complex median: 1000 random dyadic-rational instances, N ≤ 64; solver output certified ≥ μ/16 by exact closed-quadrant counting, and the exhaustive oracle independently confirms at least one valid pair exists per instance; halving (≥ 1/2) and quarter (≥ 1/4) sub-lemmas pass 10⁴ randomized checks.",
               {{"instances", 1000}, {"max_atoms", 64}, {"lemma_checks", 10000}}});
  r.push_back({"janson_wolff",
               "Janson–Wolff divergence: n=2, b = x₁·bump; the ε-excised Besov value at p=2 increases by ≥ 0.5× its ε=2^{−3} increment at every halving down to 2^{−7} (log-divergence), while at p=3 successive values are Cauchy within 5%.",
               {{"L", 8}, {"directions", 64}, {"eps_exponents", {3, 4, 5, 6, 7}}, {"increment_fraction", 0.5}, {"cauchy_tol", 0.05}, {"bump_radius", 1.0}},
               false});
  r.push_back({"necessity_lowerbound",
               "Necessity frame: necessity_frame sets satisfy |F_s| ≥ |Î|/16 and ⋃E_s = I on 100 random (b, I) for the hilbert preset at A=32; the assembled lower-bound ratio ‖b‖_{B_p^{ω,2}}/‖[T,M_b]‖_{S_p} is bounded above by a constant stable (≤ factor 2) across L ∈ {5,6}.",
               {{"A", 32.0},
                {"kernel", "hilbert"},
                {"frame_L", 10},
                {"frame_levels", {6, 7, 8}},
                {"frame_trials", 100},
                {"levels", {5, 6}},
                {"trials", 20},
                {"p", 2.0},
                {"chain_L", 8},
                {"chain_trials", 3},
                {"factor", 2.0},
                {"s", 0.5}}});
  r.push_back({"mo_equivalence",
               "Oscillation equivalence: MO₁ ≤ MO₂ on every cube of every member grid, and the weak Besov norm built from MO₂ over the one built from MO₁ lies in a positive window whose endpoints move by ≤ factor 2 across L ∈ {5,6,7}.",
               {{"levels", {5, 6, 7}}, {"trials", 20}, {"p", 2.0}, {"q", "inf"}, {"factor", 2.0}, {"s", 0.5}}});
  r.push_back({"besov_intersection",
               "Covering and intersection: the quantized one-third family covers ≥ 99% of 10⁴ random intervals with ratio ≤ 7 (n=1); the continuous Besov seminorm and the summed martingale Besov norms over the family agree within a two-sided factor stable (≤ factor 2) across L ∈ {5,6,7}, p=2.",
               {{"levels", {5, 6, 7}}, {"trials", 20}, {"p", 2.0}, {"factor", 2.0}, {"modes", 4}}});
  r.push_back({"covering_check",
               "Covering and intersection: the quantized one-third family covers ≥ 99% of 10⁴ random intervals with ratio ≤ 7 (n=1); the continuous Besov seminorm and the summed martingale Besov norms over the family agree within a two-sided factor stable (≤ factor 2) across L ∈ {5,6,7}, p=2.",
               {{"n", 1}, {"L", 10}, {"trials", 10000}, {"min_rate", 0.99}, {"ratio", 7.0}}});
  return r;
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> r = build_registry();
  return r;
}

const ExperimentInfo& experiment_info(const std::string& name) {
  for (const auto& e : experiments())
    if (e.name == name) return e;
  throw Error(ErrorCode::unknown_experiment, "no experiment named '" + name + "'");
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::config_invalid, "config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [k, v] : j.items()) {
    if (k == "experiment") {
      if (!v.is_string()) throw Error(ErrorCode::config_invalid, "experiment must be a string");
      c.name = v.get<std::string>();
    } else if (k == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw Error(ErrorCode::config_invalid, "seed must be a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (k == "out") {
      if (!v.is_string()) throw Error(ErrorCode::config_invalid, "out must be a string");
      c.out = v.get<std::string>();
    } else if (k == "params") {
      if (!v.is_object()) throw Error(ErrorCode::config_invalid, "params must be an object");
      c.params = v;
    } else {
      throw Error(ErrorCode::config_invalid, "unknown config field '" + k + "'");
    }
  }
  return c;
}

Report run_experiment(const ExperimentConfig& cfg) {
  const auto& info = experiment_info(cfg.name);
  json params = info.defaults;
  for (const auto& [k, v] : cfg.params.items()) {
    if (!params.contains(k)) throw Error(ErrorCode::config_invalid, "unknown parameter '" + k + "' for " + cfg.name);
    if (params[k].type() != v.type() && !(params[k].is_number() && v.is_number()))
      throw Error(ErrorCode::config_invalid, "parameter '" + k + "' has the wrong type");
    params[k] = v;
  }
  if (info.randomized && !cfg.seed) throw Error(ErrorCode::config_invalid, cfg.name + " is randomized and needs a seed");
  const std::uint64_t seed = cfg.seed.value_or(0);

  static const std::vector<std::pair<std::string, exp::Runner>> table = {
      {"decomposition_identity", exp::decomposition_identity},
      {"paraproduct_equivalence", exp::paraproduct_equivalence},
      {"commutator_paraproduct_bound", exp::commutator_paraproduct_bound},
      {"shift_contraction", exp::shift_contraction},
      {"weak_type_tail", exp::weak_type_tail},
      {"nwo_upper", exp::nwo_upper},
      {"nwo_lower", exp::nwo_lower},
      {"median_stress", exp::median_stress},
      {"janson_wolff", exp::janson_wolff},
      {"necessity_lowerbound", exp::necessity_lowerbound},
      {"mo_equivalence", exp::mo_equivalence},
      {"besov_intersection", exp::besov_intersection},
      {"covering_check", exp::covering_check},
  };
  for (const auto& [name, run] : table) {
    if (name != cfg.name) continue;
    Report r;
    try {
      r = run(params, seed);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::config_invalid, std::string("parameter: ") + e.what());
    }
    r.doc["experiment"] = cfg.name;
    r.doc["criterion"] = info.criterion;
    r.doc["config"] = {{"experiment", cfg.name}, {"params", params}};
    if (cfg.seed) r.doc["config"]["seed"] = *cfg.seed;
    bool pass = true;
    for (const auto& [k, v] : r.doc["verdicts"].items()) pass = pass && v.value("pass", false);
    r.doc["pass"] = pass;
    return r;
  }
  throw Error(ErrorCode::unknown_experiment, cfg.name);
}

std::string Report::csv() const {
  std::ostringstream os;
  os.precision(17);
  if (!doc.contains("trials") || doc["trials"].empty()) return "";
  std::vector<std::string> cols;
  for (const auto& t : doc["trials"])
    for (const auto& [k, v] : t.items())
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& t : doc["trials"]) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) os << ',';
      if (!t.contains(cols[i])) continue;
      const auto& v = t[cols[i]];
      std::string cell = v.is_string() ? v.get<std::string>() : v.dump();
      if (cell.find_first_of(",\"") != std::string::npos) {
        std::string q = "\"";
        for (char ch : cell) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        cell = q + "\"";
      }
      os << cell;
    }
    os << '\n';
  }
  return os.str();
}

namespace exp {

json summarize(std::vector<double> v) {
  if (v.empty()) return {{"count", 0}};
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double med = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return {{"count", n}, {"min", v.front()}, {"max", v.back()}, {"median", med}};
}

bool window_stable(const std::vector<std::pair<double, double>>& w, double factor) {
  if (w.empty()) return false;
  double lo_min = w[0].first, lo_max = w[0].first, hi_min = w[0].second, hi_max = w[0].second;
  for (const auto& [lo, hi] : w) {
    if (!(lo > 0) || !(hi >= lo) || !std::isfinite(hi)) return false;
    lo_min = std::min(lo_min, lo);
    lo_max = std::max(lo_max, lo);
    hi_min = std::min(hi_min, hi);
    hi_max = std::max(hi_max, hi);
  }
  return lo_max <= factor * lo_min && hi_max <= factor * hi_min;
}

}  // namespace exp

}  // namespace haarlab
