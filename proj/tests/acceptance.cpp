// One line per acceptance criterion; exits 1 if any fails.
#include "haarlab/errors.hpp"
#include "haarlab/haar.hpp"
#include "haarlab/kernels.hpp"
#include "haarlab/lab.hpp"
#include "haarlab/martops.hpp"
#include "haarlab/norms.hpp"
#include "haarlab/random.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace haarlab;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool pass = o.pass && in_time;
  failures += !pass;
  std::printf("criterion %2d %s %s: %s; %.1f s of %.0f s\n", id, pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs, budget_s);
  std::fflush(stdout);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

Outcome from_reports(const std::vector<std::string>& names) {
  Outcome o{true, ""};
  for (const auto& n : names) {
    ExperimentConfig cfg;
    cfg.name = n;
    cfg.seed = kSeed;
    const auto r = run_experiment(cfg);
    o.pass = o.pass && r.pass();
    std::string failed;
    for (const auto& [k, v] : r.doc["verdicts"].items())
      if (!v.value("pass", false)) failed += (failed.empty() ? "" : ",") + k;
    o.detail += (o.detail.empty() ? "" : "; ") + n + (failed.empty() ? " ok" : " failed [" + failed + "]");
  }
  return o;
}

std::vector<WaveletIndex> all_wavelets(const Grid& g) {
  std::vector<WaveletIndex> w{{0, 0, g.children()}};
  for (int k = 0; k < g.L(); ++k)
    for (std::size_t q = 0; q < g.cube_count(k); ++q)
      for (int b = 1; b <= g.branches(); ++b) w.push_back({k, q, b});
  return w;
}

// worst deviation over orthonormality, Parseval, roundtrip and the product rule
double haar_exactness(const GridPtr& g) {
  double worst = 0.0;
  const double h = g->leaf_measure();
  const auto W = all_wavelets(*g);
  for (const auto& v : W) {
    const auto hv = haar_function(g, v);
    const auto support = g->leaves_of(v.level, v.cube);
    // only wavelets on v's cube or an ancestor overlap its support
    for (int k = 0; k <= v.level; ++k) {
      const std::size_t a = g->cube_of_leaf(support[0], k);
      std::vector<int> branches;
      for (int b = 1; b <= g->branches(); ++b) branches.push_back(b);
      if (k == 0) branches.push_back(g->children());
      for (int b : branches) {
        const WaveletIndex w{k, a, b};
        const auto hw = haar_function(g, w);
        cd s = 0;
        for (auto leaf : support) s += std::conj(hv.values[leaf]) * hw.values[leaf];
        s *= h;
        const bool same = w.level == v.level && w.cube == v.cube && w.branch == v.branch;
        worst = std::max(worst, std::abs(s - (same ? 1.0 : 0.0)));
      }
    }
  }
  for (int t = 0; t < 5; ++t) {
    auto rng = keyed_engine(kSeed, static_cast<std::uint64_t>(t), 1);
    const auto f = random_function(g, rng);
    const auto c = analyze(f);
    double energy = 0.0;
    for (const auto& lvl : c.coef)
      for (const auto& x : lvl) energy += std::norm(x);
    for (const auto& x : c.avg) energy += std::norm(x) * g->window_measure();
    const double nf = std::pow(l2_norm(f), 2);
    worst = std::max(worst, std::abs(energy - nf) / nf);
    const auto back = synthesize(c);
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(back.values[i] - f.values[i]));
  }
  for (int k = 0; k < g->L(); ++k)
    for (std::size_t q = 0; q < g->cube_count(k); ++q)
      for (int i = 1; i <= g->branches(); ++i)
        for (int j = 1; j <= g->branches(); ++j) {
          const auto pi = product_index(*g, i, j, g->cube_measure(k));
          const auto lhs = pointwise(haar_function(g, {k, q, i}), haar_function(g, {k, q, j}));
          auto rhs = pi.branch == g->children() ? zeros(g) : haar_function(g, {k, q, pi.branch});
          if (pi.branch == g->children())
            for (auto leaf : g->leaves_of(k, q)) rhs.values[leaf] = 1.0 / std::sqrt(g->cube_measure(k));
          const double unit = 1.0 / g->cube_measure(k);  // size of the product entries
          for (std::size_t x = 0; x < lhs.size(); ++x)
            worst = std::max(worst, std::abs(lhs.values[x] - pi.scale * rhs.values[x]) / unit);
        }
  return worst;
}

}  // namespace

int main() {
  criterion(1, "haar_exactness", 10, [] {
    double worst = 0.0;
    for (int d : {2, 3, 4})
      for (int L = 1; L <= 6; ++L) worst = std::max(worst, haar_exactness(make_grid(1, d, L)));
    for (int L = 1; L <= 4; ++L) worst = std::max(worst, haar_exactness(make_grid(2, 2, L)));
    return Outcome{worst <= 1e-12, "max deviation " + fmt(worst) + " (tol 1e-12)"};
  });
  criterion(2, "operator_identities", 30, [] { return from_reports({"decomposition_identity"}); });
  criterion(3, "shift_contraction", 120, [] { return from_reports({"shift_contraction"}); });
  criterion(4, "weak_type_tail", 60, [] { return from_reports({"weak_type_tail"}); });
  criterion(5, "complex_median", 120, [] { return from_reports({"median_stress"}); });
  criterion(6, "paraproduct_besov", 180, [] { return from_reports({"paraproduct_equivalence", "commutator_paraproduct_bound"}); });
  criterion(7, "nwo_bounds", 180, [] { return from_reports({"nwo_upper", "nwo_lower"}); });
  criterion(8, "rank_one_commutator", 60, [] {
    const auto g = make_grid(1, 2, 10);
    const auto b = sample(g, [](std::span<const double> x) { return cd(x[0]); });
    const auto s = singular_values(sio_commutator(hilbert_kernel(), b));
    const double target = 1.0 / std::numbers::pi;
    const double rel = std::abs(s[0] - target) / target;
    const double second = s[1] / s[0];
    return Outcome{rel <= 0.02 && second <= 0.05, "s1 = " + fmt(s[0]) + " (1/pi off by " + fmt(100 * rel) + "%), s2/s1 = " + fmt(second)};
  });
  criterion(9, "janson_wolff", 120, [] { return from_reports({"janson_wolff"}); });
  criterion(10, "covering_intersection", 120, [] { return from_reports({"covering_check", "besov_intersection"}); });
  criterion(11, "necessity_frame", 180, [] { return from_reports({"necessity_lowerbound"}); });
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
