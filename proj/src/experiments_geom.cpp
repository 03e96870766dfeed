#include "haarlab/errors.hpp"
#include "haarlab/lab.hpp"
#include "haarlab/martops.hpp"
#include "haarlab/norms.hpp"
#include "haarlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

namespace haarlab::exp {

namespace {

using exact::i128;

std::pair<double, double> min_max(const std::vector<double>& v) {
  return {*std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end())};
}

json window_json(const std::vector<std::pair<double, double>>& w, const std::vector<int>& levels) {
  json j = json::array();
  for (std::size_t i = 0; i < w.size(); ++i) j.push_back({{"L", levels[i]}, {"min", w[i].first}, {"max", w[i].second}});
  return j;
}

// dyadic-rational atoms in a few shapes: spread, clustered (repeated atoms), collinear, two heavy atoms
WeightedPointSet dyadic_instance(std::mt19937_64& rng, int max_atoms, int& shape) {
  std::uniform_int_distribution<int> count(1, max_atoms), kind(0, 3), den(0, 6), wnum(1, 16);
  const int N = count(rng);
  shape = kind(rng);
  const int scale = 1 << den(rng);
  std::uniform_int_distribution<int> coord(-64, 64), few(-2, 2);
  const int ax = few(rng), ay = few(rng);
  WeightedPointSet P;
  for (int a = 0; a < N; ++a) {
    int x = coord(rng), y = coord(rng);
    if (shape == 1) {
      x = few(rng);
      y = few(rng);
    } else if (shape == 2) {
      const int t = coord(rng);
      x = ax * t;
      y = ay * t;
    }
    double w = std::ldexp(static_cast<double>(wnum(rng)), -den(rng));
    if (shape == 3 && a < 2) w *= 64;
    P.atoms.push_back({{static_cast<double>(x) / scale, static_cast<double>(y) / scale}, w});
  }
  return P;
}

}  // namespace

Report median_stress(const json& p, std::uint64_t seed) {
  Report r;
  const int instances = p["instances"];
  const int max_atoms = p["max_atoms"];
  const int checks = p["lemma_checks"];
  int uncertified = 0, exact_fail = 0, oracle_fail = 0, double_oracle_fail = 0;
  std::map<std::string, int> routes;
  for (int t = 0; t < instances; ++t) {
    auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), 800);
    int shape = 0;
    const auto P = dyadic_instance(rng, max_atoms, shape);
    const auto res = complex_median(P);
    const auto S = exact::to_exact(P);
    bool ok_exact = false, ok_oracle = false;
    if (S) {
      const auto sol = exact::complex_median(*S);
      ok_exact = exact::certified(*S, sol.pair);
      const auto orc = exact::oracle(*S);
      ok_oracle = orc && exact::certified(*S, *orc);
    }
    const auto dbl = median_oracle(P);
    const bool ok_dbl = dbl && certify(P, dbl->pair);
    const bool ok = res.certified && res.exact && certify(P, res.pair);
    uncertified += !ok;
    exact_fail += !ok_exact;
    oracle_fail += !ok_oracle;
    double_oracle_fail += !ok_dbl;
    ++routes[res.route];
    const double mu = res.total;
    r.doc["trials"].push_back({{"trial", t}, {"atoms", P.atoms.size()}, {"shape", shape}, {"route", res.route},
                               {"min_mass_fraction", *std::min_element(res.masses.begin(), res.masses.end()) / mu},
                               {"certified", ok}, {"exact_certified", ok_exact}, {"oracle", ok_oracle}});
  }

  int halving_fail = 0, quarter_fail = 0;
  for (int t = 0; t < checks; ++t) {
    auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), 810);
    int shape = 0;
    const auto S = exact::to_exact(dyadic_instance(rng, max_atoms, shape));
    if (!S) {
      ++halving_fail;
      continue;
    }
    std::uniform_int_distribution<int> dir(-8, 8);
    int dx = 0, dy = 0;
    while (dx == 0 && dy == 0) {
      dx = dir(rng);
      dy = dir(rng);
    }
    const auto h = exact::halving_line(*S, dx, dy);
    i128 lower = 0, upper = 0;
    for (std::size_t a = 0; a < S->z.size(); ++a) {
      const i128 k = i128{dx} * S->z[a].x + i128{dy} * S->z[a].y;
      if (k <= h.offset) lower += S->w[a];
      if (k >= h.offset) upper += S->w[a];
    }
    halving_fail += !(2 * lower >= S->total && 2 * upper >= S->total);

    const auto q = exact::quarter_partition(*S);
    std::array<i128, 4> m{};
    for (std::size_t a = 0; a < S->z.size(); ++a) {
      const auto [x, y] = S->z[a];
      const bool left = x <= q.alpha, right = x >= q.alpha;
      if (left && y <= q.alpha1) m[0] += S->w[a];
      if (left && y >= q.alpha1) m[1] += S->w[a];
      if (right && y <= q.alpha2) m[2] += S->w[a];
      if (right && y >= q.alpha2) m[3] += S->w[a];
    }
    quarter_fail += !std::all_of(m.begin(), m.end(), [&](i128 v) { return 4 * v >= S->total; });
  }

  json rc = json::object();
  for (const auto& [k, v] : routes) rc[k] = v;
  r.doc["summary"] = {{"instances", instances}, {"uncertified", uncertified}, {"exact_failures", exact_fail},
                      {"oracle_failures", oracle_fail}, {"float_oracle_failures", double_oracle_fail}, {"routes", rc},
                      {"halving_failures", halving_fail}, {"quarter_failures", quarter_fail}};
  r.doc["verdicts"]["solver_certified"] = {{"pass", uncertified == 0 && exact_fail == 0}, {"failures", uncertified + exact_fail}};
  r.doc["verdicts"]["oracle_confirms"] = {{"pass", oracle_fail == 0 && double_oracle_fail == 0}, {"failures", oracle_fail + double_oracle_fail}};
  r.doc["verdicts"]["halving_lemma"] = {{"pass", halving_fail == 0}, {"failures", halving_fail}, {"checks", checks}};
  r.doc["verdicts"]["quarter_lemma"] = {{"pass", quarter_fail == 0}, {"failures", quarter_fail}, {"checks", checks}};
  return r;
}

Report janson_wolff(const json& p, std::uint64_t) {
  Report r;
  const int M = 1 << p["L"].get<int>();
  const int dirs = p["directions"];
  const double frac = p["increment_fraction"];
  const double ctol = p["cauchy_tol"];
  const double rad = p["bump_radius"];
  // x_1 times the standard bump on the ball of radius rad about the origin
  const auto b = [&](std::span<const double> x) {
    const double t = std::hypot(x[0], x[1]) / rad;
    return cd(t < 1 ? x[0] * std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0);
  };
  std::vector<double> eps;
  for (int e : p["eps_exponents"].get<std::vector<int>>()) eps.push_back(std::ldexp(1.0, -e));
  const std::vector<double> ps{2.0, 3.0};
  const auto raw = besov_integral_radial(b, 2, {0.0, 0.0}, rad, ps, eps, M, dirs);
  std::vector<std::vector<double>> val(ps.size(), std::vector<double>(eps.size()));
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t t = 0; t < eps.size(); ++t) val[i][t] = std::pow(raw[i][t], 1.0 / ps[i]);
  for (std::size_t t = 0; t < eps.size(); ++t)
    r.doc["trials"].push_back({{"epsilon", eps[t]}, {"integral_p2", raw[0][t]}, {"integral_p3", raw[1][t]},
                               {"value_p2", val[0][t]}, {"value_p3", val[1][t]}});

  // p = n: the seminorm keeps growing by a comparable amount at every halving
  std::vector<double> inc;
  for (std::size_t t = 1; t < eps.size(); ++t) inc.push_back(val[0][t] - val[0][t - 1]);
  bool diverging = !inc.empty() && inc.front() > 0;
  for (double d : inc) diverging = diverging && d >= frac * inc.front();
  r.doc["verdicts"]["p2_log_divergence"] = {{"pass", diverging}, {"increments", inc}, {"fraction", frac}};

  std::vector<double> rel;
  for (std::size_t t = 1; t < eps.size(); ++t) rel.push_back(std::abs(val[1][t] - val[1][t - 1]) / val[1][t]);
  const bool cauchy = std::all_of(rel.begin(), rel.end(), [&](double v) { return v <= ctol; });
  r.doc["verdicts"]["p3_cauchy"] = {{"pass", cauchy}, {"relative_steps", rel}, {"tol", ctol}};

  std::vector<double> raw_inc, raw_rel;
  for (std::size_t t = 1; t < eps.size(); ++t) {
    raw_inc.push_back(raw[0][t] - raw[0][t - 1]);
    raw_rel.push_back(std::abs(raw[1][t] - raw[1][t - 1]) / raw[1][t]);
  }
  r.doc["summary"] = {{"lattice", M}, {"directions", dirs}, {"integral_p2_increments", raw_inc}, {"integral_p3_relative_steps", raw_rel}};
  return r;
}

Report necessity_lowerbound(const json& p, std::uint64_t seed) {
  Report r;
  const double A = p["A"];
  const auto K = kernel_by_name(p["kernel"].get<std::string>(), 1);
  const double pp = p["p"];
  const double s = p["s"];

  // frame set algebra
  {
    const int L = p["frame_L"];
    const auto levels = p["frame_levels"].get<std::vector<int>>();
    const int trials = p["frame_trials"];
    const auto g = make_grid(1, 2, L);
    int bad = 0;
    double worst_F = kInf;
    for (int t = 0; t < trials; ++t) {
      auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), 900);
      const auto b = random_symbol(g, rng, s);
      const int k = levels[static_cast<std::size_t>(t) % levels.size()];
      std::uniform_int_distribution<std::size_t> pick(0, g->cube_count(k) - 1);
      const Cube I = make_cube(g, k, pick(rng));
      json rec{{"part", "frame"}, {"trial", t}, {"level", k}, {"cube", I.index()}};
      try {
        const auto fr = necessity_frame(b, I, K, A);
        const double mhat = fr.partner.measure();
        double minF = kInf;
        bool inside = true;
        const auto hat = g->leaves_of(fr.partner.level, fr.partner.index());
        const std::set<std::size_t> hat_set(hat.begin(), hat.end());
        for (const auto& F : fr.F) {
          minF = std::min(minF, static_cast<double>(F.size()) * g->leaf_measure() / mhat);
          for (auto leaf : F) inside = inside && hat_set.count(leaf);
        }
        std::set<std::size_t> un;
        for (const auto& E : fr.E) un.insert(E.begin(), E.end());
        const auto il = g->leaves_of(I.level, I.index());
        const bool cover = un == std::set<std::size_t>(il.begin(), il.end());
        const bool ok = minF * 16 >= 1 - 1e-12 && inside && cover && fr.pairs.size() == 8;
        bad += !ok;
        worst_F = std::min(worst_F, minF);
        rec["partner"] = fr.partner.index();
        rec["min_F_fraction"] = minF;
        rec["E_covers_I"] = cover;
        rec["route"] = fr.median.route;
        rec["pass"] = ok;
      } catch (const Error& e) {
        ++bad;
        rec["error"] = e.what();
        rec["pass"] = false;
      }
      r.doc["trials"].push_back(rec);
    }
    r.doc["verdicts"]["frame_sets"] = {{"pass", bad == 0}, {"failures", bad}, {"min_F_fraction", worst_F}};
  }

  // ||b||_{B_p} / ||[T, M_b]||_{S_p}, sup over trials at each L
  {
    const auto levels = p["levels"].get<std::vector<int>>();
    const int trials = p["trials"];
    const double factor = p["factor"];
    std::vector<double> sups;
    json per = json::array();
    for (int L : levels) {
      const auto g = make_grid(1, 2, L);
      const auto T = discretize(K, g);
      std::vector<double> ratios;
      for (int t = 0; t < trials; ++t) {
        auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), 910 + static_cast<std::uint64_t>(L));
        const auto b = random_symbol(g, rng, s);
        const double ratio = besov_martingale(b, pp) / schatten(commutator(T, multiplier(b)), {pp, pp});
        ratios.push_back(ratio);
        r.doc["trials"].push_back({{"part", "ratio"}, {"L", L}, {"trial", t}, {"ratio", ratio}});
      }
      const auto [lo, hi] = min_max(ratios);
      sups.push_back(hi);
      per.push_back({{"L", L}, {"min", lo}, {"max", hi}});
    }
    const auto [lo, hi] = min_max(sups);
    r.doc["verdicts"]["ratio_bounded"] = {{"pass", lo > 0 && std::isfinite(hi) && hi <= factor * lo}, {"windows", per}, {"factor", factor}};
  }

  // sum over frames of |<e, C f>|^p against ||C||_{S_p}^p, reported only
  {
    const int L = p["chain_L"];
    const int trials = p["chain_trials"];
    const auto g = make_grid(1, 2, L);
    const auto T = discretize(K, g);
    const double h = g->leaf_measure();
    std::vector<double> cs;
    for (int t = 0; t < trials; ++t) {
      auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), 920);
      const auto b = random_symbol(g, rng, s);
      const auto C = commutator(T, multiplier(b));
      double sum = 0.0;
      int frames = 0;
      for (int k = 0; k < L; ++k)
        for (std::size_t Q = 0; Q < g->cube_count(k); ++Q) {
          NecessityFrame fr;
          try {
            fr = necessity_frame(b, make_cube(g, k, Q), K, A);
          } catch (const Error&) {
            continue;
          }
          ++frames;
          for (const auto& tp : fr.pairs) {
            const Vec e = Eigen::Map<const Vec>(tp.e.values.data(), static_cast<Eigen::Index>(tp.e.size()));
            const Vec f = Eigen::Map<const Vec>(tp.f.values.data(), static_cast<Eigen::Index>(tp.f.size()));
            sum += std::pow(std::abs(h * e.dot(C.m * f)), pp);
          }
        }
      const double sp = std::pow(schatten(C, {pp, pp}), pp);
      cs.push_back(sum / sp);
      r.doc["trials"].push_back({{"part", "chain"}, {"trial", t}, {"frames", frames}, {"tested_sum", sum}, {"schatten_p", sp}, {"ratio", sum / sp}});
    }
    r.doc["summary"]["chain"] = summarize(cs);
  }
  r.doc["summary"]["A"] = A;
  return r;
}

Report mo_equivalence(const json& p, std::uint64_t seed) {
  Report r;
  const auto levels = p["levels"].get<std::vector<int>>();
  const int trials = p["trials"];
  const double factor = p["factor"];
  const double s = p["s"];
  LorentzIndex idx{p["p"].get<double>(), kInf};
  if (!p["q"].is_string()) idx.q = p["q"].get<double>();
  std::size_t violations = 0, cubes = 0;
  std::vector<std::pair<double, double>> windows;
  for (int L : levels) {
    const auto fam = adjacent_family(1, L);
    std::vector<double> ratios;
    for (int t = 0; t < trials; ++t) {
      auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), 1000 + static_cast<std::uint64_t>(L));
      const auto b = random_symbol(fam.members.front(), rng, s);
      for (const auto& gp : fam.members) {
        const auto bb = rebind(b, gp);
        for (int k = 0; k < L; ++k)
          for (std::size_t Q = 0; Q < gp->cube_count(k); ++Q) {
            const Cube c = make_cube(gp, k, Q);
            violations += mo1(bb, c) > mo2(bb, c) * (1 + 1e-12) + 1e-300;
            ++cubes;
          }
      }
      const double w1 = weak_besov(b, fam, idx, Oscillation::mo1);
      const double w2 = weak_besov(b, fam, idx, Oscillation::mo2);
      ratios.push_back(w2 / w1);
      r.doc["trials"].push_back({{"L", L}, {"trial", t}, {"weak_mo1", w1}, {"weak_mo2", w2}, {"ratio", w2 / w1}});
    }
    windows.push_back(min_max(ratios));
  }
  r.doc["summary"] = {{"cubes_checked", cubes}, {"violations", violations}};
  r.doc["verdicts"]["mo1_below_mo2"] = {{"pass", violations == 0}, {"violations", violations}};
  r.doc["verdicts"]["weak_besov_window"] = {{"pass", window_stable(windows, factor)}, {"windows", window_json(windows, levels)}, {"factor", factor}};
  return r;
}

Report besov_intersection(const json& p, std::uint64_t seed) {
  Report r;
  const auto levels = p["levels"].get<std::vector<int>>();
  const int trials = p["trials"];
  const double pp = p["p"];
  const double factor = p["factor"];
  const int modes = p["modes"];
  std::vector<std::pair<double, double>> windows;
  for (int L : levels) {
    const auto fam = adjacent_family(1, L);
    const auto& g = fam.members.front();
    std::vector<double> ratios;
    for (int t = 0; t < trials; ++t) {
      // same symbol at every L: the stream does not depend on L
      auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), 1100);
      std::vector<cd> a(static_cast<std::size_t>(modes) + 1), c(static_cast<std::size_t>(modes) + 1);
      for (int m = 0; m <= modes; ++m) {
        a[static_cast<std::size_t>(m)] = complex_gaussian(rng);
        c[static_cast<std::size_t>(m)] = complex_gaussian(rng);
      }
      const auto b = sample(g, [&](std::span<const double> x) {
        const double u = (x[0] - 0.5) / 0.3;
        if (std::abs(u) >= 1) return cd(0.0);
        cd v = 0;
        for (int m = 0; m <= modes; ++m)
          v += a[static_cast<std::size_t>(m)] * std::cos(2 * std::numbers::pi * m * x[0]) +
               c[static_cast<std::size_t>(m)] * std::sin(2 * std::numbers::pi * m * x[0]);
        return v * std::exp(1.0 - 1.0 / (1.0 - u * u));
      });
      const double cont = besov_continuous(b, pp, 0.5 * g->cube_side(L));
      const double fam_sum = besov_martingale_family(b, fam, pp);
      ratios.push_back(cont / fam_sum);
      r.doc["trials"].push_back({{"L", L}, {"trial", t}, {"continuous", cont}, {"family", fam_sum}, {"ratio", cont / fam_sum}});
    }
    windows.push_back(min_max(ratios));
  }
  r.doc["verdicts"]["two_sided_window"] = {{"pass", window_stable(windows, factor)}, {"windows", window_json(windows, levels)}, {"factor", factor}};
  return r;
}

Report covering_check(const json& p, std::uint64_t seed) {
  Report r;
  const int n = p["n"];
  const int L = p["L"];
  const int trials = p["trials"];
  const double min_rate = p["min_rate"];
  auto fam = adjacent_family(n, L);
  fam.covering_constant = p["ratio"];
  const double smallest = fam.members.front()->cube_side(L);
  int covered = 0;
  double worst_ratio = 0.0;
  std::map<int, int> per_member;
  for (int t = 0; t < trials; ++t) {
    auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), 1200);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    // side log-uniform between one leaf and half the window
    const double side = smallest * std::pow(0.5 / smallest, U(rng));
    Box B;
    for (int a = 0; a < n; ++a) B.lower.push_back(U(rng) * (1.0 - side));
    B.side = side;
    json rec{{"trial", t}, {"side", side}, {"lower", B.lower}};
    try {
      const auto c = cover(fam, B);
      ++covered;
      ++per_member[static_cast<int>(c.member)];
      worst_ratio = std::max(worst_ratio, c.ratio);
      rec["covered"] = true;
      rec["ratio"] = c.ratio;
      rec["member"] = c.member;
    } catch (const Error&) {
      rec["covered"] = false;
    }
    r.doc["trials"].push_back(rec);
  }
  const double rate = static_cast<double>(covered) / trials;
  json pm = json::object();
  for (const auto& [k, v] : per_member) pm[std::to_string(k)] = v;
  r.doc["summary"] = {{"rate", rate}, {"worst_ratio", worst_ratio}, {"per_member", pm}};
  r.doc["verdicts"]["cover_rate"] = {{"pass", rate >= min_rate && worst_ratio <= fam.covering_constant + 1e-12}, {"rate", rate},
                                     {"min_rate", min_rate}, {"worst_ratio", worst_ratio}};
  return r;
}

}  // namespace haarlab::exp
