#include "haarlab/errors.hpp"
#include "haarlab/lab.hpp"
#include "haarlab/martops.hpp"
#include "haarlab/norms.hpp"
#include "haarlab/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>

namespace haarlab::exp {

namespace {

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

LorentzIndex index_from(const json& j) {
  LorentzIndex idx;
  idx.p = j.at(0).get<double>();
  const auto& q = j.at(1);
  idx.q = q.is_string() ? (q.get<std::string>() == "inf" ? kInf : throw Error(ErrorCode::config_invalid, "q must be a number or \"inf\""))
                        : q.get<double>();
  return idx;
}

std::string index_label(const LorentzIndex& idx) {
  auto f = [](double v) {
    if (std::isinf(v)) return std::string("inf");
    std::ostringstream os;
    os << v;
    return os.str();
  };
  return "(" + f(idx.p) + "," + f(idx.q) + ")";
}

json window_json(const std::vector<std::pair<double, double>>& w, const std::vector<int>& levels) {
  json j = json::array();
  for (std::size_t i = 0; i < w.size(); ++i) j.push_back({{"L", levels[i]}, {"min", w[i].first}, {"max", w[i].second}});
  return j;
}

std::pair<double, double> min_max(const std::vector<double>& v) {
  return {*std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end())};
}

}  // namespace

Report decomposition_identity(const json& p, std::uint64_t seed) {
  Report r;
  const int L = p["L"];
  const int trials = p["trials"];
  const double tol = p["tol"];
  const double s = p["s"];
  double worst1 = 0.0, worst2 = 0.0, worst_route = 0.0;
  for (int d : p["ds"].get<std::vector<int>>()) {
    const auto g = make_grid(1, d, L);
    for (int t = 0; t < trials; ++t) {
      auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), 100 + static_cast<std::uint64_t>(d));
      const auto a = random_symbol(g, rng, s);
      const auto b = random_symbol(g, rng, s);
      const auto pa = paraproduct(a), pb = paraproduct(b);
      const auto E0b = expectation_zero_correction(b);
      const double r1 = max_abs((pb + lambda(b) + remainder(b) - (multiplier(b) - E0b)).m);
      const double r2 = max_abs((commutator(pa, remainder(b)) + psi(a, b) + pa * pb + pa * E0b).m);
      const double r3 = max_abs((pb - paraproduct_haar(b)).m);
      worst1 = std::max(worst1, r1);
      worst2 = std::max(worst2, r2);
      worst_route = std::max(worst_route, r3);
      r.doc["trials"].push_back({{"d", d}, {"trial", t}, {"decomposition_residual", r1}, {"commutator_residual", r2}, {"paraproduct_routes", r3}});
    }
  }
  r.doc["summary"] = {{"decomposition_residual", worst1}, {"commutator_residual", worst2}, {"paraproduct_routes", worst_route}};
  r.doc["verdicts"]["decomposition"] = {{"pass", worst1 <= tol}, {"value", worst1}, {"bound", tol}};
  r.doc["verdicts"]["commutator_identity"] = {{"pass", worst2 <= tol}, {"value", worst2}, {"bound", tol}};
  return r;
}

namespace {

// ratios of S_p norms against a denominator, windows over L, one verdict per (label, d, p)
Report ratio_windows(const json& p, std::uint64_t seed, std::uint64_t stream,
                     const std::vector<std::string>& labels,
                     const std::function<std::vector<double>(const GridPtr&, std::mt19937_64&, double, double)>& ratios) {
  Report r;
  const auto levels = p["levels"].get<std::vector<int>>();
  const int trials = p["trials"];
  const double factor = p["factor"];
  const double s = p["s"];
  const auto ps = p["ps"].get<std::vector<double>>();
  for (int d : p["ds"].get<std::vector<int>>()) {
    // [label][p][level] -> ratios
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<double, double>>> windows;
    for (int L : levels) {
      const auto g = make_grid(1, d, L);
      std::vector<std::vector<std::vector<double>>> vals(labels.size(), std::vector<std::vector<double>>(ps.size()));
      for (int t = 0; t < trials; ++t) {
        for (std::size_t ip = 0; ip < ps.size(); ++ip) {
          auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), stream + 1000 * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(L));
          const auto v = ratios(g, rng, ps[ip], s);
          json rec{{"d", d}, {"L", L}, {"p", ps[ip]}, {"trial", t}};
          for (std::size_t il = 0; il < labels.size(); ++il) {
            vals[il][ip].push_back(v[il]);
            rec[labels[il]] = v[il];
          }
          r.doc["trials"].push_back(rec);
        }
      }
      for (std::size_t il = 0; il < labels.size(); ++il)
        for (std::size_t ip = 0; ip < ps.size(); ++ip) windows[{il, ip}].push_back(min_max(vals[il][ip]));
    }
    for (const auto& [key, w] : windows) {
      std::ostringstream name;
      name << labels[key.first] << "_d" << d << "_p" << ps[key.second];
      r.doc["verdicts"][name.str()] = {{"pass", window_stable(w, factor)}, {"windows", window_json(w, levels)}, {"factor", factor}};
    }
  }
  return r;
}

}  // namespace

Report paraproduct_equivalence(const json& p, std::uint64_t seed) {
  return ratio_windows(p, seed, 200, {"paraproduct", "lambda"}, [](const GridPtr& g, std::mt19937_64& rng, double pp, double s) {
    const auto b = random_symbol(g, rng, s);
    const double nb = besov_martingale(b, pp);
    const LorentzIndex idx{pp, pp};
    return std::vector<double>{schatten(paraproduct(b), idx) / nb, schatten(lambda(b), idx) / nb};
  });
}

Report commutator_paraproduct_bound(const json& p, std::uint64_t seed) {
  return ratio_windows(p, seed, 300, {"commutator"}, [](const GridPtr& g, std::mt19937_64& rng, double pp, double s) {
    const auto a = random_symbol(g, rng, s);
    const auto b = random_symbol(g, rng, s);
    const double denom = bmo_martingale(a) * besov_martingale(b, pp);
    return std::vector<double>{schatten(commutator(paraproduct(a), multiplier(b)), {pp, pp}) / denom};
  });
}

Report shift_contraction(const json& p, std::uint64_t seed) {
  Report r;
  const int L = p["L"];
  const int trials = p["trials"];
  const double tol = p["tol"];
  const auto g = make_grid(1, 2, L);
  const auto depths = p["depths"].get<std::vector<std::vector<int>>>();
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto& ij = depths[static_cast<std::size_t>(t) % depths.size()];
    auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), 400);
    const auto S = dyadic_shift(shift_max_random(g, ij[0], ij[1], rng));
    const double norm = singular_values(S).front();
    worst = std::max(worst, norm);
    r.doc["trials"].push_back({{"kind", "shift"}, {"trial", t}, {"i", ij[0]}, {"j", ij[1]}, {"norm", norm}});
  }
  r.doc["verdicts"]["shift_norm"] = {{"pass", worst <= 1 + tol}, {"value", worst}, {"bound", 1 + tol}};

  const double btol = p["block_tol"];
  const int bt = p["block_trials"];
  double worst_cross = 0.0, worst_trace = 0.0;
  for (const auto& ij : p["block_pairs"].get<std::vector<std::vector<int>>>()) {
    for (int t = 0; t < bt; ++t) {
      auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), 410 + 10 * static_cast<std::uint64_t>(ij[0]) + static_cast<std::uint64_t>(ij[1]));
      const auto b = random_symbol(g, rng);
      const auto phi = shift_remainder_commutator(shift_max_random(g, ij[0], ij[1], rng), b);
      const auto rep = block_structure(phi, ij[0], ij[1]);
      const double cross = rep.total_mass > 0 ? rep.cross_mass / rep.total_mass : 0.0;
      const double trace = std::abs(rep.trace_total - rep.trace_blocks) / std::max(rep.trace_total, 1e-300);
      worst_cross = std::max(worst_cross, cross);
      worst_trace = std::max(worst_trace, trace);
      r.doc["trials"].push_back({{"kind", "block"}, {"trial", t}, {"i", ij[0]}, {"j", ij[1]}, {"cross_fraction", cross},
                                 {"trace_gap", trace}, {"blocks", rep.blocks.size()}});
    }
  }
  r.doc["verdicts"]["block_diagonal"] = {{"pass", worst_cross <= btol}, {"value", worst_cross}, {"bound", btol}};
  r.doc["summary"] = {{"max_norm", worst}, {"max_cross_fraction", worst_cross}, {"max_trace_gap", worst_trace},
                      {"weight_bound_11", shift_weight_bound(1, 1, 1, 1.0)}, {"weight_bound_21", shift_weight_bound(2, 1, 1, 1.0)}};
  return r;
}

Report weak_type_tail(const json& p, std::uint64_t seed) {
  Report r;
  const int L = p["L"], i = p["i"], j = p["j"], trials = p["trials"];
  const double tol = p["tol"];
  const auto g = make_grid(1, 2, L);
  double worst = -1.0;  // max over blocks and m of (s_m - Tr/m)/Tr, at least -1
  double worst_ratio = 0.0;  // max m s_m / Tr
  std::size_t blocks = 0;
  for (int t = 0; t < trials; ++t) {
    auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), 500);
    const auto b = random_symbol(g, rng);
    const auto phi = shift_remainder_commutator(shift_max_random(g, i, j, rng), b);
    const int top = L - 1 - std::max(i, j);
    for (int k = 0; k <= top; ++k)
      for (std::size_t K = 0; K < g->cube_count(k); ++K) {
        const Mat B = block_extract(phi, k, K, i);
        Eigen::SelfAdjointEigenSolver<Mat> es(B, Eigen::EigenvaluesOnly);
        std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        std::sort(ev.begin(), ev.end(), std::greater<>());
        const double tr = B.trace().real();
        for (std::size_t m = 1; m <= ev.size(); ++m) {
          const double sm = std::max(ev[m - 1], 0.0);
          if (tr > 0) {
            worst = std::max(worst, (sm - tr / static_cast<double>(m)) / tr);
            worst_ratio = std::max(worst_ratio, static_cast<double>(m) * sm / tr);
          } else {
            worst = std::max(worst, sm);
          }
        }
        ++blocks;
      }
    r.doc["trials"].push_back({{"trial", t}, {"blocks", blocks}});
  }
  r.doc["summary"] = {{"blocks", blocks}, {"max_excess", worst}, {"max_m_sm_over_trace", worst_ratio}};
  r.doc["verdicts"]["tail_bound"] = {{"pass", worst <= tol}, {"value", worst}, {"bound", tol}};
  return r;
}

namespace {

struct Frames {
  std::vector<SampledFunction> e, f;
};

// e_I, f_I supported on I with |values| <= |I|^{-1/2}, over every non-leaf cube
Frames random_frames(const GridPtr& g, std::mt19937_64& rng) {
  Frames fr;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto disk = [&] { return std::polar(std::sqrt(U(rng)), 2 * std::numbers::pi * U(rng)); };
  for (int k = 0; k < g->L(); ++k)
    for (std::size_t I = 0; I < g->cube_count(k); ++I) {
      const double s = 1.0 / std::sqrt(g->cube_measure(k));
      SampledFunction e = zeros(g), f = zeros(g);
      for (auto leaf : g->leaves_of(k, I)) {
        e.values[leaf] = s * disk();
        f.values[leaf] = s * disk();
      }
      fr.e.push_back(std::move(e));
      fr.f.push_back(std::move(f));
    }
  return fr;
}

Vec as_vec(const SampledFunction& f) { return Eigen::Map<const Vec>(f.values.data(), static_cast<Eigen::Index>(f.size())); }

// f -> sum c_I <a_I, f> b_I
Mat rank_sum(const std::vector<SampledFunction>& a, const std::vector<SampledFunction>& b, const std::vector<cd>& c, double h) {
  const auto N = static_cast<Eigen::Index>(a.front().size());
  Mat A(N, static_cast<Eigen::Index>(a.size())), B(N, static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    A.col(static_cast<Eigen::Index>(i)) = as_vec(a[i]);
    B.col(static_cast<Eigen::Index>(i)) = c[i] * as_vec(b[i]);
  }
  return h * B * A.adjoint();
}

std::vector<cd> coefficient_draw(std::mt19937_64& rng, std::size_t n, int kind, const LorentzIndex& idx) {
  std::vector<cd> c(n);
  if (kind == 0) {
    for (auto& v : c) v = complex_gaussian(rng);
  } else if (kind == 1) {
    // extremal for the weak space: k^{-1/p} in random order
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t k = 0; k < n; ++k) c[perm[k]] = std::pow(static_cast<double>(k + 1), -1.0 / idx.p);
  } else {
    // a few large entries
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int k = 0; k < 3; ++k) c[pick(rng)] = complex_gaussian(rng);
  }
  return c;
}

std::vector<double> abs_values(const std::vector<cd>& c) {
  std::vector<double> a;
  for (const auto& v : c) a.push_back(std::abs(v));
  return a;
}

Report nwo(const json& p, std::uint64_t seed, bool upper) {
  Report r;
  const auto levels = p["levels"].get<std::vector<int>>();
  const int trials = p["trials"];
  const double factor = p["factor"];
  for (const auto& ij : p["indices"]) {
    const LorentzIndex idx = index_from(ij);
    std::vector<double> Cs;
    for (int L : levels) {
      const auto g = make_grid(1, 2, L);
      const double h = g->leaf_measure();
      double C = 0.0;
      for (int t = 0; t < trials; ++t) {
        auto rng = keyed_engine(seed, static_cast<std::uint64_t>(t), (upper ? 600 : 700) + static_cast<std::uint64_t>(L));
        const Frames fr = random_frames(g, rng);
        const int kind = t % 3;
        double ratio = 0.0;
        if (upper) {
          const auto lam = coefficient_draw(rng, fr.e.size(), kind, idx);
          const Mat V = rank_sum(fr.e, fr.f, lam, h);
          ratio = lorentz_norm(singular_values(V), idx) / lorentz_norm(abs_values(lam), idx);
        } else {
          Mat V;
          const auto N = static_cast<Eigen::Index>(g->leaf_count());
          if (kind == 0) {
            V = Mat(N, N);
            for (Eigen::Index a = 0; a < N; ++a)
              for (Eigen::Index b = 0; b < N; ++b) V(a, b) = complex_gaussian(rng) / std::sqrt(static_cast<double>(N));
          } else {
            // aligned with the frame: maps f_J towards e_J
            const auto c = coefficient_draw(rng, fr.e.size(), kind == 1 ? 0 : 2, idx);
            V = rank_sum(fr.f, fr.e, c, h);
          }
          std::vector<double> tested;
          for (std::size_t I = 0; I < fr.e.size(); ++I) {
            const Vec Vf = V * as_vec(fr.f[I]);
            tested.push_back(std::abs(h * as_vec(fr.e[I]).dot(Vf)));
          }
          ratio = lorentz_norm(tested, idx) / lorentz_norm(singular_values(V), idx);
        }
        C = std::max(C, ratio);
        r.doc["trials"].push_back({{"index", index_label(idx)}, {"L", L}, {"trial", t}, {"kind", kind}, {"ratio", ratio}});
      }
      Cs.push_back(C);
    }
    const auto [lo, hi] = min_max(Cs);
    json per = json::array();
    for (std::size_t i = 0; i < levels.size(); ++i) per.push_back({{"L", levels[i]}, {"C", Cs[i]}});
    r.doc["verdicts"][(upper ? "C" : "C_prime") + index_label(idx)] = {{"pass", lo > 0 && hi <= factor * lo}, {"constants", per}, {"factor", factor}};
  }
  return r;
}

}  // namespace

Report nwo_upper(const json& p, std::uint64_t seed) { return nwo(p, seed, true); }
Report nwo_lower(const json& p, std::uint64_t seed) { return nwo(p, seed, false); }

}  // namespace haarlab::exp
