#include "haarlab/median.hpp"

#include "haarlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace haarlab {

double WeightedPointSet::total() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.w;
  return s;
}

WeightedPointSet point_set(const SampledFunction& b, const Cube& Q) {
  if (!b.grid->same_partition(*Q.grid)) throw Error(ErrorCode::dimension_mismatch, "cube and function on different partitions");
  WeightedPointSet P;
  const double w = Q.grid->leaf_measure();
  for (auto leaf : Q.grid->leaves_of(Q.level, Q.index())) P.atoms.push_back({b.values[leaf], w});
  return P;
}

namespace {

void check_nonempty(const WeightedPointSet& P) {
  if (P.atoms.empty()) throw Error(ErrorCode::empty_set, "point set has no atoms");
  for (const auto& a : P.atoms) {
    if (!(a.w > 0.0) || !std::isfinite(a.w)) throw Error(ErrorCode::config_invalid, "atom weights must be positive and finite");
    if (!std::isfinite(a.z.real()) || !std::isfinite(a.z.imag())) throw Error(ErrorCode::config_invalid, "atom coordinates must be finite");
  }
}

}  // namespace

HalvingResult halving_line(const WeightedPointSet& P, double angle) {
  check_nonempty(P);
  const double c = std::cos(angle), s = std::sin(angle);
  std::vector<std::pair<double, double>> pw;
  for (const auto& a : P.atoms) pw.emplace_back(c * a.z.real() + s * a.z.imag(), a.w);
  std::sort(pw.begin(), pw.end());
  const double mu = P.total();
  double acc = 0.0;
  double alpha = pw.back().first;
  for (const auto& [x, w] : pw) {
    acc += w;
    if (2.0 * acc >= mu) {
      alpha = x;
      break;
    }
  }
  HalvingResult r{alpha, 0.0, 0.0};
  for (const auto& [x, w] : pw) {
    if (x <= alpha) r.lower += w;
    if (x >= alpha) r.upper += w;
  }
  return r;
}

std::array<double, 4> quadrant_masses(const WeightedPointSet& P, const OrthoLinePair& L, double tau) {
  const double c = std::cos(L.theta), s = std::sin(L.theta);
  std::array<double, 4> m{};
  for (const auto& a : P.atoms) {
    const cd w = a.z - L.center;
    const double p1 = c * w.real() + s * w.imag();
    const double p2 = -s * w.real() + c * w.imag();
    if (p1 >= -tau && p2 >= -tau) m[0] += a.w;
    if (p1 <= tau && p2 >= -tau) m[1] += a.w;
    if (p1 <= tau && p2 <= tau) m[2] += a.w;
    if (p1 >= -tau && p2 <= tau) m[3] += a.w;
  }
  return m;
}

bool certify(const WeightedPointSet& P, const OrthoLinePair& L, double tau) {
  const double mu = P.total();
  const auto m = quadrant_masses(P, L, tau);
  return std::all_of(m.begin(), m.end(), [&](double v) { return v >= mu / 16 - 1e-12 * mu; });
}

namespace exact {

namespace {

int sgn(i128 v) { return (v > 0) - (v < 0); }

i128 cross(i128 ax, i128 ay, i128 bx, i128 by) { return ax * by - ay * bx; }

struct Rat {
  i128 p = 0, q = 1;  // q > 0
};

bool less(const Rat& a, const Rat& b) { return a.p * b.q < b.p * a.q; }
bool equal(const Rat& a, const Rat& b) { return a.p * b.q == b.p * a.q; }

// smallest key whose lower CDF reaches half of the total
template <class Key>
Key halving_key(std::vector<std::pair<Key, std::int64_t>> kw) {
  std::sort(kw.begin(), kw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  i128 total = 0;
  for (const auto& e : kw) total += e.second;
  i128 acc = 0;
  for (const auto& [k, w] : kw) {
    acc += w;
    if (2 * acc >= total) return k;
  }
  return kw.back().first;
}

int weight_exponent(double wmax, std::size_t n) {
  // total of scaled weights stays below 2^60
  const int room = 60 - static_cast<int>(std::ceil(std::log2(static_cast<double>(n) + 1.0))) - 1;
  return room - 1 - std::ilogb(wmax);
}

int coord_exponent(double cmax) { return cmax == 0.0 ? 0 : 23 - std::ilogb(cmax); }

struct Scales {
  int ce = 0, we = 0;
};

Scales scales(const WeightedPointSet& P) {
  double cmax = 0.0, wmax = 0.0;
  for (const auto& a : P.atoms) {
    cmax = std::max({cmax, std::abs(a.z.real()), std::abs(a.z.imag())});
    wmax = std::max(wmax, a.w);
  }
  return {coord_exponent(cmax), weight_exponent(wmax, P.atoms.size())};
}

}  // namespace

std::optional<ExactSet> to_exact(const WeightedPointSet& P) {
  check_nonempty(P);
  const auto sc = scales(P);
  ExactSet S;
  S.coord_exp = sc.ce;
  S.weight_exp = sc.we;
  for (const auto& a : P.atoms) {
    const double x = std::ldexp(a.z.real(), sc.ce), y = std::ldexp(a.z.imag(), sc.ce);
    const double w = std::ldexp(a.w, sc.we);
    if (x != std::floor(x) || y != std::floor(y) || w != std::floor(w) || w < 1.0) return std::nullopt;
    S.z.push_back({static_cast<std::int64_t>(x), static_cast<std::int64_t>(y)});
    S.w.push_back(static_cast<std::int64_t>(w));
    S.total += S.w.back();
  }
  return S;
}

double rounding_slack(const ExactSet& S) { return std::ldexp(4.0, -S.coord_exp); }

ExactSet quantize(const WeightedPointSet& P) {
  check_nonempty(P);
  const auto sc = scales(P);
  ExactSet S;
  S.coord_exp = sc.ce;
  S.weight_exp = sc.we;
  for (const auto& a : P.atoms) {
    S.z.push_back({std::llround(std::ldexp(a.z.real(), sc.ce)), std::llround(std::ldexp(a.z.imag(), sc.ce))});
    S.w.push_back(std::max<std::int64_t>(1, std::llround(std::ldexp(a.w, sc.we))));
    S.total += S.w.back();
  }
  return S;
}

std::array<i128, 4> quadrant_masses(const ExactSet& S, const Pair& L) {
  std::array<i128, 4> m{};
  for (std::size_t a = 0; a < S.z.size(); ++a) {
    const i128 x = S.z[a].x, y = S.z[a].y;
    const int s1 = sgn(L.q1 * cross(L.rx, L.ry, x, y) - L.c1);
    const int s2 = sgn(L.q2 * (L.rx * x + L.ry * y) - L.c2);
    if (s2 >= 0 && s1 >= 0) m[0] += S.w[a];
    if (s2 <= 0 && s1 >= 0) m[1] += S.w[a];
    if (s2 <= 0 && s1 <= 0) m[2] += S.w[a];
    if (s2 >= 0 && s1 <= 0) m[3] += S.w[a];
  }
  return m;
}

bool certified(const ExactSet& S, const Pair& L) {
  const auto m = quadrant_masses(S, L);
  return std::all_of(m.begin(), m.end(), [&](i128 v) { return 16 * v >= S.total; });
}

Halving halving_line(const ExactSet& S, std::int64_t dx, std::int64_t dy) {
  if (S.z.empty()) throw Error(ErrorCode::empty_set, "point set has no atoms");
  std::vector<std::pair<i128, std::int64_t>> kw;
  for (std::size_t a = 0; a < S.z.size(); ++a) kw.emplace_back(i128{dx} * S.z[a].x + i128{dy} * S.z[a].y, S.w[a]);
  Halving h;
  h.offset = halving_key(kw);
  for (const auto& [k, w] : kw) {
    if (k <= h.offset) h.lower += w;
    if (k >= h.offset) h.upper += w;
  }
  return h;
}

Quarter quarter_partition(const ExactSet& S) {
  Quarter q;
  q.alpha = static_cast<std::int64_t>(halving_line(S, 1, 0).offset);
  std::vector<std::pair<std::int64_t, std::int64_t>> left, right;
  for (std::size_t a = 0; a < S.z.size(); ++a) {
    if (S.z[a].x <= q.alpha) left.emplace_back(S.z[a].y, S.w[a]);
    if (S.z[a].x >= q.alpha) right.emplace_back(S.z[a].y, S.w[a]);
  }
  q.alpha1 = halving_key(left);
  q.alpha2 = halving_key(right);
  for (std::size_t a = 0; a < S.z.size(); ++a) {
    const auto [x, y] = S.z[a];
    if (x <= q.alpha && y <= q.alpha1) q.masses[0] += S.w[a];
    if (x <= q.alpha && y >= q.alpha1) q.masses[1] += S.w[a];
    if (x >= q.alpha && y <= q.alpha2) q.masses[2] += S.w[a];
    if (x >= q.alpha && y >= q.alpha2) q.masses[3] += S.w[a];
  }
  return q;
}

namespace {

// Frame (u, v) = (sigma y, alpha - x): the base line is v = 0, the left half is v >= 0.
struct Frame {
  std::int64_t alpha = 0;
  int sigma = 1;

  IPoint to(const IPoint& z) const { return {sigma * z.y, alpha - z.x}; }

  // pair expressed in frame coordinates -> original coordinates
  Pair back(const Pair& f) const {
    Pair o;
    o.rx = -f.ry;
    o.ry = sigma * f.rx;
    o.q1 = f.q1;
    o.c1 = sigma * (f.c1 - f.q1 * f.rx * alpha);
    o.q2 = f.q2;
    o.c2 = f.c2 - f.q2 * f.ry * alpha;
    return o;
  }
};

struct Direction {
  i128 x, y;
};

// canonical representative of a line direction in the half-open upper half-plane
Direction canonical(i128 x, i128 y) {
  if (y < 0 || (y == 0 && x < 0)) return {-x, -y};
  return {x, y};
}

struct Sweep {
  const ExactSet& S;
  Frame fr;
  std::vector<IPoint> zf;           // frame coordinates of all atoms
  std::vector<std::size_t> s1, s4;  // atom indices
  i128 mu1 = 0, mu4 = 0;
  std::int64_t a1 = 0, a2 = 0;      // ray origins in frame u
  std::size_t tested_points = 0;

  std::optional<Pair> try_l2(const Pair& f) const {
    Pair g = f;
    // perpendicular through the midpoint of the ray origins
    g.c2 = f.rx * (i128{a1} + a2);
    g.q2 = 2;
    if (certified(S, fr.back(g))) return fr.back(g);
    return std::nullopt;
  }

  std::optional<Pair> repair_l2(const Pair& f) const {
    std::vector<i128> t;
    for (const auto& z : zf) t.push_back(f.rx * z.x + f.ry * z.y);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    Pair g = f;
    for (std::size_t i = 0; i < t.size(); ++i) {
      g.c2 = t[i];
      g.q2 = 1;
      if (certified(S, fr.back(g))) return fr.back(g);
      if (i + 1 < t.size()) {
        g.c2 = t[i] + t[i + 1];
        g.q2 = 2;
        if (certified(S, fr.back(g))) return fr.back(g);
      }
    }
    return std::nullopt;
  }

  bool feasible(const Rat& X, const Direction& r) const {
    i128 l1 = 0, r1 = 0, l4 = 0, r4 = 0;
    auto side = [&](std::size_t a) {
      const i128 wx = X.q * zf[a].x - X.p, wy = X.q * zf[a].y;
      return sgn(cross(r.x, r.y, wx, wy));
    };
    for (auto a : s1) {
      const int s = side(a);
      if (s >= 0) l1 += S.w[a];
      if (s <= 0) r1 += S.w[a];
    }
    if (4 * l1 < mu1 || 4 * r1 < mu1) return false;
    for (auto a : s4) {
      const int s = side(a);
      if (s >= 0) l4 += S.w[a];
      if (s <= 0) r4 += S.w[a];
    }
    return 4 * l4 >= mu4 && 4 * r4 >= mu4;
  }

  std::vector<Direction> candidate_directions(const Rat& X) const {
    std::vector<Direction> d;
    auto add = [&](std::size_t a) {
      const i128 wx = X.q * zf[a].x - X.p, wy = X.q * zf[a].y;
      if (wx != 0 || wy != 0) d.push_back(canonical(wx, wy));
    };
    for (auto a : s1) add(a);
    for (auto a : s4) add(a);
    std::sort(d.begin(), d.end(), [](const Direction& a, const Direction& b) { return cross(a.x, a.y, b.x, b.y) > 0; });
    d.erase(std::unique(d.begin(), d.end(),
                        [](const Direction& a, const Direction& b) { return cross(a.x, a.y, b.x, b.y) == 0; }),
            d.end());
    std::vector<Direction> out{{1, 0}};
    if (d.size() == 1) out.push_back({-d[0].y, d[0].x});
    for (std::size_t i = 0; i < d.size(); ++i) {
      out.push_back(d[i]);
      if (i + 1 < d.size()) out.push_back({d[i].x + d[i + 1].x, d[i].y + d[i + 1].y});
    }
    if (d.size() >= 2) out.push_back({d.back().x - d.front().x, d.back().y - d.front().y});
    return out;
  }

  std::optional<Solution> at(const Rat& X) {
    ++tested_points;
    for (const auto& r : candidate_directions(X)) {
      if (!feasible(X, r)) continue;
      Pair f;
      f.rx = r.x;
      f.ry = r.y;
      // L1 through X = (p/q, 0): q cross(r, z) = -r_y p
      f.c1 = -r.y * X.p;
      f.q1 = X.q;
      if (auto p = try_l2(f)) return Solution{*p, "sweep"};
      if (auto p = repair_l2(f)) return Solution{*p, "sweep-repair"};
    }
    return std::nullopt;
  }
};

std::optional<Solution> sweep_route(const ExactSet& S, const Quarter& q) {
  Frame fr{q.alpha, q.alpha1 > q.alpha2 ? -1 : 1};
  Sweep sw{S, fr, {}, {}, {}, 0, 0, fr.sigma * q.alpha1, fr.sigma * q.alpha2, 0};
  for (const auto& z : S.z) sw.zf.push_back(fr.to(z));
  for (std::size_t a = 0; a < S.z.size(); ++a) {
    const auto [u, v] = sw.zf[a];
    if (v >= 0 && u <= sw.a1) {
      sw.s1.push_back(a);
      sw.mu1 += S.w[a];
    }
    if (v <= 0 && u >= sw.a2) {
      sw.s4.push_back(a);
      sw.mu4 += S.w[a];
    }
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> k1, k4;
  for (auto a : sw.s1) k1.emplace_back(sw.zf[a].x, S.w[a]);
  for (auto a : sw.s4) k4.emplace_back(-sw.zf[a].x, S.w[a]);
  const Rat A{halving_key(k1), 1};
  const Rat B{-halving_key(k4), 1};

  std::vector<std::size_t> both = sw.s1;
  both.insert(both.end(), sw.s4.begin(), sw.s4.end());
  std::vector<Rat> bp;
  for (std::size_t i = 0; i < both.size(); ++i) {
    const auto zi = sw.zf[both[i]];
    if (zi.y == 0) bp.push_back({zi.x, 1});
    for (std::size_t j = i + 1; j < both.size(); ++j) {
      const auto zj = sw.zf[both[j]];
      if (zi.y == zj.y) continue;
      Rat r{i128{zi.x} * zj.y - i128{zi.y} * zj.x, i128{zj.y} - zi.y};
      if (r.q < 0) r = {-r.p, -r.q};
      if (less(A, r) && less(r, B)) bp.push_back(r);
    }
  }
  std::sort(bp.begin(), bp.end(), less);
  bp.erase(std::unique(bp.begin(), bp.end(), equal), bp.end());

  if (auto s = sw.at(A)) return s;
  if (!equal(A, B))
    if (auto s = sw.at(B)) return s;
  Rat prev = A;
  for (const auto& r : bp) {
    if (auto s = sw.at({prev.p + r.p, prev.q + r.q})) return s;
    if (auto s = sw.at(r)) return s;
    prev = r;
  }
  if (less(prev, B))
    if (auto s = sw.at({prev.p + B.p, prev.q + B.q})) return s;
  return std::nullopt;
}

std::optional<Solution> heavy_atom_route(const ExactSet& S) {
  for (std::size_t a = 0; a < S.z.size(); ++a) {
    if (16 * i128{S.w[a]} < S.total) continue;
    Pair p;
    p.c1 = S.z[a].y;
    p.c2 = S.z[a].x;
    return Solution{p, "heavy-atom"};
  }
  return std::nullopt;
}

// a line holding mu/8, cut at its weighted median by the perpendicular
std::optional<Solution> heavy_line_route(const ExactSet& S) {
  const std::size_t N = S.z.size();
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      if (S.z[i] == S.z[j]) continue;
      const i128 rx = i128{S.z[j].x} - S.z[i].x, ry = i128{S.z[j].y} - S.z[i].y;
      const i128 c1 = cross(rx, ry, S.z[i].x, S.z[i].y);
      std::vector<std::pair<i128, std::int64_t>> on;
      i128 m = 0;
      for (std::size_t a = 0; a < N; ++a)
        if (cross(rx, ry, S.z[a].x, S.z[a].y) == c1) {
          on.emplace_back(rx * S.z[a].x + ry * S.z[a].y, S.w[a]);
          m += S.w[a];
        }
      if (8 * m < S.total) continue;
      Pair p{rx, ry, c1, 1, halving_key(on), 1};
      if (certified(S, p)) return Solution{p, "heavy-line"};
    }
  return std::nullopt;
}

}  // namespace

Solution complex_median(const ExactSet& S) {
  if (S.z.empty()) throw Error(ErrorCode::empty_set, "point set has no atoms");
  if (auto s = heavy_atom_route(S)) return *s;
  const Quarter q = quarter_partition(S);
  if (q.alpha1 == q.alpha2) {
    // l and the common ray line are orthogonal and the quadrants are S1..S4
    Pair p{0, 1, -q.alpha, 1, q.alpha1, 1};
    if (certified(S, p)) return {p, "quarter"};
  }
  if (auto s = sweep_route(S, q)) return *s;
  if (S.z.size() <= 128)
    if (auto s = heavy_line_route(S)) return *s;
  if (auto p = oracle(S)) return {*p, "oracle-fallback"};
  return {Pair{}, "failed"};
}

MedianResult to_result(const ExactSet& S, const Pair& L, const std::string& route) {
  i128 a = L.rx, b = L.ry;
  int k = 0;
  // rotate r by -pi/2 until it points into [0, pi/2)
  while (!(a > 0 && b >= 0)) {
    const i128 t = a;
    a = b;
    b = -t;
    ++k;
  }
  const double n2 = static_cast<double>(L.rx) * static_cast<double>(L.rx) + static_cast<double>(L.ry) * static_cast<double>(L.ry);
  const double C1 = static_cast<double>(L.c1) / static_cast<double>(L.q1);
  const double C2 = static_cast<double>(L.c2) / static_cast<double>(L.q2);
  const double rx = static_cast<double>(L.rx), ry = static_cast<double>(L.ry);
  const double x = (rx * C2 - ry * C1) / n2, y = (ry * C2 + rx * C1) / n2;
  MedianResult r;
  r.pair.center = cd(std::ldexp(x, -S.coord_exp), std::ldexp(y, -S.coord_exp));
  r.pair.theta = std::atan2(static_cast<double>(b), static_cast<double>(a));
  const auto m = quadrant_masses(S, L);
  for (int i = 0; i < 4; ++i) r.masses[i] = std::ldexp(static_cast<double>(m[((i - k) % 4 + 4) % 4]), -S.weight_exp);
  r.total = std::ldexp(static_cast<double>(S.total), -S.weight_exp);
  r.certified = certified(S, L);
  r.exact = true;
  for (std::size_t i = 0; i < S.z.size(); ++i) {
    const i128 x = S.z[i].x, y = S.z[i].y;
    const int s1 = sgn(L.q1 * cross(L.rx, L.ry, x, y) - L.c1);
    const int s2 = sgn(L.q2 * (L.rx * x + L.ry * y) - L.c2);
    const std::array<bool, 4> in{s2 >= 0 && s1 >= 0, s2 <= 0 && s1 >= 0, s2 <= 0 && s1 <= 0, s2 >= 0 && s1 <= 0};
    std::uint8_t bits = 0;
    for (int q = 0; q < 4; ++q)
      if (in[((q - k) % 4 + 4) % 4]) bits |= static_cast<std::uint8_t>(1u << q);
    r.membership.push_back(bits);
  }
  r.route = route;
  return r;
}

}  // namespace exact

QuarterSplit quarter_partition(const WeightedPointSet& P) {
  const auto ex = exact::to_exact(P);
  const exact::ExactSet S = ex ? *ex : exact::quantize(P);
  const auto q = exact::quarter_partition(S);
  QuarterSplit out;
  out.alpha = std::ldexp(static_cast<double>(q.alpha), -S.coord_exp);
  out.alpha1 = std::ldexp(static_cast<double>(q.alpha1), -S.coord_exp);
  out.alpha2 = std::ldexp(static_cast<double>(q.alpha2), -S.coord_exp);
  if (ex) {
    for (int i = 0; i < 4; ++i) out.masses[i] = std::ldexp(static_cast<double>(q.masses[i]), -S.weight_exp);
  } else {
    for (const auto& a : P.atoms) {
      const double x = a.z.real(), y = a.z.imag();
      if (x <= out.alpha && y <= out.alpha1) out.masses[0] += a.w;
      if (x <= out.alpha && y >= out.alpha1) out.masses[1] += a.w;
      if (x >= out.alpha && y <= out.alpha2) out.masses[2] += a.w;
      if (x >= out.alpha && y >= out.alpha2) out.masses[3] += a.w;
    }
  }
  return out;
}

MedianResult complex_median(const WeightedPointSet& P) {
  if (auto S = exact::to_exact(P)) {
    const auto sol = exact::complex_median(*S);
    return exact::to_result(*S, sol.pair, sol.route);
  }
  // rounded problem, then a tolerance check on the original atoms
  const auto S = exact::quantize(P);
  const auto sol = exact::complex_median(S);
  MedianResult r = exact::to_result(S, sol.pair, sol.route);
  r.exact = false;
  r.slack = exact::rounding_slack(S);
  r.masses = quadrant_masses(P, r.pair, r.slack);
  r.total = P.total();
  r.certified = certify(P, r.pair, r.slack);
  if (!r.certified) {
    if (auto o = median_oracle(P); o && o->certified) return *o;
  }
  return r;
}

}  // namespace haarlab
