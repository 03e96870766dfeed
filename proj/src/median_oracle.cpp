#include "haarlab/median.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <tuple>

namespace haarlab {

namespace exact {

namespace {

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// lines at r and r + pi/2 give the same candidate pairs, so reduce mod pi/2
std::pair<i128, i128> reduce(i128 x, i128 y) {
  while (!(x > 0 && y >= 0)) {
    const i128 t = x;
    x = y;
    y = -t;
  }
  const i128 g = gcd128(x, y);
  return {x / g, y / g};
}

std::vector<std::pair<i128, i128>> oracle_directions(const ExactSet& S) {
  std::vector<std::pair<i128, i128>> out;
  std::set<std::pair<i128, i128>> seen;
  auto add = [&](i128 x, i128 y) {
    if (x == 0 && y == 0) return;
    const auto r = reduce(x, y);
    if (seen.insert(r).second) out.push_back(r);
  };
  for (int g = 0; g < 256; ++g) {
    const double a = g * (std::numbers::pi / 2) / 256;
    add(std::llround(std::ldexp(std::cos(a), 20)), std::llround(std::ldexp(std::sin(a), 20)));
  }
  for (std::size_t i = 0; i < S.z.size(); ++i)
    for (std::size_t j = i + 1; j < S.z.size(); ++j)
      add(i128{S.z[j].x} - S.z[i].x, i128{S.z[j].y} - S.z[i].y);
  return out;
}

std::vector<std::size_t> ranks(const std::vector<i128>& v, std::vector<i128>& distinct) {
  distinct = v;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::size_t> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    r[i] = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), v[i]) - distinct.begin());
  return r;
}

}  // namespace

// Every direction from the candidate list; L1 through some atom, L2 through some
// atom; closed quadrant masses from a 2D prefix table over the two rank orders.
std::optional<Pair> oracle(const ExactSet& S) {
  const std::size_t N = S.z.size();
  const i128 mu = S.total;
  std::vector<i128> s(N), t(N), sd, td;
  std::vector<i128> P;
  for (const auto& [rx, ry] : oracle_directions(S)) {
    for (std::size_t a = 0; a < N; ++a) {
      s[a] = rx * S.z[a].y - ry * S.z[a].x;
      t[a] = rx * S.z[a].x + ry * S.z[a].y;
    }
    const auto rs = ranks(s, sd), rt = ranks(t, td);
    const std::size_t ns = sd.size(), nt = td.size();
    // P[i][j] = mass(rank_s < i, rank_t < j)
    P.assign((ns + 1) * (nt + 1), 0);
    auto at = [&](std::size_t i, std::size_t j) -> i128& { return P[i * (nt + 1) + j]; };
    for (std::size_t a = 0; a < N; ++a) at(rs[a] + 1, rt[a] + 1) += S.w[a];
    for (std::size_t i = 1; i <= ns; ++i)
      for (std::size_t j = 1; j <= nt; ++j) at(i, j) += at(i - 1, j) + at(i, j - 1) - at(i - 1, j - 1);
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t j = 0; j < nt; ++j) {
        const i128 ge_ge = mu - at(i, nt) - at(ns, j) + at(i, j);
        const i128 le_ge = at(i + 1, nt) - at(i + 1, j);
        const i128 le_le = at(i + 1, j + 1);
        const i128 ge_le = at(ns, j + 1) - at(i, j + 1);
        if (16 * ge_ge >= mu && 16 * le_ge >= mu && 16 * le_le >= mu && 16 * ge_le >= mu) {
          Pair p{rx, ry, sd[i], 1, td[j], 1};
          if (certified(S, p)) return p;
        }
      }
  }
  return std::nullopt;
}

}  // namespace exact

std::optional<MedianResult> median_oracle(const WeightedPointSet& P) {
  const auto ex = exact::to_exact(P);
  const exact::ExactSet S = ex ? *ex : exact::quantize(P);
  const auto p = exact::oracle(S);
  if (!p) return std::nullopt;
  MedianResult r = exact::to_result(S, *p, "oracle");
  if (!ex) {
    r.exact = false;
    r.slack = exact::rounding_slack(S);
    r.masses = quadrant_masses(P, r.pair, r.slack);
    r.total = P.total();
    r.certified = certify(P, r.pair, r.slack);
  }
  return r;
}

}  // namespace haarlab
