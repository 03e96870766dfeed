#include "haarlab/errors.hpp"
#include "haarlab/lab.hpp"

#include <cmath>
#include <numbers>

namespace haarlab {

NecessityFrame necessity_frame(const SampledFunction& b, const Cube& I, const KernelSpec& K, double A) {
  const GridPtr& g = I.grid;
  if (g->n() != 1 || g->shifted()) throw Error(ErrorCode::config_invalid, "necessity frame is built on an unshifted interval grid");
  if (!b.grid->same_partition(*g)) throw Error(ErrorCode::dimension_mismatch, "b and I on different partitions");
  if (I.level >= g->L()) throw Error(ErrorCode::level_overflow, "I needs children above the leaf level");

  NecessityFrame fr;
  fr.I = I;
  const double lo = boost::rational_cast<double>(g->spec().origin.empty() ? Rat(0) : g->spec().origin[0]);
  const double hi = lo + g->side();
  const auto x0 = I.center();
  auto inside = [&](std::span<const double> y) { return y[0] - I.side() / 2 >= lo && y[0] + I.side() / 2 <= hi; };
  try {
    fr.ball = ball_pair(K, x0, I.side() * std::sqrt(static_cast<double>(g->n())), A, inside);
  } catch (const Error& e) {
    throw Error(ErrorCode::ball_pair_failure, e.what());
  }
  fr.partner = cube_at(g, fr.ball.y0, I.level);

  fr.median = complex_median(point_set(b, fr.partner));
  fr.alpha = fr.median.pair.center;
  fr.theta = -fr.median.pair.theta - std::numbers::pi / 4;

  // F_s: alpha - b in sector s, i.e. b in the opposite closed quadrant T_{s+2}
  const auto hat = g->leaves_of(fr.partner.level, fr.partner.index());
  for (std::size_t i = 0; i < hat.size(); ++i)
    for (int s = 0; s < 4; ++s)
      if (fr.median.membership[i] & (1u << ((s + 2) % 4))) fr.F[static_cast<std::size_t>(s)].push_back(hat[i]);

  // E_s: b - alpha in closed quadrant T_s
  const double c = std::cos(fr.median.pair.theta), sn = std::sin(fr.median.pair.theta);
  for (auto leaf : g->leaves_of(I.level, I.index())) {
    const cd w = b.values[leaf] - fr.alpha;
    const double p1 = c * w.real() + sn * w.imag();
    const double p2 = -sn * w.real() + c * w.imag();
    const std::array<bool, 4> in{p1 >= 0 && p2 >= 0, p1 <= 0 && p2 >= 0, p1 <= 0 && p2 <= 0, p1 >= 0 && p2 <= 0};
    for (int s = 0; s < 4; ++s)
      if (in[static_cast<std::size_t>(s)]) fr.E[static_cast<std::size_t>(s)].push_back(leaf);
  }

  const double mI = I.measure();
  const double mq = g->cube_measure(I.level + 1);
  for (int s = 0; s < 4; ++s) {
    for (const auto& child : children(I)) {
      TestPair tp;
      tp.s = s + 1;
      tp.q = child.index();
      tp.e = zeros(g);
      for (auto leaf : fr.F[static_cast<std::size_t>(s)]) tp.e.values[leaf] = std::sqrt(mq) / mI;
      tp.f = zeros(g);
      for (auto leaf : fr.E[static_cast<std::size_t>(s)])
        if (g->cube_of_leaf(leaf, I.level + 1) == tp.q) tp.f.values[leaf] = 1.0 / std::sqrt(mq);
      fr.pairs.push_back(std::move(tp));
    }
  }
  return fr;
}

}  // namespace haarlab
