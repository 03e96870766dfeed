#include "haarlab/kernels.hpp"

#include "haarlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace haarlab {

namespace {

constexpr double pi = std::numbers::pi;

double norm2(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return std::sqrt(s);
}

// Gamma((n+1)/2) / pi^{(n+1)/2}
double riesz_constant(int n) { return std::tgamma((n + 1) / 2.0) / std::pow(pi, (n + 1) / 2.0); }

std::vector<Point> sphere_directions(int n) {
  std::vector<Point> out;
  if (n == 1) return {{1.0}, {-1.0}};
  if (n == 2) {
    for (int k = 0; k < 720; ++k) out.push_back({std::cos(k * pi / 360), std::sin(k * pi / 360)});
    return out;
  }
  for (int a = 0; a < n; ++a)
    for (double s : {1.0, -1.0}) {
      Point u(static_cast<std::size_t>(n), 0.0);
      u[static_cast<std::size_t>(a)] = s;
      out.push_back(u);
    }
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 4000; ++k) {
    Point u(static_cast<std::size_t>(n));
    for (auto& v : u) v = nd(rng);
    const double l = norm2(u);
    for (auto& v : u) v /= l;
    out.push_back(u);
  }
  return out;
}

Point along(std::span<const double> base, const Point& u, double t) {
  Point p(base.begin(), base.end());
  for (std::size_t a = 0; a < p.size(); ++a) p[a] += t * u[a];
  return p;
}

// directions ordered by decreasing |K(base + t u, base)| (first argument moves when `first`)
std::vector<Point> ranked_directions(const KernelSpec& K, std::span<const double> base, double t, bool first) {
  auto dirs = sphere_directions(K.n);
  std::vector<std::pair<double, std::size_t>> v;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const Point p = along(base, dirs[i], t);
    v.emplace_back(std::abs(first ? evaluate(K, p, base) : evaluate(K, base, p)), i);
  }
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Point> out;
  // golden-section polish of the best planar angle
  if (K.n == 2 && !v.empty()) {
    const auto& d0 = dirs[v.front().second];
    const double phi0 = std::atan2(d0[1], d0[0]);
    auto f = [&](double phi) {
      const Point p = along(base, {std::cos(phi), std::sin(phi)}, t);
      return std::abs(first ? evaluate(K, p, base) : evaluate(K, base, p));
    };
    const double g = (std::sqrt(5.0) - 1) / 2;
    double lo = phi0 - pi / 360, hi = phi0 + pi / 360;
    for (int it = 0; it < 60; ++it) {
      const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
      if (f(a) < f(b)) lo = a; else hi = b;
    }
    const double phi = (lo + hi) / 2;
    if (f(phi) > v.front().first * (1 + 1e-9)) out.push_back({std::cos(phi), std::sin(phi)});
  }
  for (const auto& [val, i] : v) out.push_back(dirs[i]);
  return out;
}

std::vector<Point> ball_samples(std::span<const double> c, double r) {
  std::vector<Point> out;
  const int n = static_cast<int>(c.size());
  if (n == 1) {
    for (int k = -8; k <= 8; ++k) out.push_back({c[0] + r * k / 8.0});
    return out;
  }
  if (n == 2) {
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j)
        if (i * i + j * j <= 16) out.push_back({c[0] + r * i / 4.0, c[1] + r * j / 4.0});
    return out;
  }
  out.push_back(Point(c.begin(), c.end()));
  for (const auto& u : sphere_directions(n)) {
    out.push_back(along(c, u, r));
    if (out.size() > 200) break;
  }
  return out;
}

}  // namespace

KernelSpec hilbert_kernel() {
  KernelSpec K;
  K.preset = "hilbert";
  K.n = 1;
  K.alpha = 1.0;
  // size 1/pi; the smoothness sum reaches 4/pi as |x - x'| -> |x - y|/2
  K.C = 4.0 / pi;
  K.c0 = pi;
  return K;
}

KernelSpec riesz_kernel(int n, int component) {
  if (component < 0 || component >= n) throw Error(ErrorCode::config_invalid, "riesz component out of range");
  KernelSpec K;
  K.preset = "riesz";
  K.n = n;
  K.component = component;
  K.alpha = 1.0;
  const double cn = riesz_constant(n);
  // gradient of z_j/|z|^{n+1} is at most (n+2)/|z|^{n+1}, and |z| >= |x-y|/2 on the segment
  K.C = std::max(cn, 2.0 * cn * (n + 2) * std::pow(2.0, n + 1));
  K.c0 = 1.0 / cn;
  return K;
}

KernelSpec homogeneous_kernel(int n, SphereFunction omega, double C, double c0) {
  KernelSpec K;
  K.preset = "homogeneous";
  K.n = n;
  K.alpha = 1.0;
  K.C = C;
  K.c0 = c0;
  K.omega = std::move(omega);
  return K;
}

KernelSpec homogeneous_kernel(int n) {
  if (n == 1) return homogeneous_kernel(1, [](std::span<const double> u) { return cd(u[0] >= 0 ? 1.0 : -1.0); }, 4.0, 1.0);
  auto omega = [](std::span<const double> u) { return cd(u[0] * u[0] - u[1] * u[1]); };
  return homogeneous_kernel(n, omega, 2.0 * (n + 4) * std::pow(2.0, n + 1), 1.0);
}

KernelSpec zero_kernel(int n) {
  KernelSpec K;
  K.preset = "zero";
  K.n = n;
  K.C = 0.0;
  K.nondegenerate = false;
  return K;
}

KernelSpec power_kernel(int n, double exponent) {
  KernelSpec K;
  K.preset = "power";
  K.n = n;
  K.exponent = exponent;
  K.C = 1.0;
  K.nondegenerate = false;
  return K;
}

KernelSpec kernel_by_name(const std::string& name, int n) {
  if (name == "hilbert") return hilbert_kernel();
  if (name.rfind("riesz", 0) == 0) {
    int j = 1;
    if (name.size() > 6 && name[5] == '_') j = std::stoi(name.substr(6));
    return riesz_kernel(n, j - 1);
  }
  if (name == "homogeneous") return homogeneous_kernel(n);
  if (name == "zero") return zero_kernel(n);
  throw Error(ErrorCode::config_invalid, "unknown kernel preset '" + name + "'");
}

cd evaluate(const KernelSpec& K, std::span<const double> x, std::span<const double> y) {
  if (static_cast<int>(x.size()) != K.n || static_cast<int>(y.size()) != K.n)
    throw Error(ErrorCode::dimension_mismatch, "kernel point dimension");
  Point z(x.size());
  for (std::size_t a = 0; a < z.size(); ++a) z[a] = x[a] - y[a];
  const double r = norm2(z);
  if (r == 0.0 || K.preset == "zero") return 0.0;
  if (K.preset == "hilbert") return 1.0 / (pi * z[0]);
  if (K.preset == "riesz") return riesz_constant(K.n) * z[static_cast<std::size_t>(K.component)] / std::pow(r, K.n + 1);
  if (K.preset == "homogeneous") {
    for (auto& v : z) v /= r;
    return K.omega(z) / std::pow(r, K.n);
  }
  if (K.preset == "power") return 1.0 / std::pow(r, K.exponent);
  throw Error(ErrorCode::config_invalid, "unknown kernel preset '" + K.preset + "'");
}

EstimateReport standard_estimate_check(const KernelSpec& K, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::normal_distribution<double> nd;
  auto unit = [&] {
    Point u(static_cast<std::size_t>(K.n));
    double l = 0.0;
    while (l == 0.0) {
      for (auto& v : u) v = nd(rng);
      l = norm2(u);
    }
    for (auto& v : u) v /= l;
    return u;
  };
  EstimateReport rep;
  rep.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    Point x(static_cast<std::size_t>(K.n));
    for (auto& v : x) v = 2 * U(rng) - 1;
    const double r = std::pow(10.0, -3 + 6 * U(rng));
    const Point y = along(x, unit(), r);
    const double rho = r * 0.5 * std::pow(10.0, -3 * U(rng)) * (1 - 1e-9);
    const Point xp = along(x, unit(), rho);
    double dxy = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) dxy += (x[a] - y[a]) * (x[a] - y[a]);
    dxy = std::sqrt(dxy);
    rep.size_ratio = std::max(rep.size_ratio, std::abs(evaluate(K, x, y)) * std::pow(dxy, K.n));
    const double diff = std::abs(evaluate(K, x, y) - evaluate(K, xp, y)) + std::abs(evaluate(K, y, x) - evaluate(K, y, xp));
    rep.smooth_ratio = std::max(rep.smooth_ratio, diff * std::pow(dxy, K.n + K.alpha) / std::pow(rho, K.alpha));
  }
  const double bound = K.C * (1 + 1e-6);
  rep.pass = rep.size_ratio <= bound && rep.smooth_ratio <= bound;
  return rep;
}

Point nondegenerate_witness(const KernelSpec& K, std::span<const double> y, double r) {
  if (!K.nondegenerate) throw Error(ErrorCode::witness_not_found, "kernel is declared degenerate");
  const double need = 1.0 / (K.c0 * std::pow(r, K.n)) * (1 - 1e-12);
  const Point x = along(y, ranked_directions(K, y, r, true).front(), r);
  if (std::abs(evaluate(K, x, y)) >= need) return x;
  throw Error(ErrorCode::witness_not_found, "no point on the sphere reaches 1/(c0 r^n)");
}

BallPair ball_pair(const KernelSpec& K, std::span<const double> x0, double r, double A,
                   const std::function<bool(std::span<const double>)>& accept) {
  if (A < 3) throw Error(ErrorCode::config_invalid, "ball_pair needs A >= 3");
  if (!K.nondegenerate) throw Error(ErrorCode::pair_not_found, "kernel is declared degenerate");
  const double scale = std::pow(A * r, K.n);
  const auto dirs = ranked_directions(K, x0, A * r, true);
  for (double f : {1.0, 1.25, 1.5, 1.75, 2.0}) {
    for (const auto& u : dirs) {
      Point y0 = along(x0, u, f * A * r);
      if (accept && !accept(y0)) continue;
      const cd k0 = evaluate(K, y0, x0);
      const double normalized = std::abs(k0) * scale;
      if (normalized < (1 - 1e-12) / K.c0) break;  // ranked, so the rest are smaller
      BallPair bp;
      bp.y0 = y0;
      bp.distance = f * A * r;
      bp.normalized = normalized;
      const cd phase = std::conj(k0) / std::abs(k0);
      const auto xs = ball_samples(x0, r);
      const auto ys = ball_samples(y0, r);
      for (const auto& x1 : xs)
        for (const auto& y1 : ys) {
          const cd k1 = evaluate(K, y1, x1);
          bp.oscillation = std::max(bp.oscillation, std::abs(k1 - k0) * std::pow(A, K.n + K.alpha) * std::pow(r, K.n));
          bp.relative = std::max(bp.relative, std::abs(k1 / k0 - 1.0));
          const cd kt = phase * k1;
          bp.rho = std::max(bp.rho, kt.real() > 0 ? std::abs(kt.imag()) / kt.real() : std::numeric_limits<double>::infinity());
        }
      return bp;
    }
  }
  throw Error(ErrorCode::pair_not_found, "no admissible partner point in [A r, 2 A r]");
}

DenseOperator discretize(const KernelSpec& K, const GridPtr& g) {
  if (K.n != g->n()) throw Error(ErrorCode::dimension_mismatch, "kernel and grid dimension differ");
  const std::size_t N = g->leaf_count();
  std::vector<Point> c(N);
  for (std::size_t i = 0; i < N; ++i) c[i] = g->leaf_center(i);
  Mat m = Mat::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  const double h = g->leaf_measure();
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (i != j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = evaluate(K, c[i], c[j]) * h;
  return {g, std::move(m), "kernel:" + K.preset};
}

DenseOperator sio_commutator(const KernelSpec& K, const SampledFunction& b) {
  return commutator(discretize(K, b.grid), multiplier(b));
}

}  // namespace haarlab
