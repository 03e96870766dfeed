#include "haarlab/errors.hpp"
#include "haarlab/io.hpp"
#include "haarlab/kernels.hpp"
#include "haarlab/lab.hpp"
#include "haarlab/martops.hpp"
#include "haarlab/median.hpp"
#include "haarlab/norms.hpp"
#include "haarlab/random.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>

using namespace haarlab;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct GridArgs {
  std::string file;
  int n = 1, d = 2, L = -1;

  void add(CLI::App* app) {
    app->add_option("--grid", file, "grid descriptor (JSON)");
    app->add_option("--n", n, "dimension");
    app->add_option("--d", d, "children per axis");
    app->add_option("--L", L, "finest level");
  }
  GridPtr make() const {
    if (!file.empty()) return make_grid(grid_from_json(json::parse(read_text(file))));
    if (L < 0) throw Error(ErrorCode::config_invalid, "a grid needs --grid FILE or --L");
    return make_grid(n, d, L);
  }
};

double parse_q(const std::string& s) { return s == "inf" ? kInf : std::stod(s); }

void emit(const json& j, const std::string& out) {
  if (out.empty()) std::cout << j.dump(2) << '\n';
  else write_text(out, j.dump(2) + "\n");
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadic harmonic analysis lab"};
  app.require_subcommand(1);
  std::string out;
  app.add_option("--out", out, "output path")->capture_default_str();

  // haar
  auto* haar = app.add_subcommand("haar", "Haar transform");
  haar->require_subcommand(1);
  GridArgs hg;
  std::string h_in;
  auto* analyze_cmd = haar->add_subcommand("analyze", "leaf values -> coefficients");
  auto* synth_cmd = haar->add_subcommand("synthesize", "coefficients -> leaf values");
  for (auto* c : {analyze_cmd, synth_cmd}) {
    hg.add(c);
    c->add_option("--in", h_in, "input CSV")->required();
    c->add_option("--out", out, "output CSV");
  }

  // norm
  auto* norm = app.add_subcommand("norm", "norms of operators and functions");
  std::string norm_name, op_file, fn_file;
  std::string q_str = "2";
  double p = 2.0, eps = 0.0;
  GridArgs ng;
  norm->add_option("name", norm_name, "schatten | besov | besov_diff | besov_tail | bmo | sobolev | besov_continuous | weak_besov")->required();
  norm->add_option("--op", op_file, "operator container");
  norm->add_option("--fn", fn_file, "function CSV");
  norm->add_option("--p", p, "exponent p");
  norm->add_option("--q", q_str, "exponent q (number or inf)");
  norm->add_option("--eps", eps, "excision radius for besov_continuous");
  ng.add(norm);

  // median
  auto* median = app.add_subcommand("median", "complex median of a weighted point set");
  median->require_subcommand(1);
  std::string pts;
  std::vector<double> center{0.0, 0.0};
  double theta = 0.0;
  auto* solve_cmd = median->add_subcommand("solve", "find a certified pair");
  auto* verify_cmd = median->add_subcommand("verify", "closed-quadrant masses of a given pair");
  for (auto* c : {solve_cmd, verify_cmd}) {
    c->add_option("--points", pts, "points CSV (re,im,w)")->required();
    c->add_option("--out", out, "output JSON");
  }
  verify_cmd->add_option("--center", center, "center re im")->expected(2);
  verify_cmd->add_option("--theta", theta, "angle in [0, pi/2)");

  // op
  auto* op = app.add_subcommand("op", "operators");
  op->require_subcommand(1);
  auto* build = op->add_subcommand("build", "assemble an operator container");
  std::string op_name, symbol, symbol2, kernel = "hilbert";
  int dim = -1, si = 1, sj = 1;
  std::uint64_t op_seed = 0;
  GridArgs og;
  build->add_option("name", op_name,
                    "identity | zero | multiplier | paraproduct | paraproduct_adjoint | lambda | remainder | psi | kernel | commutator | shift")
      ->required();
  build->add_option("--dim", dim, "identity or zero of this size without a grid");
  build->add_option("--symbol", symbol, "symbol b (function CSV)");
  build->add_option("--symbol2", symbol2, "second symbol for psi (a = symbol, b = symbol2)");
  build->add_option("--kernel", kernel, "kernel preset");
  build->add_option("--i", si, "shift depth i");
  build->add_option("--j", sj, "shift depth j");
  build->add_option("--shift-seed", op_seed, "seed for random shift coefficients");
  build->add_option("--out", out, "output container (.csv for the entry list)")->required();
  og.add(build);

  // exp
  auto* ex = app.add_subcommand("exp", "experiments");
  ex->require_subcommand(1);
  auto* run = ex->add_subcommand("run", "run an experiment");
  auto* list = ex->add_subcommand("list", "list experiments");
  std::string exp_name, config_file;
  std::optional<std::uint64_t> seed;
  run->add_option("name", exp_name, "experiment name");
  run->add_option("--config", config_file, "config JSON");
  run->add_option("--seed", seed, "seed (overrides HAARLAB_SEED and the config)");
  run->add_option("--out", out, "report JSON; a CSV of trials is written next to it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  std::cout << std::setprecision(17);
  try {
    if (*analyze_cmd) {
      const auto g = hg.make();
      const auto c = analyze(read_function_csv(h_in, g));
      if (out.empty()) throw Error(ErrorCode::config_invalid, "--out is required");
      write_coefficients_csv(out, c);
      return kPass;
    }
    if (*synth_cmd) {
      const auto g = hg.make();
      if (out.empty()) throw Error(ErrorCode::config_invalid, "--out is required");
      write_function_csv(out, synthesize(read_coefficients_csv(h_in, g)));
      return kPass;
    }
    if (*norm) {
      const LorentzIndex idx{p, parse_q(q_str)};
      double v = 0.0;
      if (norm_name == "schatten") {
        if (op_file.empty()) throw Error(ErrorCode::config_invalid, "schatten needs --op");
        v = schatten(read_operator(op_file), idx);
      } else {
        if (fn_file.empty()) throw Error(ErrorCode::config_invalid, norm_name + " needs --fn");
        const auto g = ng.make();
        const auto b = read_function_csv(fn_file, g);
        if (norm_name == "besov") v = besov_martingale(b, p);
        else if (norm_name == "besov_diff") v = besov_martingale_diff(b, p);
        else if (norm_name == "besov_tail") v = besov_martingale_tail(b, p);
        else if (norm_name == "bmo") v = bmo_martingale(b);
        else if (norm_name == "sobolev") v = sobolev_seminorm(b, p);
        else if (norm_name == "besov_continuous") v = besov_continuous(b, p, eps > 0 ? eps : 0.5 * g->cube_side(g->L()));
        else if (norm_name == "weak_besov") v = weak_besov(b, adjacent_family(g->n(), g->L()), idx);
        else throw Error(ErrorCode::config_invalid, "unknown norm '" + norm_name + "'");
      }
      std::cout << v << '\n';
      return kPass;
    }
    if (*solve_cmd) {
      const auto r = complex_median(read_points_csv(pts));
      emit(median_to_json(r), out);
      return r.certified ? kPass : kFail;
    }
    if (*verify_cmd) {
      const auto P = read_points_csv(pts);
      const OrthoLinePair L{{center[0], center[1]}, theta};
      const auto m = quadrant_masses(P, L);
      const double mu = P.total();
      const bool ok = certify(P, L);
      json j{{"center", center}, {"theta", theta}, {"masses", {m[0] / mu, m[1] / mu, m[2] / mu, m[3] / mu}}, {"total", mu}, {"certified", ok}};
      emit(j, out);
      return ok ? kPass : kFail;
    }
    if (*build) {
      DenseOperator A;
      if ((op_name == "identity" || op_name == "zero") && dim > 0) {
        A.m = Mat::Zero(dim, dim);
        if (op_name == "identity") A.m.setIdentity();
        A.tag = op_name;
      } else {
        const auto g = og.make();
        auto sym = [&](const std::string& f) {
          if (f.empty()) throw Error(ErrorCode::config_invalid, op_name + " needs a symbol");
          return read_function_csv(f, g);
        };
        if (op_name == "identity") A = identity(g);
        else if (op_name == "zero") A = zero_operator(g);
        else if (op_name == "multiplier") A = multiplier(sym(symbol));
        else if (op_name == "paraproduct") A = paraproduct(sym(symbol));
        else if (op_name == "paraproduct_adjoint") A = paraproduct_adjoint(sym(symbol));
        else if (op_name == "lambda") A = lambda(sym(symbol));
        else if (op_name == "remainder") A = remainder(sym(symbol));
        else if (op_name == "psi") A = psi(sym(symbol), sym(symbol2));
        else if (op_name == "kernel") A = discretize(kernel_by_name(kernel, g->n()), g);
        else if (op_name == "commutator") A = sio_commutator(kernel_by_name(kernel, g->n()), sym(symbol));
        else if (op_name == "shift") {
          auto rng = keyed_engine(op_seed, 0, 0);
          A = dyadic_shift(shift_max_random(g, si, sj, rng));
        } else throw Error(ErrorCode::config_invalid, "unknown operator '" + op_name + "'");
      }
      if (ends_with(out, ".csv")) write_operator_csv(out, A);
      else write_operator(out, A);
      return kPass;
    }
    if (*list) {
      for (const auto& e : experiments()) std::cout << e.name << (e.randomized ? "" : " (deterministic)") << '\n';
      return kPass;
    }
    if (*run) {
      ExperimentConfig cfg;
      if (!config_file.empty()) {
        json j;
        try {
          j = json::parse(read_text(config_file));
        } catch (const json::parse_error& e) {
          throw Error(ErrorCode::config_invalid, config_file + ": " + e.what());
        }
        cfg = parse_config(j);
      }
      if (!exp_name.empty()) cfg.name = exp_name;
      if (cfg.name.empty()) throw Error(ErrorCode::config_invalid, "no experiment named");
      if (const char* env = std::getenv("HAARLAB_SEED"); env && *env) {
        try {
          cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
          throw Error(ErrorCode::config_invalid, "HAARLAB_SEED is not an integer");
        }
      }
      if (seed) cfg.seed = seed;
      if (!out.empty()) cfg.out = out;
      const auto r = run_experiment(cfg);
      if (cfg.out.empty()) {
        std::cout << r.doc.dump(2) << '\n';
      } else {
        write_text(cfg.out, r.doc.dump(2) + "\n");
        write_text(cfg.out + ".csv", r.csv());
        std::cout << cfg.name << ": " << (r.pass() ? "pass" : "FAIL") << '\n';
      }
      return r.pass() ? kPass : kFail;
    }
  } catch (const Error& e) {
    std::cerr << "haarlab: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::config_invalid:
      case ErrorCode::unknown_experiment:
      case ErrorCode::io_error:
      case ErrorCode::dimension_mismatch:
      case ErrorCode::invalid_grid:
        return kUsage;
      default:
        return kFail;
    }
  } catch (const json::exception& e) {
    std::cerr << "haarlab: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "haarlab: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
