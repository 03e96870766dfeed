#include "haarlab/errors.hpp"
#include "haarlab/io.hpp"
#include "haarlab/martops.hpp"
#include "haarlab/lab.hpp"
#include "haarlab/random.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

using namespace haarlab;

namespace {

Report run(const std::string& name, json params, std::optional<std::uint64_t> seed = 17) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.seed = seed;
  cfg.params = std::move(params);
  return run_experiment(cfg);
}

}  // namespace

TEST(Lab, NecessityFrameConstantSymbol) {
  const auto g = make_grid(1, 2, 8);
  const auto b = constant(g, cd(0.5, -1.25));
  const auto I = make_cube(g, 5, 3);
  const auto fr = necessity_frame(b, I, hilbert_kernel(), 8.0);
  EXPECT_EQ(fr.alpha, cd(0.5, -1.25));
  const auto hat = g->leaves_of(fr.partner.level, fr.partner.index());
  const auto own = g->leaves_of(I.level, I.index());
  for (int s = 0; s < 4; ++s) {
    EXPECT_TRUE(std::equal(fr.F[s].begin(), fr.F[s].end(), hat.begin(), hat.end()));
    EXPECT_TRUE(std::equal(fr.E[s].begin(), fr.E[s].end(), own.begin(), own.end()));
  }
  EXPECT_EQ(fr.pairs.size(), 8u);
  EXPECT_GE(std::abs(fr.partner.center()[0] - I.center()[0]), 8 * I.side() * (1 - 1e-12));
}

TEST(Lab, NecessityFrameSetAlgebra) {
  const auto g = make_grid(1, 2, 9);
  for (int t = 0; t < 20; ++t) {
    auto rng = keyed_engine(31, t);
    const auto b = random_symbol(g, rng);
    const auto I = make_cube(g, 6, static_cast<std::size_t>(t));
    const auto fr = necessity_frame(b, I, hilbert_kernel(), 16.0);
    std::set<std::size_t> uE, uF;
    for (int s = 0; s < 4; ++s) {
      uE.insert(fr.E[s].begin(), fr.E[s].end());
      uF.insert(fr.F[s].begin(), fr.F[s].end());
      // F_s carries at least a sixteenth of the partner
      EXPECT_GE(16 * fr.F[s].size(), g->leaves_per_cube(I.level));
    }
    EXPECT_EQ(uE.size(), g->leaves_per_cube(I.level));
    EXPECT_EQ(uF.size(), g->leaves_per_cube(I.level));
    EXPECT_TRUE(fr.median.certified);
  }
}

TEST(Lab, NecessityFrameErrors) {
  const auto g = make_grid(1, 2, 6);
  const auto b = constant(g, 1.0);
  EXPECT_THROW(necessity_frame(b, make_cube(g, 6, 0), hilbert_kernel(), 8.0), Error);
  EXPECT_THROW(necessity_frame(b, make_cube(g, 1, 0), hilbert_kernel(), 32.0), Error);
}

TEST(Lab, ConfigParsing) {
  const auto c = parse_config({{"experiment", "mo_equivalence"}, {"seed", 5}, {"params", {{"trials", 3}}}});
  EXPECT_EQ(c.name, "mo_equivalence");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_THROW(parse_config({{"experiment", "x"}, {"bogus", 1}}), Error);
  EXPECT_THROW(run("mo_equivalence", {{"nope", 1}}), Error);
  EXPECT_THROW(run("mo_equivalence", {{"trials", "many"}}), Error);
  EXPECT_THROW(run("mo_equivalence", json::object(), std::nullopt), Error);
  EXPECT_THROW(run("no_such_experiment", json::object()), Error);
}

TEST(Lab, Registry) {
  std::set<std::string> names;
  for (const auto& e : experiments()) {
    names.insert(e.name);
    EXPECT_FALSE(e.criterion.empty()) << e.name;
    EXPECT_TRUE(e.defaults.is_object());
  }
  EXPECT_EQ(names.size(), 13u);
  EXPECT_FALSE(experiment_info("janson_wolff").randomized);
}

TEST(Lab, Reproducible) {
  const json params{{"trials", 3}, {"levels", {4, 5}}};
  const auto a = run("mo_equivalence", params), b = run("mo_equivalence", params);
  EXPECT_EQ(a.doc.dump(), b.doc.dump());
  EXPECT_EQ(a.csv(), b.csv());
  EXPECT_NE(a.doc.dump(), run("mo_equivalence", params, 18).doc.dump());
  EXPECT_EQ(a.doc["criterion"], experiment_info("mo_equivalence").criterion);
}

TEST(Lab, SmallExperimentsPass) {
  EXPECT_TRUE(run("decomposition_identity", {{"L", 4}, {"trials", 3}}).pass());
  EXPECT_TRUE(run("mo_equivalence", {{"trials", 5}}).pass());
  EXPECT_TRUE(run("weak_type_tail", {{"L", 5}, {"i", 1}, {"j", 1}, {"trials", 2}}).pass());
  EXPECT_TRUE(run("median_stress", {{"instances", 100}, {"max_atoms", 16}, {"lemma_checks", 500}}).pass());
  EXPECT_TRUE(run("covering_check", {{"L", 8}, {"trials", 1000}}).pass());
  EXPECT_TRUE(run("shift_contraction", {{"L", 4}, {"trials", 5}, {"block_trials", 1}}).pass());
}

TEST(Lab, ReportShape) {
  const auto r = run("decomposition_identity", {{"L", 3}, {"trials", 2}});
  for (const char* k : {"experiment", "config", "criterion", "trials", "summary", "verdicts", "pass"})
    EXPECT_TRUE(r.doc.contains(k)) << k;
  EXPECT_FALSE(r.csv().empty());
}

TEST(Lab, Summarize) {
  const auto s = exp::summarize({3.0, 1.0, 2.0});
  EXPECT_EQ(s["min"], 1.0);
  EXPECT_EQ(s["max"], 3.0);
  EXPECT_EQ(s["median"], 2.0);
  EXPECT_TRUE(exp::window_stable({{1.0, 2.0}, {1.5, 3.0}}, 2.0));
  EXPECT_FALSE(exp::window_stable({{1.0, 2.0}, {0.4, 2.0}}, 2.0));
}

TEST(Lab, FileRoundtrips) {
  const auto dir = std::filesystem::temp_directory_path() / "haarlab_io_test";
  std::filesystem::create_directories(dir);
  const auto g = make_grid(1, 3, 3, Rat(1), {}, {Rat(2, 27)});
  auto rng = keyed_engine(41, 0);
  const auto b = random_symbol(g, rng);
  const auto A = paraproduct(b);
  write_operator((dir / "A.hlop").string(), A);
  const auto B = read_operator((dir / "A.hlop").string());
  EXPECT_EQ(B.m, A.m);
  EXPECT_TRUE(B.grid->same_partition(*g));
  write_function_csv((dir / "b.csv").string(), b);
  const auto c = read_function_csv((dir / "b.csv").string(), g);
  EXPECT_EQ(c.values, b.values);
  const auto hc = analyze(b);
  write_coefficients_csv((dir / "c.csv").string(), hc);
  const auto back = synthesize(read_coefficients_csv((dir / "c.csv").string(), g));
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(std::abs(back.values[i] - b.values[i]), 0.0, 1e-13);
  EXPECT_EQ(grid_from_json(grid_to_json(g->spec())).sigma, g->spec().sigma);
  EXPECT_THROW(read_operator((dir / "missing.hlop").string()), Error);
  std::filesystem::remove_all(dir);
}
