// crystalpr: seeded experiments on sparse crystallographic phase retrieval.

#include <CLI11.hpp>
#include <openssl/opensslv.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "crystalpr/crystalpr.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace crystalpr;
using crystalpr::cli::Manifest;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::size_t n = 8;
  std::vector<std::size_t> ks;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  double beta = 0.5;
  std::uint64_t max_iter = 10'000'000;
  std::string out = ".";
  std::string config;
  unsigned threads = default_threads();
  std::string field = "real";
};

json versions()
{
  return json{{"crystalpr", crystalpr::version},
              {"compiler", __VERSION__},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                    "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"cli11", CLI11_VERSION},
              {"openssl", OPENSSL_VERSION_TEXT}};
}

std::string join(const std::vector<std::size_t>& v, char sep = ' ')
{
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::size_t> parse_indices(const std::string& s)
{
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    const auto v = std::stoull(tok, &pos);
    if (pos != tok.size()) throw UsageError("bad index '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

/// Values from --config apply to options not given on the command line.
void merge_config(CLI::App* sub, const std::string& path)
{
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw UsageError("config file is not a JSON object: " + path);
  for (const auto& [key, value] : j.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option("--" + name);
    } catch (const CLI::OptionNotFound&) {
      throw UsageError("config key '" + key + "' is not an option of '" + sub->get_name() + "'");
    }
    if (opt->count() > 0) continue;
    std::vector<std::string> parts;
    if (value.is_array())
      for (const auto& v : value) parts.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    else if (value.is_boolean())
      parts.push_back(value.get<bool>() ? "true" : "false");
    else
      parts.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    for (const auto& p : parts) opt->add_result(p);
    opt->run_callback();
  }
}

void require_seed(CLI::App* sub)
{
  if (sub->get_option("--seed")->count() == 0) throw UsageError(sub->get_name() + " is randomized and requires --seed");
}

json spec_json(CLI::App* sub)
{
  json params = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    const auto& res = opt->results();
    std::string name = opt->get_name();
    if (name.rfind("--", 0) == 0) name = name.substr(2);
    if (name == "config" || name == "threads" || name == "out") continue;
    if (opt->count() == 0 && opt->get_default_str().empty()) continue;
    if (res.empty())
      params[name] = opt->get_default_str();
    else if (res.size() == 1)
      params[name] = res.front();
    else
      params[name] = res;
  }
  return json{{"command", sub->get_name()}, {"params", params}};
}

std::string csv_of(const std::function<void(std::ostream&)>& f)
{
  std::ostringstream s;
  f(s);
  return s.str();
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Sparse crystallographic phase retrieval experiments"};
  app.require_subcommand(1);
  Common c;

  auto add_common = [&](CLI::App* s, bool randomized) {
    s->add_option("--out", c.out, "Output directory")->capture_default_str();
    s->add_option("--config", c.config, "JSON file with option overrides");
    if (randomized) s->add_option("--seed", c.seed, "RNG seed (required)");
  };
  auto add_threads = [&](CLI::App* s) {
    s->add_option("--threads", c.threads, "Worker threads (default: CRYSTALPR_THREADS or 1)")->check(CLI::PositiveNumber);
  };
  auto add_field = [&](CLI::App* s) {
    s->add_option("--field", c.field, "real | complex")->check(CLI::IsMember({"real", "complex"}))->capture_default_str();
  };

  // diffset-hist
  auto* dh = app.add_subcommand("diffset-hist", "Histogram of |S-S| over random K-subsets of Z_N");
  c.n = 500;
  dh->add_option("--N", c.n, "Group order")->capture_default_str();
  dh->add_option("--K", c.ks, "Support sizes")->delimiter(',')->default_str("5,10,20,40");
  dh->add_option("--trials", c.trials, "Trials per K")->default_str("10000");
  bool plot_flag = false;
  dh->add_flag("--plot", plot_flag, "Also write one SVG histogram per K");
  add_common(dh, true);
  add_threads(dh);

  // collisions
  auto* co = app.add_subcommand("collisions", "Collision statistics of difference multisets");
  co->add_option("--N", c.n, "Group order")->default_str("1000");
  co->add_option("--K", c.ks, "Support sizes")->delimiter(',')->default_str("5,10,20,40");
  co->add_option("--trials", c.trials, "Trials per K")->default_str("1000");
  co->add_flag("--plot", plot_flag, "Also write SVG line plots");
  add_common(co, true);
  add_threads(co);

  // solve
  auto* so = app.add_subcommand("solve", "Plant a sparse signal and run RRR / alternating projection");
  std::string variant = "rrr";
  bool use_eta = false;
  std::uint64_t traj_stride = 0;
  so->add_option("--N", c.n, "Group order")->default_str("50");
  so->add_option("--K", c.ks, "Sparsity")->expected(1)->default_str("5");
  so->add_option("--beta", c.beta, "RRR step")->capture_default_str();
  so->add_option("--max-iter", c.max_iter, "Iteration cap")->capture_default_str();
  so->add_option("--variant", variant, "rrr | ap")->check(CLI::IsMember({"rrr", "ap"}))->capture_default_str();
  so->add_flag("--eta", use_eta, "Declare success with the eta criterion instead of the planted signal");
  so->add_option("--trajectory", traj_stride, "Record (iter, error, eta) every this many iterations");
  add_field(so);
  add_common(so, true);

  // iteration-study
  auto* is = app.add_subcommand("iteration-study", "RRR iteration counts over planted instances");
  bool large_diffset = false;
  is->add_option("--N", c.n, "Group order")->default_str("8");
  is->add_option("--K", c.ks, "Sparsity values")->delimiter(',')->default_str("3,4");
  is->add_option("--trials", c.trials, "Trials per K")->capture_default_str();
  is->add_option("--beta", c.beta, "RRR step")->capture_default_str();
  is->add_option("--max-iter", c.max_iter, "Iteration cap")->capture_default_str();
  is->add_flag("--require-large-diffset", large_diffset, "Redraw supports until |S-S| > K");
  is->add_flag("--plot", plot_flag, "Also write median-vs-K SVG (log y)");
  add_common(is, true);
  add_threads(is);

  // transversality
  auto* tr = app.add_subcommand("transversality", "Rank test of A_{S,S'}(g) over all K-subsets S'");
  unsigned draws = 3;
  std::string support_arg;
  tr->add_option("--N", c.n, "Group order")->required();
  tr->add_option("--K", c.ks, "Sparsity")->expected(1)->required();
  tr->add_option("--draws", draws, "Torus draws per component")->capture_default_str();
  tr->add_option("--support", support_arg, "Single support, e.g. 0,1,2 (default: every support class)");
  add_field(tr);
  add_common(tr, true);

  // uniqueness-sweep
  auto* us = app.add_subcommand("uniqueness-sweep", "Fiber search over support-class pairs with equal difference sets");
  std::size_t starts = 200, x_draws = 3;
  us->add_option("--N", c.n, "Group order")->required();
  us->add_option("--K", c.ks, "Sparsity")->expected(1)->required();
  us->add_option("--starts", starts, "Gauss-Newton starts per search")->capture_default_str();
  us->add_option("--x-draws", x_draws, "Generic signals per pair")->capture_default_str();
  add_field(us);
  add_common(us, true);
  add_threads(us);

  // stabilizers
  auto* st = app.add_subcommand("stabilizers", "Support classes with difference sets and stabilizer orders");
  st->add_option("--N", c.n, "Group order")->required();
  st->add_option("--K", c.ks, "Support size")->expected(1)->required();
  add_field(st);
  add_common(st, false);

  // gen
  auto* ge = app.add_subcommand("gen", "Generate a planted instance");
  std::string values = "uniform";
  bool binary = false;
  double photon_scale = 0.0;
  ge->add_option("--N", c.n, "Group order")->required();
  ge->add_option("--K", c.ks, "Sparsity")->expected(1)->required();
  ge->add_option("--values", values, "uniform | normal")->check(CLI::IsMember({"uniform", "normal"}))->capture_default_str();
  ge->add_flag("--binary", binary, "Indicator signal of a random support");
  ge->add_flag("--require-large-diffset", large_diffset, "Redraw supports until |S-S| > K");
  ge->add_option("--photon-scale", photon_scale, "Poisson noise on intensities at this scale")->check(CLI::PositiveNumber);
  add_field(ge);
  add_common(ge, true);

  // plot
  auto* pl = app.add_subcommand("plot", "Render a CSV as a deterministic SVG");
  std::string csv_path, svg_path, kind = "line", xcol, ycol, title;
  bool log_y = false;
  pl->add_option("--csv", csv_path, "Input CSV")->required()->check(CLI::ExistingFile);
  pl->add_option("--kind", kind, "histogram | line")->check(CLI::IsMember({"histogram", "line"}))->capture_default_str();
  pl->add_option("--svg", svg_path, "Output SVG (default: CSV path with .svg)");
  pl->add_option("--x", xcol, "x column (default: first)");
  pl->add_option("--y", ycol, "y column (default: second)");
  pl->add_flag("--log-y", log_y, "Logarithmic y axis");
  pl->add_option("--title", title, "Plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub != pl) merge_config(sub, c.config);
    const Field field = field_from_string(c.field);
    Manifest man(c.out);
    json seed_json = nullptr;
    auto finish = [&] { man.finish(spec_json(sub), seed_json, Rng::algorithm, versions()); };
    auto single_k = [&](std::size_t dflt) {
      if (c.ks.size() > 1) throw UsageError("--K takes one value for " + sub->get_name());
      return c.ks.empty() ? dflt : c.ks.front();
    };
    if (sub->get_option_no_throw("--seed") != nullptr) {
      require_seed(sub);
      seed_json = c.seed;
    }

    if (sub == dh) {
      if (dh->get_option("--trials")->count() == 0) c.trials = 10000;
      if (c.ks.empty()) c.ks = {5, 10, 20, 40};
      json meta{{"command", "diffset-hist"}, {"N", c.n}, {"K", c.ks}, {"trials", c.trials}, {"seed", c.seed}};
      std::vector<DiffsetHistogram> hs;
      for (auto k : c.ks) {
        if (k == 0 || k > c.n) throw UsageError("K must lie in [1, N]");
        hs.push_back(diffset_histogram_experiment(c.n, k, c.trials, c.seed, c.threads));
      }
      man.write("diffset_hist.csv", csv_of([&](std::ostream& o) {
                  CsvWriter w(o, meta, {"K", "diff_size", "count"});
                  for (const auto& h : hs)
                    for (const auto& [sz, cnt] : h.counts) w.cell(h.k).cell(sz).cell(cnt).end_row();
                }));
      man.write("diffset_summary.csv", csv_of([&](std::ostream& o) {
                  CsvWriter w(o, meta, {"K", "trials", "violations", "min_diff_size", "max_diff_size", "mean_diff_size"});
                  for (const auto& h : hs) {
                    double mean = 0.0;
                    for (const auto& [sz, cnt] : h.counts) mean += static_cast<double>(sz * cnt);
                    mean /= static_cast<double>(std::max<std::size_t>(h.trials, 1));
                    w.cell(h.k).cell(h.trials).cell(h.violations);
                    w.cell(h.counts.empty() ? 0 : h.counts.begin()->first).cell(h.counts.empty() ? 0 : h.counts.rbegin()->first);
                    w.cell(mean).end_row();
                  }
                }));
      if (plot_flag)
        for (const auto& h : hs) {
          CsvTable t;
          t.columns = {"diff_size", "count"};
          for (const auto& [sz, cnt] : h.counts) t.rows.push_back({std::to_string(sz), std::to_string(cnt)});
          PlotOptions po{PlotKind::Histogram, "", "", false, "|S-S|, N=" + std::to_string(c.n) + ", K=" + std::to_string(h.k)};
          man.write("diffset_hist_K" + std::to_string(h.k) + ".svg", render_svg(t, po));
        }
      for (const auto& h : hs)
        std::printf("K=%zu trials=%zu violations(|S-S|<=K)=%zu\n", h.k, h.trials, h.violations);
    } else if (sub == co) {
      if (co->get_option("--N")->count() == 0) c.n = 1000;
      if (co->get_option("--trials")->count() == 0) c.trials = 1000;
      if (c.ks.empty()) c.ks = {5, 10, 20, 40};
      json meta{{"command", "collisions"}, {"N", c.n}, {"K", c.ks}, {"trials", c.trials}, {"seed", c.seed}};
      std::vector<CollisionStats> rows;
      for (auto k : c.ks) {
        if (k == 0 || k > c.n) throw UsageError("K must lie in [1, N]");
        rows.push_back(collision_experiment(c.n, k, c.trials, c.seed, c.threads));
      }
      const std::string csv = csv_of([&](std::ostream& o) {
        CsvWriter w(o, meta, {"K", "collision_free", "mean_collisions", "trials", "forced"});
        for (const auto& r : rows) {
          const bool forced = r.k * (r.k - 1) / 2 > c.n / 2;  // more pairs than nonzero classes
          w.cell(r.k).cell(r.collision_free).cell(r.mean_collisions).cell(r.trials).cell(forced ? 1 : 0).end_row();
        }
      });
      man.write("collisions.csv", csv);
      if (plot_flag) {
        std::istringstream in(csv);
        const CsvTable t = read_csv(in);
        man.write("collisions_free.svg", render_svg(t, {PlotKind::Line, "K", "collision_free", false, "Collision-free events"}));
        man.write("collisions_mean.svg", render_svg(t, {PlotKind::Line, "K", "mean_collisions", false, "Mean collisions"}));
      }
      for (const auto& r : rows) std::printf("K=%zu collision_free=%zu mean=%.3f\n", r.k, r.collision_free, r.mean_collisions);
    } else if (sub == so) {
      if (so->get_option("--N")->count() == 0) c.n = 50;
      const std::size_t k = single_k(5);
      const auto g = AbelianGroup::cyclic(static_cast<int>(c.n));
      SolverConfig cfg;
      cfg.variant = variant_from_string(variant);
      cfg.beta = c.beta;
      cfg.max_iter = c.max_iter;
      cfg.seed = Rng::substream(c.seed, {1}).next();
      if (traj_stride > 0) {
        cfg.record_trajectory = true;
        cfg.trajectory_stride = traj_stride;
      }
      if (!c.config.empty()) {
        std::ifstream in(c.config);
        json j = json::parse(in);
        json solver_keys = json::object();
        for (const auto& key : {"variant", "success_tol", "eta_tol"})
          if (j.contains(key)) solver_keys[key] = j[key];
        apply_json(cfg, solver_keys);
      }
      cfg.validate();
      PlantOptions po;
      po.field = field;
      const auto inst = plant_generic(g, k, Rng::substream(c.seed, {0}).next(), po);
      const auto res = solve(inst.y0, k, cfg, field, use_eta ? nullptr : &inst.x_true);
      man.write("instance.json", to_json_value(inst).dump(2) + "\n");
      json rj = to_json_value(res);
      rj["config"] = to_json_value(cfg);
      man.write("result.json", rj.dump(2) + "\n");
      if (cfg.record_trajectory)
        man.write("trajectory.csv", csv_of([&](std::ostream& o) {
                    CsvWriter w(o, json{{"command", "solve"}, {"N", c.n}, {"K", k}, {"seed", c.seed}}, {"iter", "error", "eta"});
                    for (const auto& p : res.trajectory) w.cell(p.iter).cell(p.error).cell(p.eta).end_row();
                  }));
      std::printf("converged=%s iterations=%llu final_error=%.3e\n", res.converged ? "true" : "false",
                  static_cast<unsigned long long>(res.iterations), res.final_error);
    } else if (sub == is) {
      if (is->get_option("--N")->count() == 0) c.n = 8;
      if (c.ks.empty()) c.ks = {3, 4};
      SolverConfig cfg;
      cfg.beta = c.beta;
      cfg.max_iter = c.max_iter;
      cfg.seed = c.seed;
      cfg.validate();
      IterationStudyOptions opt{c.trials, large_diffset, c.threads};
      const auto rows = iteration_study(c.n, c.ks, cfg, opt);
      json meta{{"command", "iteration-study"}, {"N", c.n},         {"K", c.ks},
                {"trials", c.trials},           {"beta", c.beta},    {"max_iter", c.max_iter},
                {"seed", c.seed},               {"require_large_diffset", large_diffset}};
      const std::string csv = csv_of([&](std::ostream& o) {
        CsvWriter w(o, meta, {"K", "median_iters", "success_rate", "p10", "p90"});
        for (const auto& r : rows) w.cell(r.k).cell(r.median_iters).cell(r.success_rate).cell(r.p10).cell(r.p90).end_row();
      });
      man.write("iteration_study.csv", csv);
      man.write("iteration_counts.csv", csv_of([&](std::ostream& o) {
                  CsvWriter w(o, meta, {"K", "trial", "iterations", "converged"});
                  for (const auto& r : rows)
                    for (std::size_t t = 0; t < r.counts.size(); ++t)
                      w.cell(r.k).cell(t).cell(r.counts[t]).cell(r.converged[t] ? 1 : 0).end_row();
                }));
      if (plot_flag) {
        std::istringstream in(csv);
        man.write("iteration_study.svg",
                  render_svg(read_csv(in), {PlotKind::Line, "K", "median_iters", true, "Median RRR iterations, N=" + std::to_string(c.n)}));
      }
      for (const auto& r : rows)
        std::printf("K=%zu median=%.1f success=%.3f p10=%.1f p90=%.1f\n", r.k, r.median_iters, r.success_rate, r.p10, r.p90);
    } else if (sub == tr) {
      const std::size_t k = single_k(0);
      const auto g = AbelianGroup::cyclic(static_cast<int>(c.n));
      std::vector<SupportSet> supports;
      if (!support_arg.empty())
        supports.emplace_back(g, parse_indices(support_arg));
      else
        supports = enumerate_support_classes(g, k);
      json reports = json::array();
      bool all = true;
      std::string csv = csv_of([&](std::ostream& o) {
        CsvWriter w(o, json{{"command", "transversality"}, {"N", c.n}, {"K", k}, {"field", c.field}, {"seed", c.seed}},
                    {"S", "verdict", "min_rank", "pairs"});
        for (std::size_t i = 0; i < supports.size(); ++i) {
          if (supports[i].size() != k) throw UsageError("--support must have K elements");
          Rng rng = Rng::substream(c.seed, {i});
          const auto rep = check_transversality(supports[i], field, rng, draws);
          all = all && rep.verdict;
          int min_rank = static_cast<int>(2 * k);
          std::size_t pairs = 0;
          for (const auto& comp : rep.components)
            for (const auto& p : comp.per_sprime) {
              min_rank = std::min(min_rank, p.rank);
              ++pairs;
            }
          w.cell(join(supports[i].indices())).cell(rep.verdict ? "true" : "false").cell(min_rank).cell(pairs).end_row();
          reports.push_back(to_json_value(rep));
        }
      });
      man.write("transversality.csv", csv);
      man.write("transversality.json",
                json{{"N", c.n}, {"K", k}, {"field", c.field}, {"verdict", all}, {"reports", reports}}.dump(1) + "\n");
      std::printf("verdict=%s supports=%zu\n", all ? "true" : "false", supports.size());
    } else if (sub == us) {
      const std::size_t k = single_k(0);
      SweepOptions opt;
      opt.starts = starts;
      opt.x_draws = x_draws;
      opt.seed = c.seed;
      opt.threads = c.threads;
      const auto rep = support_recovery_sweep(AbelianGroup::cyclic(static_cast<int>(c.n)), k, field, opt);
      std::size_t extra_large = 0;
      man.write("sweep.csv", csv_of([&](std::ostream& o) {
                  CsvWriter w(o, json{{"command", "uniqueness-sweep"}, {"N", c.n}, {"K", k}, {"field", c.field}, {"seed", c.seed},
                                      {"starts", starts}, {"x_draws", x_draws}},
                              {"S", "Sprime", "diff_size", "verdicts", "extra_solutions", "max_residual"});
                  for (const auto& r : rep.rows) {
                    std::string v;
                    for (auto x : r.verdicts) v += (v.empty() ? "" : " ") + std::string(to_string(x));
                    w.cell(join(r.support.indices())).cell(join(r.sprime.indices())).cell(r.diff_size).cell(v);
                    w.cell(r.extra_solutions).cell(r.max_residual).end_row();
                    if (r.diff_size > k && r.extra_found()) ++extra_large;
                  }
                }));
      std::printf("pairs=%zu pairs_with_extra_solutions(|S-S|>K)=%zu\n", rep.rows.size(), extra_large);
    } else if (sub == st) {
      const std::size_t k = single_k(0);
      const auto g = AbelianGroup::cyclic(static_cast<int>(c.n));
      const auto classes = enumerate_support_classes(g, k);
      man.write("stabilizers.csv", csv_of([&](std::ostream& o) {
                  CsvWriter w(o, json{{"command", "stabilizers"}, {"N", c.n}, {"K", k}, {"field", c.field}},
                              {"S", "diff_set", "diff_size", "stabilizer_order", "orbit_size", "arithmetic_progression"});
                  for (const auto& s : classes) {
                    const auto ds = difference_set(s);
                    w.cell(join(s.indices())).cell(join(ds.classes)).cell(ds.size());
                    w.cell(stabilizer(s, field).order()).cell(orbit_size(s));
                    w.cell(arithmetic_progression(s).has_value() ? "yes" : "no").end_row();
                  }
                }));
      std::printf("classes=%zu\n", classes.size());
    } else if (sub == ge) {
      const std::size_t k = single_k(0);
      if (k == 0) throw UsageError("gen requires --K");
      const auto g = AbelianGroup::cyclic(static_cast<int>(c.n));
      const std::uint64_t inst_seed = Rng::substream(c.seed, {0}).next();
      PlantedInstance inst = binary ? plant_binary(g, k, inst_seed) : [&] {
        PlantOptions po;
        po.values = values == "normal" ? ValueDistribution::StdNormal : ValueDistribution::Uniform01;
        po.field = field;
        po.require_large_diffset = large_diffset;
        return plant_generic(g, k, inst_seed, po);
      }();
      if (photon_scale > 0.0) {
        Rng nr = Rng::substream(c.seed, {1});
        inst = with_poisson_noise(std::move(inst), photon_scale, nr);
      }
      man.write("instance.json", to_json_value(inst).dump(2) + "\n");
      std::printf("support=%s\n", join(inst.support.indices(), ',').c_str());
    } else if (sub == pl) {
      std::ifstream in(csv_path);
      const CsvTable t = read_csv(in);
      PlotOptions po{plot_kind_from_string(kind), xcol, ycol, log_y, title};
      const std::string svg = render_svg(t, po);
      if (svg_path.empty()) svg_path = fs::path(csv_path).replace_extension(".svg").string();
      std::ofstream out(svg_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + svg_path);
      out << svg;
      std::printf("wrote %s\n", svg_path.c_str());
      return 0;
    }
    finish();
  } catch (const CapExceeded& e) {
    std::fprintf(stderr, "error: resource cap exceeded: %s\n", e.what());
    return 3;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
