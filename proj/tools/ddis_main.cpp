// Command-line front end: match a template in a target image, reproduce the
// 1D Gaussian expectation surfaces, run benchmark manifests, and generate
// synthetic evaluation pairs.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ddis/bench.hpp"
#include "ddis/feature_grid.hpp"
#include "ddis/image.hpp"
#include "ddis/matcher.hpp"
#include "ddis/parallel.hpp"
#include "ddis/statsim.hpp"
#include "ddis/text.hpp"

namespace {

struct AnnFlags {
  bool exact_nn = false;
  double epsilon = 2.0;
  int pca_dim = 9;
  bool no_propagate = false;
  bool identity_projection = false;
};

void add_ann_flags(CLI::App* cmd, AnnFlags& flags) {
  cmd->add_flag("--exact-nn", flags.exact_nn,
                "use exact brute-force NN search instead of the kd-tree");
  cmd->add_option("--epsilon", flags.epsilon,
                  "kd-tree approximation slack: returned distance <= (1+eps) * exact")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--pca-dim", flags.pca_dim, "PCA reduced dimension")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--no-propagate", flags.no_propagate,
                "disable seeding each NN query from the left neighbor's match");
  cmd->add_flag("--identity-projection", flags.identity_projection,
                "skip PCA so the kd-tree works in the original feature space");
}

std::optional<ddis::AnnParams> to_ann(const AnnFlags& flags) {
  if (flags.exact_nn) return std::nullopt;
  ddis::AnnParams params;
  params.epsilon = flags.epsilon;
  params.reduced_dim = flags.pca_dim;
  params.propagation = !flags.no_propagate;
  params.identity_projection = flags.identity_projection;
  return params;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    if (comma == std::string::npos) {
      parts.push_back(text.substr(pos));
      break;
    }
    parts.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return parts;
}

int cmd_match(const std::string& template_path, const std::string& target_path,
              const std::string& features_kind,
              const std::string& template_features_path,
              const std::string& target_features_path, const std::string& measure,
              const std::string& color_space, bool standardize_grids,
              const AnnFlags& ann, bool no_smooth, int bbs_guard, int workers,
              const std::string& rect_out, const std::string& map_csv,
              const std::string& map_pgm) {
  ddis::FeatureGrid target, tmpl;
  if (features_kind == "fmap") {
    if (template_features_path.empty() || target_features_path.empty())
      throw std::runtime_error(
          "--features fmap requires --template-features and --target-features");
    tmpl = ddis::load_feature_map(template_features_path);
    target = ddis::load_feature_map(target_features_path);
  } else {
    ddis::PatchSpec spec;
    spec.color_space =
        color_space == "hsv" ? ddis::ColorSpace::HSV : ddis::ColorSpace::RGB;
    tmpl = ddis::extract_patch_features(ddis::load_image(template_path), spec);
    target = ddis::extract_patch_features(ddis::load_image(target_path), spec);
  }
  if (standardize_grids) {
    tmpl = ddis::standardize(tmpl);
    target = ddis::standardize(target);
  }

  ddis::MatcherConfig config;
  config.measure = ddis::parse_measure(measure);
  config.ann = to_ann(ann);
  config.smoothing = !no_smooth;
  config.bbs_guard_cells = bbs_guard;
  config.workers = workers;

  const ddis::MatchOutput out = ddis::run_matcher(target, tmpl, config);
  const double score =
      config.smoothing ? out.result.smoothed_score : out.result.raw_score;
  const std::string line = std::to_string(out.result.x) + " " +
                           std::to_string(out.result.y) + " " +
                           std::to_string(out.result.w) + " " +
                           std::to_string(out.result.h) + " " +
                           ddis::format_full(score);
  if (rect_out.empty()) {
    std::cout << line << "\n";
  } else {
    std::ofstream f(rect_out);
    if (!f) throw std::runtime_error("cannot write rect file: " + rect_out);
    f << line << "\n";
  }
  if (!map_csv.empty()) ddis::write_map_csv(out.raw, map_csv);
  if (!map_pgm.empty()) ddis::write_map_pgm16(out.smoothed, map_pgm);
  return 0;
}

int cmd_simulate(const std::string& measure, const std::string& mode,
                 const std::string& mu_range, const std::string& sigma_range, int n,
                 int m, int trials, std::uint64_t seed, const std::string& out_path,
                 int workers) {
  const auto grid = ddis::expectation_grid(
      ddis::parse_sim_measure(measure), ddis::parse_deformation_mode(mode),
      ddis::GaussianSpec{0.0, 1.0}, ddis::parse_range(mu_range),
      ddis::parse_range(sigma_range), n, m, trials, seed, workers);
  ddis::write_grid_csv(grid, out_path);
  return 0;
}

int cmd_bench(const std::string& manifest_path, const std::string& measures_csv,
              const AnnFlags& ann, bool no_smooth, int bbs_guard,
              const std::string& out_path, const std::string& curve_prefix,
              bool timing, int workers) {
  const auto records = ddis::load_manifest(manifest_path);
  if (records.empty()) throw std::runtime_error("manifest has no records");
  const auto measure_names = split_list(measures_csv);

  struct Task {
    std::size_t pair_index;
    ddis::Measure measure;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < records.size(); ++p)
    for (const auto& name : measure_names)
      tasks.push_back({p, ddis::parse_measure(name)});

  std::vector<ddis::PairOutcome> outcomes(tasks.size());
  std::vector<std::string> failures(tasks.size());
  ddis::parallel_for(tasks.size(), workers, [&](std::size_t t) {
    ddis::MatcherConfig config;
    config.measure = tasks[t].measure;
    config.ann = to_ann(ann);
    config.smoothing = !no_smooth;
    config.bbs_guard_cells = bbs_guard;
    config.workers = 1;  // pairs are already parallel
    try {
      outcomes[t] = ddis::run_pair(records[tasks[t].pair_index], config);
    } catch (const std::exception& e) {
      failures[t] = e.what();
    }
  });
  for (const auto& f : failures)
    if (!f.empty()) throw std::runtime_error(f);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write results CSV: " + out_path);
  out << "pair_index,measure,accuracy,raw_score,smoothed_score,wall_ms\n";
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& o = outcomes[t];
    out << tasks[t].pair_index << ',' << ddis::measure_name(tasks[t].measure) << ','
        << ddis::format_full(o.accuracy) << ',' << ddis::format_full(o.result.raw_score)
        << ',' << ddis::format_full(o.result.smoothed_score) << ','
        << ddis::format_full(timing ? o.wall_ms : 0.0) << '\n';
  }

  for (const auto& name : measure_names) {
    const auto measure = ddis::parse_measure(name);
    std::vector<double> accuracies;
    for (std::size_t t = 0; t < tasks.size(); ++t)
      if (tasks[t].measure == measure) accuracies.push_back(outcomes[t].accuracy);
    const auto curve = ddis::success_curve(accuracies);
    if (!curve_prefix.empty()) {
      std::ofstream cf(curve_prefix + "_" + name + ".csv");
      if (!cf) throw std::runtime_error("cannot write curve CSV: " + curve_prefix);
      cf << "threshold,fraction\n";
      for (std::size_t k = 0; k < curve.thresholds.size(); ++k)
        cf << ddis::format_full(curve.thresholds[k]) << ','
           << ddis::format_full(curve.fractions[k]) << '\n';
    }
    std::cout << "AUC " << name << " " << ddis::format_full(ddis::auc(curve)) << "\n";
  }
  return 0;
}

int cmd_gen(const std::string& out_dir, int count, int size, int template_size,
            double occlusion, double noise, double jitter, int shift,
            std::uint64_t seed) {
  ddis::SyntheticParams params;
  params.size = size;
  params.template_size = template_size;
  params.occlusion_fraction = occlusion;
  params.noise_sigma = noise;
  params.local_jitter = jitter;
  params.shift = shift;
  params.seed = seed;

  std::vector<ddis::PairRecord> records;
  records.reserve(count);
  for (int i = 0; i < count; ++i)
    records.push_back(ddis::gen_synthetic(params, out_dir, i));
  ddis::save_manifest(records,
                      (std::filesystem::path(out_dir) / "manifest.csv").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Template matching with nearest-neighbor-field diversity measures"};
  app.require_subcommand(1);
  int workers = ddis::default_workers();
  app.add_option("--workers", workers, "worker thread count")
      ->check(CLI::PositiveNumber);

  // match
  auto* match = app.add_subcommand("match", "locate a template in a target image");
  std::string template_path, target_path, features_kind = "patch";
  std::string template_features_path, target_features_path;
  std::string measure = "ddis", color_space = "rgb";
  std::string rect_out, map_csv, map_pgm;
  bool standardize_grids = false, no_smooth = false;
  int bbs_guard = 128 * 128;
  AnnFlags match_ann;
  match->add_option("--template", template_path, "template image (PPM/P6)");
  match->add_option("--target", target_path, "target image (PPM/P6)");
  match->add_option("--features", features_kind, "feature source: patch or fmap")
      ->check(CLI::IsMember({"patch", "fmap"}));
  match->add_option("--template-features", template_features_path,
                    "template FMAP file (with --features fmap)");
  match->add_option("--target-features", target_features_path,
                    "target FMAP file (with --features fmap)");
  match->add_option("--measure", measure, "ddis, dis, bbs, ssd, sad or ncc");
  match->add_option("--color-space", color_space, "patch color space: rgb or hsv")
      ->check(CLI::IsMember({"rgb", "hsv"}));
  match->add_flag("--standardize", standardize_grids,
                  "standardize each descriptor dimension to zero mean, unit sd");
  add_ann_flags(match, match_ann);
  match->add_flag("--no-smooth", no_smooth, "skip similarity-map smoothing");
  match->add_option("--bbs-guard", bbs_guard,
                    "max target grid cells the bbs measure accepts");
  match->add_option("--rect-out", rect_out,
                    "write 'x y w h score' here instead of stdout");
  match->add_option("--map-csv", map_csv, "write the raw similarity map as CSV");
  match->add_option("--map-pgm", map_pgm,
                    "write the smoothed similarity map as 16-bit PGM");

  // simulate
  auto* simulate =
      app.add_subcommand("simulate", "estimate E[measure] over a (mu, sigma) grid");
  std::string sim_measure = "dis", sim_mode = "ignore";
  std::string mu_range = "0:10:1", sigma_range = "0:10:1", sim_out = "grid.csv";
  int sim_n = 100, sim_m = 100, sim_trials = 200;
  std::uint64_t sim_seed = 0;
  simulate->add_option("--measure", sim_measure, "ssd, bbs, dis or ddis");
  simulate->add_option("--mode", sim_mode,
                       "deformation mode for ddis: small, large or ignore");
  simulate->add_option("--mu", mu_range, "mu_Q range start:stop:step");
  simulate->add_option("--sigma", sigma_range, "sigma_Q range start:stop:step");
  simulate->add_option("--n", sim_n, "points per template set")->check(CLI::PositiveNumber);
  simulate->add_option("--m", sim_m, "points per target set")->check(CLI::PositiveNumber);
  simulate->add_option("--trials", sim_trials, "Monte-Carlo trials per cell")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "RNG seed");
  simulate->add_option("--out", sim_out, "output CSV path");

  // bench
  auto* bench = app.add_subcommand("bench", "run a manifest of evaluation pairs");
  std::string manifest_path, bench_measures = "ddis";
  std::string bench_out = "results.csv", curve_prefix;
  bool timing = false, bench_no_smooth = false;
  int bench_guard = 128 * 128;
  AnnFlags bench_ann;
  bench->add_option("--manifest", manifest_path, "manifest CSV")->required();
  bench->add_option("--measure", bench_measures, "comma-separated measure list");
  add_ann_flags(bench, bench_ann);
  bench->add_flag("--no-smooth", bench_no_smooth, "skip similarity-map smoothing");
  bench->add_option("--bbs-guard", bench_guard,
                    "max target grid cells the bbs measure accepts");
  bench->add_option("--out", bench_out, "results CSV path");
  bench->add_option("--curve-out", curve_prefix,
                    "success-curve CSV path prefix (one file per measure)");
  bench->add_flag("--timing", timing,
                  "report wall_ms (off by default; timings are not reproducible)");

  // gen
  auto* gen = app.add_subcommand("gen", "generate synthetic evaluation pairs");
  std::string gen_dir = "synthetic";
  int gen_count = 10, gen_size = 128, gen_template = 48, gen_shift = 32;
  double gen_occlusion = 0.0, gen_noise = 0.0, gen_jitter = 0.0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--out-dir", gen_dir, "output directory");
  gen->add_option("--count", gen_count, "number of pairs")->check(CLI::PositiveNumber);
  gen->add_option("--size", gen_size, "target image side, px");
  gen->add_option("--template-size", gen_template, "template side, px");
  gen->add_option("--occlusion", gen_occlusion, "occluded fraction of the template");
  gen->add_option("--noise", gen_noise, "Gaussian pixel noise sigma on [0,1] scale");
  gen->add_option("--jitter", gen_jitter, "max smooth per-pixel displacement, px");
  gen->add_option("--shift", gen_shift, "max planted displacement, px");
  gen->add_option("--seed", gen_seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(match))
      return cmd_match(template_path, target_path, features_kind,
                       template_features_path, target_features_path, measure,
                       color_space, standardize_grids, match_ann, no_smooth,
                       bbs_guard, workers, rect_out, map_csv, map_pgm);
    if (app.got_subcommand(simulate))
      return cmd_simulate(sim_measure, sim_mode, mu_range, sigma_range, sim_n, sim_m,
                          sim_trials, sim_seed, sim_out, workers);
    if (app.got_subcommand(bench))
      return cmd_bench(manifest_path, bench_measures, bench_ann, bench_no_smooth,
                       bench_guard, bench_out, curve_prefix, timing, workers);
    if (app.got_subcommand(gen))
      return cmd_gen(gen_dir, gen_count, gen_size, gen_template, gen_occlusion,
                     gen_noise, gen_jitter, gen_shift, gen_seed);
  } catch (const std::exception& e) {
    std::cerr << "ddis: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
