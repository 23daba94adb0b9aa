#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

#include "ddis/ann.hpp"
#include "ddis/feature_grid.hpp"
#include "ddis/parallel.hpp"

namespace ddis {

/// Per-target-cell appearance-NN record against the template grid. One
/// search per cell, never per window; nn_x/nn_y derive the NN's template
/// coordinates from its cell index. `distance` is the full-dimension
/// appearance distance regardless of how the NN was found.
struct NnGrid {
  int width = 0, height = 0;                    // target grid cells
  int template_width = 0, template_height = 0;  // template grid cells
  Eigen::VectorXi nn_index;                     // width*height entries
  Eigen::VectorXd distance;

  Eigen::Index cell(int x, int y) const {
    return static_cast<Eigen::Index>(y) * width + x;
  }
  int nn_x(Eigen::Index c) const { return nn_index[c] % template_width; }
  int nn_y(Eigen::Index c) const { return nn_index[c] / template_width; }
};

/// Dense grid of window scores; (x, y) scores the window whose top-left
/// target cell is (x, y).
struct SimilarityMap {
  int width = 0, height = 0;
  Eigen::MatrixXd scores;  // height x width, (row y, col x)

  SimilarityMap() = default;
  SimilarityMap(int w, int h) : width(w), height(h), scores(h, w) {}
  double& at(int x, int y) { return scores(y, x); }
  double at(int x, int y) const { return scores(y, x); }
};

struct MatchResult {
  int x = 0, y = 0, w = 0, h = 0;  // rect in image pixels
  double raw_score = 0.0;
  double smoothed_score = 0.0;
};

enum class Measure { DDIS, DIS, BBS, SSD, SAD, NCC };

Measure parse_measure(const std::string& name);
std::string measure_name(Measure m);

struct MatcherConfig {
  Measure measure = Measure::DDIS;
  std::optional<AnnParams> ann = AnnParams{};  // nullopt: exact brute-force NN
  bool smoothing = true;
  int bbs_guard_cells = 128 * 128;  // max target cells BBS will accept
  int workers = default_workers();
};

/// Appearance-NN of every target cell among the template cells. With `ann`
/// unset the search is exact (ties to the smallest template index). Under
/// ANN with propagation, each query within a row is seeded by its left
/// neighbor's match shifted one cell right; rows stay independent, so the
/// result does not depend on worker count.
NnGrid compute_nn_grid(const FeatureGrid& target, const FeatureGrid& tmpl,
                       const std::optional<AnnParams>& ann, int workers = 1);

/// DDIS score for every window placement. kappa is rebuilt at each map row
/// start and maintained incrementally column-wise within the row:
/// identical, cell for cell, to recomputing it from scratch per window.
SimilarityMap ddis_map(const NnGrid& nn, int workers = 1);

/// DIS score (unique-NN count / template cell count) per window, via the
/// same incremental kappa table.
SimilarityMap dis_map(const NnGrid& nn, int workers = 1);

/// Exact BBS per window. Quartic-ish in template size; refuses targets
/// above guard_cells.
SimilarityMap bbs_map_naive(const FeatureGrid& target, const FeatureGrid& tmpl,
                            int guard_cells = 128 * 128, int workers = 1);

/// SSD/SAD (negated, so argmax localization is uniform across measures) or
/// NCC (mean per-dimension zero-normalized correlation; zero-variance
/// dimensions contribute 0).
SimilarityMap baseline_map(const FeatureGrid& target, const FeatureGrid& tmpl,
                           Measure measure, int workers = 1);

/// Box filter with kernel max(1, floor(tw/3)) x max(1, floor(th/3)) cells,
/// via an integral image; border cells average the in-bounds intersection.
SimilarityMap smooth(const SimilarityMap& map, int template_grid_w,
                     int template_grid_h);

/// Argmax of the smoothed map (ties to the smallest row-major index),
/// converted back to an image-pixel rectangle of the template's size.
MatchResult localize(const SimilarityMap& raw, const SimilarityMap& smoothed,
                     const FeatureGrid& tmpl, int target_origin_offset);

struct MatchOutput {
  MatchResult result;
  SimilarityMap raw;
  SimilarityMap smoothed;  // equals raw when smoothing is off
};

/// Full pipeline over prepared feature grids: NN field / similarity map /
/// smoothing / localization per the configured measure.
MatchOutput run_matcher(const FeatureGrid& target, const FeatureGrid& tmpl,
                        const MatcherConfig& config);

/// One map row per line, full-precision decimal, comma separated.
void write_map_csv(const SimilarityMap& map, const std::string& path);
/// Min-max scaled 16-bit PGM for visual inspection.
void write_map_pgm16(const SimilarityMap& map, const std::string& path);

}  // namespace ddis
