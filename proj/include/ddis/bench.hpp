#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddis/image.hpp"
#include "ddis/matcher.hpp"

namespace ddis {

struct Rect {
  int x = 0, y = 0, w = 0, h = 0;
};

/// Pixel-count intersection over union; 0 for disjoint rects.
double iou(const Rect& a, const Rect& b);

/// One evaluation pair: the template is cropped out of template_image at
/// template_rect and searched for in target_image; truth_rect is where it
/// actually is.
struct PairRecord {
  std::string template_image;
  Rect template_rect;
  std::string target_image;
  Rect truth_rect;
};

/// Manifest CSV: header template_image,tx,ty,tw,th,target_image,gx,gy,gw,gh,
/// one record per row. Image paths are stored relative to the manifest, and
/// load_manifest resolves them against the manifest's directory.
std::vector<PairRecord> load_manifest(const std::string& path);
void save_manifest(const std::vector<PairRecord>& records, const std::string& path);

struct PairOutcome {
  MatchResult result;
  double accuracy = 0.0;  // IoU against the truth rect
  double wall_ms = 0.0;
};

/// Loads both images, validates the rects against them, crops the template,
/// extracts 3x3 RGB patch features on both sides and runs the matcher.
/// Failures are rethrown with the offending record's paths attached.
PairOutcome run_pair(const PairRecord& record, const MatcherConfig& config);

/// fractions[k] = share of accuracies strictly above thresholds[k], over
/// the threshold ladder {0, step, ..., 1}.
struct SuccessCurve {
  std::vector<double> thresholds;
  std::vector<double> fractions;
};

SuccessCurve success_curve(const std::vector<double>& accuracies, double step = 0.01);

/// Rectangle-rule mean of the curve's fractions.
double auc(const SuccessCurve& curve);

/// Synthetic pair recipe. The template is cut from its own rendered
/// texture; the target gets a fresh background texture with the template
/// content planted at a shifted location under a smooth per-pixel jitter
/// field, partially overwritten by a distractor patch, then corrupted with
/// Gaussian pixel noise. noise_sigma is on the [0,1] sample scale.
struct SyntheticParams {
  int size = 128;
  int template_size = 48;
  double occlusion_fraction = 0.0;
  double noise_sigma = 0.0;
  int shift = 32;
  double local_jitter = 0.0;
  std::uint64_t seed = 0;
};

/// Writes pair_<index>_template.ppm and pair_<index>_target.ppm under
/// out_dir and returns the record (paths relative to out_dir). Byte-exact
/// reproducible for a given (params, index).
PairRecord gen_synthetic(const SyntheticParams& params, const std::string& out_dir,
                         int pair_index);

}  // namespace ddis
