#include "ddis/matcher.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "ddis/measures.hpp"
#include "ddis/text.hpp"

namespace ddis {

namespace {

void check_window_fit(int target_w, int target_h, int tmpl_w, int tmpl_h) {
  if (tmpl_w > target_w || tmpl_h > target_h)
    throw std::invalid_argument("template grid larger than target grid");
}

void check_grids(const FeatureGrid& target, const FeatureGrid& tmpl) {
  if (target.dim() != tmpl.dim())
    throw std::invalid_argument("feature grids have mismatched descriptor dimensions");
  check_window_fit(target.width, target.height, tmpl.width, tmpl.height);
}

Eigen::Matrix2Xd template_cell_locations(const FeatureGrid& tmpl) {
  Eigen::Matrix2Xd locs(2, tmpl.cells());
  for (int y = 0; y < tmpl.height; ++y)
    for (int x = 0; x < tmpl.width; ++x)
      locs.col(tmpl.cell_index(x, y)) << static_cast<double>(x), static_cast<double>(y);
  return locs;
}

}  // namespace

Measure parse_measure(const std::string& name) {
  if (name == "ddis") return Measure::DDIS;
  if (name == "dis") return Measure::DIS;
  if (name == "bbs") return Measure::BBS;
  if (name == "ssd") return Measure::SSD;
  if (name == "sad") return Measure::SAD;
  if (name == "ncc") return Measure::NCC;
  throw std::invalid_argument("unknown measure: " + name);
}

std::string measure_name(Measure m) {
  switch (m) {
    case Measure::DDIS: return "ddis";
    case Measure::DIS: return "dis";
    case Measure::BBS: return "bbs";
    case Measure::SSD: return "ssd";
    case Measure::SAD: return "sad";
    case Measure::NCC: return "ncc";
  }
  return "?";
}

NnGrid compute_nn_grid(const FeatureGrid& target, const FeatureGrid& tmpl,
                       const std::optional<AnnParams>& ann, int workers) {
  check_grids(target, tmpl);
  NnGrid grid;
  grid.width = target.width;
  grid.height = target.height;
  grid.template_width = tmpl.width;
  grid.template_height = tmpl.height;
  grid.nn_index.resize(target.cells());
  grid.distance.resize(target.cells());

  if (!ann) {
    parallel_for(static_cast<std::size_t>(target.cells()), workers, [&](std::size_t c) {
      const auto e = exact_nn(target.data.col(static_cast<Eigen::Index>(c)), tmpl.data);
      grid.nn_index[static_cast<Eigen::Index>(c)] = static_cast<int>(e.index);
      grid.distance[static_cast<Eigen::Index>(c)] = e.distance;
    });
    return grid;
  }

  const AnnIndex index(tmpl.data, template_cell_locations(tmpl), *ann);
  const bool propagate = ann->propagation;
  parallel_for(static_cast<std::size_t>(target.height), workers, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < target.width; ++x) {
      const Eigen::Index c = grid.cell(x, y);
      std::optional<Eigen::Index> seed;
      if (propagate && x > 0) {
        // Left neighbor's match, shifted one template cell right when that
        // stays inside the template.
        const Eigen::Index prev = grid.nn_index[grid.cell(x - 1, y)];
        const Eigen::Index shifted =
            (prev % tmpl.width) + 1 < tmpl.width ? prev + 1 : prev;
        seed = shifted;
      }
      const auto r = index.query(target.data.col(c), seed);
      grid.nn_index[c] = static_cast<int>(r.index);
      // Report the full-dimension appearance distance even though the NN
      // was decided in reduced space.
      grid.distance[c] = (target.data.col(c) - tmpl.data.col(r.index)).norm();
    }
  });
  return grid;
}

namespace {

// Shared frame for the incremental-kappa sweeps: per map row, kappa counts
// over the leading window are built from scratch, then the window slides
// right one column at a time.
template <typename RowInit, typename Enter, typename Leave, typename Score>
void sweep_windows(const NnGrid& nn, int map_w, int map_h, int workers,
                   RowInit row_init, Enter enter, Leave leave, Score score) {
  const int tw = nn.template_width;
  const int th = nn.template_height;
  parallel_for(static_cast<std::size_t>(map_h), workers, [&](std::size_t row) {
    const int y0 = static_cast<int>(row);
    row_init();
    for (int wy = 0; wy < th; ++wy)
      for (int wx = 0; wx < tw; ++wx) enter(nn.nn_index[nn.cell(wx, y0 + wy)]);
    for (int x0 = 0;; ++x0) {
      score(x0, y0);
      if (x0 + 1 >= map_w) break;
      for (int wy = 0; wy < th; ++wy) {
        leave(nn.nn_index[nn.cell(x0, y0 + wy)]);
        enter(nn.nn_index[nn.cell(x0 + tw, y0 + wy)]);
      }
    }
  });
}

}  // namespace

SimilarityMap ddis_map(const NnGrid& nn, int workers) {
  check_window_fit(nn.width, nn.height, nn.template_width, nn.template_height);
  const int tw = nn.template_width;
  const int th = nn.template_height;
  const Eigen::Index l = static_cast<Eigen::Index>(tw) * th;
  SimilarityMap map(nn.width - tw + 1, nn.height - th + 1);

  // exp(1-k) for every possible count, and the deformation weight
  // 1/(r+1) for every (dx, dy) offset between a window-local cell and a
  // template cell; both depend only on small integer arguments.
  std::vector<double> exp1k(static_cast<std::size_t>(l) + 1);
  for (Eigen::Index k = 0; k <= l; ++k)
    exp1k[static_cast<std::size_t>(k)] = std::exp(1.0 - static_cast<double>(k));
  const int wspan = 2 * tw - 1;
  std::vector<double> weight(static_cast<std::size_t>(wspan) * (2 * th - 1));
  for (int dy = -(th - 1); dy <= th - 1; ++dy)
    for (int dx = -(tw - 1); dx <= tw - 1; ++dx)
      weight[static_cast<std::size_t>(dy + th - 1) * wspan + (dx + tw - 1)] =
          1.0 / (std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) + 1.0);

  struct RowState {
    std::vector<int> kappa;
  };
  thread_local RowState state;

  sweep_windows(
      nn, map.width, map.height, workers,
      [&] { state.kappa.assign(static_cast<std::size_t>(l), 0); },
      [&](int idx) { ++state.kappa[static_cast<std::size_t>(idx)]; },
      [&](int idx) { --state.kappa[static_cast<std::size_t>(idx)]; },
      [&](int x0, int y0) {
        double sum = 0.0;
        for (int wy = 0; wy < th; ++wy) {
          for (int wx = 0; wx < tw; ++wx) {
            const int idx = nn.nn_index[nn.cell(x0 + wx, y0 + wy)];
            const int dx = wx - idx % tw;
            const int dy = wy - idx / tw;
            sum += exp1k[static_cast<std::size_t>(state.kappa[static_cast<std::size_t>(idx)])] *
                   weight[static_cast<std::size_t>(dy + th - 1) * wspan + (dx + tw - 1)];
          }
        }
        map.at(x0, y0) = sum / static_cast<double>(l);
      });
  return map;
}

SimilarityMap dis_map(const NnGrid& nn, int workers) {
  check_window_fit(nn.width, nn.height, nn.template_width, nn.template_height);
  const int tw = nn.template_width;
  const int th = nn.template_height;
  const Eigen::Index l = static_cast<Eigen::Index>(tw) * th;
  SimilarityMap map(nn.width - tw + 1, nn.height - th + 1);

  struct RowState {
    std::vector<int> kappa;
    int unique = 0;
  };
  thread_local RowState state;

  sweep_windows(
      nn, map.width, map.height, workers,
      [&] {
        state.kappa.assign(static_cast<std::size_t>(l), 0);
        state.unique = 0;
      },
      [&](int idx) {
        if (state.kappa[static_cast<std::size_t>(idx)]++ == 0) ++state.unique;
      },
      [&](int idx) {
        if (--state.kappa[static_cast<std::size_t>(idx)] == 0) --state.unique;
      },
      [&](int x0, int y0) {
        map.at(x0, y0) = static_cast<double>(state.unique) / static_cast<double>(l);
      });
  return map;
}

SimilarityMap bbs_map_naive(const FeatureGrid& target, const FeatureGrid& tmpl,
                            int guard_cells, int workers) {
  check_grids(target, tmpl);
  if (target.cells() > guard_cells)
    throw std::runtime_error(
        "bbs_map_naive: target grid of " + std::to_string(target.cells()) +
        " cells exceeds the BBS size guard of " + std::to_string(guard_cells) +
        " cells");

  const int tw = tmpl.width, th = tmpl.height;
  const Eigen::Index l = tmpl.cells();
  SimilarityMap map(target.width - tw + 1, target.height - th + 1);
  const PointSet template_set{tmpl.data};

  parallel_for(static_cast<std::size_t>(map.height), workers, [&](std::size_t row) {
    const int y0 = static_cast<int>(row);
    Eigen::MatrixXd window(target.dim(), l);
    for (int x0 = 0; x0 < map.width; ++x0) {
      for (int wy = 0; wy < th; ++wy)
        window.middleCols(static_cast<Eigen::Index>(wy) * tw, tw) =
            target.data.middleCols(target.cell_index(x0, y0 + wy), tw);
      map.at(x0, y0) = bbs(PointSet{window}, template_set);
    }
  });
  return map;
}

SimilarityMap baseline_map(const FeatureGrid& target, const FeatureGrid& tmpl,
                           Measure measure, int workers) {
  check_grids(target, tmpl);
  if (measure != Measure::SSD && measure != Measure::SAD && measure != Measure::NCC)
    throw std::invalid_argument("baseline_map expects ssd, sad or ncc");

  const int tw = tmpl.width, th = tmpl.height;
  const Eigen::Index d = tmpl.dim();
  const auto l = static_cast<double>(tmpl.cells());
  SimilarityMap map(target.width - tw + 1, target.height - th + 1);

  Eigen::VectorXd tmpl_mean, tmpl_sd;
  Eigen::MatrixXd tmpl_centered;
  if (measure == Measure::NCC) {
    tmpl_mean = tmpl.data.rowwise().mean();
    tmpl_centered = tmpl.data.colwise() - tmpl_mean;
    tmpl_sd = (tmpl_centered.rowwise().squaredNorm() / l).cwiseSqrt();
  }

  parallel_for(static_cast<std::size_t>(map.height), workers, [&](std::size_t row) {
    const int y0 = static_cast<int>(row);
    Eigen::MatrixXd window(d, tmpl.cells());
    for (int x0 = 0; x0 < map.width; ++x0) {
      for (int wy = 0; wy < th; ++wy)
        window.middleCols(static_cast<Eigen::Index>(wy) * tw, tw) =
            target.data.middleCols(target.cell_index(x0, y0 + wy), tw);
      switch (measure) {
        case Measure::SSD:
          map.at(x0, y0) = -(window - tmpl.data).squaredNorm();
          break;
        case Measure::SAD:
          map.at(x0, y0) = -(window - tmpl.data).cwiseAbs().sum();
          break;
        default: {
          const Eigen::VectorXd w_mean = window.rowwise().mean();
          const Eigen::MatrixXd centered = window.colwise() - w_mean;
          double corr = 0.0;
          for (Eigen::Index c = 0; c < d; ++c) {
            const double w_var = centered.row(c).squaredNorm() / l;
            const double t_var = tmpl_sd[c] * tmpl_sd[c];
            // Rounding residue on a constant dimension counts as zero
            // variance; its correlation is undefined and contributes 0.
            if (t_var <= 1e-24 * (tmpl_mean[c] * tmpl_mean[c] + 1.0) ||
                w_var <= 1e-24 * (w_mean[c] * w_mean[c] + 1.0))
              continue;
            const double cross = centered.row(c).dot(tmpl_centered.row(c)) / l;
            corr += cross / (std::sqrt(w_var) * tmpl_sd[c]);
          }
          map.at(x0, y0) = corr / static_cast<double>(d);
        }
      }
    }
  });
  return map;
}

SimilarityMap smooth(const SimilarityMap& map, int template_grid_w,
                     int template_grid_h) {
  if (map.width <= 0 || map.height <= 0)
    throw std::invalid_argument("smooth: empty similarity map");
  const int kw = std::max(1, template_grid_w / 3);
  const int kh = std::max(1, template_grid_h / 3);

  Eigen::MatrixXd integral = Eigen::MatrixXd::Zero(map.height + 1, map.width + 1);
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      integral(y + 1, x + 1) = map.at(x, y) + integral(y, x + 1) +
                               integral(y + 1, x) - integral(y, x);

  SimilarityMap out(map.width, map.height);
  for (int y = 0; y < map.height; ++y) {
    const int y_lo = std::max(0, y - (kh - 1) / 2);
    const int y_hi = std::min(map.height - 1, y + kh / 2);
    for (int x = 0; x < map.width; ++x) {
      const int x_lo = std::max(0, x - (kw - 1) / 2);
      const int x_hi = std::min(map.width - 1, x + kw / 2);
      const double sum = integral(y_hi + 1, x_hi + 1) - integral(y_lo, x_hi + 1) -
                         integral(y_hi + 1, x_lo) + integral(y_lo, x_lo);
      out.at(x, y) = sum / (static_cast<double>(x_hi - x_lo + 1) * (y_hi - y_lo + 1));
    }
  }
  return out;
}

MatchResult localize(const SimilarityMap& raw, const SimilarityMap& smoothed,
                     const FeatureGrid& tmpl, int target_origin_offset) {
  if (raw.width != smoothed.width || raw.height != smoothed.height)
    throw std::invalid_argument("localize: map dimensions differ");
  int best_x = 0, best_y = 0;
  double best = smoothed.at(0, 0);
  for (int y = 0; y < smoothed.height; ++y)
    for (int x = 0; x < smoothed.width; ++x)
      if (smoothed.at(x, y) > best) {
        best = smoothed.at(x, y);
        best_x = x;
        best_y = y;
      }

  MatchResult r;
  // The window's top-left cell sits at image pixel (x0 + target offset);
  // backing off by the template's own origin offset yields the pixel rect.
  r.x = best_x + target_origin_offset - tmpl.origin_offset;
  r.y = best_y + target_origin_offset - tmpl.origin_offset;
  r.w = tmpl.width + 2 * tmpl.origin_offset;
  r.h = tmpl.height + 2 * tmpl.origin_offset;
  r.raw_score = raw.at(best_x, best_y);
  r.smoothed_score = smoothed.at(best_x, best_y);
  return r;
}

MatchOutput run_matcher(const FeatureGrid& target, const FeatureGrid& tmpl,
                        const MatcherConfig& config) {
  check_grids(target, tmpl);
  MatchOutput out;
  switch (config.measure) {
    case Measure::DDIS:
      out.raw = ddis_map(compute_nn_grid(target, tmpl, config.ann, config.workers),
                         config.workers);
      break;
    case Measure::DIS:
      out.raw = dis_map(compute_nn_grid(target, tmpl, config.ann, config.workers),
                        config.workers);
      break;
    case Measure::BBS:
      out.raw = bbs_map_naive(target, tmpl, config.bbs_guard_cells, config.workers);
      break;
    default:
      out.raw = baseline_map(target, tmpl, config.measure, config.workers);
      break;
  }
  out.smoothed = config.smoothing ? smooth(out.raw, tmpl.width, tmpl.height) : out.raw;
  out.result = localize(out.raw, out.smoothed, tmpl, target.origin_offset);
  return out;
}

void write_map_csv(const SimilarityMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write map CSV: " + path);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      if (x) out << ',';
      out << format_full(map.at(x, y));
    }
    out << '\n';
  }
}

void write_map_pgm16(const SimilarityMap& map, const std::string& path) {
  std::vector<double> values(static_cast<std::size_t>(map.width) * map.height);
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      values[static_cast<std::size_t>(y) * map.width + x] = map.at(x, y);
  save_pgm16(values, map.width, map.height, path);
}

}  // namespace ddis
