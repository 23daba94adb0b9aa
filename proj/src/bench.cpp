#include "ddis/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ddis/feature_grid.hpp"
#include "ddis/rng.hpp"

namespace ddis {

namespace {

void check_rect_in_image(const Rect& r, const Image& img, const std::string& what) {
  if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.x + r.w > img.width ||
      r.y + r.h > img.height)
    throw std::runtime_error(what + " rectangle outside image bounds");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int parse_int_field(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("manifest: bad integer in " + what + ": '" + s + "'");
  }
}

// Multi-octave bilinear value noise; enough low-frequency structure to look
// like an image and enough high-frequency detail that 3x3 patches are
// locally discriminative.
Image render_texture(int w, int h, Rng& rng) {
  const int cell_sizes[] = {16, 8, 4, 2};
  const double weights[] = {1.0, 0.55, 0.3, 0.15};
  double total_weight = 0.0;
  for (const double wt : weights) total_weight += wt;

  std::vector<double> acc(static_cast<std::size_t>(w) * h * 3, 0.0);
  for (int oct = 0; oct < 4; ++oct) {
    const int cell = cell_sizes[oct];
    const int gw = w / cell + 2, gh = h / cell + 2;
    std::vector<double> lattice(static_cast<std::size_t>(gw) * gh * 3);
    for (auto& v : lattice) v = rng.uniform01();
    for (int y = 0; y < h; ++y) {
      const double fy = static_cast<double>(y) / cell;
      const int y0 = static_cast<int>(fy);
      const double ty = fy - y0;
      for (int x = 0; x < w; ++x) {
        const double fx = static_cast<double>(x) / cell;
        const int x0 = static_cast<int>(fx);
        const double tx = fx - x0;
        for (int c = 0; c < 3; ++c) {
          const auto at = [&](int gx, int gy) {
            return lattice[(static_cast<std::size_t>(gy) * gw + gx) * 3 + c];
          };
          const double v = (1 - ty) * ((1 - tx) * at(x0, y0) + tx * at(x0 + 1, y0)) +
                           ty * ((1 - tx) * at(x0, y0 + 1) + tx * at(x0 + 1, y0 + 1));
          acc[(static_cast<std::size_t>(y) * w + x) * 3 + c] += weights[oct] * v;
        }
      }
    }
  }

  Image img(w, h);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double v = acc[i] / total_weight;
    img.data[i] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  }
  return img;
}

// Smooth scalar field in [-amplitude, amplitude], coarse 12px lattice.
std::vector<double> render_displacement(int w, int h, double amplitude, Rng& rng) {
  const int cell = 12;
  const int gw = w / cell + 2, gh = h / cell + 2;
  std::vector<double> lattice(static_cast<std::size_t>(gw) * gh);
  for (auto& v : lattice) v = rng.uniform(-amplitude, amplitude);
  std::vector<double> field(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const double fy = static_cast<double>(y) / cell;
    const int y0 = static_cast<int>(fy);
    const double ty = fy - y0;
    for (int x = 0; x < w; ++x) {
      const double fx = static_cast<double>(x) / cell;
      const int x0 = static_cast<int>(fx);
      const double tx = fx - x0;
      const auto at = [&](int gx, int gy) {
        return lattice[static_cast<std::size_t>(gy) * gw + gx];
      };
      field[static_cast<std::size_t>(y) * w + x] =
          (1 - ty) * ((1 - tx) * at(x0, y0) + tx * at(x0 + 1, y0)) +
          ty * ((1 - tx) * at(x0, y0 + 1) + tx * at(x0 + 1, y0 + 1));
    }
  }
  return field;
}

double sample_bilinear(const Image& img, double x, double y, int c) {
  x = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  const int x0 = std::min(static_cast<int>(x), img.width - 2 >= 0 ? img.width - 2 : 0);
  const int y0 = std::min(static_cast<int>(y), img.height - 2 >= 0 ? img.height - 2 : 0);
  const double tx = x - x0, ty = y - y0;
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  return (1 - ty) * ((1 - tx) * img.at(x0, y0, c) + tx * img.at(x1, y0, c)) +
         ty * ((1 - tx) * img.at(x0, y1, c) + tx * img.at(x1, y1, c));
}

}  // namespace

double iou(const Rect& a, const Rect& b) {
  const int ix = std::max(a.x, b.x);
  const int iy = std::max(a.y, b.y);
  const int ix2 = std::min(a.x + a.w, b.x + b.w);
  const int iy2 = std::min(a.y + a.h, b.y + b.h);
  const std::int64_t iw = std::max(0, ix2 - ix);
  const std::int64_t ih = std::max(0, iy2 - iy);
  const std::int64_t inter = iw * ih;
  const std::int64_t uni = static_cast<std::int64_t>(a.w) * a.h +
                           static_cast<std::int64_t>(b.w) * b.h - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

std::vector<PairRecord> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("manifest is empty: " + path);
  if (split_csv_line(line).size() != 10)
    throw std::runtime_error("manifest header must have 10 fields: " + path);

  std::vector<PairRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10)
      throw std::runtime_error("manifest line " + std::to_string(line_no) +
                               " must have 10 fields: " + path);
    PairRecord rec;
    rec.template_image = (base / f[0]).string();
    rec.template_rect = {parse_int_field(f[1], "tx"), parse_int_field(f[2], "ty"),
                         parse_int_field(f[3], "tw"), parse_int_field(f[4], "th")};
    rec.target_image = (base / f[5]).string();
    rec.truth_rect = {parse_int_field(f[6], "gx"), parse_int_field(f[7], "gy"),
                      parse_int_field(f[8], "gw"), parse_int_field(f[9], "gh")};
    records.push_back(std::move(rec));
  }
  return records;
}

void save_manifest(const std::vector<PairRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << "template_image,tx,ty,tw,th,target_image,gx,gy,gw,gh\n";
  for (const auto& r : records) {
    out << r.template_image << ',' << r.template_rect.x << ',' << r.template_rect.y
        << ',' << r.template_rect.w << ',' << r.template_rect.h << ','
        << r.target_image << ',' << r.truth_rect.x << ',' << r.truth_rect.y << ','
        << r.truth_rect.w << ',' << r.truth_rect.h << '\n';
  }
}

PairOutcome run_pair(const PairRecord& record, const MatcherConfig& config) {
  try {
    const auto start = std::chrono::steady_clock::now();
    const Image target_img = load_image(record.target_image);
    const Image template_src = load_image(record.template_image);
    check_rect_in_image(record.template_rect, template_src, "template");
    check_rect_in_image(record.truth_rect, target_img, "truth");

    const Image template_img =
        crop(template_src, record.template_rect.x, record.template_rect.y,
             record.template_rect.w, record.template_rect.h);
    const PatchSpec spec;
    const FeatureGrid target = extract_patch_features(target_img, spec);
    const FeatureGrid tmpl = extract_patch_features(template_img, spec);
    const MatchOutput out = run_matcher(target, tmpl, config);

    PairOutcome outcome;
    outcome.result = out.result;
    outcome.accuracy = iou({out.result.x, out.result.y, out.result.w, out.result.h},
                           record.truth_rect);
    outcome.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    return outcome;
  } catch (const std::exception& e) {
    throw std::runtime_error("pair [" + record.template_image + " -> " +
                             record.target_image + "]: " + e.what());
  }
}

SuccessCurve success_curve(const std::vector<double>& accuracies, double step) {
  if (accuracies.empty())
    throw std::invalid_argument("success_curve: empty accuracy list");
  if (!(step > 0)) throw std::invalid_argument("success_curve: step must be positive");
  SuccessCurve curve;
  for (int k = 0;; ++k) {
    const double t = k * step;
    if (t > 1.0 + 1e-9) break;
    curve.thresholds.push_back(t);
    const auto above = std::count_if(accuracies.begin(), accuracies.end(),
                                     [t](double a) { return a > t; });
    curve.fractions.push_back(static_cast<double>(above) /
                              static_cast<double>(accuracies.size()));
  }
  return curve;
}

double auc(const SuccessCurve& curve) {
  double sum = 0.0;
  for (const double f : curve.fractions) sum += f;
  return sum / static_cast<double>(curve.fractions.size());
}

PairRecord gen_synthetic(const SyntheticParams& params, const std::string& out_dir,
                         int pair_index) {
  if (params.template_size >= params.size || params.template_size < 8)
    throw std::invalid_argument(
        "gen_synthetic: template must be at least 8px and smaller than the target");
  if (params.occlusion_fraction < 0 || params.occlusion_fraction >= 1)
    throw std::invalid_argument("gen_synthetic: occlusion fraction must be in [0,1)");

  const int size = params.size;
  const int ts = params.template_size;
  const std::uint64_t base = mix64(params.seed, static_cast<std::uint64_t>(pair_index));
  Rng rng_template(mix64(base, 1));
  Rng rng_background(mix64(base, 2));
  Rng rng_jitter(mix64(base, 3));
  Rng rng_occluder(mix64(base, 4));
  Rng rng_noise(mix64(base, 5));
  Rng rng_layout(mix64(base, 6));

  const Image template_src = render_texture(size, size, rng_template);
  const int max_pos = size - ts;
  Rect template_rect;
  template_rect.x = static_cast<int>(rng_layout.uniform_index(max_pos + 1));
  template_rect.y = static_cast<int>(rng_layout.uniform_index(max_pos + 1));
  template_rect.w = template_rect.h = ts;

  const int span = 2 * params.shift + 1;
  Rect truth;
  truth.x = std::clamp(template_rect.x +
                           static_cast<int>(rng_layout.uniform_index(span)) - params.shift,
                       0, max_pos);
  truth.y = std::clamp(template_rect.y +
                           static_cast<int>(rng_layout.uniform_index(span)) - params.shift,
                       0, max_pos);
  truth.w = truth.h = ts;

  Image target = render_texture(size, size, rng_background);

  const auto jx = render_displacement(size, size, params.local_jitter, rng_jitter);
  const auto jy = render_displacement(size, size, params.local_jitter, rng_jitter);
  for (int y = truth.y; y < truth.y + ts; ++y) {
    for (int x = truth.x; x < truth.x + ts; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * size + x;
      const double sx = template_rect.x + (x - truth.x) + jx[i];
      const double sy = template_rect.y + (y - truth.y) + jy[i];
      for (int c = 0; c < 3; ++c)
        target.at(x, y, c) = static_cast<std::uint8_t>(
            std::lround(std::clamp(sample_bilinear(template_src, sx, sy, c), 0.0, 255.0)));
    }
  }

  if (params.occlusion_fraction > 0) {
    const int side = static_cast<int>(
        std::lround(ts * std::sqrt(params.occlusion_fraction)));
    if (side > 0) {
      const Image occluder = render_texture(side, side, rng_occluder);
      const int ox = truth.x + static_cast<int>(rng_layout.uniform_index(ts - side + 1));
      const int oy = truth.y + static_cast<int>(rng_layout.uniform_index(ts - side + 1));
      for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
          for (int c = 0; c < 3; ++c) target.at(ox + x, oy + y, c) = occluder.at(x, y, c);
    }
  }

  if (params.noise_sigma > 0) {
    for (auto& sample : target.data) {
      const double v = sample + 255.0 * params.noise_sigma * rng_noise.normal();
      sample = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
  }

  char stem[64];
  std::snprintf(stem, sizeof(stem), "pair_%04d", pair_index);
  const std::string template_name = std::string(stem) + "_template.ppm";
  const std::string target_name = std::string(stem) + "_target.ppm";
  std::filesystem::create_directories(out_dir);
  save_image(template_src, (std::filesystem::path(out_dir) / template_name).string());
  save_image(target, (std::filesystem::path(out_dir) / target_name).string());

  PairRecord rec;
  rec.template_image = template_name;  // relative to the manifest directory
  rec.template_rect = template_rect;
  rec.target_image = target_name;
  rec.truth_rect = truth;
  return rec;
}

}  // namespace ddis
