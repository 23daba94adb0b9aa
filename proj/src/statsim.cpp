#include "ddis/statsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ddis/measures.hpp"
#include "ddis/parallel.hpp"
#include "ddis/point_set.hpp"
#include "ddis/text.hpp"

namespace ddis {

namespace {

// rank[j] = position of element j in the sorted order (ascending or
// descending), ties by original index.
std::vector<int> sorted_ranks(const Eigen::VectorXd& values, bool ascending) {
  std::vector<int> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values[a] != values[b])
      return ascending ? values[a] < values[b] : values[a] > values[b];
    return a < b;
  });
  std::vector<int> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r)
    rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  return rank;
}

PointSet make_set(const Eigen::VectorXd& values) {
  return PointSet{values.transpose()};
}

PointSet make_set_with_ranks(const Eigen::VectorXd& values, bool ascending) {
  const auto ranks = sorted_ranks(values, ascending);
  Eigen::Matrix2Xd locs(2, values.size());
  for (Eigen::Index j = 0; j < values.size(); ++j)
    locs.col(j) << static_cast<double>(ranks[static_cast<std::size_t>(j)]), 0.0;
  return PointSet{values.transpose(), locs};
}

double negated_sorted_ssd(Eigen::VectorXd p, Eigen::VectorXd q) {
  std::sort(p.begin(), p.end());
  std::sort(q.begin(), q.end());
  const Eigen::Index k = std::min(p.size(), q.size());
  return -(p.head(k) - q.head(k)).squaredNorm();
}

}  // namespace

SimMeasure parse_sim_measure(const std::string& name) {
  if (name == "ssd") return SimMeasure::SSD;
  if (name == "bbs") return SimMeasure::BBS;
  if (name == "dis") return SimMeasure::DIS;
  if (name == "ddis") return SimMeasure::DDIS;
  throw std::invalid_argument("unknown simulation measure: " + name);
}

DeformationMode parse_deformation_mode(const std::string& name) {
  if (name == "small") return DeformationMode::Small;
  if (name == "large") return DeformationMode::Large;
  if (name == "ignore") return DeformationMode::Ignore;
  throw std::invalid_argument("unknown deformation mode: " + name);
}

Eigen::VectorXd sample_set(int n, const GaussianSpec& spec, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_set: n must be positive");
  // sigma = 0 is the point mass at mu; the parameter grids include it.
  if (spec.sigma < 0) throw std::invalid_argument("sample_set: sigma must be >= 0");
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = rng.normal(spec.mu, spec.sigma);
  return out;
}

double estimate_expectation(SimMeasure measure, DeformationMode mode,
                            const GaussianSpec& p_spec, const GaussianSpec& q_spec,
                            int n, int m, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("estimate_expectation: trials must be positive");
  if (n < 1 || m < 1) throw std::invalid_argument("estimate_expectation: empty point set");

  Rng rng(seed);
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd p = sample_set(n, p_spec, rng);
    const Eigen::VectorXd q = sample_set(m, q_spec, rng);
    switch (measure) {
      case SimMeasure::SSD:
        sum += negated_sorted_ssd(p, q);
        break;
      case SimMeasure::BBS:
        sum += bbs(make_set(p), make_set(q));
        break;
      case SimMeasure::DIS:
        sum += dis(make_set(q), make_set(p));
        break;
      case SimMeasure::DDIS:
        if (mode == DeformationMode::Ignore) {
          sum += ddis(make_set(q), make_set(p));
        } else {
          // Large deformation sorts P descending; Small sorts both ascending.
          const bool p_ascending = mode == DeformationMode::Small;
          sum += ddis(make_set_with_ranks(q, true),
                      make_set_with_ranks(p, p_ascending));
        }
        break;
    }
  }
  return sum / static_cast<double>(trials);
}

ExpectationGrid expectation_grid(SimMeasure measure, DeformationMode mode,
                                 const GaussianSpec& p_spec,
                                 const std::vector<double>& mu_values,
                                 const std::vector<double>& sigma_values,
                                 int n, int m, int trials, std::uint64_t seed,
                                 int workers) {
  if (mu_values.empty() || sigma_values.empty())
    throw std::invalid_argument("expectation_grid: empty parameter range");

  ExpectationGrid grid;
  grid.mu_values = mu_values;
  grid.sigma_values = sigma_values;
  grid.trials = trials;
  grid.set_size_p = n;
  grid.set_size_q = m;
  grid.seed = seed;
  grid.cells.resize(static_cast<Eigen::Index>(mu_values.size()),
                    static_cast<Eigen::Index>(sigma_values.size()));

  const std::size_t total = mu_values.size() * sigma_values.size();
  parallel_for(total, workers, [&](std::size_t c) {
    const auto i = static_cast<Eigen::Index>(c / sigma_values.size());
    const auto j = static_cast<Eigen::Index>(c % sigma_values.size());
    const GaussianSpec q_spec{mu_values[static_cast<std::size_t>(i)],
                              sigma_values[static_cast<std::size_t>(j)]};
    grid.cells(i, j) =
        estimate_expectation(measure, mode, p_spec, q_spec, n, m, trials,
                             mix64(seed, static_cast<std::uint64_t>(i),
                                   static_cast<std::uint64_t>(j)));
  });

  if (measure == SimMeasure::SSD) {
    const double lo = grid.cells.minCoeff();
    const double hi = grid.cells.maxCoeff();
    if (hi > lo)
      grid.cells = (grid.cells.array() - lo) / (hi - lo);
    else
      grid.cells.setZero();
  }
  return grid;
}

double gaussian_cdf(double x, const GaussianSpec& spec) {
  if (!(spec.sigma > 0)) throw std::invalid_argument("gaussian_cdf: sigma must be positive");
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-(x - spec.mu) / (spec.sigma * std::sqrt(2.0)));
}

double dis_expectation_appendix(const GaussianSpec& p_spec,
                                const GaussianSpec& q_spec, int n, int trials,
                                std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("dis_expectation_appendix: n must be positive");
  if (trials < 1)
    throw std::invalid_argument("dis_expectation_appendix: trials must be positive");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  double miss_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd p = sample_set(n, p_spec, rng);
    std::sort(p.begin(), p.end());
    double trial = 0.0;
    for (int i = 0; i < n; ++i) {
      const double lo = i > 0 ? p[i] - (p[i] - p[i - 1]) / 2.0 : -kInf;
      const double hi = i + 1 < n ? p[i] + (p[i + 1] - p[i]) / 2.0 : kInf;
      trial += std::pow(gaussian_cdf(lo, q_spec) + 1.0 - gaussian_cdf(hi, q_spec),
                        static_cast<double>(n));
    }
    miss_sum += trial / static_cast<double>(n);
  }
  return 1.0 - miss_sum / static_cast<double>(trials);
}

void write_grid_csv(const ExpectationGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grid CSV: " + path);
  out << "mu\\sigma";
  for (const double s : grid.sigma_values) out << ',' << format_full(s);
  out << '\n';
  for (Eigen::Index i = 0; i < grid.cells.rows(); ++i) {
    out << format_full(grid.mu_values[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < grid.cells.cols(); ++j)
      out << ',' << format_full(grid.cells(i, j));
    out << '\n';
  }
}

}  // namespace ddis
