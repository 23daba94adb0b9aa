#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "ddis/rng.hpp"

namespace ddis {

struct GaussianSpec {
  double mu = 0.0;
  double sigma = 1.0;
};

/// How point locations are assigned in the 1D simulations. Positions are
/// sorted-list indices: Small sorts both sets ascending (matched points get
/// similar indices), Large sorts one set descending and the other ascending
/// (matched points get far-apart indices), Ignore assigns no locations
/// (every r_j = 0).
enum class DeformationMode { Small, Large, Ignore };

enum class SimMeasure { SSD, BBS, DIS, DDIS };

SimMeasure parse_sim_measure(const std::string& name);
DeformationMode parse_deformation_mode(const std::string& name);

/// Estimated expectation per (mu, sigma) cell. cells(i, j) pairs
/// mu_values[i] with sigma_values[j].
struct ExpectationGrid {
  std::vector<double> mu_values;
  std::vector<double> sigma_values;
  Eigen::MatrixXd cells;
  int trials = 0;
  int set_size_p = 0;
  int set_size_q = 0;
  std::uint64_t seed = 0;
};

/// n independent draws from N(mu, sigma^2); deterministic given the stream.
Eigen::VectorXd sample_set(int n, const GaussianSpec& spec, Rng& rng);

/// Mean over `trials` of the measure applied to fresh samples
/// P ~ p_spec (n points) and Q ~ q_spec (m points). DDIS assigns locations
/// per `mode` and uses 1D index distance as r_j. SSD is the sum of squared
/// differences between sort-aligned samples, negated; min-max normalization
/// to a similarity surface happens at grid level, not here.
double estimate_expectation(SimMeasure measure, DeformationMode mode,
                            const GaussianSpec& p_spec, const GaussianSpec& q_spec,
                            int n, int m, int trials, std::uint64_t seed);

/// One estimate per (mu, sigma) pair, P fixed at p_spec. Each cell's RNG
/// seed is derived from (seed, mu index, sigma index), so the grid is
/// identical regardless of evaluation order or worker count. SSD cells are
/// min-max normalized to [0, 1] across the grid.
ExpectationGrid expectation_grid(SimMeasure measure, DeformationMode mode,
                                 const GaussianSpec& p_spec,
                                 const std::vector<double>& mu_values,
                                 const std::vector<double>& sigma_values,
                                 int n, int m, int trials, std::uint64_t seed,
                                 int workers = 1);

/// Phi((x - mu) / sigma); absolute error below 1e-7.
double gaussian_cdf(double x, const GaussianSpec& spec);

/// Semi-analytic estimate of E[DIS] for same-size sets: Monte-Carlo over
/// draws of P of 1 - (F_Q(p_i^-) + 1 - F_Q(p_i^+))^n, where p_i^-/p_i^+ are
/// the midpoints toward the nearest smaller/larger template point (-inf or
/// +inf at the extremes). The inner term is averaged over every index i of
/// the drawn P; all indices are exchangeable, so this only reduces variance.
double dis_expectation_appendix(const GaussianSpec& p_spec,
                                const GaussianSpec& q_spec, int n, int trials,
                                std::uint64_t seed);

/// Header row of sigma values, one row per mu value (mu in the first
/// column), full-precision decimal cells.
void write_grid_csv(const ExpectationGrid& grid, const std::string& path);

}  // namespace ddis
