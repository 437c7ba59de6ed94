#pragma once

// Convolution smoothing F_a(x) = E[F(x + a Z)]: perturbation distributions,
// per-epoch perturbation batches and the m-sample smoothed gradient.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "rssvrg/objective.hpp"
#include "rssvrg/random.hpp"

namespace rssvrg {

enum class SmoothingKind { l2_ball, gaussian, linf_ball };

/// "l2ball", "gaussian", "linfball".
std::string_view to_string(SmoothingKind kind);
/// Inverse of to_string; throws InputError on unknown names.
SmoothingKind parse_smoothing_kind(std::string_view name);

/// Multipliers that turn L0 into the constants entering the convergence bound:
///   smoothed-gradient Lipschitz constant  l1_factor * L0 / a
///   smoothing bias  F_a <= F + bias_factor * L0 * a
///   estimator variance  B = variance_factor * L0^2 / m
struct DistributionConstants {
  double l1_factor;
  double bias_factor;
  double variance_factor;
};

class SmoothingDistribution {
 public:
  SmoothingDistribution(SmoothingKind kind, std::size_t dim);

  SmoothingKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }

  /// Writes one draw into `out` (length dim).
  void sample(RandomStream& rng, PointRef out) const;
  Point sample(RandomStream& rng) const;

  DistributionConstants constants() const;

 private:
  SmoothingKind kind_;
  std::size_t dim_;
};

/// The m perturbations Z_1..Z_m of one epoch, stored as the columns of a
/// dim x m matrix, together with the radius a_s they are scaled by.
struct PerturbationBatch {
  Eigen::MatrixXd samples;
  double radius = 0.0;
  int epoch = 0;

  std::size_t size() const { return static_cast<std::size_t>(samples.cols()); }
  std::size_t dim() const { return static_cast<std::size_t>(samples.rows()); }
};

/// Draws m i.i.d. samples column by column, so the first k columns of an
/// m-batch equal a k-batch drawn from an identically seeded stream.
PerturbationBatch sample_batch(const SmoothingDistribution& dist, std::size_t m, double radius, RandomStream& rng,
                               int epoch = 0);

/// out += scale * (1/m) sum_j g_i(x + a Z_j). No argument checks; for solver loops.
void add_smoothed_component_grad(const CompositeProblem& problem, std::size_t i, ConstPointRef x,
                                 const PerturbationBatch& batch, double scale, PointRef out);

/// (1/m) sum_j g_i(x + a Z_j) where g_i is the problem's chosen subgradient.
Point smoothed_component_grad(const CompositeProblem& problem, std::size_t i, ConstPointRef x,
                              const PerturbationBatch& batch);

/// (1/N) sum_i smoothed_component_grad(i, x).
Point smoothed_full_grad(const CompositeProblem& problem, ConstPointRef x, const PerturbationBatch& batch);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo estimate of F_a(x) = E[F(x + radius Z)] with its standard error
/// (sample standard deviation / sqrt(n_mc)).
MonteCarloEstimate estimate_smoothed_value(const CompositeProblem& problem, const SmoothingDistribution& dist,
                                           ConstPointRef x, double radius, std::size_t n_mc, RandomStream& rng);

}  // namespace rssvrg
