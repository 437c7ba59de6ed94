#include "rssvrg/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rssvrg/errors.hpp"

namespace rssvrg {

std::string_view to_string(SmoothingKind kind) {
  switch (kind) {
    case SmoothingKind::l2_ball:
      return "l2ball";
    case SmoothingKind::gaussian:
      return "gaussian";
    case SmoothingKind::linf_ball:
      return "linfball";
  }
  return "unknown";
}

SmoothingKind parse_smoothing_kind(std::string_view name) {
  if (name == "l2ball") return SmoothingKind::l2_ball;
  if (name == "gaussian") return SmoothingKind::gaussian;
  if (name == "linfball") return SmoothingKind::linf_ball;
  throw InputError("unknown smoothing distribution '" + std::string(name) + "' (expected l2ball, gaussian, linfball)");
}

SmoothingDistribution::SmoothingDistribution(SmoothingKind kind, std::size_t dim) : kind_(kind), dim_(dim) {
  if (dim == 0) throw InputError("smoothing distribution needs dim >= 1");
}

void SmoothingDistribution::sample(RandomStream& rng, PointRef out) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  switch (kind_) {
    case SmoothingKind::gaussian:
      for (Eigen::Index j = 0; j < d; ++j) out[j] = rng.normal();
      break;
    case SmoothingKind::linf_ball:
      for (Eigen::Index j = 0; j < d; ++j) out[j] = rng.uniform(-1.0, 1.0);
      break;
    case SmoothingKind::l2_ball: {
      // Uniform direction times U^(1/d) radius.
      double norm = 0.0;
      do {
        for (Eigen::Index j = 0; j < d; ++j) out[j] = rng.normal();
        norm = out.norm();
      } while (norm == 0.0);
      const double r = std::pow(rng.uniform(), 1.0 / static_cast<double>(dim_));
      out *= r / norm;
      break;
    }
  }
}

Point SmoothingDistribution::sample(RandomStream& rng) const {
  Point z(static_cast<Eigen::Index>(dim_));
  sample(rng, z);
  return z;
}

DistributionConstants SmoothingDistribution::constants() const {
  const double d = static_cast<double>(dim_);
  switch (kind_) {
    case SmoothingKind::l2_ball:
      return {std::sqrt(d), 1.0, 1.0};
    case SmoothingKind::gaussian:
      return {1.0, std::sqrt(d), 1.0};
    case SmoothingKind::linf_ball:
      return {1.0, d / 2.0, 4.0};
  }
  return {1.0, 1.0, 1.0};
}

PerturbationBatch sample_batch(const SmoothingDistribution& dist, std::size_t m, double radius, RandomStream& rng,
                               int epoch) {
  if (m == 0) throw InputError("perturbation batch needs m >= 1 samples");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("smoothing radius must be positive and finite");
  PerturbationBatch batch;
  batch.samples.resize(static_cast<Eigen::Index>(dist.dim()), static_cast<Eigen::Index>(m));
  for (Eigen::Index j = 0; j < batch.samples.cols(); ++j) dist.sample(rng, batch.samples.col(j));
  batch.radius = radius;
  batch.epoch = epoch;
  return batch;
}

void add_smoothed_component_grad(const CompositeProblem& problem, std::size_t i, ConstPointRef x,
                                 const PerturbationBatch& batch, double scale, PointRef out) {
  const auto& f = problem.components();
  // Sum the raw subgradients first and scale once, so exactly cancelling
  // samples give an exact zero.
  thread_local Point shifted;
  thread_local Point acc;
  shifted.resize(x.size());
  acc.setZero(x.size());
  for (Eigen::Index j = 0; j < batch.samples.cols(); ++j) {
    shifted = x + batch.radius * batch.samples.col(j);
    f.add_subgradient(i, shifted, 1.0, acc);
  }
  out += (scale / static_cast<double>(batch.size())) * acc;
}

Point smoothed_component_grad(const CompositeProblem& problem, std::size_t i, ConstPointRef x,
                              const PerturbationBatch& batch) {
  problem.check_index(i);
  problem.check_point(x);
  if (batch.size() == 0) throw InputError("empty perturbation batch");
  if (batch.dim() != problem.dim()) throw InputError("perturbation batch dimension does not match problem");
  Point g = Point::Zero(x.size());
  add_smoothed_component_grad(problem, i, x, batch, 1.0, g);
  return g;
}

Point smoothed_full_grad(const CompositeProblem& problem, ConstPointRef x, const PerturbationBatch& batch) {
  problem.check_point(x);
  if (batch.size() == 0) throw InputError("empty perturbation batch");
  if (batch.dim() != problem.dim()) throw InputError("perturbation batch dimension does not match problem");
  const std::size_t n = problem.size();
  Point g = Point::Zero(x.size());
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) add_smoothed_component_grad(problem, i, x, batch, w, g);
  return g;
}

MonteCarloEstimate estimate_smoothed_value(const CompositeProblem& problem, const SmoothingDistribution& dist,
                                           ConstPointRef x, double radius, std::size_t n_mc, RandomStream& rng) {
  problem.check_point(x);
  if (n_mc < 2) throw InputError("Monte-Carlo estimate needs n_mc >= 2");
  if (dist.dim() != problem.dim()) throw InputError("distribution dimension does not match problem");
  Point z(x.size());
  Point shifted(x.size());
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < n_mc; ++k) {
    dist.sample(rng, z);
    shifted = x + radius * z;
    const double v = problem.components().mean_value(shifted);
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(n_mc - 1);
  return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(n_mc))};
}

}  // namespace rssvrg
