#pragma once

// Experiment harness: reference optimum, convergence-bound calculators,
// variance diagnostics, solver comparisons and parameter studies.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "rssvrg/objective.hpp"
#include "rssvrg/ranking.hpp"
#include "rssvrg/smoothing.hpp"
#include "rssvrg/solvers.hpp"

namespace rssvrg {

/// L1 = l1_factor(dist, d) * L0 for the given problem.
double smoothness_constant(const CompositeProblem& problem, SmoothingKind dist);

/// Copy of `base` with schedule.l1 set from the problem's L0 and the distribution.
SolverConfig configure_for(const CompositeProblem& problem, const SolverConfig& base);

struct ReferenceBudget {
  int svrg_epochs = 25;
  std::size_t svrg_inner_m = 8;
  /// Cap on the RS-SVRG inner count; 2^25 * 8 inner steps is not affordable.
  std::size_t svrg_inner_cap = 4096;
  std::uint64_t fgd_iterations = 100000;
};

struct ReferenceOptimum {
  double p_star = 0.0;
  Point x_star;
  std::uint64_t grad_evals = 0;
};

/// Best objective seen over the initial point, every RS-SVRG anchor of a long
/// run and every iterate of a long constant-step proximal full-gradient run.
/// p_star is an upper bound on min P.
ReferenceOptimum reference_optimum(const CompositeProblem& problem, const SolverConfig& base,
                                   const ReferenceBudget& budget = {});

struct BoundInputs {
  double gap0 = 0.0;       ///< P(x_init) - P(x*)
  double dist_sq0 = 0.0;   ///< ||x_init - x*||^2
  double l0 = 0.0;         ///< smoothing-bias constant (F_a <= F + l0 a)
  double l1 = 0.0;         ///< smoothed-gradient Lipschitz constant
  double a0 = 0.0;
  double inner_m = 0.0;    ///< base inner count M
  double variance_b = 0.0; ///< bound B on E||e_t||^2
  double sigma = 0.0;      ///< sub-Gaussian scale
  double delta1 = 0.5;
  double delta2 = 0.5;
};

/// D = 2 gap0 + 25 L1 dist_sq0 / (a0 M) + 3 L0 a0 + a0 M B / (24 L1).
double compute_bound_D(const BoundInputs& in);

struct DPrimeBound {
  double d_prime = 0.0;
  /// log2(D' / (delta1 * epsilon)); may be negative when epsilon is loose.
  double stage_threshold = 0.0;
};

/// D' = D + a0/(24 L1) * max{8 sigma^2 log(1/delta2), 12 sigma^2 sqrt(M log(1/delta2))}.
DPrimeBound compute_bound_Dprime(const BoundInputs& in, double epsilon);

/// BoundInputs with the distribution's constants: L1 = l1_factor L0,
/// bias constant bias_factor L0 and B = variance_factor L0^2 / m.
BoundInputs distribution_bound_inputs(const DistributionConstants& c, double l0, double a0, double inner_m,
                                      double m_samples, double gap0, double dist_sq0);

/// Mean over n_rep random components of ||g_i(x; fresh m-batch) - gbar_i||^2,
/// gbar_i being a 100 m-sample estimate. Components and perturbations come from
/// separate child streams of `rng`, so two calls with equally seeded streams
/// visit the same components whatever m is.
MonteCarloEstimate estimate_variance_B(const CompositeProblem& problem, const SmoothingDistribution& dist,
                                       ConstPointRef x, double radius, std::size_t m, std::size_t n_rep,
                                       RandomStream& rng);

struct SolverSeries {
  SolverKind solver = SolverKind::rs_svrg;
  std::vector<RunTrace> runs;                  ///< one per seed, in seed order
  std::vector<std::vector<double>> gaps;       ///< [seed][epoch]
  std::vector<double> median_gap;              ///< per epoch
};

struct ComparisonResult {
  /// Reference value actually used: min of the supplied p_star and every
  /// objective any run reached.
  double p_star = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<SolverSeries> series;

  const SolverSeries& of(SolverKind kind) const;
};

ComparisonResult run_comparison(const CompositeProblem& problem, const std::vector<SolverKind>& solvers,
                                const std::vector<std::uint64_t>& seeds, const SolverConfig& base, double p_star);

/// Largest difference in cumulative subgradient calls between solvers at the
/// given trace index (over all seeds).
std::uint64_t budget_spread(const ComparisonResult& result, std::size_t epoch_index);

double median(std::vector<double> values);

enum class StudyAxis { sampling_m, dimension_d };
std::string_view to_string(StudyAxis axis);
StudyAxis parse_study_axis(std::string_view name);

struct StudySetup {
  std::size_t n_pairs = 1000;
  std::size_t base_dim = 10;
  std::uint64_t instance_seed = 7;
  RegSetting reg = RegSetting::ridge;
  /// RS-SVRG settings shared by every grid point (schedule.l1 is recomputed).
  SolverConfig base;
  std::vector<std::uint64_t> seeds;
  ReferenceBudget reference;
};

struct StudyPoint {
  double value = 0.0;
  double p_star = 0.0;
  double median_final_gap = 0.0;
  ComparisonResult comparison;
};

struct StudyResult {
  StudyAxis axis = StudyAxis::sampling_m;
  std::vector<StudyPoint> points;

  std::vector<double> grid() const;
  std::vector<double> median_final_gaps() const;
};

/// Sweeps m (fixed instance) or d (fresh instance per d, feature range
/// shrunk by sqrt(d / base_dim) so ||u_i|| stays comparable) with RS-SVRG.
StudyResult run_study(StudyAxis axis, const std::vector<double>& grid, const StudySetup& setup);

}  // namespace rssvrg
