#pragma once

// Randomized-smoothing SVRG and the baseline solvers. Every solver emits a
// RunTrace with one record per trace point; baselines are sampled at the same
// cumulative subgradient budgets as the RS-SVRG epoch boundaries.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rssvrg/objective.hpp"
#include "rssvrg/smoothing.hpp"

namespace rssvrg {

/// Per-epoch constants: radius a_s = a0 * phi^s, step gamma_s = a_s / (c_step * l1),
/// inner count M_s = 2^s * M (optionally capped).
struct EpochSchedule {
  double a0 = 1.0;
  double phi = 0.125;
  std::size_t inner_m = 2;
  double l1 = 1.0;
  double c_step = 25.0;
  /// Upper bound on M_s; 0 means unlimited.
  std::size_t inner_cap = 0;

  double radius(int s) const;
  double step(int s) const;
  std::size_t inner_count(int s) const;

  /// Throws InputError unless a0 > 0, 0 < phi < 1, M >= 1, l1 > 0, c_step > 0.
  void validate() const;
};

enum class SolverKind { rs_svrg, prox_sgd, prox_fgd, rs_sgd, rs_sag };

std::string_view to_string(SolverKind kind);
SolverKind parse_solver_kind(std::string_view name);
/// All five, in the order used for comparisons.
const std::vector<SolverKind>& all_solvers();

struct SolverConfig {
  SolverKind solver = SolverKind::rs_svrg;
  EpochSchedule schedule;
  SmoothingKind dist = SmoothingKind::gaussian;
  std::size_t m_samples = 5;
  int epochs = 10;
  std::uint64_t seed = 0;
  /// Defaults to the zero vector.
  std::optional<Point> x_init;
  /// RS-SVRG only: record mean ||v_t - full smoothed gradient(x_{t-1})||^2 per
  /// epoch. Costs a full smoothed gradient per inner step (not counted).
  bool track_variance = false;
  /// Record elapsed wall time; when false every wall_ms is 0 so traces are
  /// byte-reproducible.
  bool record_wall_time = false;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double objective = 0.0;
  std::uint64_t grad_evals = 0;
  double wall_ms = 0.0;
  std::optional<double> vr_variance;
};

struct RunTrace {
  SolverKind solver = SolverKind::rs_svrg;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> records;
  Point final_point;
};

/// Cumulative component-subgradient calls of RS-SVRG at the end of epochs
/// 1..S: sum_{k<=s} (N m + 2 m M_k).
std::vector<std::uint64_t> epoch_budgets(std::size_t n_components, std::size_t m_samples,
                                         const EpochSchedule& schedule, int epochs);

/// v = g_cur_i - g_anchor_i + g_anchor_full.
Point variance_reduced_gradient(ConstPointRef g_cur_i, ConstPointRef g_anchor_i, ConstPointRef g_anchor_full);

RunTrace run_rs_svrg(const CompositeProblem& problem, const SolverConfig& config);
RunTrace run_prox_sgd(const CompositeProblem& problem, const SolverConfig& config);
RunTrace run_prox_fgd(const CompositeProblem& problem, const SolverConfig& config);
RunTrace run_rs_sgd(const CompositeProblem& problem, const SolverConfig& config);
RunTrace run_rs_sag(const CompositeProblem& problem, const SolverConfig& config);

/// Dispatches on config.solver.
RunTrace run_solver(const CompositeProblem& problem, const SolverConfig& config);

}  // namespace rssvrg
