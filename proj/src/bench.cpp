#include "rssvrg/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rssvrg/errors.hpp"

namespace rssvrg {

namespace {

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw InputError(std::string("bound input ") + name + " must be finite and >= 0");
}

}  // namespace

double smoothness_constant(const CompositeProblem& problem, SmoothingKind dist) {
  const SmoothingDistribution d(dist, problem.dim());
  return d.constants().l1_factor * problem.lipschitz_l0();
}

SolverConfig configure_for(const CompositeProblem& problem, const SolverConfig& base) {
  SolverConfig cfg = base;
  cfg.schedule.l1 = smoothness_constant(problem, base.dist);
  if (!(cfg.schedule.l1 > 0.0)) throw InputError("problem has L0 = 0; cannot derive a step size");
  return cfg;
}

ReferenceOptimum reference_optimum(const CompositeProblem& problem, const SolverConfig& base,
                                   const ReferenceBudget& budget) {
  ReferenceOptimum best;
  best.x_star = base.x_init ? *base.x_init : Point::Zero(static_cast<Eigen::Index>(problem.dim()));
  best.p_star = problem.objective(best.x_star);
  if (!std::isfinite(best.p_star)) throw DivergenceError("reference_optimum: non-finite objective at the start point");

  auto consider = [&](const Point& x, double p) {
    if (!std::isfinite(p)) throw DivergenceError("reference_optimum: non-finite objective");
    if (p < best.p_star) {
      best.p_star = p;
      best.x_star = x;
    }
  };

  if (budget.svrg_epochs > 0) {
    SolverConfig cfg = base;
    cfg.solver = SolverKind::rs_svrg;
    cfg.epochs = budget.svrg_epochs;
    cfg.schedule.inner_m = budget.svrg_inner_m;
    cfg.schedule.inner_cap = budget.svrg_inner_cap;
    cfg.track_variance = false;
    const RunTrace trace = run_rs_svrg(problem, cfg);
    for (const auto& rec : trace.records) {
      if (!std::isfinite(rec.objective)) throw DivergenceError("reference_optimum: non-finite objective");
    }
    consider(trace.final_point, problem.objective(trace.final_point));
    best.grad_evals += trace.records.back().grad_evals;
  }

  if (budget.fgd_iterations > 0) {
    const double gamma = base.schedule.a0 / (base.schedule.c_step * base.schedule.l1);
    Point x = base.x_init ? *base.x_init : Point::Zero(static_cast<Eigen::Index>(problem.dim()));
    Point g(x.size());
    const auto& f = problem.components();
    for (std::uint64_t t = 0; t < budget.fgd_iterations; ++t) {
      g.setZero();
      f.add_mean_subgradient(x, 1.0, g);
      x -= gamma * g;
      problem.regularizer().prox_in_place(x, gamma);
      consider(x, problem.objective(x));
    }
    best.grad_evals += budget.fgd_iterations * problem.size();
  }
  return best;
}

double compute_bound_D(const BoundInputs& in) {
  require_nonnegative(in.gap0, "gap0");
  require_nonnegative(in.dist_sq0, "dist_sq0");
  require_nonnegative(in.l0, "l0");
  require_nonnegative(in.a0, "a0");
  require_nonnegative(in.variance_b, "B");
  if (!(in.l1 > 0.0) || !std::isfinite(in.l1)) throw InputError("bound input l1 must be positive");
  if (!(in.inner_m > 0.0) || !std::isfinite(in.inner_m)) throw InputError("bound input M must be positive");
  if (!(in.a0 > 0.0)) throw InputError("bound input a0 must be positive");
  const double am = in.a0 * in.inner_m;
  return 2.0 * in.gap0 + 25.0 * in.l1 * in.dist_sq0 / am + 3.0 * in.l0 * in.a0 + am * in.variance_b / (24.0 * in.l1);
}

DPrimeBound compute_bound_Dprime(const BoundInputs& in, double epsilon) {
  if (!(in.delta1 > 0.0 && in.delta1 < 1.0)) throw InputError("delta1 must lie in (0, 1)");
  if (!(in.delta2 > 0.0 && in.delta2 < 1.0)) throw InputError("delta2 must lie in (0, 1)");
  require_nonnegative(in.sigma, "sigma");
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  const double d = compute_bound_D(in);
  const double log_inv = std::log(1.0 / in.delta2);
  const double s2 = in.sigma * in.sigma;
  const double tail = std::max(8.0 * s2 * log_inv, 12.0 * s2 * std::sqrt(in.inner_m * log_inv));
  DPrimeBound out;
  out.d_prime = d + in.a0 / (24.0 * in.l1) * tail;
  out.stage_threshold = std::log(out.d_prime / (in.delta1 * epsilon)) / std::log(2.0);
  return out;
}

BoundInputs distribution_bound_inputs(const DistributionConstants& c, double l0, double a0, double inner_m,
                                      double m_samples, double gap0, double dist_sq0) {
  if (!(m_samples > 0.0)) throw InputError("m_samples must be positive");
  BoundInputs in;
  in.gap0 = gap0;
  in.dist_sq0 = dist_sq0;
  in.l0 = c.bias_factor * l0;
  in.l1 = c.l1_factor * l0;
  in.a0 = a0;
  in.inner_m = inner_m;
  in.variance_b = c.variance_factor * l0 * l0 / m_samples;
  return in;
}

MonteCarloEstimate estimate_variance_B(const CompositeProblem& problem, const SmoothingDistribution& dist,
                                       ConstPointRef x, double radius, std::size_t m, std::size_t n_rep,
                                       RandomStream& rng) {
  problem.check_point(x);
  if (n_rep < 30) throw InputError("estimate_variance_B needs n_rep >= 30");
  if (m == 0) throw InputError("estimate_variance_B needs m >= 1");
  RandomStream pick(rng.engine()());
  RandomStream perturb(rng.engine()());
  const std::size_t n = problem.size();
  Point reference(x.size());
  Point estimate(x.size());
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < n_rep; ++k) {
    const std::size_t i = pick.index(n);
    const PerturbationBatch big = sample_batch(dist, 100 * m, radius, perturb);
    const PerturbationBatch small = sample_batch(dist, m, radius, perturb);
    reference.setZero();
    add_smoothed_component_grad(problem, i, x, big, 1.0, reference);
    estimate.setZero();
    add_smoothed_component_grad(problem, i, x, small, 1.0, estimate);
    const double v = (estimate - reference).squaredNorm();
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(n_rep - 1);
  return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(n_rep))};
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size() / 2;
  return values.size() % 2 ? values[k] : 0.5 * (values[k - 1] + values[k]);
}

const SolverSeries& ComparisonResult::of(SolverKind kind) const {
  for (const auto& s : series) {
    if (s.solver == kind) return s;
  }
  throw InputError("comparison has no series for " + std::string(to_string(kind)));
}

ComparisonResult run_comparison(const CompositeProblem& problem, const std::vector<SolverKind>& solvers,
                                const std::vector<std::uint64_t>& seeds, const SolverConfig& base, double p_star) {
  if (solvers.empty()) throw InputError("run_comparison needs at least one solver");
  if (seeds.empty()) throw InputError("run_comparison needs at least one seed");
  ComparisonResult result;
  result.seeds = seeds;
  result.p_star = p_star;
  for (SolverKind kind : solvers) {
    SolverSeries series;
    series.solver = kind;
    for (std::uint64_t seed : seeds) {
      SolverConfig cfg = base;
      cfg.solver = kind;
      cfg.seed = seed;
      series.runs.push_back(run_solver(problem, cfg));
      for (const auto& rec : series.runs.back().records) result.p_star = std::min(result.p_star, rec.objective);
    }
    result.series.push_back(std::move(series));
  }
  for (auto& series : result.series) {
    const std::size_t epochs = series.runs.front().records.size();
    series.gaps.assign(series.runs.size(), std::vector<double>(epochs));
    series.median_gap.assign(epochs, 0.0);
    for (std::size_t r = 0; r < series.runs.size(); ++r) {
      for (std::size_t e = 0; e < epochs; ++e) {
        series.gaps[r][e] = series.runs[r].records[e].objective - result.p_star;
      }
    }
    for (std::size_t e = 0; e < epochs; ++e) {
      std::vector<double> column;
      column.reserve(series.runs.size());
      for (const auto& g : series.gaps) column.push_back(g[e]);
      series.median_gap[e] = median(std::move(column));
    }
  }
  return result;
}

std::uint64_t budget_spread(const ComparisonResult& result, std::size_t epoch_index) {
  std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t hi = 0;
  for (const auto& series : result.series) {
    for (const auto& run : series.runs) {
      const std::uint64_t c = run.records.at(epoch_index).grad_evals;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  return hi - lo;
}

std::string_view to_string(StudyAxis axis) {
  return axis == StudyAxis::sampling_m ? "sampling_m" : "dimension_d";
}

StudyAxis parse_study_axis(std::string_view name) {
  if (name == "sampling_m" || name == "sampling" || name == "m") return StudyAxis::sampling_m;
  if (name == "dimension_d" || name == "dimension" || name == "d") return StudyAxis::dimension_d;
  throw InputError("unknown study axis '" + std::string(name) + "' (expected sampling or dimension)");
}

std::vector<double> StudyResult::grid() const {
  std::vector<double> g;
  for (const auto& p : points) g.push_back(p.value);
  return g;
}

std::vector<double> StudyResult::median_final_gaps() const {
  std::vector<double> g;
  for (const auto& p : points) g.push_back(p.median_final_gap);
  return g;
}

StudyResult run_study(StudyAxis axis, const std::vector<double>& grid, const StudySetup& setup) {
  if (grid.empty()) throw InputError("study grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 1.0) || grid[k] != std::floor(grid[k])) throw InputError("study grid values must be integers >= 1");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw InputError("study grid must be strictly increasing");
  }
  if (setup.seeds.empty()) throw InputError("study needs at least one seed");

  StudyResult result;
  result.axis = axis;
  const std::vector<SolverKind> solvers{SolverKind::rs_svrg};

  auto run_point = [&](const CompositeProblem& problem, const SolverConfig& cfg, double value, double p_star) {
    StudyPoint point;
    point.value = value;
    point.comparison = run_comparison(problem, solvers, setup.seeds, cfg, p_star);
    point.p_star = point.comparison.p_star;
    point.median_final_gap = point.comparison.series.front().median_gap.back();
    result.points.push_back(std::move(point));
  };

  if (axis == StudyAxis::sampling_m) {
    const RankingInstance inst = generate_instance(setup.n_pairs, setup.base_dim, setup.instance_seed, setup.reg);
    const CompositeProblem problem = to_problem(inst);
    const SolverConfig tuned = configure_for(problem, setup.base);
    const double p_star = reference_optimum(problem, tuned, setup.reference).p_star;
    for (double m : grid) {
      SolverConfig cfg = tuned;
      cfg.m_samples = static_cast<std::size_t>(m);
      run_point(problem, cfg, m, p_star);
    }
  } else {
    for (double dv : grid) {
      const auto d = static_cast<std::size_t>(dv);
      const double feature_max = 100.0 / std::sqrt(dv / static_cast<double>(setup.base_dim));
      const RankingInstance inst = generate_instance(setup.n_pairs, d, setup.instance_seed, setup.reg, feature_max);
      const CompositeProblem problem = to_problem(inst);
      const SolverConfig cfg = configure_for(problem, setup.base);
      const double p_star = reference_optimum(problem, cfg, setup.reference).p_star;
      run_point(problem, cfg, dv, p_star);
    }
  }
  return result;
}

}  // namespace rssvrg
