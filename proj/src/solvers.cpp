#include "rssvrg/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "rssvrg/errors.hpp"

namespace rssvrg {

namespace {

// Stream ids for RandomStream::derive.
constexpr std::uint64_t kComponentStream = 1;
constexpr std::uint64_t kPerturbationStream = 2;

class WallClock {
 public:
  explicit WallClock(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

Point initial_point(const CompositeProblem& problem, const SolverConfig& config) {
  if (!config.x_init) return Point::Zero(static_cast<Eigen::Index>(problem.dim()));
  problem.check_point(*config.x_init);
  if (!all_finite(*config.x_init)) throw InputError("initial point has non-finite entries");
  return *config.x_init;
}

[[noreturn]] void diverged(SolverKind kind, int epoch, std::uint64_t step, double gamma) {
  throw DivergenceError(std::string(to_string(kind)) + ": non-finite iterate at epoch " + std::to_string(epoch) +
                        ", step " + std::to_string(step) + " (step size " + std::to_string(gamma) +
                        "); check the Lipschitz constant and schedule");
}

double checked_objective(const CompositeProblem& problem, ConstPointRef x, SolverKind kind, int epoch) {
  const double p = problem.objective(x);
  if (!std::isfinite(p)) {
    throw DivergenceError(std::string(to_string(kind)) + ": non-finite objective at epoch " + std::to_string(epoch));
  }
  return p;
}

// Shared driver for the baselines: run `step(t)` (which performs one update and
// returns its subgradient cost) until each RS-SVRG epoch budget is reached,
// recording the current iterate's objective at every budget.
template <class StepFn>
RunTrace run_budget_matched(const CompositeProblem& problem, const SolverConfig& config, SolverKind kind, Point& x,
                            StepFn&& step) {
  const auto budgets = epoch_budgets(problem.size(), config.m_samples, config.schedule, config.epochs);
  const WallClock clock(config.record_wall_time);
  RunTrace trace;
  trace.solver = kind;
  trace.seed = config.seed;
  trace.records.reserve(budgets.size());
  std::uint64_t calls = 0;
  std::uint64_t t = 0;
  for (std::size_t s = 0; s < budgets.size(); ++s) {
    const int epoch = static_cast<int>(s) + 1;
    while (calls < budgets[s]) {
      ++t;
      const auto [cost, gamma] = step(t);
      calls += cost;
      if (!all_finite(x)) diverged(kind, epoch, t, gamma);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.objective = checked_objective(problem, x, kind, epoch);
    rec.grad_evals = calls;
    rec.wall_ms = clock.elapsed_ms();
    trace.records.push_back(rec);
  }
  trace.final_point = x;
  return trace;
}

struct StepResult {
  std::uint64_t cost;
  double gamma;
};

}  // namespace

double EpochSchedule::radius(int s) const { return a0 * std::pow(phi, s); }

double EpochSchedule::step(int s) const { return radius(s) / (c_step * l1); }

std::size_t EpochSchedule::inner_count(int s) const {
  constexpr std::size_t kMax = static_cast<std::size_t>(-1);
  std::size_t count = kMax;
  if (s < 63 && inner_m <= (kMax >> s)) count = (std::size_t{1} << s) * inner_m;
  if (inner_cap != 0 && count > inner_cap) return inner_cap;
  return count;
}

void EpochSchedule::validate() const {
  if (!(a0 > 0.0) || !std::isfinite(a0)) throw InputError("a0 must be positive");
  if (!(phi > 0.0 && phi < 1.0)) throw InputError("phi must lie in (0, 1)");
  if (inner_m == 0) throw InputError("inner M must be >= 1");
  if (!(l1 > 0.0) || !std::isfinite(l1)) throw InputError("L1 must be positive");
  if (!(c_step > 0.0) || !std::isfinite(c_step)) throw InputError("c_step must be positive");
}

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::rs_svrg:
      return "rs_svrg";
    case SolverKind::prox_sgd:
      return "prox_sgd";
    case SolverKind::prox_fgd:
      return "prox_fgd";
    case SolverKind::rs_sgd:
      return "rs_sgd";
    case SolverKind::rs_sag:
      return "rs_sag";
  }
  return "unknown";
}

SolverKind parse_solver_kind(std::string_view name) {
  for (SolverKind k : all_solvers()) {
    if (to_string(k) == name) return k;
  }
  throw InputError("unknown solver '" + std::string(name) + "' (expected rs_svrg, prox_sgd, prox_fgd, rs_sgd, rs_sag)");
}

const std::vector<SolverKind>& all_solvers() {
  static const std::vector<SolverKind> kinds{SolverKind::rs_svrg, SolverKind::prox_sgd, SolverKind::prox_fgd,
                                             SolverKind::rs_sgd, SolverKind::rs_sag};
  return kinds;
}

void SolverConfig::validate() const {
  schedule.validate();
  if (m_samples == 0) throw InputError("m_samples must be >= 1");
  if (epochs < 1) throw InputError("epochs must be >= 1");
  if (epochs > 60) throw InputError("epochs must be <= 60");
}

std::vector<std::uint64_t> epoch_budgets(std::size_t n_components, std::size_t m_samples,
                                         const EpochSchedule& schedule, int epochs) {
  std::vector<std::uint64_t> budgets;
  budgets.reserve(static_cast<std::size_t>(std::max(epochs, 0)));
  std::uint64_t total = 0;
  for (int s = 1; s <= epochs; ++s) {
    total += static_cast<std::uint64_t>(n_components) * m_samples +
             2ULL * m_samples * static_cast<std::uint64_t>(schedule.inner_count(s));
    budgets.push_back(total);
  }
  return budgets;
}

Point variance_reduced_gradient(ConstPointRef g_cur_i, ConstPointRef g_anchor_i, ConstPointRef g_anchor_full) {
  if (g_cur_i.size() != g_anchor_i.size() || g_cur_i.size() != g_anchor_full.size()) {
    throw InputError("variance_reduced_gradient: dimension mismatch");
  }
  return g_cur_i - g_anchor_i + g_anchor_full;
}

RunTrace run_rs_svrg(const CompositeProblem& problem, const SolverConfig& config) {
  config.validate();
  if (config.solver != SolverKind::rs_svrg) throw InputError("run_rs_svrg called with a different solver kind");

  const std::size_t n = problem.size();
  const std::size_t m = config.m_samples;
  const auto d = static_cast<Eigen::Index>(problem.dim());
  const SmoothingDistribution dist(config.dist, problem.dim());
  const EpochSchedule& sched = config.schedule;
  RandomStream pick = RandomStream::derive(config.seed, kComponentStream);
  const WallClock clock(config.record_wall_time);

  RunTrace trace;
  trace.solver = SolverKind::rs_svrg;
  trace.seed = config.seed;
  trace.records.reserve(static_cast<std::size_t>(config.epochs));

  Point x = initial_point(problem, config);
  Point anchor = x;
  Point anchor_full(d);
  Point v(d);
  Point sum(d);
  std::uint64_t calls = 0;
  std::uint64_t step_index = 0;

  for (int s = 1; s <= config.epochs; ++s) {
    const double gamma = sched.step(s);
    const std::size_t inner = sched.inner_count(s);
    RandomStream perturb = RandomStream::derive(config.seed, kPerturbationStream, static_cast<std::uint64_t>(s));
    const PerturbationBatch batch = sample_batch(dist, m, sched.radius(s), perturb, s);

    anchor_full.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      add_smoothed_component_grad(problem, i, anchor, batch, 1.0 / static_cast<double>(n), anchor_full);
    }
    calls += static_cast<std::uint64_t>(n) * m;

    sum.setZero();
    double variance_acc = 0.0;
    for (std::size_t t = 0; t < inner; ++t) {
      ++step_index;
      const std::size_t i = pick.index(n);
      // v = g_i(x_{t-1}) - g_i(anchor) + g(anchor), all on the epoch's batch.
      v = anchor_full;
      add_smoothed_component_grad(problem, i, x, batch, 1.0, v);
      add_smoothed_component_grad(problem, i, anchor, batch, -1.0, v);
      calls += 2ULL * m;
      if (config.track_variance) {
        variance_acc += (v - smoothed_full_grad(problem, x, batch)).squaredNorm();
      }
      x -= gamma * v;
      problem.regularizer().prox_in_place(x, gamma);
      if (!all_finite(x)) diverged(SolverKind::rs_svrg, s, step_index, gamma);
      sum += x;
    }
    anchor = sum / static_cast<double>(inner);

    EpochRecord rec;
    rec.epoch = s;
    rec.objective = checked_objective(problem, anchor, SolverKind::rs_svrg, s);
    rec.grad_evals = calls;
    rec.wall_ms = clock.elapsed_ms();
    if (config.track_variance) rec.vr_variance = variance_acc / static_cast<double>(inner);
    trace.records.push_back(rec);
  }
  trace.final_point = anchor;
  return trace;
}

RunTrace run_prox_sgd(const CompositeProblem& problem, const SolverConfig& config) {
  config.validate();
  const std::size_t n = problem.size();
  RandomStream pick = RandomStream::derive(config.seed, kComponentStream);
  Point x = initial_point(problem, config);
  Point g(x.size());
  const auto& f = problem.components();
  return run_budget_matched(problem, config, SolverKind::prox_sgd, x, [&](std::uint64_t t) {
    const double gamma = 1.0 / std::sqrt(static_cast<double>(t));
    g.setZero();
    f.add_subgradient(pick.index(n), x, 1.0, g);
    x -= gamma * g;
    problem.regularizer().prox_in_place(x, gamma);
    return StepResult{1, gamma};
  });
}

RunTrace run_prox_fgd(const CompositeProblem& problem, const SolverConfig& config) {
  config.validate();
  const std::size_t n = problem.size();
  const double gamma = config.schedule.a0 / (config.schedule.c_step * config.schedule.l1);
  Point x = initial_point(problem, config);
  Point g(x.size());
  const auto& f = problem.components();
  return run_budget_matched(problem, config, SolverKind::prox_fgd, x, [&](std::uint64_t) {
    g.setZero();
    f.add_mean_subgradient(x, 1.0, g);
    x -= gamma * g;
    problem.regularizer().prox_in_place(x, gamma);
    return StepResult{n, gamma};
  });
}

RunTrace run_rs_sgd(const CompositeProblem& problem, const SolverConfig& config) {
  config.validate();
  const std::size_t n = problem.size();
  const std::size_t m = config.m_samples;
  const SmoothingDistribution dist(config.dist, problem.dim());
  const double radius = config.schedule.a0 * config.schedule.phi;
  RandomStream pick = RandomStream::derive(config.seed, kComponentStream);
  RandomStream perturb = RandomStream::derive(config.seed, kPerturbationStream);
  Point x = initial_point(problem, config);
  Point g(x.size());
  return run_budget_matched(problem, config, SolverKind::rs_sgd, x, [&](std::uint64_t t) {
    const double gamma = 1.0 / std::sqrt(static_cast<double>(t));
    const std::size_t i = pick.index(n);
    const PerturbationBatch batch = sample_batch(dist, m, radius, perturb);
    g.setZero();
    add_smoothed_component_grad(problem, i, x, batch, 1.0, g);
    x -= gamma * g;
    problem.regularizer().prox_in_place(x, gamma);
    return StepResult{m, gamma};
  });
}

RunTrace run_rs_sag(const CompositeProblem& problem, const SolverConfig& config) {
  config.validate();
  const std::size_t n = problem.size();
  const std::size_t m = config.m_samples;
  const SmoothingDistribution dist(config.dist, problem.dim());
  const double radius = config.schedule.a0 * config.schedule.phi;
  const double gamma = config.schedule.a0 / (config.schedule.c_step * config.schedule.l1);
  RandomStream pick = RandomStream::derive(config.seed, kComponentStream);
  RandomStream perturb = RandomStream::derive(config.seed, kPerturbationStream);
  Point x = initial_point(problem, config);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(x.size(), static_cast<Eigen::Index>(n));
  Point average = Point::Zero(x.size());
  Point g(x.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  return run_budget_matched(problem, config, SolverKind::rs_sag, x, [&](std::uint64_t) {
    const std::size_t i = pick.index(n);
    const PerturbationBatch batch = sample_batch(dist, m, radius, perturb);
    g.setZero();
    add_smoothed_component_grad(problem, i, x, batch, 1.0, g);
    auto slot = table.col(static_cast<Eigen::Index>(i));
    average += inv_n * (g - slot);
    slot = g;
    x -= gamma * average;
    problem.regularizer().prox_in_place(x, gamma);
    return StepResult{m, gamma};
  });
}

RunTrace run_solver(const CompositeProblem& problem, const SolverConfig& config) {
  switch (config.solver) {
    case SolverKind::rs_svrg:
      return run_rs_svrg(problem, config);
    case SolverKind::prox_sgd:
      return run_prox_sgd(problem, config);
    case SolverKind::prox_fgd:
      return run_prox_fgd(problem, config);
    case SolverKind::rs_sgd:
      return run_rs_sgd(problem, config);
    case SolverKind::rs_sag:
      return run_rs_sag(problem, config);
  }
  throw InputError("unknown solver kind");
}

}  // namespace rssvrg
