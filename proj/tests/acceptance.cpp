// Acceptance suite. Each criterion prints one PASS/FAIL line; pass a criterion
// name to run just that one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "rssvrg/bench.hpp"
#include "rssvrg/ranking.hpp"
#include "rssvrg/trace_io.hpp"

using namespace rssvrg;

namespace {

// Tolerances.
constexpr double kProxObjectiveTol = 1e-6;
constexpr double kProxGridStep = 1e-4;
constexpr double kIdentityTol = 1e-12;
constexpr double kSigmas = 3.0;
constexpr double kSmoothedGradExact = 0.38292;  // 1 - 2 Phi(-0.5), rounded
constexpr double kGapReduction = 1e-2;
constexpr double kSamplingCloseness = 0.10;
constexpr int kRateSeedsRequired = 9;
constexpr double kBoundTol = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

const RankingInstance& default_instance(RegSetting reg = RegSetting::ridge) {
  static const RankingInstance ridge = generate_instance(1000, 10, 7, RegSetting::ridge);
  static const RankingInstance lasso = generate_instance(1000, 10, 7, RegSetting::lasso);
  static const RankingInstance elastic = generate_instance(1000, 10, 7, RegSetting::elastic);
  if (reg == RegSetting::lasso) return lasso;
  if (reg == RegSetting::elastic) return elastic;
  return ridge;
}

std::vector<std::uint64_t> ten_seeds() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Outcome prox_oracle() {
  RandomStream rng(2024);
  double worst_obj = -1e300;
  double worst_x = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double y = rng.uniform(-5.0, 5.0);
    const double g = rng.uniform(0.01, 2.0);
    const double lam_a = rng.uniform(0.0, 2.0);
    const double lam_b = rng.uniform(0.0, 2.0);
    Regularizer reg;
    double ridge = 0.0;
    double l1 = 0.0;
    switch (k % 3) {
      case 0:
        reg = Regularizer::elastic_net(lam_a, lam_b);
        ridge = lam_a;
        l1 = lam_b;
        break;
      case 1:
        reg = Regularizer::l1(lam_b);
        l1 = lam_b;
        break;
      default:
        reg = Regularizer::ridge(lam_a);
        ridge = lam_a;
        break;
    }
    auto h = [&](double x) { return 0.5 * (x - y) * (x - y) + g * (ridge * x * x + l1 * std::abs(x)); };
    double grid_x = 0.0;
    double grid_min = 1e300;
    for (long i = -100000; i <= 100000; ++i) {
      const double x = static_cast<double>(i) * kProxGridStep;
      const double v = h(x);
      if (v < grid_min) {
        grid_min = v;
        grid_x = x;
      }
    }
    Point yy(1);
    yy << y;
    const double x = prox_step(reg, yy, g)[0];
    worst_obj = std::max(worst_obj, h(x) - grid_min);
    worst_x = std::max(worst_x, std::abs(x - grid_x));
  }
  const bool ok = worst_obj <= kProxObjectiveTol && worst_x <= kProxGridStep;
  return {ok, "max(h(prox) - grid min) = " + num(worst_obj) + ", max |prox - grid argmin| = " + num(worst_x)};
}

Outcome vr_identity() {
  const CompositeProblem p = to_problem(default_instance());
  const SmoothingDistribution dist(SmoothingKind::gaussian, 10);
  RandomStream rng(99);
  double worst = 0.0;
  const auto n = static_cast<double>(p.size());
  for (int k = 0; k < 100; ++k) {
    const auto batch = sample_batch(dist, 5, 0.125 * rng.uniform(0.01, 1.0), rng);
    Point x(10);
    Point anchor(10);
    for (int j = 0; j < 10; ++j) {
      x[j] = rng.uniform(-0.05, 0.05);
      anchor[j] = rng.uniform(-0.05, 0.05);
    }
    const Point g_anchor = smoothed_full_grad(p, anchor, batch);
    Point avg = Point::Zero(10);
    for (std::size_t i = 0; i < p.size(); ++i) {
      avg += variance_reduced_gradient(smoothed_component_grad(p, i, x, batch),
                                       smoothed_component_grad(p, i, anchor, batch), g_anchor) /
             n;
    }
    worst = std::max(worst, (avg - smoothed_full_grad(p, x, batch)).cwiseAbs().maxCoeff());
  }
  return {worst <= kIdentityTol, "max deviation " + num(worst) + " over 100 states"};
}

Outcome smoothed_grad_analytics() {
  const CompositeProblem p(std::make_shared<const AbsComponents>(Eigen::MatrixXd::Zero(1, 1)), Regularizer::none());
  const SmoothingDistribution dist(SmoothingKind::gaussian, 1);
  RandomStream rng(5);
  const std::size_t m = 100000;
  const PerturbationBatch batch = sample_batch(dist, m, 1.0, rng);
  Point x(1);
  x << 0.5;
  const double est = smoothed_component_grad(p, 0, x, batch)[0];
  const double exact = 1.0 - 2.0 * normal_cdf(-0.5);
  const double se = std::sqrt((1.0 - est * est) / static_cast<double>(m));
  const bool near = std::abs(est - exact) <= kSigmas * se && std::abs(exact - kSmoothedGradExact) < 1e-5;

  PerturbationBatch anti = sample_batch(dist, m, 1.0, rng);
  anti.samples.rightCols(m / 2) = -anti.samples.leftCols(m / 2);
  const double at_zero = smoothed_component_grad(p, 0, Point::Zero(1), anti)[0];
  return {near && at_zero == 0.0, "estimate " + num(est) + " vs " + num(exact) + " (se " + num(se) +
                                      "), antithetic at 0 = " + num(at_zero)};
}

Outcome smoothing_sandwich() {
  const CompositeProblem p = to_problem(default_instance());
  const double l0 = p.lipschitz_l0();
  const double a_big = 0.125;
  const double a_small = 0.125 * 0.125;
  const std::size_t n_mc = 2000;
  RandomStream rng(77);
  int violations = 0;
  int checks = 0;
  for (SmoothingKind kind : {SmoothingKind::l2_ball, SmoothingKind::gaussian, SmoothingKind::linf_ball}) {
    const SmoothingDistribution dist(kind, 10);
    const double bias = dist.constants().bias_factor;
    for (int k = 0; k < 20; ++k) {
      Point x(10);
      for (int j = 0; j < 10; ++j) x[j] = rng.uniform(-0.02, 0.02);
      const double f = p.smooth_part(x);
      const auto lo = estimate_smoothed_value(p, dist, x, a_small, n_mc, rng);
      const auto hi = estimate_smoothed_value(p, dist, x, a_big, n_mc, rng);
      const double combined = std::sqrt(lo.std_error * lo.std_error + hi.std_error * hi.std_error);
      violations += f > lo.mean + kSigmas * lo.std_error;
      violations += lo.mean > hi.mean + kSigmas * combined;
      violations += lo.mean > f + bias * l0 * a_small + kSigmas * lo.std_error;
      violations += hi.mean > f + bias * l0 * a_big + kSigmas * hi.std_error;
      checks += 4;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(checks) + " checks"};
}

Outcome rate_bound() {
  const CompositeProblem p = to_problem(default_instance());
  const SolverConfig base = configure_for(p, SolverConfig{});
  const ReferenceOptimum ref = reference_optimum(p, base);
  const ComparisonResult cmp = run_comparison(p, {SolverKind::rs_svrg}, ten_seeds(), base, ref.p_star);

  const Point x0 = Point::Zero(10);
  const SmoothingDistribution dist(base.dist, 10);
  RandomStream rng(314);
  const double b = estimate_variance_B(p, dist, x0, base.schedule.radius(1), base.m_samples, 200, rng).mean;
  BoundInputs in = distribution_bound_inputs(dist.constants(), p.lipschitz_l0(), base.schedule.a0,
                                             static_cast<double>(base.schedule.inner_m),
                                             static_cast<double>(base.m_samples), p.objective(x0) - cmp.p_star,
                                             (x0 - ref.x_star).squaredNorm());
  in.variance_b = b;
  const double d = compute_bound_D(in);

  int good = 0;
  double worst_ratio = 0.0;
  for (const auto& gaps : cmp.of(SolverKind::rs_svrg).gaps) {
    bool ok = true;
    for (std::size_t s = 0; s < gaps.size(); ++s) {
      const double bound = std::pow(0.5, static_cast<double>(s + 1)) * d;
      worst_ratio = std::max(worst_ratio, gaps[s] / bound);
      ok = ok && gaps[s] <= bound;
    }
    good += ok;
  }
  return {good >= kRateSeedsRequired, std::to_string(good) + "/10 seeds within (1/2)^s D, D = " + num(d) +
                                          ", B = " + num(b) + ", max gap/bound = " + num(worst_ratio)};
}

Outcome solver_ordering() {
  bool all_ok = true;
  std::string detail;
  for (RegSetting reg : {RegSetting::ridge, RegSetting::lasso, RegSetting::elastic}) {
    const CompositeProblem p = to_problem(default_instance(reg));
    const SolverConfig base = configure_for(p, SolverConfig{});
    const ReferenceOptimum ref = reference_optimum(p, base);
    const ComparisonResult cmp = run_comparison(p, all_solvers(), ten_seeds(), base, ref.p_star);
    const double svrg = cmp.of(SolverKind::rs_svrg).median_gap.back();
    const double svrg1 = cmp.of(SolverKind::rs_svrg).median_gap.front();
    const double sag = cmp.of(SolverKind::rs_sag).median_gap.back();
    const double sgd = cmp.of(SolverKind::rs_sgd).median_gap.back();
    const double psgd = cmp.of(SolverKind::prox_sgd).median_gap.back();
    const double fgd = cmp.of(SolverKind::prox_fgd).median_gap.back();
    const bool ok = svrg <= sag && svrg <= sgd && sgd <= psgd && svrg <= kGapReduction * svrg1;
    all_ok = all_ok && ok;
    detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(reg)) + ": svrg " + num(svrg) +
              " (s=1 " + num(svrg1) + ", ratio " + num(svrg / svrg1) + "), sag " + num(sag) + ", rs_sgd " +
              num(sgd) + ", prox_sgd " + num(psgd) + ", prox_fgd " + num(fgd) + (ok ? "" : " [violated]");
  }
  return {all_ok, detail};
}

Outcome sampling_effect() {
  StudySetup setup;
  setup.seeds = ten_seeds();
  const StudyResult r = run_study(StudyAxis::sampling_m, {1, 5, 50, 100}, setup);
  const auto g = r.median_final_gaps();
  bool mono = true;
  for (std::size_t k = 1; k < g.size(); ++k) mono = mono && g[k] <= g[k - 1];
  const bool close = std::abs(g[2] - g[3]) <= kSamplingCloseness * g[3];
  return {mono && close, "median final gaps m=1,5,50,100: " + num(g[0]) + ", " + num(g[1]) + ", " + num(g[2]) +
                             ", " + num(g[3])};
}

Outcome dimension_effect() {
  bool ok = true;
  std::string detail;
  for (SmoothingKind kind : {SmoothingKind::gaussian, SmoothingKind::linf_ball}) {
    StudySetup setup;
    setup.seeds = ten_seeds();
    setup.base.dist = kind;
    const StudyResult r = run_study(StudyAxis::dimension_d, {10, 50, 200}, setup);
    const auto g = r.median_final_gaps();
    const bool inc = g[0] < g[1] && g[1] < g[2];
    ok = ok && inc;
    detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(kind)) + " d=10,50,200: " + num(g[0]) +
              ", " + num(g[1]) + ", " + num(g[2]);
  }
  return {ok, detail};
}

Outcome bound_calculators() {
  BoundInputs in;
  in.gap0 = 1.0;
  in.l1 = 1.0;
  in.dist_sq0 = 1.0;
  in.a0 = 1.0;
  in.inner_m = 2.0;
  in.l0 = 1.0;
  in.variance_b = 1.0;
  const double d = compute_bound_D(in);
  const double dp = compute_bound_Dprime(in, 0.01).d_prime;
  const double expected = 2.0 + 12.5 + 3.0 + 1.0 / 12.0;
  return {std::abs(d - expected) <= kBoundTol && dp == d, "D = " + format_double(d) + ", D'(sigma=0) = " +
                                                              format_double(dp)};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "rssvrg_acceptance_determinism";
  fs::remove_all(root);
  auto invoke = [](std::vector<std::string> args) {
    args.insert(args.begin(), "rssvrg");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    return cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const std::vector<std::vector<std::string>> commands = {
      {"run", "--solver", "rs_svrg", "--seed", "1"},
      {"run", "--solver", "rs_sag", "--seed", "4", "--dist", "linfball"},
      {"compare", "--seeds", "3"},
      {"study", "--axis", "sampling", "--grid", "1,5", "--seeds", "2", "--n-pairs", "200"},
  };
  int identical = 0;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    std::string bytes[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / (std::to_string(k) + "_" + std::to_string(rep));
      auto args = commands[k];
      args.push_back("--out-dir");
      args.push_back(dir.string());
      if (invoke(args) != 0) return {false, "command " + std::to_string(k) + " failed"};
      bytes[rep] = slurp(dir / "traces.csv");
    }
    identical += !bytes[0].empty() && bytes[0] == bytes[1];
  }
  fs::remove_all(root);
  return {identical == static_cast<int>(commands.size()),
          std::to_string(identical) + "/" + std::to_string(commands.size()) + " commands byte-identical"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"prox_oracle", prox_oracle},
      {"vr_identity", vr_identity},
      {"smoothed_grad_analytics", smoothed_grad_analytics},
      {"smoothing_sandwich", smoothing_sandwich},
      {"rate_bound", rate_bound},
      {"solver_ordering", solver_ordering},
      {"sampling_effect", sampling_effect},
      {"dimension_effect", dimension_effect},
      {"bound_calculators", bound_calculators},
      {"determinism", determinism},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  int failures = 0;
  bool matched = false;
  for (const auto& c : criteria) {
    if (!only.empty() && only != c.name) continue;
    matched = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  if (!matched) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
