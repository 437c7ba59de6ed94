#include "cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rssvrg/bench.hpp"
#include "rssvrg/errors.hpp"
#include "rssvrg/ranking.hpp"
#include "rssvrg/trace_io.hpp"

namespace rssvrg::cli {

namespace {

using nlohmann::ordered_json;

// Thrown for malformed config files; maps to exit code 2 like InputError.
struct ConfigError : InputError {
  using InputError::InputError;
};

struct Binding {
  std::string key;
  CLI::Option* option = nullptr;
  std::function<void(const ordered_json&)> load;
  std::function<ordered_json()> save;
};

template <class T>
void load_value(const std::string& key, const ordered_json& j, T& field) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) throw ConfigError("config key '" + key + "' must be a boolean");
  } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
    if (!j.is_number_unsigned()) throw ConfigError("config key '" + key + "' must be a non-negative integer");
  } else if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!j.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  } else {
    if (!j.is_array()) throw ConfigError("config key '" + key + "' must be an array");
    for (const auto& e : j) {
      if (!e.is_number()) throw ConfigError("config key '" + key + "' must hold numbers");
    }
  }
  field = j.get<T>();
}

class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& key, T& field, const std::string& help) {
    std::string flag = "--" + key;
    for (auto& c : flag) {
      if (c == '_') c = '-';
    }
    CLI::Option* opt = nullptr;
    if constexpr (std::is_same_v<T, bool>) {
      opt = app_->add_flag(flag, field, help);
    } else {
      opt = app_->add_option(flag, field, help)->capture_default_str();
    }
    bindings_.push_back({key, opt, [key, &field](const ordered_json& j) { load_value(key, j, field); },
                         [&field] { return ordered_json(field); }});
    return opt;
  }

  /// Values from the file fill every key not given on the command line.
  void apply_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    ordered_json doc;
    try {
      doc = ordered_json::parse(in);
    } catch (const ordered_json::parse_error& e) {
      throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : doc.items()) {
      Binding* b = find(key);
      if (b == nullptr) throw ConfigError("unknown config key '" + key + "' for command '" + app_->get_name() + "'");
      if (b->option->count() == 0) b->load(value);
    }
  }

  ordered_json effective() const {
    ordered_json j = ordered_json::object();
    for (const auto& b : bindings_) j[b.key] = b.save();
    return j;
  }

 private:
  Binding* find(const std::string& key) {
    for (auto& b : bindings_) {
      if (b.key == key) return &b;
    }
    return nullptr;
  }

  CLI::App* app_;
  std::vector<Binding> bindings_;
};

struct ProblemSettings {
  std::string solver = "rs_svrg";
  std::string dist = "gaussian";
  std::string reg = "ridge";
  std::size_t n_pairs = 1000;
  std::size_t dim = 10;
  std::size_t m_samples = 5;
  std::size_t inner_m = 2;
  int epochs = 10;
  double a0 = 1.0;
  double phi = 0.125;
  double c_step = 25.0;
  std::uint64_t seed = 7;
  std::size_t seeds = 1;
  std::size_t budget_cap = 0;
  std::string data_in;
  std::string data_out;
  std::string out_dir = ".";
  bool wall_clock = false;
  std::string axis = "sampling";
  std::vector<double> grid;
};

struct BoundSettings {
  double gap0 = 0.0;
  double dist_sq0 = 0.0;
  double l0 = 0.0;
  double l1 = 0.0;
  double a0 = 1.0;
  double inner_m = 2.0;
  double b = 0.0;
  double sigma = 0.0;
  double delta1 = 0.5;
  double delta2 = 0.5;
  double epsilon = 0.0;
};

void add_problem_options(Options& o, ProblemSettings& s, bool with_solver) {
  if (with_solver) o.add("solver", s.solver, "rs_svrg, prox_sgd, prox_fgd, rs_sgd or rs_sag");
  o.add("dist", s.dist, "smoothing distribution: l2ball, gaussian or linfball");
  o.add("reg", s.reg, "regularizer: lasso, ridge or elastic");
  o.add("n_pairs", s.n_pairs, "number of ranking pairs N");
  o.add("dim", s.dim, "feature dimension d");
  o.add("m_samples", s.m_samples, "perturbations per epoch m");
  o.add("inner_m", s.inner_m, "base inner-loop length M");
  o.add("epochs", s.epochs, "number of epochs S");
  o.add("a0", s.a0, "initial smoothing radius");
  o.add("phi", s.phi, "radius decay per epoch");
  o.add("c_step", s.c_step, "step divisor: gamma_s = a_s / (c_step * L1)");
  o.add("seed", s.seed, "instance seed; solver seeds are seed, seed+1, ...");
  o.add("seeds", s.seeds, "number of solver seeds");
  o.add("budget_cap", s.budget_cap, "cap on the inner count M_s (0 = none)");
  o.add("data_in", s.data_in, "read the instance from this CSV instead of generating it");
  o.add("data_out", s.data_out, "write the instance to this CSV");
  o.add("out_dir", s.out_dir, "directory for traces.csv, config.json, study.json");
  o.add("wall_clock", s.wall_clock, "record wall time (traces are no longer byte-reproducible)");
}

std::uint64_t checked_count(std::size_t v, const char* name) {
  if (v == 0) throw InputError(std::string("--") + name + " must be >= 1");
  return v;
}

SolverConfig make_config(const ProblemSettings& s) {
  SolverConfig cfg;
  cfg.solver = parse_solver_kind(s.solver);
  cfg.dist = parse_smoothing_kind(s.dist);
  cfg.m_samples = s.m_samples;
  cfg.epochs = s.epochs;
  cfg.seed = s.seed;
  cfg.schedule.a0 = s.a0;
  cfg.schedule.phi = s.phi;
  cfg.schedule.inner_m = s.inner_m;
  cfg.schedule.c_step = s.c_step;
  cfg.schedule.inner_cap = s.budget_cap;
  cfg.record_wall_time = s.wall_clock;
  cfg.validate();
  return cfg;
}

std::vector<std::uint64_t> seed_list(const ProblemSettings& s) {
  checked_count(s.seeds, "seeds");
  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 0; k < s.seeds; ++k) seeds.push_back(s.seed + k);
  return seeds;
}

RankingInstance load_instance(const ProblemSettings& s) {
  const RegSetting reg = parse_reg_setting(s.reg);
  RankingInstance inst = s.data_in.empty() ? generate_instance(s.n_pairs, s.dim, s.seed, reg)
                                           : read_instance_csv(s.data_in, reg);
  if (!s.data_out.empty()) write_instance_csv(inst, s.data_out);
  return inst;
}

std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::filesystem::path p(dir.empty() ? "." : dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + p.string() + "': " + ec.message());
  return p;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw std::runtime_error("cannot write '" + path.string() + "'");
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

void append_rows(std::vector<TraceRow>& rows, const ComparisonResult& cmp, const ReferenceOptimum& ref,
                 std::string_view dist, const std::string& prefix, std::uint64_t instance_seed) {
  TraceRow r;
  r.run_id = prefix + "reference";
  r.solver = "reference";
  r.dist = dist;
  r.seed = instance_seed;
  r.epoch = 0;
  r.grad_evals = ref.grad_evals;
  r.objective = ref.p_star;
  r.gap = ref.p_star - cmp.p_star;
  rows.push_back(r);
  for (const auto& series : cmp.series) {
    for (std::size_t k = 0; k < series.runs.size(); ++k) {
      const RunTrace& run = series.runs[k];
      for (std::size_t e = 0; e < run.records.size(); ++e) {
        const EpochRecord& rec = run.records[e];
        TraceRow row;
        row.solver = to_string(series.solver);
        row.run_id = prefix + row.solver + "-s" + std::to_string(run.seed);
        row.dist = dist;
        row.seed = run.seed;
        row.epoch = rec.epoch;
        row.grad_evals = rec.grad_evals;
        row.objective = rec.objective;
        row.gap = series.gaps[k][e];
        row.wall_ms = rec.wall_ms;
        rows.push_back(std::move(row));
      }
    }
  }
}

std::string render_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  write_trace_csv(rows, out);
  return out.str();
}

int cmd_compare(const ProblemSettings& s, const Options& opts, bool single, std::ostream& out) {
  SolverConfig base = make_config(s);
  const std::vector<std::uint64_t> seeds = seed_list(s);
  const auto dir = prepare_out_dir(s.out_dir);
  const RankingInstance inst = load_instance(s);
  const CompositeProblem problem = to_problem(inst);
  base = configure_for(problem, base);

  const ReferenceOptimum ref = reference_optimum(problem, base);
  const std::vector<SolverKind> solvers = single ? std::vector<SolverKind>{base.solver} : all_solvers();
  const ComparisonResult cmp = run_comparison(problem, solvers, seeds, base, ref.p_star);

  std::vector<TraceRow> rows;
  append_rows(rows, cmp, ref, s.dist, "", s.seed);
  write_file(dir / "traces.csv", render_csv(rows));
  write_file(dir / "config.json", dump(opts.effective()));

  out << "p_star = " << format_double(cmp.p_star) << "\n";
  for (const auto& series : cmp.series) {
    out << to_string(series.solver) << ": median final gap " << format_double(series.median_gap.back()) << "\n";
  }
  return 0;
}

int cmd_study(const ProblemSettings& s, const Options& opts, std::ostream& out) {
  const StudyAxis axis = parse_study_axis(s.axis);
  std::vector<double> grid = s.grid;
  if (grid.empty()) {
    grid = axis == StudyAxis::sampling_m ? std::vector<double>{1, 5, 50, 100} : std::vector<double>{10, 50, 200};
  }
  if (axis == StudyAxis::dimension_d && !s.data_in.empty()) {
    throw InputError("--data-in cannot be combined with the dimension axis");
  }
  StudySetup setup;
  setup.n_pairs = s.n_pairs;
  setup.base_dim = s.dim;
  setup.instance_seed = s.seed;
  setup.reg = parse_reg_setting(s.reg);
  setup.base = make_config(s);
  setup.base.solver = SolverKind::rs_svrg;
  setup.seeds = seed_list(s);
  const auto dir = prepare_out_dir(s.out_dir);

  StudyResult result;
  if (axis == StudyAxis::sampling_m && (!s.data_in.empty() || !s.data_out.empty())) {
    // Same sweep as run_study but on the loaded (or exported) instance.
    const RankingInstance inst = load_instance(s);
    const CompositeProblem problem = to_problem(inst);
    const SolverConfig tuned = configure_for(problem, setup.base);
    const double p_star = reference_optimum(problem, tuned, setup.reference).p_star;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (!(grid[k] >= 1.0) || (k > 0 && !(grid[k] > grid[k - 1]))) {
        throw InputError("study grid must be strictly increasing integers >= 1");
      }
      SolverConfig cfg = tuned;
      cfg.m_samples = static_cast<std::size_t>(grid[k]);
      StudyPoint p;
      p.value = grid[k];
      p.comparison = run_comparison(problem, {SolverKind::rs_svrg}, setup.seeds, cfg, p_star);
      p.p_star = p.comparison.p_star;
      p.median_final_gap = p.comparison.series.front().median_gap.back();
      result.points.push_back(std::move(p));
    }
    result.axis = axis;
  } else {
    result = run_study(axis, grid, setup);
  }

  std::vector<TraceRow> rows;
  for (const auto& p : result.points) {
    const std::string prefix = (axis == StudyAxis::sampling_m ? "m" : "d") + format_double(p.value) + "/";
    ReferenceOptimum ref;
    ref.p_star = p.p_star;
    append_rows(rows, p.comparison, ref, s.dist, prefix, s.seed);
  }
  write_file(dir / "traces.csv", render_csv(rows));

  ordered_json study;
  study["axis"] = std::string(to_string(axis));
  study["grid"] = result.grid();
  study["median_final_gap"] = result.median_final_gaps();
  study["config"] = opts.effective();
  study["config"]["grid"] = grid;
  if (axis == StudyAxis::dimension_d) {
    study["note"] =
        "feature range shrunk to [0, 100 / sqrt(d / dim)] per grid point so max ||u_i|| stays comparable across d";
  }
  write_file(dir / "study.json", dump(study));
  write_file(dir / "config.json", dump(study["config"]));

  for (const auto& p : result.points) {
    out << to_string(axis) << " " << format_double(p.value) << ": median final gap "
        << format_double(p.median_final_gap) << "\n";
  }
  return 0;
}

int cmd_bounds(const BoundSettings& b, bool want_threshold, std::ostream& out) {
  BoundInputs in;
  in.gap0 = b.gap0;
  in.dist_sq0 = b.dist_sq0;
  in.l0 = b.l0;
  in.l1 = b.l1;
  in.a0 = b.a0;
  in.inner_m = b.inner_m;
  in.variance_b = b.b;
  in.sigma = b.sigma;
  in.delta1 = b.delta1;
  in.delta2 = b.delta2;
  const double d = compute_bound_D(in);
  const DPrimeBound dp = compute_bound_Dprime(in, want_threshold ? b.epsilon : 1.0);
  out << "D = " << format_double(d) << "\n";
  out << "D' = " << format_double(dp.d_prime) << "\n";
  if (want_threshold) out << "stage_threshold = " << format_double(dp.stage_threshold) << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Randomized-smoothing SVRG solver and benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  ProblemSettings run_s;
  ProblemSettings cmp_s;
  cmp_s.seeds = 10;
  ProblemSettings study_s;
  study_s.seeds = 10;
  BoundSettings bound_s;

  CLI::App* run = app.add_subcommand("run", "run one solver on a ranking instance");
  CLI::App* compare = app.add_subcommand("compare", "run all five solvers on a shared instance");
  CLI::App* study = app.add_subcommand("study", "sweep m or d with RS-SVRG");
  CLI::App* bounds = app.add_subcommand("bounds", "evaluate the D and D' convergence constants");

  Options run_o(run);
  Options cmp_o(compare);
  Options study_o(study);
  Options bound_o(bounds);
  add_problem_options(run_o, run_s, true);
  add_problem_options(cmp_o, cmp_s, false);
  add_problem_options(study_o, study_s, false);
  study_o.add("axis", study_s.axis, "sampling or dimension");
  study_o.add("grid", study_s.grid, "grid values (default 1,5,50,100 or 10,50,200)")->delimiter(',');

  bound_o.add("gap0", bound_s.gap0, "P(x0) - P(x*)");
  bound_o.add("dist_sq0", bound_s.dist_sq0, "||x0 - x*||^2");
  bound_o.add("l0", bound_s.l0, "smoothing-bias constant L0");
  bound_o.add("l1", bound_s.l1, "smoothness constant L1");
  bound_o.add("a0", bound_s.a0, "initial radius");
  bound_o.add("inner_m", bound_s.inner_m, "base inner count M");
  bound_o.add("b", bound_s.b, "variance bound B");
  bound_o.add("sigma", bound_s.sigma, "sub-Gaussian scale");
  bound_o.add("delta1", bound_s.delta1, "confidence split in (0, 1)");
  bound_o.add("delta2", bound_s.delta2, "confidence split in (0, 1)");
  CLI::Option* eps_opt = bound_o.add("epsilon", bound_s.epsilon, "target accuracy for the stage threshold");

  for (CLI::App* sub : {run, compare, study, bounds}) {
    sub->add_option("--config", config_path, "JSON file with snake_case keys; flags take precedence");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      if (!config_path.empty()) run_o.apply_config_file(config_path);
      return cmd_compare(run_s, run_o, true, out);
    }
    if (compare->parsed()) {
      if (!config_path.empty()) cmp_o.apply_config_file(config_path);
      return cmd_compare(cmp_s, cmp_o, false, out);
    }
    if (study->parsed()) {
      if (!config_path.empty()) study_o.apply_config_file(config_path);
      return cmd_study(study_s, study_o, out);
    }
    if (!config_path.empty()) bound_o.apply_config_file(config_path);
    return cmd_bounds(bound_s, eps_opt->count() > 0 || bound_s.epsilon > 0.0, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ordered_json::exception& e) {
    err << "error: bad config value: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rssvrg::cli
