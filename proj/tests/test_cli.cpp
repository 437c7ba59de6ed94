#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "rssvrg/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "rssvrg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = rssvrg::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rssvrg_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const std::vector<std::string> kSmall = {"--n-pairs", "60", "--dim", "4", "--epochs", "4"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("bounds prints D") {
    const Result r = run({"bounds", "--gap0", "1", "--l1", "1", "--dist-sq0", "1", "--a0", "1", "--inner-m", "2",
                          "--l0", "1", "--b", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("D = 17.583333333333332\n") == 0);
    CHECK(r.out.find("stage_threshold") == std::string::npos);
    const Result t = run({"bounds", "--l1", "1", "--b", "1", "--epsilon", "0.1"});
    CHECK(t.code == 0);
    CHECK(t.out.find("stage_threshold = ") != std::string::npos);
  }

  TEST_CASE("bad input exits with code 2 and one line on stderr") {
    const Result zero_l1 = run({"bounds", "--gap0", "1"});
    CHECK(zero_l1.code == 2);
    CHECK(zero_l1.err.find("error: ") == 0);
    CHECK(zero_l1.err.find('\n') == zero_l1.err.size() - 1);
    CHECK(run({"run", "--solver", "prox_sdca"}).code == 2);
    CHECK(run({"run", "--no-such-flag"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"run", "--phi", "1.5"}).code == 2);
    CHECK(run({"run", "--seeds", "0"}).code == 2);
  }

  TEST_CASE("compare writes the expected rows") {
    const fs::path dir = scratch("compare");
    const Result r = run(with({"compare", "--seeds", "3", "--out-dir", dir.string()}, kSmall));
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "traces.csv");
    const auto rows = rssvrg::read_trace_csv(in);
    CHECK(rows.size() == 5 * 3 * 4 + 1);
    CHECK(rows[0].solver == "reference");
    for (const auto& row : rows) {
      CHECK(row.gap >= 0.0);
      CHECK(row.wall_ms == 0.0);
    }
    CHECK(fs::exists(dir / "config.json"));
  }

  TEST_CASE("fixed seed gives byte-identical traces") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    REQUIRE(run(with({"run", "--solver", "rs_svrg", "--seed", "1", "--out-dir", a.string()}, kSmall)).code == 0);
    REQUIRE(run(with({"run", "--solver", "rs_svrg", "--seed", "1", "--out-dir", b.string()}, kSmall)).code == 0);
    CHECK(slurp(a / "traces.csv") == slurp(b / "traces.csv"));
    CHECK(!slurp(a / "traces.csv").empty());
  }

  TEST_CASE("config file round trip and flag precedence") {
    const fs::path dir = scratch("config");
    const fs::path cfg = dir / "in.json";
    {
      std::ofstream out(cfg);
      out << R"({"solver": "rs_sag", "dim": 3, "n_pairs": 40, "epochs": 3, "phi": 0.25, "seeds": 2,
                 "m_samples": 4, "out_dir": ")"
          << dir.string() << R"("})";
    }
    REQUIRE(run({"run", "--config", cfg.string(), "--m-samples", "6"}).code == 0);
    const auto eff = nlohmann::json::parse(slurp(dir / "config.json"));
    CHECK(eff["solver"] == "rs_sag");
    CHECK(eff["dim"] == 3);
    CHECK(eff["n_pairs"] == 40);
    CHECK(eff["epochs"] == 3);
    CHECK(eff["phi"] == 0.25);
    CHECK(eff["seeds"] == 2);
    CHECK(eff["m_samples"] == 6);

    // The written config is itself a valid config file.
    const fs::path again = scratch("config_again");
    REQUIRE(run({"run", "--config", (dir / "config.json").string(), "--out-dir", again.string()}).code == 0);
    CHECK(slurp(again / "traces.csv") == slurp(dir / "traces.csv"));
  }

  TEST_CASE("config file errors") {
    const fs::path dir = scratch("config_bad");
    {
      std::ofstream(dir / "unknown.json") << R"({"solver": "rs_svrg", "learning_rate": 0.1})";
      std::ofstream(dir / "type.json") << R"({"epochs": "ten"})";
      std::ofstream(dir / "syntax.json") << R"({"epochs": )";
      std::ofstream(dir / "bounds_key.json") << R"({"gap0": 1})";
    }
    CHECK(run({"run", "--config", (dir / "unknown.json").string()}).code == 2);
    CHECK(run({"run", "--config", (dir / "type.json").string()}).code == 2);
    CHECK(run({"run", "--config", (dir / "syntax.json").string()}).code == 2);
    CHECK(run({"run", "--config", (dir / "bounds_key.json").string()}).code == 2);
    CHECK(run({"run", "--config", (dir / "missing.json").string()}).code == 2);
  }

  TEST_CASE("instance export and import") {
    const fs::path dir = scratch("data");
    REQUIRE(run(with({"run", "--out-dir", (dir / "a").string(), "--data-out", (dir / "a" / "inst.csv").string()},
                     kSmall))
                .code == 0);
    REQUIRE(run({"run", "--epochs", "4", "--data-in", (dir / "a" / "inst.csv").string(), "--out-dir",
                 (dir / "b").string()})
                .code == 0);
    CHECK(slurp(dir / "a" / "traces.csv") == slurp(dir / "b" / "traces.csv"));
  }

  TEST_CASE("study writes study.json") {
    const fs::path dir = scratch("study");
    const Result r = run(with({"study", "--axis", "sampling", "--grid", "1,5", "--seeds", "2", "--out-dir",
                               dir.string()},
                              kSmall));
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "study.json"));
    CHECK(j["axis"] == "sampling_m");
    CHECK(j["grid"] == nlohmann::json::array({1.0, 5.0}));
    CHECK(j["median_final_gap"].size() == 2);
    CHECK(j["config"]["seeds"] == 2);
    std::ifstream in(dir / "traces.csv");
    CHECK(rssvrg::read_trace_csv(in).size() == 2 * (1 + 2 * 4));
    CHECK(run(with({"study", "--grid", "5,1", "--out-dir", dir.string()}, kSmall)).code == 2);
  }
}
