#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = kpg::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kpg_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const std::vector<std::string> kTiny{
    "--set", "synth.events_per_class=8", "--set", "synth.median_size=5", "--set",
    "synth.max_size=10", "--set", "hidden=4", "--set", "max_epochs=2", "--set",
    "kpg_max_epochs=1", "--set", "rollout_l=2", "--set", "tau=0.5", "--set", "z_dim=2",
    "--set", "folds=2", "--set", "d=40", "--set", "max_decode_len=3", "--set", "batch=8"};

std::vector<std::string> with_tiny(std::vector<std::string> args) {
  args.insert(args.end(), kTiny.begin(), kTiny.end());
  return args;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli: usage errors exit with 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"bogus"}).code == 2);
  CHECK(cli({"train"}).code == 2);
  CHECK(cli({"ablate", "--data", "x", "--out", "y", "--variant", "weird"}).code == 2);
  const fs::path dir = scratch("usage");
  CHECK(cli({"synth", "--out", dir.string(), "--set", "epsilon=1.5"}).code == 2);
  CHECK(cli({"synth", "--out", dir.string(), "--set", "nonsense=1"}).code == 2);
  CHECK(cli({"synth", "--out", dir.string(), "--config", "/nonexistent.conf"}).code == 2);
  CHECK(cli({"sweep", "--data", "x", "--out", dir.string(), "--param", "hidden", "--values", "1"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli: data errors exit with 3") {
  const fs::path dir = scratch("data");
  CHECK(cli({"ingest-check", "--data", (dir / "missing.jsonl").string()}).code == 3);
  {
    std::ofstream bad(dir / "bad.jsonl");
    bad << R"({"event_id":"e","label":0,"posts":[{"id":"a","parent_id":"b","time_offset_min":0,"text":""}]})" << "\n";
  }
  const auto r = cli({"ingest-check", "--data", (dir / "bad.jsonl").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("e") != std::string::npos);
  CHECK(cli({"eval", "--checkpoint", (dir / "none.json").string(), "--data", (dir / "bad.jsonl").string()}).code == 3);
}

TEST_CASE("cli: synth, train, eval and generate end to end") {
  const fs::path dir = scratch("e2e");
  REQUIRE(cli(with_tiny({"synth", "--out", dir.string()})).code == 0);
  const std::string data = (dir / "dataset.jsonl").string();
  const auto check = cli({"ingest-check", "--data", data});
  CHECK(check.code == 0);
  CHECK(check.out.find("events 16") != std::string::npos);

  const fs::path run1 = dir / "run1";
  const fs::path run2 = dir / "run2";
  REQUIRE(cli(with_tiny({"train", "--data", data, "--out", run1.string()})).code == 0);
  REQUIRE(cli(with_tiny({"train", "--data", data, "--out", run2.string()})).code == 0);
  CHECK(slurp(run1 / "metrics.json") == slurp(run2 / "metrics.json"));
  CHECK(slurp(run1 / "metrics.csv") == slurp(run2 / "metrics.csv"));
  CHECK(fs::exists(run1 / "checkpoint.json"));
  CHECK(fs::exists(run1 / "config.txt"));

  const auto e = cli({"eval", "--checkpoint", (run1 / "checkpoint.json").string(), "--data", data,
                      "--out", run1.string()});
  REQUIRE(e.code == 0);
  const auto j = nlohmann::json::parse(slurp(run1 / "eval.json"));
  CHECK(j["metrics"]["count"] == 16);

  REQUIRE(cli({"generate", "--checkpoint", (run1 / "checkpoint.json").string(), "--data", data,
               "--out", run1.string()})
              .code == 0);
  std::ifstream lines(run1 / "key_graphs.jsonl");
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto g = nlohmann::json::parse(line);
    CHECK(g["key_graph"][0]["parent"] == -1);
    ++n;
  }
  CHECK(n == 16);

  CHECK(cli(with_tiny({"train", "--data", data, "--out", (dir / "r3").string(),
                       "--checkpoint-fold", "7"}))
            .code == 2);
}

TEST_CASE("cli: sweep validates every point before running") {
  const fs::path dir = scratch("sweep");
  REQUIRE(cli(with_tiny({"synth", "--out", dir.string()})).code == 0);
  const auto r = cli(with_tiny({"sweep", "--data", (dir / "dataset.jsonl").string(), "--out",
                                (dir / "s").string(), "--param", "epsilon", "--values", "0.5,1.5"}));
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(dir / "s" / "epsilon=0.5"));
}
