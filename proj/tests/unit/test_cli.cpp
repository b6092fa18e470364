#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "fedclave");
  std::ostringstream out, err;
  const int code = fedclave::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> desk_flags(const std::filesystem::path& out) {
  return {"--dataset", "synthetic", "--epochs", "1", "--batch-size", "32", "--out", out.string()};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("help lists every flag") {
  const auto top = invoke({"--help"});
  CHECK(top.code == 0);
  CHECK(top.out.find("run") != std::string::npos);
  const auto r = invoke({"run", "--help"});
  CHECK(r.code == 0);
  for (const char* flag : {"--regime", "--dataset", "--scenario", "--clients", "--k", "--rounds",
                           "--epochs", "--lr", "--batch-size", "--warmup-rounds", "--seed",
                           "--repeats", "--scale", "--data-root", "--out", "--format", "--jobs",
                           "--init-mode"}) {
    CHECK_MESSAGE(r.out.find(flag) != std::string::npos, flag);
  }
}

TEST_CASE("smoke run writes a CSV") {
  testing::TempDir tmp("cli_run");
  const auto r = invoke({"run", "--regime", "fl", "--dataset", "synthetic", "--scenario", "iid",
                         "--scale", "0.1", "--out", tmp.path().string()});
  REQUIRE(r.code == 0);
  const auto csv = testing::read_text(tmp.path() / "run.csv");
  CHECK(csv.rfind("exp_type,dataset,scenario,seed,", 0) == 0);
  CHECK(csv.find("FL,synthetic,iid,42,") != std::string::npos);
  CHECK(csv == r.out);
  CHECK(testing::read_text(tmp.path() / "run.meta.txt").find("seed=42") != std::string::npos);
}

TEST_CASE("bad values name the flag") {
  auto r = invoke({"run", "--regime", "bogus"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--regime") != std::string::npos);
  r = invoke({"run", "--clients", "7", "--scenario", "concept-shift-features"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--clients") != std::string::npos);
  r = invoke({"run", "--rounds", "abc"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--rounds") != std::string::npos);
  r = invoke({"run", "--format", "pdf", "--dataset", "synthetic"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--format") != std::string::npos);
}

TEST_CASE("unknown flags and subcommands are usage errors") {
  auto r = invoke({"run", "--colour", "red"});
  CHECK(r.code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(invoke({"launch"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"table"}).code == 2);
}

TEST_CASE("missing dataset is a runtime error") {
  testing::TempDir tmp("cli_missing");
  const auto r = invoke({"run", "--dataset", "kmnist", "--data-root", (tmp.path() / "none").string(),
                         "--out", tmp.path().string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("train-images-idx3-ubyte") != std::string::npos);
}

TEST_CASE("data root defaults to the environment") {
  testing::TempDir tmp("cli_env");
  const char* old = std::getenv("FEDCLAVE_DATA_ROOT");
  const std::string saved = old ? old : "";
  ::setenv("FEDCLAVE_DATA_ROOT", (tmp.path() / "envroot").string().c_str(), 1);
  const auto r = invoke({"run", "--dataset", "mnist", "--out", tmp.path().string()});
  if (old) {
    ::setenv("FEDCLAVE_DATA_ROOT", saved.c_str(), 1);
  } else {
    ::unsetenv("FEDCLAVE_DATA_ROOT");
  }
  CHECK(r.code == 1);
  CHECK(r.err.find("envroot") != std::string::npos);
}

TEST_CASE("table runs four regimes") {
  testing::TempDir tmp("cli_table");
  const auto r = invoke(concat({"table", "concept-shift-features", "--scale", "0.1"},
                               desk_flags(tmp.path())));
  REQUIRE(r.code == 0);
  const auto csv = testing::read_text(tmp.path() / "table_concept-shift-features.csv");
  CHECK(count_lines(csv) == 5);
  for (const char* row : {"\nFL,", "\noracle,", "\nclient,", "\nserver,"}) {
    CHECK(csv.find(row) != std::string::npos);
  }
}

TEST_CASE("config file values yield to flags") {
  testing::TempDir tmp("cli_config");
  const auto conf = tmp.path() / "exp.conf";
  {
    std::ofstream f(conf);
    f << "scenario = concept-shift-labels\nregime = server\nseed = 5\nrounds = 9\n";
  }
  const auto r = invoke(concat({"run", "--config", conf.string(), "--seed", "6", "--scale", "0.2"},
                               desk_flags(tmp.path())));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("server,synthetic,concept-shift-labels,6,") != std::string::npos);
  const auto meta = testing::read_text(tmp.path() / "run.meta.txt");
  CHECK(meta.find("rounds=2") != std::string::npos);
  CHECK(testing::read_text(tmp.path() / "assignments.csv").rfind("client_id,het_class,cluster_id\n", 0) == 0);

  std::ofstream(tmp.path() / "bad.conf") << "color=blue\n";
  const auto bad = invoke({"run", "--config", (tmp.path() / "bad.conf").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("color") != std::string::npos);
}

TEST_CASE("verbose client run writes logs") {
  testing::TempDir tmp("cli_verbose");
  const auto r = invoke(concat({"run", "--regime", "client", "--scenario", "concept-shift-features",
                                "--scale", "0.1", "--rounds", "30", "--verbose"},
                               desk_flags(tmp.path())));
  REQUIRE(r.code == 0);
  const auto log = testing::read_text(tmp.path() / "round_log.csv");
  CHECK(log.rfind("round,mean_train_loss,test_accuracy\n", 0) == 0);
  CHECK(count_lines(log) == 1 + 3);
  const auto trace = testing::read_text(tmp.path() / "assignment_trace.csv");
  CHECK(count_lines(trace) == 1 + 3 * 4);
}

TEST_CASE("sweep writes a curve") {
  testing::TempDir tmp("cli_sweep");
  const auto r = invoke(concat({"sweep", "--k-values", "1,2,3", "--scale", "0.1"},
                               desk_flags(tmp.path())));
  REQUIRE(r.code == 0);
  CHECK(count_lines(testing::read_text(tmp.path() / "sweep.csv")) == 4);
  CHECK(testing::read_text(tmp.path() / "sweep.svg").find("<polyline") != std::string::npos);
  CHECK(r.out.rfind("k,accuracy_mean\n1,", 0) == 0);
  CHECK(invoke(concat({"sweep", "--k-values", "1,x"}, desk_flags(tmp.path()))).code == 2);
}

TEST_CASE("partition audit") {
  testing::TempDir tmp("cli_audit");
  const auto r = invoke(concat({"partition-audit", "--scenario", "quantity-skew", "--scale", "0.1"},
                               desk_flags(tmp.path())));
  REQUIRE(r.code == 0);
  const auto manifest = testing::read_text(tmp.path() / "partition_quantity-skew.txt");
  CHECK(manifest == r.out);
  CHECK(count_lines(manifest) == 1 + 4);
}

TEST_CASE("outputs stay inside the output directory") {
  testing::TempDir tmp("cli_scope");
  const auto out = tmp.path() / "out";
  const auto r = invoke(concat({"run", "--regime", "server", "--scale", "0.1", "--verbose",
                                "--format", "markdown"},
                               desk_flags(out)));
  REQUIRE(r.code == 0);
  std::filesystem::directory_iterator it(tmp.path());
  int entries = 0;
  for (const auto& e : it) {
    ++entries;
    CHECK(e.path().filename() == "out");
  }
  CHECK(entries == 1);
  CHECK(std::filesystem::exists(out / "run.md"));
}
