#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wgpnn/checkpoint.hpp"

using namespace wgpnn;
namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;

  explicit Sandbox(const std::string& name) : dir(fs::temp_directory_path() / ("wgpnn_test_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }

  /// Runs the CLI inside the sandbox; returns its exit status.
  int run(const std::string& args) const {
    const std::string command = "cd \"" + dir.string() + "\" && \"" WGPNN_CLI_PATH "\" " + args +
                                " > stdout.txt 2> stderr.txt";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(dir / name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  void write(const std::string& name, const std::string& body) const { std::ofstream(dir / name) << body; }
};

const char* kToy =
    "alice\tcalls\tbob\t0\n"
    "bob\tcalls\tcarol\t0\n"
    "alice\tmeets\tcarol\t1\n"
    "carol\tcalls\talice\t2\n"
    "bob\tmeets\tdave\t3\n"
    "dave\tcalls\talice\t4\n"
    "alice\tcalls\tbob\t5\n"
    "carol\tmeets\tbob\t6\n"
    "alice\tcalls\tcarol\t7\n"
    "bob\tcalls\talice\t8\n";

}  // namespace

TEST_CASE("prepare reports hand-counted sizes and is reproducible") {
  Sandbox box("prepare");
  box.write("toy.tsv", kToy);
  REQUIRE(box.run("prepare -i toy.tsv -o data") == 0);
  const auto summary = box.read("stdout.txt");
  CHECK(summary.find("entities\t4\n") != std::string::npos);
  CHECK(summary.find("predicates\t2\n") != std::string::npos);
  const auto first = nlohmann::json::parse(box.read("data/manifest.json"));
  REQUIRE(box.run("prepare -i toy.tsv -o data") == 0);
  const auto second = nlohmann::json::parse(box.read("data/manifest.json"));
  CHECK(first == second);
  CHECK(first["outputs"].size() == 8);
}

TEST_CASE("prepare ignores a fifth column") {
  Sandbox box("five");
  box.write("icews.tsv", "a\tr\tb\t0\t77\na\tr\tc\t24\t78\nb\tr\ta\t48\t79\n");
  REQUIRE(box.run("prepare -i icews.tsv -o data") == 0);
  CHECK(box.read("stdout.txt").find("entities\t3\n") != std::string::npos);
  CHECK(box.read("stdout.txt").find("time_unit\t24\n") != std::string::npos);
}

TEST_CASE("prepare surfaces parse errors with line numbers") {
  Sandbox box("parse");
  box.write("bad.tsv", "a\tr\tb\t0\na\tr\n");
  CHECK(box.run("prepare -i bad.tsv -o data") == 3);
  CHECK(box.read("stderr.txt").find("line 2") != std::string::npos);
}

TEST_CASE("train, evaluate and predict through the CLI") {
  Sandbox box("pipeline");
  REQUIRE(box.run("synth -o syn.tsv --horizon 40 --entities 6") == 0);
  REQUIRE(box.run("prepare -i syn.tsv -o data") == 0);

  SUBCASE("epochs = 0 saves the initialized model") {
    REQUIRE(box.run("train -d data -o run --epochs 0 --embedding-dim 8 --seed 5") == 0);
    const auto ck = load_checkpoint(box.dir / "run/checkpoint.bin");
    CHECK(ck.state.epoch == 0);
    CHECK(ck.state.optimizer.step == 0);
    const auto fresh = ModelParams::initialized(ck.state.params.shape, 5);
    CHECK(ck.state.params.gru.input == fresh.gru.input);
  }

  SUBCASE("training logs validation MRR and evaluation honours --protocol") {
    REQUIRE(box.run("train -d data -o run --epochs 2 --embedding-dim 8") == 0);
    const auto log = box.read("run/train_log.tsv");
    CHECK(log.rfind("epoch\tloss\tvalid_mrr\timproved\n", 0) == 0);
    CHECK(std::count(log.begin(), log.end(), '\n') == 3);

    REQUIRE(box.run("evaluate -d data -c run/checkpoint.bin -o both") == 0);
    const auto both = nlohmann::json::parse(box.read("both/metrics.json"));
    CHECK(both["combined"].contains("raw"));
    CHECK(both["combined"].contains("time_aware"));
    CHECK(both["seed"] == 42);

    REQUIRE(box.run("evaluate -d data -c run/checkpoint.bin -o raw --protocol raw --threads 3") == 0);
    CHECK(box.read("raw/metrics.tsv").find("time_aware") == std::string::npos);
    CHECK(box.read("raw/ranks.tsv").find("filtered_rank") == std::string::npos);
    const auto raw = nlohmann::json::parse(box.read("raw/metrics.json"));
    CHECK(raw["combined"]["raw"] == both["combined"]["raw"]);

    REQUIRE(box.run("predict -d data -c run/checkpoint.bin -s e1 -p p0 -t 40 -k 3 --curve curve.tsv "
                    "--curve-points 5 -o pred") == 0);
    const auto table = box.read("pred/predictions.tsv");
    CHECK(std::count(table.begin(), table.end(), '\n') == 5);
    std::istringstream curve(box.read("curve.tsv"));
    std::string line;
    std::getline(curve, line);
    CHECK(line == "tau\tcandidate_id\tmean\tvariance");
    double previous = -1.0;
    std::size_t rows = 0;
    while (std::getline(curve, line)) {
      const double tau = std::stod(line.substr(0, line.find('\t')));
      CHECK(tau >= previous);
      previous = tau;
      ++rows;
    }
    CHECK(rows == 15);
    const auto first = box.read("pred/predictions.tsv");
    REQUIRE(box.run("predict -d data -c run/checkpoint.bin -s e1 -p p0 -t 40 -k 3 -o pred") == 0);
    CHECK(box.read("pred/predictions.tsv") == first);

    CHECK(box.run("predict -d data -c run/checkpoint.bin -s e77 -p p0 -t 40") == 4);
    CHECK(box.read("stderr.txt").find("nearest") != std::string::npos);
    CHECK(box.run("predict -d data -c run/checkpoint.bin -s e1 -p p0^-1 -t 40 -k 1") == 0);
  }

  SUBCASE("incompatible checkpoints and bad usage are rejected") {
    REQUIRE(box.run("synth -o other.tsv --horizon 40 --entities 9") == 0);
    REQUIRE(box.run("prepare -i other.tsv -o other") == 0);
    REQUIRE(box.run("train -d other -o run --epochs 0 --embedding-dim 8") == 0);
    CHECK(box.run("evaluate -d data -c run/checkpoint.bin -o rep") == 8);
    CHECK(box.read("stderr.txt").find("entities 9 vs 6") != std::string::npos);
    CHECK(box.run("train -d data -o run2 --no-such-flag") == 2);
    CHECK(box.run("train -d data -o run2 --learning-rate abc") == 5);
    CHECK(box.run("") == 2);
  }
}

TEST_CASE("grid search writes a results table") {
  Sandbox box("grid");
  REQUIRE(box.run("synth -o syn.tsv --horizon 30 --entities 5") == 0);
  REQUIRE(box.run("prepare -i syn.tsv -o data") == 0);
  REQUIRE(box.run("grid-search -d data -o grid --budget 1 --window-sizes 2,4 --pseudo-point-values 1 "
                  "--embedding-dims 8 --batch-sizes 32") == 0);
  const auto table = box.read("grid/grid.tsv");
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);
  CHECK(box.read("grid/best_config.txt").find("embedding_dim = 8") != std::string::npos);
}

TEST_CASE("synth is deterministic") {
  Sandbox box("synth");
  REQUIRE(box.run("synth -o a.tsv --noise 0.1 --seed 4") == 0);
  REQUIRE(box.run("synth -o b.tsv --noise 0.1 --seed 4") == 0);
  CHECK(box.read("a.tsv") == box.read("b.tsv"));
  CHECK(box.run("synth -o c.tsv --period 1") == 5);
}
