#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("proxmse_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(PROXMSE_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("config errors exit with status 2 and write nothing") {
  TempDir tmp;
  const auto out = tmp.path / "bad.csv";
  CHECK(run("msd --structure '{\"kind\":\"sparse\",\"n\":' --seed 1 --cone -o " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK(run("msd --structure sparse:10:20 --seed 1 --cone -o " + out.string()) == 2);
  CHECK(run("msd --structure sparse:10:2 --cone -o " + out.string()) == 2);
  CHECK(run("msd --structure sparse:10:2 --seed 1 -o " + out.string()) == 2);
  CHECK(run("lasso --structure sparse:10:2 --seed 1 --m-grid 0:1:3 -o " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("msd curve as csv") {
  TempDir tmp;
  const auto out = tmp.path / "msd.csv";
  REQUIRE(run("msd --structure sparse:100:5 --lambda-grid 0:0.1:3 --cone --samples 500 --seed 1 -o " + out.string()) ==
          0);
  const auto rows = lines(slurp(out));
  REQUIRE(rows.size() == 2 + 31 + 1);
  CHECK(rows[0].rfind("# config: {", 0) == 0);
  const auto config = nlohmann::json::parse(rows[0].substr(10));
  CHECK(config.at("seed") == 1);
  CHECK(config.at("samples") == 500);
  CHECK(config.at("structure").at("n") == 100);
  CHECK(rows[1] == "structure,lambda,mean,stderr,samples");
  CHECK(rows[2].rfind("sparse:100:5,0,", 0) == 0);
  CHECK(rows.back().rfind("sparse:100:5,cone,", 0) == 0);
}

TEST_CASE("json output carries the same rows") {
  TempDir tmp;
  const auto csv = tmp.path / "a.csv";
  const auto js = tmp.path / "a.json";
  REQUIRE(run("msd --structure lowrank:6:2 --lambda 1 --lambda 2 --samples 300 --seed 4 -o " + csv.string()) == 0);
  REQUIRE(run("msd --structure lowrank:6:2 --lambda 1 --lambda 2 --samples 300 --seed 4 --format json -o " +
              js.string()) == 0);
  const auto doc = nlohmann::json::parse(slurp(js));
  REQUIRE(doc.at("rows").size() == 2);
  CHECK(doc.at("rows")[1].at("lambda") == 2.0);
  const auto rows = lines(slurp(csv));
  REQUIRE(rows.size() == 4);
  std::ostringstream mean;
  mean << rows[3].substr(rows[3].find(",2,") + 3);
  CHECK(std::stod(mean.str()) == doctest::Approx(doc.at("rows")[1].at("mean").get<double>()).epsilon(1e-11));
}

TEST_CASE("output does not depend on the thread count") {
  TempDir tmp;
  const std::string base = "--structure sparse:200:10 --seed 9 ";
  const std::vector<std::string> commands{
      "msd " + base + "--lambda-grid 0:0.5:3 --cone --optimal --samples 2000",
      "denoise " + base + "--lambda 2 --trials 50",
      "denoise " + base + "--estimator constrained --trials 50 --sigma-grid 0.001,0.01",
      "lasso " + base + "--m-grid 20,60 --trials 6 --cone-samples 500",
  };
  int i = 0;
  for (const auto& cmd : commands) {
    const auto a = tmp.path / ("t1_" + std::to_string(i) + ".csv");
    const auto b = tmp.path / ("t3_" + std::to_string(i) + ".csv");
    ++i;
    REQUIRE(run(cmd + " --threads 1 -o " + a.string()) == 0);
    REQUIRE(run(cmd + " --threads 3 -o " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK_FALSE(slurp(a).empty());
  }
}

TEST_CASE("bounds rows") {
  TempDir tmp;
  const auto out = tmp.path / "b.json";
  REQUIRE(run("bounds --structure sparse:500:20 --samples 1000 --seed 1 --format json -o " + out.string()) == 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  bool saw_gap = false;
  for (const auto& row : doc.at("rows")) {
    if (row.at("quantity") == "sandwich_gap") {
      saw_gap = true;
      CHECK(row.at("value").get<double>() == doctest::Approx(10.0));
    }
    if (row.at("quantity") == "table1_bound") CHECK(row.at("status") == "ok");
  }
  CHECK(saw_gap);

  REQUIRE(run("bounds --structure lowrank:30:4 --lambda 11 --samples 200 --seed 1 --format json -o " + out.string()) ==
          0);
  for (const auto& row : nlohmann::json::parse(slurp(out)).at("rows")) {
    if (row.at("quantity") == "table1_bound") {
      CHECK(row.at("status") == "ok");
      CHECK(row.at("value").get<double>() == doctest::Approx((121.0 + 60.0) * 4 + 60.0));
    }
  }

  REQUIRE(run("bounds --structure sparse:500:20 --lambda 1 --samples 200 --seed 1 --format json -o " + out.string()) ==
          0);
  for (const auto& row : nlohmann::json::parse(slurp(out)).at("rows")) {
    if (row.at("quantity") == "table1_bound") {
      CHECK(row.at("status") == "bound_invalid");
      CHECK(row.at("value").is_null());
    }
  }
}

TEST_CASE("denoise and lasso tables") {
  TempDir tmp;
  const auto out = tmp.path / "d.csv";
  REQUIRE(run("denoise --structure lowrank:6:2 --estimator constrained --trials 20 --seed 2 -o " + out.string()) == 0);
  const auto rows = lines(slurp(out));
  CHECK(rows.size() == 2 + 8);
  CHECK(rows[1] == "structure,estimator,lambda,sigma,nmse_mean,nmse_stderr,trials,d_reference");
  CHECK(run("denoise --structure sparse:20:2 --trials 20 --seed 2 -o " + out.string()) == 2);

  const auto lasso = tmp.path / "l.csv";
  REQUIRE(run("lasso --structure sparse:100:4 --m-grid 20:20:60 --trials 4 --cone-samples 300 --seed 3 -o " +
              lasso.string()) == 0);
  CHECK(lines(slurp(lasso)).size() == 2 + 3);
}

TEST_CASE("numerical failures exit with status 3") {
  TempDir tmp;
  const auto out = tmp.path / "l.csv";
  CHECK(run("lasso --structure sparse:100:5 --m-grid 40 --trials 10 --max-iters 1 --cone-samples 100 --seed 1 -o " +
            out.string()) == 3);
  CHECK_FALSE(fs::exists(out));
}
