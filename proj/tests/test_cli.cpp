#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using sam::cli::Config;

namespace {

// Fresh working directory under the system temp root.
std::string scratch_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("samlik_cli_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::vector<std::string> data_lines(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  size_t col(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    REQUIRE_MESSAGE(false, ("missing column " + name));
    return 0;
  }
};

Table read_table(const std::string& path) {
  std::vector<std::string> lines = data_lines(path);
  REQUIRE(!lines.empty());
  Table t;
  std::istringstream hs(lines[0]);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
  for (size_t i = 1; i < lines.size(); ++i) {
    std::istringstream rs(lines[i]);
    std::vector<double> row;
    while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
    REQUIRE(row.size() == t.columns.size());
    t.rows.push_back(std::move(row));
  }
  return t;
}

Config base_cfg(const std::string& out) {
  Config cfg = Config::load("");
  cfg.override_kv("out", out);
  return cfg;
}

}  // namespace

TEST_CASE("config file parsing, overrides, and echo") {
  std::string dir = scratch_dir("config");
  std::string path = dir + "/run.ini";
  {
    std::ofstream os(path);
    os << "# run configuration\n";
    os << "model = logistic\n";
    os << "n_obs=42   # inline comment\n";
    os << "\n";
    os << "theta0 = 0.1 1000 0.1\n";
    os << "sizes = 25 50 100\n";
  }
  Config cfg = Config::load(path);
  CHECK(cfg.has("model"));
  CHECK(cfg.get_str("model", "brownian") == "logistic");
  CHECK(cfg.get_i64("n_obs", 0) == 42);
  CHECK(cfg.get_f64_list("theta0", {}) ==
        std::vector<double>{0.1, 1000.0, 0.1});
  CHECK(cfg.get_tokens("sizes") == std::vector<std::string>{"25", "50", "100"});
  CHECK(cfg.require_str("model") == "logistic");
  CHECK_THROWS(cfg.require_str("absent"));

  // Overrides replace in place; defaults are recorded for the echo.
  cfg.override_kv("n_obs", "7");
  CHECK(cfg.get_i64("n_obs", 0) == 7);
  CHECK(cfg.get_f64("dt", 2.5) == 2.5);  // default consumed
  auto echo = cfg.echo();
  bool saw_default = false, saw_override = false;
  for (const auto& [k, v] : echo) {
    if (k == "dt" && v == "2.5") saw_default = true;
    if (k == "n_obs" && v == "7") saw_override = true;
  }
  CHECK(saw_default);
  CHECK(saw_override);

  // Malformed lines carry the file location.
  std::string bad = dir + "/bad.ini";
  {
    std::ofstream os(bad);
    os << "just-a-token\n";
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(Config::load(bad)),
                       doctest::Contains("bad.ini:1"), std::runtime_error);
  CHECK_THROWS(static_cast<void>(Config::load(dir + "/missing.ini")));

  Config typo = Config::load("");
  typo.override_kv("n_obs", "many");
  CHECK_THROWS(static_cast<void>(typo.get_i64("n_obs", 0)));
}

TEST_CASE("simulate writes the dataset and reruns are byte-identical") {
  std::string d1 = scratch_dir("sim1"), d2 = scratch_dir("sim2");
  Config c1 = base_cfg(d1);
  c1.override_kv("model", "brownian");
  c1.override_kv("n_obs", "10");
  c1.override_kv("seed", "5");
  REQUIRE(sam::cli::cmd_simulate(c1) == 0);
  auto rows1 = data_lines(d1 + "/dataset.csv");
  CHECK(rows1.size() == 12);  // header line + 11 observation rows
  CHECK(rows1[0] == "time,value");

  Config c2 = base_cfg(d2);
  c2.override_kv("model", "brownian");
  c2.override_kv("n_obs", "10");
  c2.override_kv("seed", "5");
  REQUIRE(sam::cli::cmd_simulate(c2) == 0);
  CHECK(data_lines(d2 + "/dataset.csv") == rows1);

  // A different seed moves the data.
  Config c3 = base_cfg(d2);
  c3.override_kv("model", "brownian");
  c3.override_kv("n_obs", "10");
  c3.override_kv("seed", "6");
  REQUIRE(sam::cli::cmd_simulate(c3) == 0);
  CHECK(data_lines(d2 + "/dataset.csv") != rows1);
}

TEST_CASE("simulate-bridge pins the endpoints and reports the minimum") {
  std::string dir = scratch_dir("bridge");
  Config cfg = base_cfg(dir);
  cfg.override_kv("model", "brownian");
  cfg.override_kv("t", "2");
  REQUIRE(sam::cli::cmd_simulate_bridge(cfg) == 0);

  auto rows = data_lines(dir + "/bridge.csv");
  REQUIRE(rows.size() >= 3);
  CHECK(rows[0] == "time,value");
  CHECK(rows[1] == "0,0");    // (0, x) with x = eta(0) = 0
  CHECK(rows.back() == "2,1");  // (t, y) with y = eta(1) = 1
  double prev = -1.0, min_seen = 1e300;
  for (size_t i = 1; i < rows.size(); ++i) {
    std::istringstream is(rows[i]);
    std::string a, b;
    std::getline(is, a, ',');
    std::getline(is, b);
    double tm = std::stod(a), val = std::stod(b);
    CHECK(tm > prev);
    prev = tm;
    min_seen = std::min(min_seen, val);
  }
  // The reported exact minimum lies at or below every skeleton value.
  std::ifstream is(dir + "/bridge.csv");
  std::string line;
  double reported_min = 1e300;
  bool saw_tau = false, saw_scale = false;
  while (std::getline(is, line)) {
    if (line.rfind("# min: ", 0) == 0) reported_min = std::stod(line.substr(7));
    if (line.rfind("# tau: ", 0) == 0) saw_tau = true;
    if (line.rfind("# scale: ", 0) == 0) saw_scale = true;
  }
  CHECK(saw_tau);
  CHECK(saw_scale);
  CHECK(reported_min <= min_seen);
}

TEST_CASE("estimate on the zero-variance model recovers the closed form") {
  std::string dir = scratch_dir("estimate");
  auto with_base = [&]() {
    Config cfg = base_cfg(dir);
    cfg.override_kv("model", "brownian");
    cfg.override_kv("n_obs", "50");
    cfg.override_kv("seed", "5");
    return cfg;
  };

  Config sim = with_base();
  REQUIRE(sam::cli::cmd_simulate(sim) == 0);
  Table data = read_table(dir + "/dataset.csv");
  double sum_d = 0.0, sum_t = 0.0;
  for (size_t i = 1; i < data.rows.size(); ++i) {
    sum_d += data.rows[i][1] - data.rows[i - 1][1];
    sum_t += data.rows[i][0] - data.rows[i - 1][0];
  }
  double mu_hat = sum_d / sum_t;

  Config est = with_base();
  est.override_kv("n_bank", "20");
  est.override_kv("eps", "1e-7");
  REQUIRE(sam::cli::cmd_estimate(est) == 0);

  Table t = read_table(dir + "/estimate.csv");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][t.col("n_bank")] == 20.0);
  CHECK(t.rows[0][t.col("eps")] == 1e-7);
  CHECK(t.rows[0][t.col("theta_0")] ==
        doctest::Approx(mu_hat).epsilon(1e-5));
  CHECK(t.rows[0][t.col("se_0")] ==
        doctest::Approx(1.0 / std::sqrt(sum_t)).epsilon(1e-4));
  CHECK(t.rows[0][t.col("info_pd")] == 1.0);

  Table trace = read_table(dir + "/trace.csv");
  CHECK(trace.columns[0] == "eval_index");
  CHECK(trace.rows.size() >= 10);
  CHECK(trace.rows[0][0] == 1.0);

  // The trace ends at (or before) the total evaluation count.
  double evals = t.rows[0][t.col("evals")];
  CHECK(trace.rows.size() == static_cast<size_t>(evals));
}

TEST_CASE("estimate ladder emits one row per stage with tightening eps") {
  std::string dir = scratch_dir("ladder");
  Config cfg = base_cfg(dir);
  cfg.override_kv("model", "brownian");
  cfg.override_kv("n_obs", "30");
  cfg.override_kv("seed", "9");
  cfg.override_kv("ladder", "1 2 5");
  REQUIRE(sam::cli::cmd_estimate(cfg) == 0);

  Table ladder = read_table(dir + "/ladder.csv");
  REQUIRE(ladder.rows.size() == 3);
  size_t cn = ladder.col("n_bank"), ce = ladder.col("eps");
  CHECK(ladder.rows[0][cn] == 1.0);
  CHECK(ladder.rows[1][cn] == 2.0);
  CHECK(ladder.rows[2][cn] == 5.0);
  for (size_t i = 1; i < 3; ++i)
    CHECK(ladder.rows[i][ce] <= ladder.rows[i - 1][ce]);

  Table final_fit = read_table(dir + "/estimate.csv");
  REQUIRE(final_fit.rows.size() == 1);
  CHECK(final_fit.rows[0][final_fit.col("n_bank")] == 5.0);
  CHECK(fs::exists(dir + "/trace.csv"));
}

TEST_CASE("bank cache is created on first use and reused after") {
  std::string dir = scratch_dir("cache");
  std::string cache = dir + "/banks";
  auto run = [&](const std::string& sub) {
    std::string out = dir + "/" + sub;
    Config cfg = base_cfg(out);
    cfg.override_kv("model", "logistic");
    cfg.override_kv("n_obs", "4");
    cfg.override_kv("seed", "11");
    cfg.override_kv("n_bank", "30");
    cfg.override_kv("eps", "1e-3");
    cfg.override_kv("with_se", "0");
    cfg.override_kv("bank_cache", cache);
    REQUIRE(sam::cli::cmd_estimate(cfg) == 0);
    return data_lines(out + "/estimate.csv");
  };
  auto first = run("a");
  size_t bank_files = 0;
  for (const auto& e : fs::directory_iterator(cache)) {
    CHECK(e.path().extension() == ".bin");
    ++bank_files;
  }
  CHECK(bank_files == 4);  // one per observation interval
  auto second = run("b");
  CHECK(first == second);
}

TEST_CASE("surface sweeps a coordinate grid") {
  std::string dir = scratch_dir("surface");
  Config cfg = base_cfg(dir);
  cfg.override_kv("model", "brownian");
  cfg.override_kv("n_obs", "20");
  cfg.override_kv("n_bank", "10");
  cfg.override_kv("points_a", "5");
  cfg.override_kv("lo_a", "-1");
  cfg.override_kv("hi_a", "1");
  REQUIRE(sam::cli::cmd_surface(cfg) == 0);
  Table t = read_table(dir + "/surface.csv");
  REQUIRE(t.rows.size() == 5);
  size_t ct = t.col("theta_0"), cl = t.col("loglik");
  CHECK(t.rows[0][ct] == -1.0);
  CHECK(t.rows[4][ct] == 1.0);
  for (const auto& r : t.rows) CHECK(std::isfinite(r[cl]));
  // The grid is evenly spaced.
  for (size_t i = 1; i < 5; ++i)
    CHECK(t.rows[i][ct] - t.rows[i - 1][ct] == doctest::Approx(0.5));
}

TEST_CASE("profile traces the likelihood over one pinned coordinate") {
  std::string dir = scratch_dir("profile");
  Config cfg = base_cfg(dir);
  cfg.override_kv("model", "brownian");
  cfg.override_kv("n_obs", "20");
  cfg.override_kv("n_bank", "10");
  cfg.override_kv("coord", "0");
  cfg.override_kv("points", "4");
  REQUIRE(sam::cli::cmd_profile(cfg) == 0);
  Table t = read_table(dir + "/profile.csv");
  REQUIRE(t.rows.size() == 4);
  CHECK(std::isfinite(t.rows[0][t.col("loglik")]));
}

TEST_CASE("zero-variance replicates collapse the scaling table to zero") {
  std::string dir = scratch_dir("table2");
  Config cfg = base_cfg(dir);
  cfg.override_kv("model", "brownian");
  cfg.override_kv("n_obs", "10");
  cfg.override_kv("seed", "13");
  cfg.override_kv("ref_n", "50");
  cfg.override_kv("sizes", "5 10");
  cfg.override_kv("reps", "3");
  REQUIRE(sam::cli::cmd_table2(cfg) == 0);
  Table t = read_table(dir + "/table2.csv");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][t.col("N")] == 5.0);
  CHECK(t.rows[1][t.col("N")] == 10.0);
  // The estimator has zero Monte Carlo variance for this model, so every
  // replicate fit reproduces the reference fit exactly.
  CHECK(t.rows[0][t.col("mean_0")] == 0.0);
  CHECK(t.rows[1][t.col("mean_0")] == 0.0);
  CHECK(t.rows[0][t.col("se_0")] == 0.0);
}

TEST_CASE("bank-size scaling runs parse their n:rule tokens") {
  std::string dir = scratch_dir("nscaling");
  Config cfg = base_cfg(dir);
  cfg.override_kv("model", "brownian");
  cfg.override_kv("reps", "3");
  cfg.override_kv("runs", "20:sqrt 20:3");
  cfg.override_kv("seed", "17");
  REQUIRE(sam::cli::cmd_nscaling(cfg) == 0);
  Table t = read_table(dir + "/nscaling.csv");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][t.col("n")] == 20.0);
  CHECK(t.rows[0][t.col("N")] == 5.0);  // ceil(sqrt(20))
  CHECK(t.rows[1][t.col("N")] == 3.0);
  CHECK(std::isfinite(t.rows[0][t.col("var_0")]));

  Config bad = base_cfg(dir);
  bad.override_kv("model", "brownian");
  bad.override_kv("runs", "20");
  CHECK_THROWS(sam::cli::cmd_nscaling(bad));
}

TEST_CASE("validate runs a named subset and reports per-check rows") {
  std::string dir = scratch_dir("validate");
  Config cfg = base_cfg(dir);
  cfg.override_kv("checks", "c01 c05");
  int rc = sam::cli::cmd_validate(cfg);
  CHECK(rc == 0);
  auto rows = data_lines(dir + "/validate_report.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "check,pass,stat,threshold,runtime_s,budget_s");
  CHECK(rows[1].rfind("c01", 0) == 0);
  CHECK(rows[2].rfind("c05", 0) == 0);
  CHECK(rows[1].find(",1,") != std::string::npos);
  CHECK(rows[2].find(",1,") != std::string::npos);

  Config unknown = base_cfg(dir);
  unknown.override_kv("checks", "no-such-check");
  CHECK_THROWS(sam::cli::cmd_validate(unknown));
}
