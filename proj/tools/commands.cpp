#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sam/bridge.hpp"
#include "sam/checks.hpp"
#include "sam/csvio.hpp"
#include "sam/datasim.hpp"
#include "sam/likelihood.hpp"
#include "sam/model.hpp"
#include "sam/optimizer.hpp"
#include "sam/rng.hpp"
#include "sam/stats.hpp"
#include "sam/version.hpp"
#include "sam/xi.hpp"

namespace sam::cli {

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

struct ModelSetup {
  std::unique_ptr<TransformedModel> model;
  ParameterBox box;
  ParameterVector theta0;
  std::string name;
};

ModelSetup model_setup(Config& cfg) {
  ModelSetup s;
  s.name = cfg.get_str("model", "logistic");
  s.model = make_model(s.name);
  std::vector<double> lo_def, hi_def, th_def;
  if (s.name == "logistic") {
    lo_def = {0.03, 850.0, 0.09};
    hi_def = {0.18, 1200.0, 0.12};
    th_def = {0.1, 1000.0, 0.1};
  } else {
    lo_def = {-2.0};
    hi_def = {2.0};
    th_def = {0.5};
  }
  s.box = ParameterBox(cfg.get_f64_list("box_lo", lo_def),
                       cfg.get_f64_list("box_hi", hi_def));
  if (s.box.dim() != s.model->dim())
    throw std::invalid_argument("box dimension does not match the model");
  std::string err = s.model->check_box(s.box);
  if (!err.empty()) throw std::invalid_argument("bad parameter box: " + err);
  s.theta0 = cfg.get_f64_list("theta0", th_def);
  if (static_cast<int>(s.theta0.size()) != s.model->dim())
    throw std::invalid_argument("theta0 dimension does not match the model");
  return s;
}

std::string out_dir_of(Config& cfg) {
  std::string out = cfg.get_str("out", ".");
  std::filesystem::create_directories(out);
  return out;
}

OutHeader header_of(Config& cfg, double wall) {
  OutHeader h;
  h.tool = kVersion;
  h.seed = cfg.get_u64("seed", 1);
  h.config = cfg.echo();
  h.wall_seconds = wall;
  return h;
}

int threads_of(Config& cfg) {
  return static_cast<int>(cfg.get_i64("threads", 0));
}

EulerConfig euler_of(Config& cfg) {
  EulerConfig e;
  e.substeps_log2 = static_cast<int>(cfg.get_i64("euler_substeps_log2", 10));
  e.paths = cfg.get_i64("euler_paths", 100000);
  e.bin_width = cfg.get_f64("euler_bin_width", 0.0);
  return e;
}

// Dataset for dataset-driven commands: an explicit `data` CSV when given,
// otherwise a fresh simulation under the configured regime.
ObservationSeries dataset_of(Config& cfg, const ModelSetup& ms) {
  if (cfg.has("data")) return read_series_csv(cfg.require_str("data"));
  double v0_def = ms.name == "logistic" ? 700.0 : 0.0;
  double v0 = cfg.get_f64("v0", v0_def);
  int n = static_cast<int>(cfg.get_i64("n_obs", 1000));
  double dt = cfg.get_f64("dt", 1.0);
  return simulate_dataset(*ms.model, ms.theta0, v0, n, dt, euler_of(cfg),
                          mix_seed(cfg.get_u64("seed", 1), 1));
}

std::vector<uint32_t> parse_u32_list(const std::vector<std::string>& toks,
                                     const std::string& what) {
  std::vector<uint32_t> out;
  for (const auto& t : toks) {
    unsigned long v = std::stoul(t);
    if (v == 0) throw std::invalid_argument(what + ": zero entry");
    out.push_back(static_cast<uint32_t>(v));
  }
  return out;
}

SimplexConfig simplex_of(Config& cfg, int threads) {
  SimplexConfig sc;
  sc.eps = cfg.get_f64("eps", 1e-6);
  sc.init_scale = cfg.get_f64("init_scale", 0.05);
  sc.max_evals = static_cast<int>(cfg.get_i64("max_evals", 20000));
  sc.restart = cfg.get_i64("restart", 1) != 0;
  sc.fd_h_scale = cfg.get_f64("fd_h_scale", 1e-4);
  sc.threads = threads;
  return sc;
}

void print_kv(const std::string& key, const std::string& value) {
  std::cout << key << " = " << value << "\n";
}

void print_mat(const std::string& name, const Mat& m) {
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j)
      print_kv(name + "_" + std::to_string(i) + "_" + std::to_string(j),
               fmt_g17(m.at(i, j)));
}

void print_result_block(const MleResult& r) {
  for (size_t k = 0; k < r.theta_hat.size(); ++k)
    print_kv("theta_hat_" + std::to_string(k), fmt_g17(r.theta_hat[k]));
  for (size_t k = 0; k < r.se_obs.size(); ++k)
    print_kv("se_obs_" + std::to_string(k), fmt_g17(r.se_obs[k]));
  print_kv("loglik", fmt_g17(r.loglik));
  print_kv("evals", std::to_string(r.evals));
  print_kv("n_bank", std::to_string(r.n_bank));
  print_kv("eps", fmt_g17(r.eps_used));
  print_kv("info_pd", r.info_pd ? "1" : "0");
  if (r.observed_info.n > 0) {
    print_mat("observed_info", r.observed_info);
    print_mat("score_spread", r.score_spread_mat);
    if (r.mc_cov.n > 0) print_mat("mc_cov", r.mc_cov);
  }
}

std::vector<double> result_row(const MleResult& r) {
  std::vector<double> row = {static_cast<double>(r.n_bank), r.eps_used,
                             static_cast<double>(r.evals), r.loglik};
  row.insert(row.end(), r.theta_hat.begin(), r.theta_hat.end());
  row.insert(row.end(), r.se_obs.begin(), r.se_obs.end());
  row.push_back(r.info_pd ? 1.0 : 0.0);
  return row;
}

std::vector<std::string> result_columns(int d) {
  std::vector<std::string> cols = {"n_bank", "eps", "evals", "loglik"};
  for (int k = 0; k < d; ++k) cols.push_back("theta_" + std::to_string(k));
  for (int k = 0; k < d; ++k) cols.push_back("se_" + std::to_string(k));
  cols.push_back("info_pd");
  return cols;
}

void write_trace_csv(const std::string& path, const OutHeader& h,
                     const std::vector<TracePoint>& trace, int d) {
  std::vector<std::string> cols = {"eval_index"};
  for (int k = 0; k < d; ++k) cols.push_back("theta_" + std::to_string(k));
  cols.push_back("loglik");
  std::vector<std::vector<double>> rows;
  rows.reserve(trace.size());
  for (const TracePoint& p : trace) {
    std::vector<double> row = {static_cast<double>(p.eval)};
    row.insert(row.end(), p.theta.begin(), p.theta.end());
    row.push_back(p.value);
    rows.push_back(std::move(row));
  }
  write_table_csv(path, h, cols, rows);
}

}  // namespace

int cmd_simulate(Config& cfg) {
  Timer timer;
  ModelSetup ms = model_setup(cfg);
  double v0_def = ms.name == "logistic" ? 700.0 : 0.0;
  double v0 = cfg.get_f64("v0", v0_def);
  int n = static_cast<int>(cfg.get_i64("n_obs", 1000));
  double dt = cfg.get_f64("dt", 1.0);
  uint64_t seed = cfg.get_u64("seed", 1);
  std::string out = out_dir_of(cfg);

  ObservationSeries s = simulate_dataset(*ms.model, ms.theta0, v0, n, dt,
                                         euler_of(cfg), mix_seed(seed, 1));
  std::string path = out + "/dataset.csv";
  write_series_csv(path, header_of(cfg, timer.s()), s);
  std::cout << "wrote " << path << " (" << s.times.size() << " rows)\n";
  return 0;
}

int cmd_simulate_bridge(Config& cfg) {
  Timer timer;
  ModelSetup ms = model_setup(cfg);
  ParameterVector th = cfg.get_f64_list("theta", ms.theta0);
  double v_def = ms.name == "logistic" ? 1000.0 : 0.0;
  double w_def = ms.name == "logistic" ? 1100.0 : 1.0;
  double v = cfg.get_f64("v", v_def);
  double w = cfg.get_f64("w", w_def);
  double t = cfg.get_f64("t", 1.0);
  long max_proposals = cfg.get_i64("max_proposals", 1000000);
  uint64_t seed = cfg.get_u64("seed", 1);
  std::string out = out_dir_of(cfg);

  BridgeFrame f{ms.model->eta(v, th), ms.model->eta(w, th), t};
  Stream st(make_key(seed, 0, 0, Purpose::misc));
  EaResult ea = ea_sample_bridge(*ms.model, th, f, st, max_proposals);

  std::string path = out + "/bridge.csv";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_header(os, header_of(cfg, timer.s()));
  os << "# scale: transformed (unit diffusion)\n";
  os << "# min: " << fmt_g17(ea.skeleton.min_value) << "\n";
  os << "# tau: " << fmt_g17(ea.skeleton.tau) << "\n";
  os << "# proposals: " << ea.proposals << "\n";
  os << "time,value\n";
  os << fmt_g17(0.0) << "," << fmt_g17(f.x) << "\n";
  for (size_t j = 0; j < ea.skeleton.times.size(); ++j)
    os << fmt_g17(ea.skeleton.times[j]) << ","
       << fmt_g17(ea.skeleton.values[j]) << "\n";
  os << fmt_g17(t) << "," << fmt_g17(f.y) << "\n";
  std::cout << "wrote " << path << " (" << ea.skeleton.times.size() + 2
            << " rows, " << ea.proposals << " proposals)\n";
  return 0;
}

int cmd_estimate(Config& cfg) {
  Timer timer;
  ModelSetup ms = model_setup(cfg);
  int threads = threads_of(cfg);
  uint64_t seed = cfg.get_u64("seed", 1);
  std::string out = out_dir_of(cfg);
  ObservationSeries data = dataset_of(cfg, ms);
  std::vector<ObsPair> pairs = series_to_pairs(data);
  ParameterVector start = cfg.get_f64_list("start", ms.box.midpoint());
  bool with_se = cfg.get_i64("with_se", 1) != 0;
  uint64_t bank_seed = mix_seed(seed, 2);

  std::string mode_str = cfg.get_str("bank_mode", "auto");
  LikelihoodSurface::Materialize mode = LikelihoodSurface::kAuto;
  if (mode_str == "store")
    mode = LikelihoodSurface::kStore;
  else if (mode_str == "lazy")
    mode = LikelihoodSurface::kLazy;
  else if (mode_str != "auto")
    throw std::invalid_argument("bank_mode must be auto, store, or lazy");

  int d = ms.model->dim();
  std::vector<uint32_t> ladder = parse_u32_list(cfg.get_tokens("ladder"),
                                                "ladder");
  if (!ladder.empty()) {
    SimplexConfig sc = simplex_of(cfg, threads);
    auto builder = [&](uint32_t n) {
      return LikelihoodSurface(*ms.model, ms.box, pairs, bank_seed, n, mode,
                               threads);
    };
    std::vector<MleResult> fits =
        warm_start_ladder(builder, ladder, start, sc, with_se);
    std::vector<std::vector<double>> rows;
    for (const MleResult& r : fits) rows.push_back(result_row(r));
    OutHeader h = header_of(cfg, timer.s());
    write_table_csv(out + "/ladder.csv", h, result_columns(d), rows);
    write_table_csv(out + "/estimate.csv", h, result_columns(d),
                    {result_row(fits.back())});
    write_trace_csv(out + "/trace.csv", h, fits.back().trace, d);
    print_result_block(fits.back());
    std::cout << "wrote " << out << "/ladder.csv, estimate.csv, trace.csv\n";
    return 0;
  }

  uint32_t n_bank = static_cast<uint32_t>(cfg.get_i64("n_bank", 100));
  SimplexConfig sc = simplex_of(cfg, threads);
  std::string cache = cfg.get_str("bank_cache", "");

  std::unique_ptr<LikelihoodSurface> surface;
  if (!cache.empty()) {
    std::filesystem::create_directories(cache);
    std::vector<XiBank> banks;
    banks.reserve(pairs.size());
    for (size_t i = 0; i < pairs.size(); ++i) {
      BankSpec spec{bank_seed, static_cast<uint32_t>(i), pairs[i],
                    ms.model.get(), ms.box};
      std::string path = cache + "/bank_" + std::to_string(i) + "_" +
                         std::to_string(n_bank) + ".bin";
      XiBank bank;
      if (!load_bank_cache(path, spec, n_bank, bank)) {
        bank = XiBank(spec, n_bank, true);
        bank.build(threads);
        save_bank_cache(path, bank);
      }
      banks.push_back(std::move(bank));
    }
    surface = std::make_unique<LikelihoodSurface>(*ms.model, ms.box, pairs,
                                                  std::move(banks));
  } else {
    surface = std::make_unique<LikelihoodSurface>(*ms.model, ms.box, pairs,
                                                  bank_seed, n_bank, mode,
                                                  threads);
  }

  MleResult r = maximize(*surface, start, sc, with_se);
  OutHeader h = header_of(cfg, timer.s());
  write_table_csv(out + "/estimate.csv", h, result_columns(d),
                  {result_row(r)});
  write_trace_csv(out + "/trace.csv", h, r.trace, d);
  print_result_block(r);
  std::cout << "wrote " << out << "/estimate.csv, trace.csv\n";
  return 0;
}

int cmd_surface(Config& cfg) {
  Timer timer;
  ModelSetup ms = model_setup(cfg);
  int threads = threads_of(cfg);
  uint64_t seed = cfg.get_u64("seed", 1);
  std::string out = out_dir_of(cfg);
  ObservationSeries data = dataset_of(cfg, ms);
  std::vector<ObsPair> pairs = series_to_pairs(data);
  uint32_t n_bank = static_cast<uint32_t>(cfg.get_i64("n_bank", 100));
  int d = ms.model->dim();

  int ca = static_cast<int>(cfg.get_i64("coord_a", 0));
  int cb = static_cast<int>(cfg.get_i64("coord_b", -1));
  if (ca < 0 || ca >= d || cb >= d || (cb >= 0 && cb == ca))
    throw std::invalid_argument("bad surface coordinates");
  long pa = cfg.get_i64("points_a", 21);
  long pb = cb >= 0 ? cfg.get_i64("points_b", 21) : 1;
  if (pa < 1 || pb < 1) throw std::invalid_argument("bad grid point counts");
  double lo_a = cfg.get_f64("lo_a", ms.box.lo[static_cast<size_t>(ca)]);
  double hi_a = cfg.get_f64("hi_a", ms.box.hi[static_cast<size_t>(ca)]);
  double lo_b = cb >= 0 ? cfg.get_f64("lo_b", ms.box.lo[static_cast<size_t>(cb)])
                        : 0.0;
  double hi_b = cb >= 0 ? cfg.get_f64("hi_b", ms.box.hi[static_cast<size_t>(cb)])
                        : 0.0;
  ParameterVector at = cfg.get_f64_list("at", ms.box.midpoint());

  LikelihoodSurface surface(*ms.model, ms.box, pairs, mix_seed(seed, 2),
                            n_bank, LikelihoodSurface::kAuto, threads);
  auto grid_value = [](double lo, double hi, long pts, long i) {
    return pts == 1 ? lo
                    : lo + (hi - lo) * static_cast<double>(i) /
                          static_cast<double>(pts - 1);
  };
  std::vector<std::vector<double>> rows;
  for (long ia = 0; ia < pa; ++ia) {
    for (long ib = 0; ib < pb; ++ib) {
      ParameterVector th = at;
      th[static_cast<size_t>(ca)] = grid_value(lo_a, hi_a, pa, ia);
      if (cb >= 0) th[static_cast<size_t>(cb)] = grid_value(lo_b, hi_b, pb, ib);
      std::vector<double> row = th;
      row.push_back(surface.loglik(th, threads));
      rows.push_back(std::move(row));
    }
  }
  std::vector<std::string> cols;
  for (int k = 0; k < d; ++k) cols.push_back("theta_" + std::to_string(k));
  cols.push_back("loglik");
  std::string path = out + "/surface.csv";
  write_table_csv(path, header_of(cfg, timer.s()), cols, rows);
  std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_profile(Config& cfg) {
  Timer timer;
  ModelSetup ms = model_setup(cfg);
  int threads = threads_of(cfg);
  uint64_t seed = cfg.get_u64("seed", 1);
  std::string out = out_dir_of(cfg);
  ObservationSeries data = dataset_of(cfg, ms);
  std::vector<ObsPair> pairs = series_to_pairs(data);
  uint32_t n_bank = static_cast<uint32_t>(cfg.get_i64("n_bank", 100));
  int d = ms.model->dim();

  int coord = static_cast<int>(cfg.get_i64("coord", 0));
  if (coord < 0 || coord >= d)
    throw std::invalid_argument("bad profile coordinate");
  long pts = cfg.get_i64("points", 21);
  if (pts < 1) throw std::invalid_argument("bad grid point count");
  double lo = cfg.get_f64("lo", ms.box.lo[static_cast<size_t>(coord)]);
  double hi = cfg.get_f64("hi", ms.box.hi[static_cast<size_t>(coord)]);
  ParameterVector start = cfg.get_f64_list("start", ms.box.midpoint());
  SimplexConfig sc = simplex_of(cfg, threads);
  if (!cfg.has("eps")) sc.eps = 1e-5;

  LikelihoodSurface surface(*ms.model, ms.box, pairs, mix_seed(seed, 2),
                            n_bank, LikelihoodSurface::kAuto, threads);
  std::vector<double> grid;
  for (long i = 0; i < pts; ++i)
    grid.push_back(pts == 1 ? lo
                            : lo + (hi - lo) * static_cast<double>(i) /
                                  static_cast<double>(pts - 1));
  std::vector<ProfilePoint> prof = profile(surface, coord, grid, start, sc);

  std::vector<std::string> cols = {"coord_value"};
  for (int k = 0; k < d; ++k) cols.push_back("theta_" + std::to_string(k));
  cols.push_back("loglik");
  std::vector<std::vector<double>> rows;
  for (const ProfilePoint& p : prof) {
    std::vector<double> row = {p.coord_value};
    row.insert(row.end(), p.theta.begin(), p.theta.end());
    row.push_back(p.loglik);
    rows.push_back(std::move(row));
  }
  std::string path = out + "/profile.csv";
  write_table_csv(path, header_of(cfg, timer.s()), cols, rows);
  std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_table2(Config& cfg) {
  Timer timer;
  ModelSetup ms = model_setup(cfg);
  int threads = threads_of(cfg);
  uint64_t seed = cfg.get_u64("seed", 1);
  std::string out = out_dir_of(cfg);
  if (!cfg.has("n_obs")) cfg.override_kv("n_obs", "250");
  ObservationSeries data = dataset_of(cfg, ms);
  std::vector<ObsPair> pairs = series_to_pairs(data);

  uint32_t ref_n = static_cast<uint32_t>(cfg.get_i64("ref_n", 10000));
  std::vector<uint32_t> sizes = parse_u32_list(cfg.get_tokens("sizes"), "sizes");
  if (sizes.empty()) sizes = {25, 50, 100};
  int reps = static_cast<int>(cfg.get_i64("reps", 200));
  if (reps < 2) throw std::invalid_argument("reps must be at least 2");
  ParameterVector start = cfg.get_f64_list("start", ms.box.midpoint());

  // One optimizer setting for the reference and every replicate, so a
  // bank-independent surface yields literally identical maximizers.
  SimplexConfig sc = simplex_of(cfg, threads);
  if (!cfg.has("eps")) sc.eps = 1e-4;
  if (!cfg.has("init_scale")) sc.init_scale = 0.02;

  ParameterVector ref;
  {
    bool small = static_cast<uint64_t>(pairs.size()) * ref_n <= 4000000;
    LikelihoodSurface ref_surface(
        *ms.model, ms.box, pairs, mix_seed(seed, 3), ref_n,
        small ? LikelihoodSurface::kStore : LikelihoodSurface::kAuto, threads);
    ref = maximize(ref_surface, start, sc, false).theta_hat;
  }

  size_t d = ref.size();
  std::vector<std::vector<double>> rows;
  for (uint32_t N : sizes) {
    std::vector<std::vector<double>> scaled(
        d, std::vector<double>(static_cast<size_t>(reps)));
    for (int r = 0; r < reps; ++r) {
      LikelihoodSurface surf(
          *ms.model, ms.box, pairs,
          mix_seed(seed, 4 + 1000ull * N + static_cast<uint64_t>(r)), N,
          LikelihoodSurface::kAuto, threads);
      ParameterVector th = maximize(surf, start, sc, false).theta_hat;
      for (size_t k = 0; k < d; ++k)
        scaled[k][static_cast<size_t>(r)] =
            std::sqrt(static_cast<double>(N)) * (th[k] - ref[k]);
    }
    std::vector<double> row = {static_cast<double>(N)};
    for (size_t k = 0; k < d; ++k) row.push_back(mean_of(scaled[k]));
    for (size_t k = 0; k < d; ++k)
      row.push_back(std::sqrt(variance_of(scaled[k]) /
                              static_cast<double>(reps)));
    rows.push_back(std::move(row));
  }

  std::vector<std::string> cols = {"N"};
  for (size_t k = 0; k < d; ++k) cols.push_back("mean_" + std::to_string(k));
  for (size_t k = 0; k < d; ++k) cols.push_back("se_" + std::to_string(k));
  std::string path = out + "/table2.csv";
  write_table_csv(path, header_of(cfg, timer.s()), cols, rows);
  std::cout << "wrote " << path << " (" << rows.size() << " rows, ref N="
            << ref_n << ")\n";
  return 0;
}

int cmd_nscaling(Config& cfg) {
  Timer timer;
  ModelSetup ms = model_setup(cfg);
  int threads = threads_of(cfg);
  uint64_t seed = cfg.get_u64("seed", 1);
  std::string out = out_dir_of(cfg);
  double v0_def = ms.name == "logistic" ? 700.0 : 0.0;
  double v0 = cfg.get_f64("v0", v0_def);
  double dt = cfg.get_f64("dt", 1.0);
  EulerConfig euler = euler_of(cfg);
  int reps = static_cast<int>(cfg.get_i64("reps", 100));
  if (reps < 2) throw std::invalid_argument("reps must be at least 2");

  // Runs are `n:rule` tokens; rule is `sqrt` (N = ceil(sqrt(n))) or a fixed
  // integer bank size.
  std::vector<std::string> run_toks = cfg.get_tokens("runs");
  if (run_toks.empty())
    run_toks = {"100:sqrt", "400:sqrt", "100:5", "400:5", "1600:5"};

  SimplexConfig sc = simplex_of(cfg, threads);
  if (!cfg.has("eps")) sc.eps = 1e-4;
  if (!cfg.has("init_scale")) sc.init_scale = 0.02;

  size_t d = ms.theta0.size();
  std::vector<std::vector<double>> rows;
  for (size_t idx = 0; idx < run_toks.size(); ++idx) {
    const std::string& tok = run_toks[idx];
    size_t colon = tok.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("runs entries must look like 400:sqrt");
    int n = std::stoi(tok.substr(0, colon));
    std::string rule = tok.substr(colon + 1);
    uint32_t N = rule == "sqrt"
                     ? static_cast<uint32_t>(
                           std::ceil(std::sqrt(static_cast<double>(n))))
                     : static_cast<uint32_t>(std::stoul(rule));
    if (n < 1 || N < 1) throw std::invalid_argument("bad runs entry: " + tok);

    std::vector<std::vector<double>> scaled(
        d, std::vector<double>(static_cast<size_t>(reps)));
    for (int r = 0; r < reps; ++r) {
      uint64_t salt = 5 + (idx + 1) * 1000000ull + 2ull * static_cast<uint64_t>(r);
      ObservationSeries data = simulate_dataset(*ms.model, ms.theta0, v0, n,
                                                dt, euler, mix_seed(seed, salt));
      LikelihoodSurface surf(*ms.model, ms.box, series_to_pairs(data),
                             mix_seed(seed, salt + 1), N,
                             LikelihoodSurface::kAuto, threads);
      ParameterVector th = maximize(surf, ms.theta0, sc, false).theta_hat;
      for (size_t k = 0; k < d; ++k)
        scaled[k][static_cast<size_t>(r)] =
            std::sqrt(static_cast<double>(n)) * (th[k] - ms.theta0[k]);
    }
    std::vector<double> row = {static_cast<double>(n), static_cast<double>(N)};
    for (size_t k = 0; k < d; ++k) row.push_back(mean_of(scaled[k]));
    for (size_t k = 0; k < d; ++k) row.push_back(variance_of(scaled[k]));
    rows.push_back(std::move(row));
  }

  std::vector<std::string> cols = {"n", "N"};
  for (size_t k = 0; k < d; ++k) cols.push_back("mean_" + std::to_string(k));
  for (size_t k = 0; k < d; ++k) cols.push_back("var_" + std::to_string(k));
  std::string path = out + "/nscaling.csv";
  write_table_csv(path, header_of(cfg, timer.s()), cols, rows);
  std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_validate(Config& cfg) {
  Timer timer;
  int threads = threads_of(cfg);
  std::string out = out_dir_of(cfg);
  std::vector<std::string> names = cfg.get_tokens("checks");

  std::vector<CheckResult> results = run_checks(names, threads, out);
  bool all_pass = true;
  for (const CheckResult& r : results) {
    all_pass = all_pass && r.pass;
    std::ostringstream line;
    line << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << "  stat="
         << fmt_g17(r.stat) << "  threshold=" << fmt_g17(r.threshold) << "  ("
         << r.runtime_s << " s";
    if (r.budget_s > 0.0) line << " / budget " << r.budget_s << " s";
    line << ")";
    std::cout << line.str() << "\n    " << r.detail << "\n";
  }

  std::string path = out + "/validate_report.csv";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_header(os, header_of(cfg, timer.s()));
  os << "check,pass,stat,threshold,runtime_s,budget_s\n";
  for (const CheckResult& r : results)
    os << r.name << "," << (r.pass ? 1 : 0) << "," << fmt_g17(r.stat) << ","
       << fmt_g17(r.threshold) << "," << fmt_g17(r.runtime_s) << ","
       << fmt_g17(r.budget_s) << "\n";
  std::cout << (all_pass ? "all checks passed\n" : "SOME CHECKS FAILED\n");
  return all_pass ? 0 : 1;
}

}  // namespace sam::cli
