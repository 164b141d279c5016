#include <filesystem>
#include <fstream>
#include <sstream>

#include "dirh2/experiment.hpp"
#include "doctest.h"

using namespace dirh2;

namespace {

RunConfig base_config() {
  RunConfig cfg;
  cfg.mesh_m = 8;
  cfg.kappa = 4.0;
  cfg.order = 3;
  cfg.leaf_size = 8;
  cfg.eps = 1e-3;
  cfg.eps_weights = 1e-4;
  cfg.error_mode = TruncationMode::block_relative;
  return cfg;
}

// CSV row with the trailing time columns stripped.
std::string strip_times(const std::string& row) {
  std::istringstream in(row);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(in, field, ',')) fields.push_back(field);
  std::string out;
  for (std::size_t i = 0; i + 9 < fields.size(); ++i) out += fields[i] + ",";
  return out;
}

}  // namespace

TEST_CASE("identical configs reproduce byte-identical results") {
  RunConfig cfg = base_config();
  RunResult a = run_experiment(cfg);
  RunResult b = run_experiment(cfg);
  CHECK(strip_times(a.csv_row()) == strip_times(b.csv_row()));
  CHECK(a.rel_error_interp == b.rel_error_interp);
  CHECK(a.rel_error_recomp == b.rel_error_recomp);

  // The reported error is reproducible from the saved artifacts.
  HelmholtzKernel kernel{a.kappa_eff};
  CHECK(rel_error_vs_exact(*a.recomp, kernel) == a.rel_error_recomp);
}

TEST_CASE("interpolation error decreases with the order") {
  double prev = 1e300;
  for (int order : {2, 3, 4}) {
    RunConfig cfg = base_config();
    cfg.order = order;
    RunResult r = run_experiment(cfg);
    CHECK(r.rel_error_interp < prev);
    prev = r.rel_error_interp;
  }
}

TEST_CASE("weight-compression sweep trades bytes against tolerance") {
  RunConfig exact = base_config();
  RunResult re = run_experiment(exact);

  std::size_t prev_bytes = 0;
  for (double eps_w : {1e-2, 1e-4, 1e-6}) {
    RunConfig cfg = base_config();
    cfg.weights = WeightsMode::compressed;
    cfg.eps_weights = eps_w;
    RunResult rc = run_experiment(cfg);
    CHECK(rc.weight_bytes >= prev_bytes);  // tighter tolerance, more storage
    prev_bytes = rc.weight_bytes;
    CHECK(rc.weight_bytes + rc.norm_bytes < re.weight_bytes);
    // final accuracy stays comparable to the exact-weight run
    CHECK(rc.rel_error_recomp <= 2.0 * re.rel_error_recomp + 1e-12);
  }
}

TEST_CASE("compare_modes") {
  RunConfig cfg = base_config();
  CompareResult same = compare_modes(cfg, cfg);
  std::istringstream csv(same.csv());
  std::string line;
  std::getline(csv, line);
  CHECK(line == "metric,a,b,delta");
  while (std::getline(csv, line)) {
    auto last = line.rfind(',');
    CHECK(line.substr(last + 1) == "0");
  }

  // Growing wave number adds admissible blocks.
  RunConfig hi = cfg;
  hi.kappa = 8.0;
  CompareResult grow = compare_modes(cfg, hi);
  CHECK(grow.b.blocks->admissible.size() > grow.a.blocks->admissible.size());

  RunConfig other = cfg;
  other.mesh_m = 16;
  CHECK_THROWS(compare_modes(cfg, other));
}

TEST_CASE("growing-kappa mode scales with sqrt(n)") {
  RunConfig cfg = base_config();
  cfg.mesh_m = 16;
  cfg.kappa_growing = true;
  cfg.measure_error = false;
  RunResult r = run_experiment(cfg);
  CHECK(r.kappa_eff == doctest::Approx(4.0).epsilon(1e-15));  // n = 2048 is the reference size

  RunConfig small = base_config();
  small.kappa_growing = true;
  small.measure_error = false;
  RunResult rs = run_experiment(small);
  CHECK(rs.kappa_eff == doctest::Approx(4.0 * std::sqrt(512.0 / 2048.0)).epsilon(1e-15));
}

TEST_CASE("invalid configurations are rejected") {
  RunConfig cfg = base_config();
  cfg.n_points = 100;  // both geometry sources set
  CHECK_THROWS(run_experiment(cfg));
  cfg = base_config();
  cfg.mesh_m = 0;
  CHECK_THROWS(run_experiment(cfg));
  cfg = base_config();
  cfg.eps = 0.0;
  CHECK_THROWS(run_experiment(cfg));
  cfg = base_config();
  cfg.order = 0;
  CHECK_THROWS(run_experiment(cfg));
}

TEST_CASE("artifact dumps are written") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "dirh2_exp_test";
  fs::create_directories(dir);
  RunConfig cfg = base_config();
  cfg.measure_error = false;
  cfg.out = (dir / "run.csv").string();
  cfg.dump_cloud = (dir / "cloud.xyz").string();
  cfg.dump_tree_stats = (dir / "tree.csv").string();
  cfg.dump_storage = (dir / "storage.csv").string();
  cfg.dump_weight_stats = (dir / "weights.csv").string();
  cfg.dump_rank_report = (dir / "ranks.csv").string();
  RunResult r = run_experiment(cfg);

  for (const char* name : {"run.csv", "cloud.xyz", "tree.csv", "storage.csv", "weights.csv", "ranks.csv"})
    CHECK(fs::exists(dir / name));

  std::ifstream run(dir / "run.csv");
  std::string header;
  std::getline(run, header);
  CHECK(header + "\n" == RunResult::csv_header());
  CHECK(read_xyz((dir / "cloud.xyz").string()).size() == 512);
  fs::remove_all(dir);
}
