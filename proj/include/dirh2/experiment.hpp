#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dirh2/recompress.hpp"

namespace dirh2 {

enum class WeightsMode { exact, compressed };

struct RunConfig {
  int mesh_m = 0;            // sphere mesh subdivision (8*m^2 points) ...
  std::size_t n_points = 0;  // ... or a random sphere cloud of this size
  double kappa = 4.0;
  bool kappa_growing = false;  // kappa scaled by sqrt(n / 2048)
  int order = 3;
  double eta1 = 1.0, eta2 = 1.0, eta3 = 1.0;
  int leaf_size = 32;
  double eps = 1e-4;
  double eps_weights = 1e-5;
  int k_norm = 1;
  WeightsMode weights = WeightsMode::exact;
  TruncationMode error_mode = TruncationMode::block_relative;
  bool symmetric_weights = false;
  std::uint64_t seed = 1;
  Exec exec = Exec::parallel;
  bool measure_error = true;  // off: skip the verification phase (storage-only runs)

  std::string out;  // CSV path, empty = stdout only
  std::string dump_cloud, dump_tree_stats, dump_storage, dump_weight_stats, dump_rank_report;
};

struct RunResult {
  RunConfig cfg;
  int n = 0;
  double kappa_eff = 0.0;

  std::shared_ptr<ClusterTree> tree;
  std::shared_ptr<DirectionFamily> dirs;
  std::shared_ptr<DirectedBlockTree> blocks;
  std::shared_ptr<DH2Matrix> interp;
  std::shared_ptr<DH2Matrix> recomp;
  std::shared_ptr<AdaptiveBasis> row_basis, col_basis;

  std::size_t weight_bytes = 0;  // full R (exact mode) or Rhat (compressed mode)
  std::size_t norm_bytes = 0;
  StorageReport interp_storage, recomp_storage;
  double rel_error_interp = -1.0;
  double rel_error_recomp = -1.0;
  int max_rank_interp = 0, max_rank_recomp = 0;

  std::vector<std::pair<std::string, double>> times;  // seconds per phase

  static std::string csv_header();
  std::string csv_row() const;
};

// Full pipeline: cloud, trees, directions, assembly, weights in the chosen
// mode, recompression, dense or sampled error measurement.
RunResult run_experiment(const RunConfig& cfg);

struct CompareResult {
  RunResult a, b;

  std::string csv() const;  // rows: metric,a,b,delta
};

// Side-by-side run of two configurations over the same geometry and seed.
CompareResult compare_modes(const RunConfig& cfg_a, const RunConfig& cfg_b);

// ||H - A||_2 / ||H||_2 against the exact kernel matrix: power iteration on
// the dense residual for n <= dense_limit, probe vectors with direct
// summation otherwise. Deterministic for a fixed seed and iteration count.
double rel_error_vs_exact(const DH2Matrix& a, const HelmholtzKernel& kernel, int power_iters = 40,
                          std::uint64_t seed = 7, int dense_limit = 4096);

}  // namespace dirh2
