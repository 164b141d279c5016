#include "dirh2/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dirh2 {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vector random_unit_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(gauss(rng), gauss(rng));
  v /= v.norm();
  return v;
}

// Direct O(n^2) kernel application in original point order.
Vector dense_kernel_apply(const ClusterTree& tree, const HelmholtzKernel& kernel, const Vector& x,
                          bool adjoint) {
  const int n = tree.n_points();
  Vector xt(n);
  for (int i = 0; i < n; ++i) xt(i) = x(tree.perm[i]);
  Vector yt(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    cplx acc(0.0);
    for (int j = 0; j < n; ++j) {
      if (norm(tree.points[i] - tree.points[j]) == 0.0) continue;
      cplx g = kernel(tree.points[i], tree.points[j]);
      acc += (adjoint ? std::conj(g) : g) * xt(j);
    }
    yt(i) = acc;
  }
  Vector y(n);
  for (int i = 0; i < n; ++i) y(tree.perm[i]) = yt(i);
  return y;
}

}  // namespace

double rel_error_vs_exact(const DH2Matrix& a, const HelmholtzKernel& kernel, int power_iters,
                          std::uint64_t seed, int dense_limit) {
  const int n = a.dim();
  const ClusterTree& tree = *a.tree;

  if (n <= dense_limit) {
    Matrix h = exact_kernel_dense(tree, kernel);
    auto residual_apply = [&](const Vector& v, bool adjoint) -> Vector {
      if (adjoint) return Vector(h.adjoint() * v - matvec_adjoint(a, v));
      return Vector(h * v - matvec(a, v));
    };
    auto norm2 = [&](auto&& apply) {
      Vector v = random_unit_vector(n, seed);
      double sigma = 0.0;
      for (int it = 0; it < power_iters; ++it) {
        Vector w = apply(v, false);
        sigma = w.norm();
        v = apply(w, true);
        double nv = v.norm();
        if (nv == 0.0) return 0.0;
        v /= nv;
      }
      return sigma;
    };
    double rnorm = norm2(residual_apply);
    double hnorm = norm2([&](const Vector& v, bool adjoint) -> Vector {
      return adjoint ? Vector(h.adjoint() * v) : Vector(h * v);
    });
    return hnorm == 0.0 ? 0.0 : rnorm / hnorm;
  }

  // Sampled mode: probe vectors against direct summation.
  double worst = 0.0;
  for (int probe = 0; probe < 4; ++probe) {
    Vector x = random_unit_vector(n, seed + 100 + static_cast<std::uint64_t>(probe));
    Vector hx = dense_kernel_apply(tree, kernel, x, false);
    Vector ax = matvec(a, x);
    double denom = hx.norm();
    if (denom > 0.0) worst = std::max(worst, (hx - ax).norm() / denom);
  }
  return worst;
}

RunResult run_experiment(const RunConfig& cfg) {
  if ((cfg.mesh_m > 0) == (cfg.n_points > 0))
    throw std::invalid_argument("run_experiment: set exactly one of mesh_m and n_points");
  if (cfg.order < 1 || cfg.eps <= 0.0 || cfg.eps_weights < 0.0 || cfg.k_norm < 1 || cfg.leaf_size < 1 ||
      cfg.eta1 <= 0.0 || cfg.eta2 <= 0.0 || cfg.eta3 <= 0.0 || cfg.kappa < 0.0)
    throw std::invalid_argument("run_experiment: invalid configuration");

  RunResult res;
  res.cfg = cfg;
  auto add_time = [&](const std::string& name, Clock::time_point t0) {
    res.times.emplace_back(name, seconds_since(t0));
  };

  auto t0 = Clock::now();
  SpherePointSet cloud =
      cfg.mesh_m > 0 ? make_sphere_cloud(cfg.mesh_m) : random_sphere_cloud(cfg.n_points, cfg.seed);
  res.n = static_cast<int>(cloud.points.size());
  res.kappa_eff = cfg.kappa_growing ? cfg.kappa * std::sqrt(res.n / 2048.0) : cfg.kappa;
  if (!cfg.dump_cloud.empty()) write_xyz(cfg.dump_cloud, cloud.points);
  add_time("cloud", t0);

  t0 = Clock::now();
  res.tree = std::make_shared<ClusterTree>(build_cluster_tree(cloud.points, cfg.leaf_size));
  add_time("tree", t0);

  t0 = Clock::now();
  res.dirs = std::make_shared<DirectionFamily>(build_directions(*res.tree, res.kappa_eff, cfg.eta2));
  add_time("directions", t0);

  t0 = Clock::now();
  AdmissibilityParams par{res.kappa_eff, cfg.eta1, cfg.eta2, cfg.eta3};
  res.blocks = std::make_shared<DirectedBlockTree>(build_block_tree(*res.tree, *res.dirs, par));
  if (!cfg.dump_tree_stats.empty()) {
    std::ofstream out(cfg.dump_tree_stats);
    out << block_tree_stats_csv(*res.tree, *res.dirs, *res.blocks);
  }
  add_time("blocks", t0);

  t0 = Clock::now();
  HelmholtzKernel kernel{res.kappa_eff};
  res.interp = std::make_shared<DH2Matrix>(
      assemble_dh2(*res.tree, *res.dirs, *res.blocks, cfg.order, kernel, cfg.exec));
  add_time("assemble", t0);

  // Weights in the requested mode, then the scaling weights for
  // block-relative truncation.
  t0 = Clock::now();
  const std::vector<Matrix>* colw = nullptr;
  BasisWeights full;
  NormEstimates norms;
  CompressedWeights compressed;
  BlockOmegas omegas;
  bool blockrel = cfg.error_mode == TruncationMode::block_relative;
  if (cfg.weights == WeightsMode::exact) {
    full = basis_weights(*res.interp->row_basis, cfg.exec);
    res.weight_bytes = full.bytes();
    if (blockrel) omegas = block_relative_omegas(*res.interp, full.R, full.R, cfg.exec);
    colw = &full.R;
  } else {
    norms = norm_estimates(*res.interp->row_basis, cfg.k_norm, cfg.exec);
    compressed = approx_weights(*res.interp, cfg.eps_weights, blockrel ? &norms : nullptr, false, cfg.exec);
    res.weight_bytes = compressed.bytes();
    res.norm_bytes = norms.bytes();
    if (blockrel) omegas = block_relative_omegas(*res.interp, norms.N, compressed.Rhat, cfg.exec);
    colw = &compressed.Rhat;
  }
  if (!cfg.dump_weight_stats.empty()) {
    std::ofstream out(cfg.dump_weight_stats);
    out << weight_stats_csv(*res.interp->row_basis, cfg.weights == WeightsMode::exact ? &full : nullptr,
                            cfg.weights == WeightsMode::compressed ? &compressed : nullptr,
                            cfg.weights == WeightsMode::compressed ? &norms : nullptr);
  }
  add_time("weights", t0);

  t0 = Clock::now();
  TruncationControl ctrl{cfg.eps, cfg.error_mode, -1};
  const BlockOmegas* om = blockrel ? &omegas : nullptr;
  res.row_basis = std::make_shared<AdaptiveBasis>(
      build_adaptive_basis(*res.interp, *colw, ctrl, om, cfg.symmetric_weights, false, cfg.exec));
  if (cfg.symmetric_weights) {
    res.col_basis = res.row_basis;
  } else {
    res.col_basis = std::make_shared<AdaptiveBasis>(
        build_adaptive_basis(*res.interp, *colw, ctrl, om, false, true, cfg.exec));
  }
  add_time("basis", t0);

  t0 = Clock::now();
  res.recomp = std::make_shared<DH2Matrix>(project_couplings(*res.interp, *res.row_basis, *res.col_basis));
  if (!cfg.dump_rank_report.empty()) {
    std::ofstream out(cfg.dump_rank_report);
    out << res.row_basis->rank_report_csv();
  }
  add_time("project", t0);

  t0 = Clock::now();
  if (cfg.measure_error) {
    res.rel_error_interp = rel_error_vs_exact(*res.interp, kernel);
    res.rel_error_recomp = rel_error_vs_exact(*res.recomp, kernel);
  }
  add_time("verify", t0);

  res.interp_storage = storage_report(*res.interp, res.weight_bytes + res.norm_bytes);
  res.recomp_storage = storage_report(*res.recomp);
  for (int r : res.interp->row_basis->rank) res.max_rank_interp = std::max(res.max_rank_interp, r);
  for (int r : res.recomp->row_basis->rank) res.max_rank_recomp = std::max(res.max_rank_recomp, r);
  if (!cfg.dump_storage.empty()) {
    std::ofstream out(cfg.dump_storage);
    out << res.recomp_storage.csv();
  }

  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out);
    out << RunResult::csv_header() << res.csv_row();
  }
  return res;
}

std::string RunResult::csv_header() {
  return "n,kappa,order,leaf_size,eta1,eta2,eta3,eps,eps_weights,k_norm,weights_mode,error_mode,"
         "symmetric_weights,seed,admissible_blocks,inadmissible_blocks,rel_error_interp,"
         "rel_error_recomp,bytes_leaf,bytes_transfer,bytes_coupling,bytes_nearfield,bytes_weights,"
         "bytes_norms,bytes_interp_total,bytes_recomp_leaf,bytes_recomp_transfer,"
         "bytes_recomp_coupling,bytes_recomp_nearfield,bytes_recomp_total,max_rank_interp,"
         "max_rank_recomp,time_cloud,time_tree,time_directions,time_blocks,time_assemble,"
         "time_weights,time_basis,time_project,time_verify\n";
}

std::string RunResult::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << n << ',' << kappa_eff << ',' << cfg.order << ',' << cfg.leaf_size << ',' << cfg.eta1 << ','
     << cfg.eta2 << ',' << cfg.eta3 << ',' << cfg.eps << ',' << cfg.eps_weights << ',' << cfg.k_norm << ','
     << (cfg.weights == WeightsMode::exact ? "exact" : "compressed") << ','
     << (cfg.error_mode == TruncationMode::absolute ? "abs" : "blockrel") << ','
     << (cfg.symmetric_weights ? 1 : 0) << ',' << cfg.seed << ',' << blocks->admissible.size() << ','
     << blocks->inadmissible.size() << ',' << rel_error_interp << ',' << rel_error_recomp << ','
     << interp_storage.leaf << ',' << interp_storage.transfer << ',' << interp_storage.coupling << ','
     << interp_storage.nearfield << ',' << weight_bytes << ',' << norm_bytes << ','
     << interp_storage.total() << ',' << recomp_storage.leaf << ',' << recomp_storage.transfer << ','
     << recomp_storage.coupling << ',' << recomp_storage.nearfield << ',' << recomp_storage.total() << ','
     << max_rank_interp << ',' << max_rank_recomp;
  for (const auto& [name, secs] : times) os << ',' << secs;
  os << '\n';
  return os.str();
}

CompareResult compare_modes(const RunConfig& cfg_a, const RunConfig& cfg_b) {
  if (cfg_a.mesh_m != cfg_b.mesh_m || cfg_a.n_points != cfg_b.n_points || cfg_a.seed != cfg_b.seed)
    throw std::invalid_argument("compare_modes: geometry/seed mismatch");
  CompareResult cmp{run_experiment(cfg_a), run_experiment(cfg_b)};
  return cmp;
}

std::string CompareResult::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "metric,a,b,delta\n";
  auto row = [&](const std::string& name, double va, double vb) {
    os << name << ',' << va << ',' << vb << ',' << (vb - va) << '\n';
  };
  row("rel_error_interp", a.rel_error_interp, b.rel_error_interp);
  row("rel_error_recomp", a.rel_error_recomp, b.rel_error_recomp);
  row("admissible_blocks", static_cast<double>(a.blocks->admissible.size()),
      static_cast<double>(b.blocks->admissible.size()));
  row("inadmissible_blocks", static_cast<double>(a.blocks->inadmissible.size()),
      static_cast<double>(b.blocks->inadmissible.size()));
  row("bytes_weights", static_cast<double>(a.weight_bytes), static_cast<double>(b.weight_bytes));
  row("bytes_norms", static_cast<double>(a.norm_bytes), static_cast<double>(b.norm_bytes));
  row("bytes_interp_total", static_cast<double>(a.interp_storage.total()),
      static_cast<double>(b.interp_storage.total()));
  row("bytes_recomp_total", static_cast<double>(a.recomp_storage.total()),
      static_cast<double>(b.recomp_storage.total()));
  row("max_rank_recomp", a.max_rank_recomp, b.max_rank_recomp);
  return os.str();
}

}  // namespace dirh2
