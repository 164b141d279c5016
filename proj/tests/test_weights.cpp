#include <algorithm>
#include <cfloat>
#include <cmath>
#include <random>

#include "dirh2/weights.hpp"
#include "doctest.h"

using namespace dirh2;

namespace {

struct Instance {
  SpherePointSet cloud;
  ClusterTree tree;
  DirectionFamily dirs;
  DirectedBlockTree blocks;
  HelmholtzKernel kernel;
  DH2Matrix a;
};

Instance make_instance(int n_random, int mesh_m, double kappa, int order, int leaf_size) {
  Instance inst;
  inst.cloud = mesh_m > 0 ? make_sphere_cloud(mesh_m) : random_sphere_cloud(n_random, 77);
  inst.tree = build_cluster_tree(inst.cloud.points, leaf_size);
  inst.dirs = build_directions(inst.tree, kappa, 1.0);
  inst.blocks = build_block_tree(inst.tree, inst.dirs, {kappa, 1.0, 1.0, 1.0});
  inst.kernel = {kappa};
  inst.a = assemble_dh2(inst.tree, inst.dirs, inst.blocks, order, inst.kernel);
  return inst;
}

// Two well-separated clouds: the top split produces sibling clusters whose
// pairwise blocks are admissible with singleton row sets.
Instance make_two_cloud_instance(double kappa, int order) {
  Instance inst;
  inst.cloud = random_sphere_cloud(128, 5);
  for (Point3& p : inst.cloud.points) p = p * 0.25;
  for (std::size_t i = 64; i < 128; ++i) inst.cloud.points[i].x += 8.0;
  inst.tree = build_cluster_tree(inst.cloud.points, 64);
  inst.dirs = build_directions(inst.tree, kappa, 1.0);
  inst.blocks = build_block_tree(inst.tree, inst.dirs, {kappa, 1.0, 1.0, 1.0});
  inst.kernel = {kappa};
  inst.a = assemble_dh2(inst.tree, inst.dirs, inst.blocks, order, inst.kernel);
  return inst;
}

bool spectra_match(const RealVector& s1, const RealVector& s2, double tol) {
  double scale = std::max({s1.size() ? s1(0) : 0.0, s2.size() ? s2(0) : 0.0, 1e-300});
  int m = static_cast<int>(std::max(s1.size(), s2.size()));
  for (int i = 0; i < m; ++i) {
    double a = i < s1.size() ? s1(i) : 0.0;
    double b = i < s2.size() ? s2(i) : 0.0;
    if (std::abs(a - b) > tol * scale) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("basis weights of an orthonormal basis have unit singular values") {
  SpherePointSet cloud = random_sphere_cloud(20, 3);
  ClusterTree tree = build_cluster_tree(cloud.points, 32);
  REQUIRE(tree.nodes.size() == 1);
  DirectionFamily dirs;
  dirs.level_dirs = {{Point3{0, 0, 0}}};
  dirs.trivial = {true};

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(20, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 20; ++i) m(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = Matrix(qr.householderQ()).leftCols(4);

  DirectionalClusterBasis basis;
  basis.tree = &tree;
  basis.dirs = &dirs;
  basis.pairs = {{0, 0}};
  basis.pair_ids[pair_key(0, 0)] = 0;
  basis.pairs_by_level = {{0}};
  basis.pairs_of_cluster = {{0}};
  basis.leaf = {q};
  basis.transfer.resize(1);
  basis.rank = {4};
  basis.parents.resize(1);

  BasisWeights w = basis_weights(basis);
  RealVector sigma = singular_values(w.R[0]);
  REQUIRE(sigma.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(sigma(i) - 1.0) <= 1e-12);
}

TEST_CASE("basis weights share the singular values of the expanded basis") {
  Instance inst = make_instance(0, 8, 4.0, 2, 8);
  const auto& basis = *inst.a.row_basis;
  BasisWeights w = basis_weights(basis);

  for (int p = 0; p < basis.n_pairs(); ++p) {
    RealVector sr = singular_values(w.R[p]);
    RealVector sv = singular_values(basis.expand(p));
    double tol = basis.is_leaf_pair(p) ? 1e-12 : 1e-10;
    CHECK(spectra_match(sr, sv, tol));
    CHECK(w.R[p].rows() <= w.R[p].cols());
  }
  CHECK(w.bytes() > 0);
}

TEST_CASE("total weights condense the admissible row blocks") {
  for (bool two_cloud : {false, true}) {
    Instance inst = two_cloud ? make_two_cloud_instance(4.0, 2) : make_instance(0, 8, 4.0, 2, 8);
    const auto& basis = *inst.a.row_basis;
    BasisWeights w = basis_weights(basis);
    std::vector<Matrix> z = total_weights(inst.a, w.R);
    auto ext = extended_row_sets(inst.tree, *inst.a.dirs, inst.blocks);
    Matrix gt = to_dense_tree(inst.a);

    int nonempty = 0;
    for (int p = 0; p < basis.n_pairs(); ++p) {
      auto [t, c] = basis.pairs[p];
      auto it = ext.find(pair_key(t, c));
      if (it == ext.end()) {
        CHECK(z[p].rows() == 0);
        continue;
      }
      ++nonempty;
      const ClusterNode& tn = inst.tree.nodes[t];
      Eigen::Index cols = 0;
      for (int s : it->second) cols += inst.tree.nodes[s].size();
      Matrix g_tc(tn.size(), cols);
      Eigen::Index c0 = 0;
      for (int s : it->second) {
        const ClusterNode& sn = inst.tree.nodes[s];
        g_tc.middleCols(c0, sn.size()) = gt.block(tn.begin, sn.begin, tn.size(), sn.size());
        c0 += sn.size();
      }
      RealVector s_fac = singular_values(basis.expand(p) * z[p].adjoint());
      RealVector s_dense = singular_values(g_tc);
      CHECK(spectra_match(s_fac, s_dense, 1e-8));
    }
    CHECK(nonempty > 0);
  }
}

TEST_CASE("block-relative omegas") {
  Instance inst = make_instance(0, 8, 4.0, 2, 8);
  const auto& basis = *inst.a.row_basis;
  BasisWeights w = basis_weights(basis);
  BlockOmegas om = block_relative_omegas(inst.a, w.R, w.R);
  REQUIRE(om.max_children == 2);
  const double rt3 = std::sqrt(3.0);
  CHECK(om.decay() == doctest::Approx(1.0 / rt3).epsilon(1e-15));

  Matrix gt = to_dense_tree(inst.a);
  for (std::size_t b = 0; b < inst.blocks.admissible.size(); ++b) {
    const auto& blk = inst.blocks.admissible[b];
    const Matrix& rt = w.R[basis.pair_id(blk.row, blk.dir)];
    const Matrix& rs = w.R[basis.pair_id(blk.col, blk.dir)];
    double nrm = spectral_norm(rt * inst.a.coupling[b] * rs.adjoint());
    CHECK(om.base[b] == doctest::Approx(nrm / rt3).epsilon(1e-12));
    // weighted-norm identity against the dense block
    const ClusterNode& tn = inst.tree.nodes[blk.row];
    const ClusterNode& sn = inst.tree.nodes[blk.col];
    double dense = spectral_norm(gt.block(tn.begin, sn.begin, tn.size(), sn.size()));
    CHECK(std::abs(nrm - dense) <= 1e-10 * std::max(1.0, dense));
    // descent recursion
    CHECK(om.at_depth(static_cast<int>(b), 1) == doctest::Approx(om.base[b] / rt3).epsilon(1e-14));
    CHECK(om.at_depth(static_cast<int>(b), 2) == doctest::Approx(om.base[b] / 3.0).epsilon(1e-13));
  }

  // Geometric series: the squared omegas over the descendant tree stay below
  // the squared block norm.
  for (std::size_t b = 0; b < inst.blocks.admissible.size(); ++b) {
    const auto& blk = inst.blocks.admissible[b];
    double sum = 0.0;
    auto walk = [&](auto&& self, int t, int depth) -> void {
      double o = om.at_depth(static_cast<int>(b), depth);
      sum += o * o;
      const ClusterNode& tn = inst.tree.nodes[t];
      for (int s = 0; s < tn.nchildren; ++s) self(self, tn.child[s], depth + 1);
    };
    walk(walk, blk.row, 0);
    const ClusterNode& tn = inst.tree.nodes[blk.row];
    const ClusterNode& sn = inst.tree.nodes[blk.col];
    double dense = spectral_norm(gt.block(tn.begin, sn.begin, tn.size(), sn.size()));
    CHECK(sum <= dense * dense * (1.0 + 1e-9));
  }

  // Zero-norm blocks floor at the smallest positive normal value.
  DH2Matrix zeroed = inst.a;
  zeroed.coupling[0] = Matrix::Zero(zeroed.coupling[0].rows(), zeroed.coupling[0].cols());
  BlockOmegas omz = block_relative_omegas(zeroed, w.R, w.R);
  CHECK(omz.base[0] == DBL_MIN);
}

TEST_CASE("norm estimates") {
  Instance inst = make_instance(0, 8, 4.0, 2, 8);
  const auto& basis = *inst.a.row_basis;
  BasisWeights w = basis_weights(basis);
  NormEstimates n1 = norm_estimates(basis, 1);
  NormEstimates nk = norm_estimates(basis, basis.rank[0]);

  for (int p = 0; p < basis.n_pairs(); ++p) {
    double vnorm = spectral_norm(basis.expand(p));
    CHECK(std::abs(spectral_norm(n1.N[p]) - vnorm) <= 1e-10 * std::max(1.0, vnorm));
  }

  Matrix gt = to_dense_tree(inst.a);
  for (std::size_t b = 0; b < inst.blocks.admissible.size(); ++b) {
    const auto& blk = inst.blocks.admissible[b];
    int pt = basis.pair_id(blk.row, blk.dir);
    int ps = basis.pair_id(blk.col, blk.dir);
    double exact = spectral_norm(w.R[pt] * inst.a.coupling[b] * w.R[ps].adjoint());
    double est1 = spectral_norm(n1.N[pt] * inst.a.coupling[b] * w.R[ps].adjoint());
    double estk = spectral_norm(nk.N[pt] * inst.a.coupling[b] * w.R[ps].adjoint());
    CHECK(est1 <= exact * (1.0 + 1e-12) + 1e-15);
    CHECK(std::abs(estk - exact) <= 1e-10 * std::max(1.0, exact));
    // lower bound of the dense block norm
    const ClusterNode& tn = inst.tree.nodes[blk.row];
    const ClusterNode& sn = inst.tree.nodes[blk.col];
    double dense = spectral_norm(gt.block(tn.begin, sn.begin, tn.size(), sn.size()));
    CHECK(est1 <= dense * (1.0 + 1e-10) + 1e-15);
  }
  CHECK(n1.bytes() < nk.bytes());
}

TEST_CASE("compressed weights keep the coupling products") {
  Instance inst = make_instance(0, 8, 4.0, 3, 8);
  const auto& basis = *inst.a.col_basis;
  BasisWeights w = basis_weights(basis);

  SUBCASE("eps = 0 reproduces the products") {
    CompressedWeights cw = approx_weights(inst.a, 0.0, nullptr, true);
    for (std::size_t b = 0; b < inst.blocks.admissible.size(); ++b) {
      const auto& blk = inst.blocks.admissible[b];
      int ps = basis.pair_id(blk.col, blk.dir);
      Matrix exact = w.R[ps] * inst.a.coupling[b].adjoint();
      Matrix approx = cw.projectors[ps] * (cw.Rhat[ps] * inst.a.coupling[b].adjoint());
      CHECK((exact - approx).norm() <= 1e-12 * (1.0 + exact.norm()));
    }
  }

  SUBCASE("unweighted residual contract and audit consistency") {
    double eps_w = 1e-4;
    CompressedWeights cw = approx_weights(inst.a, eps_w, nullptr, true);
    int checked = 0;
    for (const auto& chk : cw.checks) {
      if (chk.block < 0) continue;
      const auto& blk = inst.blocks.admissible[chk.block];
      int ps = basis.pair_id(blk.col, blk.dir);
      CHECK(chk.omega == 1.0);
      CHECK(chk.residual <= eps_w * (1.0 + 1e-9));
      // independent dense recompute from exact weights and the projector
      const Matrix& q = cw.projectors[ps];
      Matrix resid = (w.R[ps] - q * (q.adjoint() * w.R[ps])) * inst.a.coupling[chk.block].adjoint();
      CHECK(std::abs(spectral_norm(resid) - chk.residual) <= 1e-10 * (1.0 + chk.residual));
      ++checked;
    }
    CHECK(checked > 0);
    // shape invariants
    for (int p = 0; p < basis.n_pairs(); ++p) {
      CHECK(cw.Rhat[p].rows() <= w.R[p].rows());
      CHECK(spectral_norm(cw.Rhat[p]) <= spectral_norm(w.R[p]) + 1e-12);
    }
  }

  SUBCASE("weighted residual contract") {
    NormEstimates norms = norm_estimates(basis, 1);
    CompressedWeights cw = approx_weights(inst.a, 1e-3, &norms, true);
    int checked = 0;
    for (const auto& chk : cw.checks) {
      if (chk.block < 0) continue;
      CHECK(chk.residual <= chk.omega * 1e-3 * (1.0 + 1e-9));
      ++checked;
    }
    CHECK(checked > 0);
  }

  SUBCASE("pairs without column blocks produce empty weights") {
    CompressedWeights cw = approx_weights(inst.a, 1e-4, nullptr, false);
    int empties = 0;
    for (int p = 0; p < basis.n_pairs(); ++p) {
      auto [s, c] = basis.pairs[p];
      if (!inst.blocks.col_blocks.contains(pair_key(s, c))) {
        CHECK(cw.Rhat[p].rows() == 0);
        CHECK(cw.Rhat[p].cols() == basis.rank[p]);
        ++empties;
      }
    }
    CHECK(empties > 0);
  }

  SUBCASE("storage shrinks as eps_w grows") {
    std::size_t tight = approx_weights(inst.a, 1e-6, nullptr, false).bytes();
    std::size_t mid = approx_weights(inst.a, 1e-4, nullptr, false).bytes();
    std::size_t loose = approx_weights(inst.a, 1e-2, nullptr, false).bytes();
    CHECK(loose <= mid);
    CHECK(mid <= tight);
    CHECK(tight <= w.bytes());
  }
}

TEST_CASE("weight kernels are deterministic across execution policies") {
  Instance inst = make_instance(0, 8, 4.0, 2, 8);
  const auto& basis = *inst.a.row_basis;
  BasisWeights ws = basis_weights(basis, Exec::serial);
  BasisWeights wp = basis_weights(basis, Exec::parallel);
  for (int p = 0; p < basis.n_pairs(); ++p) CHECK(ws.R[p] == wp.R[p]);

  NormEstimates ns = norm_estimates(basis, 1, Exec::serial);
  NormEstimates np = norm_estimates(basis, 1, Exec::parallel);
  for (int p = 0; p < basis.n_pairs(); ++p) CHECK(ns.N[p] == np.N[p]);

  CompressedWeights cs = approx_weights(inst.a, 1e-4, nullptr, false, Exec::serial);
  CompressedWeights cp = approx_weights(inst.a, 1e-4, nullptr, false, Exec::parallel);
  for (int p = 0; p < basis.n_pairs(); ++p) CHECK(cs.Rhat[p] == cp.Rhat[p]);

  std::vector<Matrix> zs = total_weights(inst.a, ws.R, nullptr, false, false, Exec::serial);
  std::vector<Matrix> zp = total_weights(inst.a, ws.R, nullptr, false, false, Exec::parallel);
  for (int p = 0; p < basis.n_pairs(); ++p) CHECK(zs[p] == zp[p]);
}

TEST_CASE("weight stats csv") {
  Instance inst = make_instance(0, 8, 4.0, 2, 8);
  const auto& basis = *inst.a.row_basis;
  BasisWeights w = basis_weights(basis);
  NormEstimates n = norm_estimates(basis, 1);
  CompressedWeights cw = approx_weights(inst.a, 1e-4, nullptr, false);
  std::string csv = weight_stats_csv(basis, &w, &cw, &n);
  CHECK(csv.starts_with("level,direction_count,full_weight_bytes,compressed_weight_bytes,norm_estimate_bytes\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == inst.tree.depth() + 1);
}
