#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "riswie/distance.hpp"
#include "riswie/eigen_sym.hpp"
#include "riswie/errors.hpp"
#include "riswie/rng.hpp"
#include "support/test_utils.hpp"

using namespace riswie;

namespace {

double cloud_scale(const PointCloud& x, const PointCloud& y) {
  return std::sqrt(covariance(x).trace() + covariance(y).trace());
}

PointCloud shuffled(Rng& rng, const PointCloud& cloud) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(cloud.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[i], order[j]);
  }
  Eigen::MatrixXd pts(cloud.size(), cloud.dim());
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    pts.row(i) = cloud.points.row(order[static_cast<std::size_t>(i)]);
  }
  return PointCloud::from_points(std::move(pts));
}

// Sorted multiset of all pairwise Euclidean distances.
std::vector<double> distance_multiset(const PointCloud& cloud) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    for (Eigen::Index j = i + 1; j < cloud.size(); ++j) {
      out.push_back((cloud.points.row(i) - cloud.points.row(j)).norm());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("distance");

TEST_CASE("riswie: zero on a shuffled copy") {
  Rng rng(30);
  const PointCloud x = testing::random_gaussian_cloud(rng, 60, {4.0, 2.0, 1.0});
  const PointCloud y = shuffled(rng, x);
  const RiswieResult r = riswie_distance(x, y);
  CHECK(r.distance <= 1e-10);
}

TEST_CASE("riswie: invariant under independent rigid motions") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const PointCloud x =
        testing::random_gaussian_cloud(rng, 100, {9.0, 4.0, 1.0});
    const PointCloud y =
        testing::random_gaussian_cloud(rng, 80, {6.0, 3.0, 0.5});
    const double base = riswie_distance(x, y).distance;

    Eigen::VectorXd tx(3), ty(3);
    for (int c = 0; c < 3; ++c) {
      tx[c] = 4.0 * rng.normal();
      ty[c] = 4.0 * rng.normal();
    }
    const PointCloud mx =
        testing::rigidly_moved(x, testing::random_orthogonal(rng, 3), tx);
    const PointCloud my =
        testing::rigidly_moved(y, testing::random_orthogonal(rng, 3), ty);
    const double moved = riswie_distance(mx, my).distance;
    CHECK(std::abs(moved - base) <= 1e-8 * cloud_scale(x, y));

    // Self-distance after a rigid motion of one side only.
    const double self = riswie_distance(x, mx).distance;
    CHECK(self <= 1e-8 * cloud_scale(x, x));
  }
}

TEST_CASE("riswie: coordinate marginals miss a non-congruent pair") {
  Eigen::MatrixXd xa(3, 2);
  xa << 0, 0, 1, 1, 2, 0;
  Eigen::MatrixXd xb(3, 2);
  xb << 0, 0, 1, 0, 2, 1;
  const PointCloud a = PointCloud::from_points(xa);
  const PointCloud b = PointCloud::from_points(xb);

  EmbeddingConfig config;
  config.kind = EmbeddingKind::coordinate;
  const RiswieResult r = riswie_distance(a, b, config);
  CHECK(r.distance <= 1e-12);

  // Yet the clouds are not congruent: their distance multisets differ.
  const std::vector<double> da = distance_multiset(a);
  const std::vector<double> db = distance_multiset(b);
  double gap = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    gap = std::max(gap, std::abs(da[i] - db[i]));
  }
  CHECK(gap >= 0.4);
}

TEST_CASE("riswie: large samples approach the Gaussian closed form") {
  Rng rng(32);
  const PointCloud x = testing::random_gaussian_cloud(rng, 10000, {4.0, 1.0});
  const PointCloud y = testing::random_gaussian_cloud(rng, 10000, {9.0, 1.0});
  const RiswieResult r = riswie_distance(x, y);
  CHECK(r.distance == doctest::Approx(std::sqrt(0.5)).epsilon(0.05));
}

TEST_CASE("riswie: result bookkeeping") {
  Rng rng(33);
  const PointCloud x = testing::random_gaussian_cloud(rng, 40, {3.0, 1.0, 0.5});
  const PointCloud y = testing::random_gaussian_cloud(rng, 40, {2.0, 1.0, 0.5});
  const RiswieResult r = riswie_distance(x, y);
  CHECK(r.k == 3);
  CHECK(r.squared ==
        doctest::Approx(r.match.total / 3.0).epsilon(1e-12));
  CHECK(r.distance == doctest::Approx(std::sqrt(r.squared)).epsilon(1e-15));
  CHECK(r.match.permutation.size() == 3);
}

TEST_CASE("riswie: pseudometric properties on random triples") {
  Rng rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud x = testing::random_gaussian_cloud(rng, 30, {4.0, 1.0});
    const PointCloud y = testing::random_gaussian_cloud(rng, 30, {2.0, 1.5});
    const PointCloud z = testing::random_gaussian_cloud(rng, 30, {3.0, 0.5});
    const double dxy = riswie_distance(x, y).distance;
    const double dyx = riswie_distance(y, x).distance;
    const double dyz = riswie_distance(y, z).distance;
    const double dxz = riswie_distance(x, z).distance;
    CHECK(dxy >= 0.0);
    CHECK(std::abs(dxy - dyx) <= 1e-12);
    CHECK(dxz <= dxy + dyz + 1e-9 * cloud_scale(x, z));
  }
}

TEST_CASE("riswie: well-separated spectra recover the identity matching") {
  Rng rng(35);
  int identity_count = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud x =
        testing::random_gaussian_cloud(rng, 1500, {16.0, 4.0, 1.0});
    const PointCloud y =
        testing::random_gaussian_cloud(rng, 1500, {16.0, 4.0, 1.0});
    const RiswieResult r = riswie_distance(x, y);
    if (r.match.permutation == std::vector<int>{0, 1, 2}) ++identity_count;
  }
  CHECK(identity_count >= 19);
}

TEST_CASE("riswie: independent finite samples never collide at zero") {
  Rng rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud x = testing::random_gaussian_cloud(rng, 50, {2.0, 1.0});
    const PointCloud y = testing::random_gaussian_cloud(rng, 50, {2.0, 1.0});
    CHECK(riswie_distance(x, y).distance > 0.0);
  }
}

TEST_CASE("riswie: diffusion embedding is rigid-invariant on a circle") {
  // A perfect circle has doubly degenerate kernel eigenvalues, so any rounding
  // noise (a generic rotation, or even the cancellation in centering after a
  // translation) picks an arbitrary basis inside each harmonic pair.  A pure
  // quarter turn only swaps and negates coordinates, which keeps centering and
  // the kernel bitwise exact and makes the degenerate claim testable.
  const int n = 100;
  Eigen::MatrixXd pts(n, 2);
  for (int i = 0; i < n; ++i) {
    const double angle = 2.0 * M_PI * i / n;
    pts(i, 0) = 2.0 * std::cos(angle);
    pts(i, 1) = 2.0 * std::sin(angle);
  }
  const PointCloud cloud = PointCloud::from_points(pts);
  PointCloud moved = cloud;
  moved.points.col(0) = -cloud.points.col(1);
  moved.points.col(1) = cloud.points.col(0);

  EmbeddingConfig config;
  config.kind = EmbeddingKind::diffusion;
  config.k = 2;
  const RiswieResult r = riswie_distance(cloud, moved, config);
  CHECK(r.distance <= 1e-8 * cloud_scale(cloud, moved));
}

TEST_CASE("riswie: diffusion embedding is rigid-invariant off symmetry") {
  // Radial noise splits the degenerate harmonic pairs, so an arbitrary
  // rotation must come back near zero as well.
  Rng rng(38);
  const int n = 120;
  Eigen::MatrixXd pts(n, 2);
  for (int i = 0; i < n; ++i) {
    const double angle = 2.0 * M_PI * i / n;
    const double radius = 2.0 + 0.05 * rng.normal();
    pts(i, 0) = radius * std::cos(angle);
    pts(i, 1) = radius * std::sin(angle);
  }
  const PointCloud cloud = PointCloud::from_points(pts);
  Eigen::MatrixXd rot(2, 2);
  const double a = 0.7;
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  Eigen::VectorXd t(2);
  t << 5.0, -3.0;
  const PointCloud moved = testing::rigidly_moved(cloud, rot, t);

  EmbeddingConfig config;
  config.kind = EmbeddingKind::diffusion;
  config.k = 2;
  const RiswieResult r = riswie_distance(cloud, moved, config);
  CHECK(r.distance <= 1e-8 * cloud_scale(cloud, moved));
}

TEST_CASE("riswie: rank-deficient clouds pair surplus axes at zero cost") {
  Rng rng(37);
  // Planar cloud in 3D: third PCA axis carries Dirac marginals.
  Eigen::MatrixXd pts(40, 3);
  for (int i = 0; i < 40; ++i) {
    pts(i, 0) = 2.0 * rng.normal();
    pts(i, 1) = rng.normal();
    pts(i, 2) = 0.0;
  }
  const PointCloud flat = PointCloud::from_points(pts);
  const PointCloud moved = testing::rigidly_moved(
      flat, testing::random_orthogonal(rng, 3), Eigen::VectorXd::Zero(3));
  EmbeddingConfig config;
  config.k = 3;
  const RiswieResult r = riswie_distance(flat, moved, config);
  CHECK(r.distance <= 1e-8 * cloud_scale(flat, flat));
}

TEST_CASE("riswie: mixed ambient dimensions use the smaller k") {
  Rng rng(38);
  const PointCloud x2 = testing::random_gaussian_cloud(rng, 30, {2.0, 1.0});
  const PointCloud y3 = testing::random_gaussian_cloud(rng, 30, {2.0, 1.0, 0.5});
  const RiswieResult r = riswie_distance(x2, y3);
  CHECK(r.k == 2);

  EmbeddingConfig config;
  config.k = 3;
  CHECK_THROWS_AS(riswie_distance(x2, y3, config), Error);
}

TEST_CASE("sriswie: near zero on identical and rigidly moved clouds") {
  Rng rng(39);
  const PointCloud x = testing::random_gaussian_cloud(rng, 50, {4.0, 1.0});
  const double scale = cloud_scale(x, x);

  SoftMatchParams params;
  params.beta = 1e9;
  params.eps = 1e-6 * scale * scale;
  const SriswieResult self = sriswie_distance(x, x, {}, params);
  CHECK(self.value <= 1e-3 * scale);

  const PointCloud moved = testing::rigidly_moved(
      x, testing::random_orthogonal(rng, 2), Eigen::VectorXd::Ones(2));
  const SriswieResult rigid = sriswie_distance(x, moved, {}, params);
  CHECK(rigid.value <= 1e-3 * scale);
}

TEST_CASE("sriswie: k=1 with saturated blend equals the hard distance") {
  Rng rng(40);
  const PointCloud x = testing::random_gaussian_cloud(rng, 30, {3.0, 1.0});
  const PointCloud y = testing::random_gaussian_cloud(rng, 30, {2.0, 0.5});
  EmbeddingConfig config;
  config.k = 1;
  SoftMatchParams params;
  params.beta = 1e12;  // saturates the orientation sigmoid outright
  params.eps = 1e-3;
  const SriswieResult soft = sriswie_distance(x, y, config, params);
  const RiswieResult hard = riswie_distance(x, y, config);
  CHECK(soft.value == hard.distance);
  CHECK(soft.k == 1);
}

TEST_CASE("gaussian_closed_form: hand values") {
  const GaussianSpec eye = GaussianSpec::from_eigenvalues({1.0, 1.0});
  CHECK(gaussian_closed_form(eye, eye) == 0.0);

  const GaussianSpec a = GaussianSpec::from_eigenvalues({4.0, 1.0});
  const GaussianSpec b = GaussianSpec::from_eigenvalues({9.0, 1.0});
  CHECK(gaussian_closed_form(a, b) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));

  const GaussianSpec c = GaussianSpec::from_eigenvalues({4.0, 2.0, 1.0});
  const GaussianSpec d = GaussianSpec::from_eigenvalues({9.0, 1.0, 0.25});
  const double sq = (1.0 + std::pow(std::sqrt(2.0) - 1.0, 2) + 0.25) / 3.0;
  CHECK(gaussian_closed_form(c, d) ==
        doctest::Approx(std::sqrt(sq)).epsilon(1e-14));

  // Input order does not matter: the spectrum is sorted on entry.
  const GaussianSpec d2 = GaussianSpec::from_eigenvalues({0.25, 9.0, 1.0});
  CHECK(gaussian_closed_form(c, d2) == gaussian_closed_form(c, d));

  CHECK_THROWS_AS(gaussian_closed_form(a, c), Error);
  CHECK_THROWS_AS(GaussianSpec::from_eigenvalues({1.0, -2.0}), Error);
  CHECK_THROWS_AS(GaussianSpec::from_eigenvalues({}), Error);
}

TEST_CASE("gw_bounds: hand arithmetic") {
  const GaussianSpec same = GaussianSpec::from_eigenvalues({3.0, 2.0});
  const GwBounds zero = gw_bounds(same, same);
  CHECK(zero.lgw2 == 0.0);
  CHECK(zero.ggw2 == 0.0);
  CHECK(gaussian_closed_form(same, same) <= zero.bound_i_rhs(zero.ggw2));

  const GaussianSpec a = GaussianSpec::from_eigenvalues({4.0, 1.0});
  const GaussianSpec b = GaussianSpec::from_eigenvalues({9.0, 1.0});
  const GwBounds gw = gw_bounds(a, b);
  const double fro_gap = std::sqrt(17.0) - std::sqrt(82.0);
  const double want_lgw2 = 4.0 * 25.0 + 4.0 * fro_gap * fro_gap + 4.0 * 25.0;
  CHECK(gw.lgw2 == doctest::Approx(want_lgw2).epsilon(1e-14));
  CHECK(gw.ggw2 == doctest::Approx(4.0 * 25.0 + 8.0 * 25.0).epsilon(1e-14));
  CHECK(gw.alpha == doctest::Approx(1.0 + 1.0).epsilon(1e-14));

  const double d2 = 0.5;  // squared closed form for this pair
  CHECK(d2 <= gw.bound_i_rhs(gw.ggw2));
  const BoundValue ii = gw.bound_ii_rhs(gw.ggw2);
  CHECK_FALSE(ii.radicand_clamped);

  // A supplied value below the compatible range clamps and flags.
  const BoundValue clamped = gw.bound_ii_rhs(0.0);
  CHECK(clamped.radicand_clamped);
  CHECK(clamped.value == 0.0);

  const GaussianSpec flat = GaussianSpec::from_eigenvalues({1.0, 0.0});
  const GwBounds rank_def = gw_bounds(flat, flat);
  CHECK_THROWS_AS(rank_def.bound_i_rhs(1.0), Error);
}

TEST_CASE("gw_bounds: property sweep on random full-rank spectra") {
  Rng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(8));
    std::vector<double> sa(static_cast<std::size_t>(d));
    std::vector<double> sb(static_cast<std::size_t>(d));
    for (auto& v : sa) v = 0.05 + 5.0 * rng.uniform();
    for (auto& v : sb) v = 0.05 + 5.0 * rng.uniform();
    const GaussianSpec a = GaussianSpec::from_eigenvalues(sa);
    const GaussianSpec b = GaussianSpec::from_eigenvalues(sb);
    const GwBounds gw = gw_bounds(a, b);
    const double dg = gaussian_closed_form(a, b);
    const double d2 = dg * dg;

    CHECK(8.0 * d * gw.alpha * gw.alpha * d2 <= gw.ggw2 * (1.0 + 1e-12));
    CHECK(d2 <= gw.bound_i_rhs(gw.ggw2) * (1.0 + 1e-12));
    CHECK_FALSE(gw.bound_ii_rhs(gw.ggw2).radicand_clamped);
    CHECK(gw.lgw2 >= 0.0);
  }
}

TEST_CASE("stability_bound: hand and sweep checks") {
  CHECK(stability_bound(2.0, 0.0) == 0.0);
  CHECK_THROWS_AS(stability_bound(0.0, 1.0), Error);
  CHECK_THROWS_AS(stability_bound(-1.0, 1.0), Error);

  // Isotropic perturbation of the identity: actual movement vs the bound.
  for (const double eta : {1e-4, 1e-3, 1e-2, 1e-1, 0.5}) {
    const GaussianSpec a = GaussianSpec::from_eigenvalues({1.0, 1.0, 1.0});
    const GaussianSpec b =
        GaussianSpec::from_eigenvalues({1.0 + eta, 1.0 + eta, 1.0 + eta});
    const double actual = gaussian_closed_form(a, b);
    CHECK(actual == doctest::Approx(std::sqrt(1.0 + eta) - 1.0).epsilon(1e-12));
    CHECK(actual <= stability_bound(1.0, eta));
  }

  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(4));
    Eigen::MatrixXd g = testing::random_gaussian_matrix(rng, d, d);
    Eigen::MatrixXd sigma =
        g * g.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd h = 0.05 * testing::random_gaussian_matrix(rng, d, d);
    Eigen::MatrixXd e = 0.5 * (h + h.transpose());

    const SymmetricSpectrum ss = eig_sym(sigma);
    const Eigen::MatrixXd perturbed = sigma + e;
    const SymmetricSpectrum sp = eig_sym(0.5 * (perturbed + perturbed.transpose()));
    const SymmetricSpectrum se = eig_sym(e);
    const double e_norm = se.eigenvalues.cwiseAbs().maxCoeff();
    const double lambda_min =
        std::min(ss.eigenvalues.minCoeff(), sp.eigenvalues.minCoeff());
    REQUIRE(lambda_min > 0.0);

    std::vector<double> la(ss.eigenvalues.data(), ss.eigenvalues.data() + d);
    std::vector<double> lb(sp.eigenvalues.data(), sp.eigenvalues.data() + d);
    const double actual = gaussian_closed_form(GaussianSpec::from_eigenvalues(la),
                                               GaussianSpec::from_eigenvalues(lb));
    CHECK(actual <= stability_bound(lambda_min, e_norm) * (1.0 + 1e-12));
  }
}

TEST_SUITE_END();
