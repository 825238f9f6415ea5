#include <doctest.h>

#include <atomic>
#include <cstring>
#include <vector>

#include "riswie/eigen_sym.hpp"
#include "riswie/errors.hpp"
#include "riswie/parallel.hpp"
#include "riswie/point_cloud.hpp"
#include "riswie/rng.hpp"
#include "support/test_utils.hpp"

using namespace riswie;

TEST_SUITE_BEGIN("core");

TEST_CASE("error codes map to documented exit codes") {
  CHECK(exit_code_for(ErrorCode::parse) == 2);
  CHECK(exit_code_for(ErrorCode::bad_k) == 3);
  CHECK(exit_code_for(ErrorCode::dimension_mismatch) == 3);
  CHECK(exit_code_for(ErrorCode::no_convergence) == 4);
}

TEST_CASE("rng: fixed seed reproduces the stream") {
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng: split streams are functions of parent state and index") {
  const Rng root(7);
  Rng child1 = root.split(5);
  Rng child2 = Rng(7).split(5);
  for (int i = 0; i < 50; ++i) CHECK(child1.next_u64() == child2.next_u64());

  // Splitting does not consume parent draws.
  Rng probe(7);
  (void)Rng(7).split(99);
  Rng untouched(7);
  CHECK(probe.next_u64() == untouched.next_u64());

  // Distinct stream ids diverge immediately.
  Rng s1 = root.split(1);
  Rng s2 = root.split(2);
  CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("rng: uniform stays in [0,1) and normal has sane moments") {
  Rng rng(99);
  double sum = 0.0;
  double sum_sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.05);
}

TEST_CASE("parallel_for: results identical across worker counts") {
  const std::int64_t count = 1000;
  std::vector<double> serial(count);
  std::vector<double> threaded(count);
  const auto body = [](std::int64_t i) {
    return std::sin(static_cast<double>(i)) * std::sqrt(static_cast<double>(i) + 1.0);
  };
  parallel_for(count, 1, [&](std::int64_t i) { serial[i] = body(i); });
  parallel_for(count, 8, [&](std::int64_t i) { threaded[i] = body(i); });
  CHECK(std::memcmp(serial.data(), threaded.data(), sizeof(double) * count) == 0);
}

TEST_CASE("parallel_for: lowest-index exception wins") {
  std::atomic<int> ran{0};
  try {
    parallel_for(100, 4, [&](std::int64_t i) {
      ran.fetch_add(1);
      if (i == 17 || i == 3 || i == 80) {
        throw Error(ErrorCode::bad_spec, "task " + std::to_string(i));
      }
    });
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "task 3");
  }
  CHECK(ran.load() == 100);  // all tasks still ran
}

TEST_CASE("eig_sym: rank-1 ones matrix") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 1, 1, 1;
  const SymmetricSpectrum s = eig_sym(m);
  CHECK(s.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-12));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(s.eigenvectors(0, 0) == doctest::Approx(inv_sqrt2));
  CHECK(s.eigenvectors(1, 0) == doctest::Approx(inv_sqrt2));
  // Sign convention: tie on magnitude resolves at the lowest row.
  CHECK(s.eigenvectors(0, 1) == doctest::Approx(inv_sqrt2));
  CHECK(s.eigenvectors(1, 1) == doctest::Approx(-inv_sqrt2));
}

TEST_CASE("eig_sym: identity and permuted diagonal") {
  const SymmetricSpectrum id = eig_sym(Eigen::MatrixXd::Identity(3, 3));
  for (int j = 0; j < 3; ++j) {
    CHECK(id.eigenvalues[j] == 1.0);
    for (int i = 0; i < 3; ++i) {
      CHECK(id.eigenvectors(i, j) == (i == j ? 1.0 : 0.0));
    }
  }

  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(3, 3);
  diag(0, 0) = 3.0;
  diag(1, 1) = 1.0;
  diag(2, 2) = 2.0;
  const SymmetricSpectrum s = eig_sym(diag);
  CHECK(s.eigenvalues[0] == 3.0);
  CHECK(s.eigenvalues[1] == 2.0);
  CHECK(s.eigenvalues[2] == 1.0);
  CHECK(s.eigenvectors(0, 0) == 1.0);
  CHECK(s.eigenvectors(2, 1) == 1.0);
  CHECK(s.eigenvectors(1, 2) == 1.0);
}

TEST_CASE("eig_sym: random matrices reconstruct and stay orthonormal") {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(7));
    Eigen::MatrixXd g = testing::random_gaussian_matrix(rng, d, d);
    Eigen::MatrixXd m = 0.5 * (g + g.transpose());
    const SymmetricSpectrum s = eig_sym(m);

    const double max_abs = m.cwiseAbs().maxCoeff();
    const Eigen::MatrixXd recon = s.eigenvectors *
                                  s.eigenvalues.asDiagonal() *
                                  s.eigenvectors.transpose();
    CHECK((recon - m).cwiseAbs().maxCoeff() <= 1e-7 * (1.0 + max_abs));
    const Eigen::MatrixXd gram =
        s.eigenvectors.transpose() * s.eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-8);
    for (int j = 0; j + 1 < d; ++j) {
      CHECK(s.eigenvalues[j] >= s.eigenvalues[j + 1]);
    }
  }
}

TEST_CASE("eig_sym: eigenvalue sequence invariant under conjugation") {
  Rng rng(5150);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 3 + static_cast<int>(rng.below(4));
    Eigen::MatrixXd g = testing::random_gaussian_matrix(rng, d, d);
    Eigen::MatrixXd m = 0.5 * (g + g.transpose());
    const Eigen::MatrixXd q = testing::random_orthogonal(rng, d);
    const Eigen::MatrixXd conj = q * m * q.transpose();
    const SymmetricSpectrum s1 = eig_sym(m);
    const SymmetricSpectrum s2 = eig_sym(0.5 * (conj + conj.transpose()));
    CHECK((s1.eigenvalues - s2.eigenvalues).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("eig_sym: identical input bits give identical output bits") {
  Rng rng(31337);
  Eigen::MatrixXd g = testing::random_gaussian_matrix(rng, 6, 6);
  Eigen::MatrixXd m = 0.5 * (g + g.transpose());
  const SymmetricSpectrum a = eig_sym(m);
  const SymmetricSpectrum b = eig_sym(m);
  CHECK(std::memcmp(a.eigenvalues.data(), b.eigenvalues.data(),
                    sizeof(double) * 6) == 0);
  CHECK(std::memcmp(a.eigenvectors.data(), b.eigenvectors.data(),
                    sizeof(double) * 36) == 0);
}

TEST_CASE("eig_sym: rejects asymmetric and non-square input") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, -1, 0;
  CHECK_THROWS_WITH_AS(eig_sym(m), doctest::Contains("asymmetry"), Error);
  try {
    eig_sym(m);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::non_symmetric);
  }
  CHECK_THROWS_AS(eig_sym(Eigen::MatrixXd::Zero(2, 3)), Error);
}

TEST_CASE("center: mean subtraction examples") {
  Eigen::MatrixXd pts(2, 2);
  pts << 1, 1, 3, 3;
  const PointCloud centered = center(PointCloud::from_points(pts));
  CHECK(centered.points(0, 0) == -1.0);
  CHECK(centered.points(0, 1) == -1.0);
  CHECK(centered.points(1, 0) == 1.0);
  CHECK(centered.points(1, 1) == 1.0);

  // Idempotence up to round-off in the (already tiny) mean.
  const PointCloud again = center(centered);
  CHECK((again.points - centered.points).cwiseAbs().maxCoeff() <= 1e-12);

  Eigen::MatrixXd tri(3, 2);
  tri << 0, 0, 1, 0, 2, 1;
  const PointCloud tri_centered = center(PointCloud::from_points(tri));
  CHECK(tri_centered.points(0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(tri_centered.points(0, 1) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(tri_centered.points(1, 1) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(tri_centered.points(2, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tri_centered.points(2, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const Eigen::RowVectorXd mean = weighted_mean(tri_centered);
  CHECK(mean.cwiseAbs().maxCoeff() <= 1e-12 * 2.0);
}

TEST_CASE("covariance: hand examples") {
  Eigen::MatrixXd pts(2, 2);
  pts << 1, 1, -1, -1;
  const Eigen::MatrixXd sigma = covariance(PointCloud::from_points(pts));
  CHECK(sigma(0, 0) == doctest::Approx(1.0));
  CHECK(sigma(0, 1) == doctest::Approx(1.0));
  CHECK(sigma(1, 0) == doctest::Approx(1.0));
  CHECK(sigma(1, 1) == doctest::Approx(1.0));

  Eigen::MatrixXd single(1, 3);
  single << 4, 5, 6;
  CHECK(covariance(PointCloud::from_points(single)).cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd cross(4, 2);
  cross << 2, 0, -2, 0, 0, 1, 0, -1;
  const Eigen::MatrixXd sigma2 = covariance(PointCloud::from_points(cross));
  CHECK(sigma2(0, 0) == doctest::Approx(2.0));
  CHECK(sigma2(1, 1) == doctest::Approx(0.5));
  CHECK(sigma2(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("covariance: translation invariance and PSD") {
  Rng rng(404);
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud cloud =
        testing::random_gaussian_cloud(rng, 50, {3.0, 1.0, 0.5});
    Eigen::VectorXd shift(3);
    for (int c = 0; c < 3; ++c) shift[c] = 10.0 * rng.normal();
    const PointCloud moved = testing::rigidly_moved(
        cloud, Eigen::MatrixXd::Identity(3, 3), shift);
    CHECK((covariance(cloud) - covariance(moved)).cwiseAbs().maxCoeff() <= 1e-12);

    const SymmetricSpectrum s = eig_sym(covariance(cloud));
    CHECK(s.eigenvalues.minCoeff() >= -1e-10);
  }
}

TEST_CASE("point cloud validation") {
  Eigen::MatrixXd pts(2, 2);
  pts << 0, 0, 1, 1;
  Eigen::VectorXd bad_sum(2);
  bad_sum << 0.5, 0.6;
  CHECK_THROWS_AS(PointCloud::from_weighted(pts, bad_sum), Error);
  Eigen::VectorXd negative(2);
  negative << 1.5, -0.5;
  CHECK_THROWS_AS(PointCloud::from_weighted(pts, negative), Error);

  Eigen::MatrixXd nan_pts(1, 1);
  nan_pts << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(PointCloud::from_points(nan_pts), Error);

  Eigen::VectorXd ok(2);
  ok << 0.25, 0.75;
  const PointCloud weighted = PointCloud::from_weighted(pts, ok, "w");
  CHECK(weighted.id == "w");
  const Eigen::RowVectorXd mean = weighted_mean(weighted);
  CHECK(mean[0] == doctest::Approx(0.75));
}

TEST_SUITE_END();
