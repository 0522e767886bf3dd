#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "aimrom/dmaps.hpp"
#include "aimrom/error.hpp"

using namespace aimrom;
using std::numbers::pi;

namespace {

Mat circle(int n, double offset = 0.0) {
  Mat x(n, 2);
  for (int i = 0; i < n; ++i) {
    const double t = 2 * pi * i / n + offset;
    x(i, 0) = std::cos(t);
    x(i, 1) = std::sin(t);
  }
  return x;
}

double wrap(double a) { return std::remainder(a, 2 * pi); }

// max |θ̂ − θ| after the best rotation and reflection
double angle_error(const Vec& est, const Vec& truth) {
  double best = 1e9;
  for (double s : {1.0, -1.0}) {
    double c = 0, sn = 0;
    for (Eigen::Index i = 0; i < est.size(); ++i) {
      const double d = s * est[i] - truth[i];
      c += std::cos(d);
      sn += std::sin(d);
    }
    const double shift = std::atan2(sn, c);
    double worst = 0;
    for (Eigen::Index i = 0; i < est.size(); ++i) worst = std::max(worst, std::abs(wrap(s * est[i] - truth[i] - shift)));
    best = std::min(best, worst);
  }
  return best;
}

Mat line_in_r3(int n) {
  Mat x(n, 3);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    x.row(i) << 1.0 + 2.0 * t, -t, 0.5 * t;
  }
  return x;
}

// Least-squares polynomial of the given degree in u, returns normalized RMS residual of y.
double poly_residual(const Vec& u, const Vec& y, int degree) {
  Mat v(u.size(), degree + 1);
  for (Eigen::Index i = 0; i < u.size(); ++i)
    for (int d = 0; d <= degree; ++d) v(i, d) = std::pow(u[i], d);
  const Vec c = v.colPivHouseholderQr().solve(y);
  const double rms = std::sqrt((v * c - y).squaredNorm() / y.size());
  return rms / std::sqrt((y.array() - y.mean()).square().mean());
}

}  // namespace

TEST_CASE("markov matrix is row-stochastic") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Mat x(150, 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  const Mat k = markov_matrix(x, median_bandwidth(x));
  CHECK((k.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK((k.array() >= 0).all());
}

TEST_CASE("trivial eigenpair and eigenvalue range") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  Mat x(120, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  const DiffusionMap dm = dmaps_fit(x, median_bandwidth(x), 8);
  CHECK(std::abs(dm.eigenvalues[0] - 1.0) < 1e-10);
  CHECK((dm.eigenvectors.col(0).array() - 1.0).abs().maxCoeff() < 1e-8);
  for (int i = 1; i <= 8; ++i) {
    CHECK(dm.eigenvalues[i] < 1.0);
    CHECK(dm.eigenvalues[i] > -1.0);
    CHECK(dm.eigenvalues[i] <= dm.eigenvalues[i - 1]);
  }
  // eigenvalues of K̃ itself, checked against the symmetric computation
  const Mat k = markov_matrix(x, median_bandwidth(x));
  for (int i = 1; i <= 3; ++i) {
    const Vec r = k * dm.eigenvectors.col(i) - dm.eigenvalues[i] * dm.eigenvectors.col(i);
    CHECK(r.norm() < 1e-10 * dm.eigenvectors.col(i).norm());
  }
}

TEST_CASE("circle embedding recovers the angle") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 2 * pi);
  Mat x(200, 2);
  Vec theta(200);
  for (int i = 0; i < 200; ++i) {
    theta[i] = u(rng);
    x.row(i) << std::cos(theta[i]), std::sin(theta[i]);
  }
  const DiffusionMap dm = dmaps_fit(x, median_bandwidth(x) / 4, 2);
  Vec est(200);
  for (int i = 0; i < 200; ++i) est[i] = std::atan2(dm.eigenvectors(i, 2), dm.eigenvectors(i, 1));
  CHECK(angle_error(est, theta) < 0.1);
}

TEST_CASE("identical points share eigenvector rows") {
  Mat x = circle(60);
  x.row(59) = x.row(10);
  const DiffusionMap dm = dmaps_fit(x, 0.1, 4);
  CHECK((dm.eigenvectors.row(59) - dm.eigenvectors.row(10)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("disconnected kernel is reported") {
  Mat x(3, 1);
  x << 0.0, 10.0, 20.0;
  CHECK_THROWS_AS(dmaps_fit(x, 1e-3, 1), NumericalFailure);
  CHECK_THROWS_AS(dmaps_fit(x, 1.0, 3), InvalidInput);
  CHECK_THROWS_AS(dmaps_fit(x, -1.0, 1), InvalidInput);
}

TEST_CASE("pruning on a line keeps one coordinate") {
  const Mat x = line_in_r3(200);
  const DiffusionMap dm = dmaps_fit(x, median_bandwidth(x) / 10, 5);
  const HarmonicSelection sel = select_independent(dm);
  CHECK(sel.kept == std::vector<int>{1});
  CHECK(sel.residuals[0] == 1.0);
  // cross-check: every higher eigenvector is a polynomial in φ1
  for (int k = 2; k <= 5; ++k) {
    CHECK(poly_residual(dm.eigenvectors.col(1), dm.eigenvectors.col(k), 12) < 0.05);
    CHECK(sel.residuals[k - 1] < 0.2);
  }
}

TEST_CASE("pruning on a thin strip finds the second direction") {
  // [0,1]×[0,0.4]: φ1 ~ cos πx, φ2 ~ cos 2πx (harmonic), φ3 ~ cos(πy/0.4)
  Mat x(30 * 12, 2);
  int r = 0;
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 12; ++j) x.row(r++) << (i + 0.5) / 30, 0.4 * (j + 0.5) / 12;
  const DiffusionMap dm = dmaps_fit(x, 0.005, 4);
  const HarmonicSelection sel = select_independent(dm);
  REQUIRE(sel.kept.size() >= 2);
  CHECK(sel.kept[0] == 1);
  CHECK(sel.kept[1] == 3);
  CHECK(sel.residuals[1] < 0.2);
}

TEST_CASE("nystrom restriction is consistent in sample") {
  const Mat x = circle(80);
  DiffusionMap dm = dmaps_fit(x, 0.05, 4);
  const Mat back = nystrom_restrict_batch(dm, x);
  CHECK((back - dm.embedding()).cwiseAbs().maxCoeff() < 1e-6 * dm.embedding().cwiseAbs().maxCoeff());
  dm.kept_indices = {2, 1};
  const Restriction r = nystrom_restrict(dm, x.row(5).transpose());
  CHECK(r.coords[0] == doctest::Approx(dm.eigenvectors(5, 2)).epsilon(1e-6));
  CHECK(r.coords[1] == doctest::Approx(dm.eigenvectors(5, 1)).epsilon(1e-6));
  CHECK(r.unreliable == std::vector<bool>{false, false});
}

TEST_CASE("nystrom midpoints land between neighbours") {
  const Mat x = circle(100);
  const DiffusionMap dm = dmaps_fit(x, 0.05, 2);
  const Mat mid = circle(100, pi / 100);
  const Mat coords = nystrom_restrict_batch(dm, mid);
  for (int i = 0; i < 100; ++i) {
    const double a0 = std::atan2(dm.eigenvectors(i, 2), dm.eigenvectors(i, 1));
    const double a1 = std::atan2(dm.eigenvectors((i + 1) % 100, 2), dm.eigenvectors((i + 1) % 100, 1));
    const double am = std::atan2(coords(i, 1), coords(i, 0));
    const double span = wrap(a1 - a0), part = wrap(am - a0);
    CHECK(part * span > 0);
    CHECK(std::abs(part) < std::abs(span));
  }
}

TEST_CASE("nystrom restriction is permutation invariant") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  Mat x(90, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
  std::vector<int> perm(90);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Mat xp(90, 2);
  for (int i = 0; i < 90; ++i) xp.row(i) = x.row(perm[i]);
  const DiffusionMap a = dmaps_fit(x, 0.3, 3), b = dmaps_fit(xp, 0.3, 3);
  Mat q(5, 2);
  for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = u(rng);
  const Mat ra = nystrom_restrict_batch(a, q), rb = nystrom_restrict_batch(b, q);
  for (int c = 0; c < 3; ++c) {
    const double s = ra.col(c).dot(rb.col(c)) >= 0 ? 1.0 : -1.0;  // eigenvector sign is a convention
    CHECK((ra.col(c) - s * rb.col(c)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(a.eigenvalues[c + 1] == doctest::Approx(b.eigenvalues[c + 1]).epsilon(1e-10));
  }
}

TEST_CASE("geometric harmonics interpolate with all modes kept") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  Mat in(30, 1), f(30, 2);
  for (int i = 0; i < 30; ++i) in(i, 0) = i / 29.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = u(rng);
  const GeometricHarmonics gh = gh_fit(in, f, 1e-3, 1e-14);
  CHECK(gh.n_kept() == 30);
  CHECK((gh_in_sample(gh) - f).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((gh_extend_batch(gh, in) - f).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(gh_fit(in, Mat::Zero(30, 2), 1e-3, 1e-14).coefficients.isZero());
  CHECK_THROWS_AS(gh_fit(in, f, 1e-3, 1.5), InvalidInput);
  CHECK_THROWS_AS(gh_fit(in, f.topRows(10), 1e-3), InvalidInput);
}

TEST_CASE("geometric harmonics on smooth targets") {
  Mat in(101, 1), lin(101, 1), one = Mat::Ones(101, 1);
  for (int i = 0; i < 101; ++i) in(i, 0) = i / 100.0, lin(i, 0) = 3.0 * in(i, 0) - 1.0;
  const GeometricHarmonics gc = gh_fit(in, one, 0.01);
  // a constant sits on the smooth end of the spectrum
  CHECK(gc.coefficients.topRows(10).squaredNorm() > 0.99 * gc.coefficients.squaredNorm());
  CHECK((gh_in_sample(gc).array() - 1.0).abs().maxCoeff() < 1e-3);

  const GeometricHarmonics gl = gh_fit(in, lin, 0.01);
  Mat mid(100, 1);
  for (int i = 0; i < 100; ++i) mid(i, 0) = (i + 0.5) / 100.0;
  const Mat e = gh_extend_batch(gl, mid);
  for (int i = 0; i < 100; ++i) CHECK(std::abs(e(i, 0) - (3.0 * mid(i, 0) - 1.0)) < 0.01 * 3.0);

  const GeometricHarmonics g2 = gh_fit(in, 2.0 * lin, 0.01);
  CHECK((gh_extend_batch(g2, mid) - 2.0 * e).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(gh_extend(gl, mid.row(3).transpose())[0] == doctest::Approx(e(3, 0)).epsilon(1e-12));
  for (int i = 1; i < gl.n_kept(); ++i) CHECK(gl.sigma[i] > gl.delta * gl.sigma0);
}

TEST_CASE("double dmaps round trip on a circle") {
  const Mat x = circle(120);
  DiffusionMap dm = dmaps_fit(x, 0.05, 2);
  const GeometricHarmonics gh = double_dmaps_lift(dm, x, median_bandwidth(dm.embedding()) / 10);
  const double in_sample = (gh_in_sample(gh) - x).squaredNorm() / x.size();
  CHECK((gh_extend_batch(gh, dm.embedding()) - x).squaredNorm() / x.size() <= in_sample + 1e-12);
  const Mat q = circle(120, pi / 120);
  const Mat lifted = gh_extend_batch(gh, nystrom_restrict_batch(dm, q));
  CHECK((lifted - q).rowwise().norm().maxCoeff() < 0.05);
  CHECK_THROWS_AS(double_dmaps_lift(dm, x.topRows(5), 0.1), InvalidInput);
}
