#include "doctest.h"
#include "oracles.hpp"

#include "heisenbundle/deform.hpp"
#include "heisenbundle/errors.hpp"

using namespace hb;

namespace {

Mat mat2(double a, double b, double c, double d) {
  Mat M(2, 2);
  M << a, b, c, d;
  return M;
}

Mat skew(int n, double theta) {
  Mat T = Mat::Zero(n, n);
  T(1, 0) = theta;
  T(0, 1) = -theta;
  return T;
}

Coeffs harper() {
  Coeffs a(2);
  for (Index k : {Index{1, 0}, Index{-1, 0}, Index{0, 1}, Index{0, -1}}) a.set(k, 1.0);
  return a;
}

Coeffs random_coeffs(std::mt19937_64& rng, int radius) {
  std::uniform_real_distribution<double> u(-1, 1);
  Coeffs a(2);
  for (int i = -radius; i <= radius; ++i)
    for (int j = -radius; j <= radius; ++j) a.set({i, j}, cplx(u(rng), u(rng)));
  return a;
}

std::vector<CurveRow> synthetic(double power) {
  std::vector<CurveRow> rows;
  for (int i = 0; i <= 10; ++i) {
    double t = 0.7 + 0.02 * (i - 5);
    rows.push_back({t, mat2(t, 0, 0, 1), 2.0 + std::pow(std::abs(t - 0.7), power), 0, true, 1});
  }
  return rows;
}

} // namespace

TEST_CASE("path specs") {
  PathSpec p = PathSpec::linear(mat2(0.5, 0, 0, 1), mat2(1, 0, 0, 1), 6);
  CHECK(p.size() == 6);
  CHECK((p.at(1.0) - mat2(1, 0, 0, 1)).norm() < 1e-15);
  CHECK_THROWS_AS(PathSpec::linear(mat2(1, 0, 0, 1), mat2(1, 0, 0, 1), 1), Error);
  CHECK_THROWS_AS(PathSpec::affine(mat2(1, 0, 0, 1), Mat::Zero(2, 2), {0.5, 0.5}), Error);
  // passes through a singular matrix at t = 1
  PathSpec bad = PathSpec::affine(mat2(1, 0, 0, 1), mat2(-1, 0, 0, 0), {0.0, 1.0});
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("curve tables") {
  std::vector<CurveRow> rows{{0.5, mat2(0.5, 0, 0, 1), 1.25, 1.5, true, 7}};
  CHECK(curve_csv(rows) == "t,L,value_lower,value_upper,certified,seed\n0.5,0.5;0;0;1,1.25,1.5,1,7\n");
}

TEST_CASE("norm curves of algebra elements") {
  Coeffs delta(2);
  delta.set({0, 0}, 1.0);
  PathSpec p = PathSpec::linear(mat2(0.6, 0.1, 0, 1), mat2(0.9, 0, 0.2, 1.1), 4);
  for (const auto& r : norm_curve(delta, p)) CHECK(r.lower == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(1);
  Coeffs a = random_coeffs(rng, 1);
  PathSpec flat = PathSpec::affine(mat2(0.7, 0, 0, 1), Mat::Zero(2, 2), {0, 1, 2});
  auto c = norm_curve(a, flat);
  CHECK(c[0].lower == c[1].lower);
  CHECK(c[1].lower == c[2].lower);

  NormOptions loose;
  loose.tol = 5e-3;
  auto curve = norm_curve(a, PathSpec::linear(mat2(0.6, 0, 0, 1), mat2(0.8, 0.1, 0, 1), 5), loose);
  for (const auto& s : modulus_check(a, curve, loose.tol)) {
    CHECK(s.holds);
    CHECK(s.twistTerm <= s.lipschitzTerm + 1e-12);
  }
}

TEST_CASE("twist Lipschitz bound on random lattices") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    Coeffs a = random_coeffs(rng, 2);
    Mat L0 = oracle::random_lattice(rng, 2, 2.0);
    Mat L1 = L0 + 0.01 * oracle::random_matrix(rng, 2, -1, 1);
    LatticeGen g0 = make_lattice(L0), g1 = make_lattice(L1);
    CHECK(sum_abs(twist_coeffs(a, g1) - twist_coeffs(a, g0)) <= twist_lipschitz_bound(a, g1, g0));
  }
}

TEST_CASE("module norm curve of the Gaussian") {
  Mat A = mat2(0, 0, 0, 1), D = mat2(1, 0, 0, 0);
  NormOptions opt;
  opt.tol = 5e-3;
  auto rows = norm_curve(ModuleVector::of(Window::gaussian(1)), PathSpec::affine(A, D, {0.7, 0.8, 0.9}), opt);
  for (const auto& r : rows) {
    CHECK(r.lower > 1);
    CHECK(r.upper >= r.lower);
    CHECK(std::isfinite(r.upper));
  }
  // the Bessel bound of the Gaussian decreases as the lattice thins out
  CHECK(rows[0].lower > rows[2].lower);
}

TEST_CASE("Hoelder fits on synthetic curves") {
  HolderFit h = holder_fit(synthetic(0.5), 5, 0);
  CHECK(h.exponent == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(h.constant == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(h.boundCheck == doctest::Approx(1.0).epsilon(1e-9));
  HolderFit l = holder_fit(synthetic(1.0), 5, 0);
  CHECK(l.exponent == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(l.boundCheck <= 1.0);
  auto flat = synthetic(1.0);
  for (auto& r : flat) r.lower = 3.0;
  CHECK_THROWS_AS(holder_fit(flat, 5, 1e-3), Error);
  auto shortCurve = synthetic(0.5);
  shortCurve.resize(6);
  CHECK_THROWS_AS(holder_fit(shortCurve, 0, 0), Error);
}

TEST_CASE("deformation inequality") {
  std::mt19937_64 rng(3);
  Coeffs a = random_coeffs(rng, 1);
  DeformationCheck same = deformation_bound_check(a, skew(2, 0.3), skew(2, 0.3));
  CHECK(same.holds);
  CHECK(same.lhsLower == 0.0);

  Coeffs unit(2);
  unit.set({2, -1}, cplx(0, 1));
  DeformationCheck u = deformation_bound_check(unit, skew(2, 0.1), skew(2, 0.8));
  CHECK(u.first.lower == doctest::Approx(1.0));
  CHECK(u.second.lower == doctest::Approx(1.0));
  CHECK(u.lhsUpper <= 1e-3 + 1e-12);
  CHECK(u.holds);

  std::uniform_real_distribution<double> th(-1, 1);
  for (int trial = 0; trial < 8; ++trial) {
    Coeffs b = random_coeffs(rng, 1);
    double t1 = th(rng), t2 = t1 + 0.01 * th(rng);
    CHECK(deformation_bound_check(b, skew(2, t1), skew(2, t2)).holds);
  }
  CHECK_THROWS_AS(deformation_bound_check(a, Mat::Identity(2, 2), skew(2, 0)), Error);
}

TEST_CASE("stability scan design") {
  auto d1 = stability_directions(2, 9), d2 = stability_directions(2, 9);
  REQUIRE(d1.size() == 16);
  for (std::size_t i = 0; i < d1.size(); ++i) {
    CHECK(spectral_norm(d1[i]) == doctest::Approx(1.0));
    CHECK(d1[i] == d2[i]);
  }
  ModuleVector g = ModuleVector::of(Window::gaussian(1));
  LatticeGen L0 = make_lattice(mat2(0.5, 0, 0, 1));
  StabilityReport empty = stability_radius(g, L0, 0.2, 0.1);
  CHECK(empty.radius == 0.0);
  CHECK(empty.points.empty());
  CHECK_THROWS_AS(stability_radius(g, make_lattice(mat2(1, 0, 0, 1)), 0.05, 0.1), Error);
}

TEST_CASE("stability radius of the Gaussian") {
  ModuleVector g = ModuleVector::of(Window::gaussian(1));
  StabilityReport r = stability_radius(g, make_lattice(mat2(0.5, 0, 0, 1)), 0.05, 0.05);
  CHECK(r.radius == doctest::Approx(0.05));
  REQUIRE(r.points.size() == 16);
  for (const auto& p : r.points) {
    CHECK(p.certified);
    CHECK(p.det < 1);
    CHECK(p.sMinusIdUpper < 1);
  }
  CHECK(stability_rows(r).size() == 16);
}

TEST_CASE("Balian-Low sweep") {
  ModuleVector g = ModuleVector::of(Window::gaussian(1));
  Mat A = mat2(0, 0, 0, 1), D = mat2(1, 0, 0, 0);
  SweepReport one = balian_low_sweep(MultiWindowSet({g}), PathSpec::affine(A, D, {0.5}));
  FrameReport fr = frame_bounds(g, make_lattice(mat2(0.5, 0, 0, 1)));
  CHECK(one.rows[0].lowerEstimate == fr.lower);
  CHECK(one.rows[0].certified == fr.certified);

  SweepReport s = balian_low_sweep(MultiWindowSet({g}), PathSpec::affine(A, D, {0.8, 0.9, 0.95, 1.0}));
  CHECK(s.endsAtCritical);
  CHECK(s.failedBeforeEnd);
  CHECK(s.anyCertified);
  for (std::size_t i = 1; i < s.rows.size(); ++i) CHECK(s.rows[i].lowerEstimate < s.rows[i - 1].lowerEstimate);
}

TEST_CASE("spectrum curves") {
  Coeffs a(2);
  a.set({1, 0}, 1.0);
  a.set({-1, 0}, 1.0);
  PathSpec thetas = PathSpec::affine(Mat::Zero(2, 2), skew(2, 1.0), {0.1, 0.2, 0.3});
  SpectrumCurve c = spectrum_curve(a, thetas, SpectrumPath::Theta, 6);
  for (const auto& s : c.samples)
    for (double e : s.eigenvalues) {
      CHECK(e <= 2 + 1e-12);
      CHECK(e >= -2 - 1e-12);
    }
  PathSpec constant = PathSpec::affine(skew(2, 0.3), Mat::Zero(2, 2), {0, 1});
  CHECK(spectrum_curve(harper(), constant, SpectrumPath::Theta, 6).steps[0].hausdorff == 0.0);

  PathSpec sweep = PathSpec::affine(Mat::Zero(2, 2), skew(2, 1.0), {0.30, 0.31, 0.32, 0.33, 0.34});
  for (const auto& s : spectrum_curve(harper(), sweep, SpectrumPath::Theta, 10).steps) CHECK(s.holds);

  Coeffs one(2);
  one.set({1, 0}, 1.0);
  CHECK_THROWS_AS(spectrum_curve(one, thetas, SpectrumPath::Theta, 4), Error);
  CHECK(hausdorff_distance({0, 1}, {0.25, 1}) == doctest::Approx(0.25));
}
