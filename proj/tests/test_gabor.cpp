#include "doctest.h"
#include "oracles.hpp"

#include "heisenbundle/errors.hpp"
#include "heisenbundle/gabor.hpp"

using namespace hb;

namespace {

LatticeGen diag_lattice(double a, double b) {
  Mat L(2, 2);
  L << a, 0, 0, b;
  return make_lattice(L);
}

ModuleVector gauss() { return ModuleVector::of(Window::gaussian(1)); }

ModuleVector random_vector(std::mt19937_64& rng, int terms, double r) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<TfTerm> t;
  for (int i = 0; i < terms; ++i) t.push_back({oracle::random_point(rng, 2, r), cplx(u(rng), u(rng))});
  return ModuleVector(Window::gaussian(1), t);
}

SampledFunction on_grid(const ModuleVector& f) {
  SampledFunction s{-10, 1.0 / 32, {}};
  for (int i = 0; i <= 640; ++i) s.values.push_back(f.eval(s.start + i * s.step));
  return s;
}

cplx grid_inner(const SampledFunction& a, const SampledFunction& b) {
  cplx s = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * std::conj(b.values[i]);
  return s * a.step;
}

// one shared dual for the reconstruction tests
const ModuleVector& gaussian_dual() {
  static ModuleVector h = dual_window(gauss(), diag_lattice(0.5, 1));
  return h;
}

} // namespace

TEST_CASE("Janssen coefficients") {
  AlgElem b = janssen_coeffs(gauss(), gauss(), diag_lattice(1, 1));
  CHECK(std::abs(b.c.get({0, 0}) - 1.0) < 1e-14);
  CHECK(is_self_adjoint(janssen_coeffs(gauss(), gauss(), diag_lattice(0.5, 1))));
  std::mt19937_64 rng(1);
  ModuleVector f = random_vector(rng, 3, 1.0);
  CHECK(is_self_adjoint(janssen_coeffs(f, f, diag_lattice(0.7, 0.9)), 1e-12));
}

TEST_CASE("Janssen form matches the direct frame operator") {
  LatticeGen L = diag_lattice(0.5, 1);
  std::mt19937_64 rng(2);
  ModuleVector g = random_vector(rng, 2, 0.5);
  ModuleVector h = random_vector(rng, 2, 0.5);
  AlgElem b = janssen_coeffs(g, h, L);
  for (int trial = 0; trial < 5; ++trial) {
    ModuleVector f = random_vector(rng, 3, 1.5);
    SampledFunction direct = frame_op_apply(g, h, L, on_grid(f), 14);
    SampledFunction jan = janssen_apply(b, f, L, -10, 1.0 / 32, 641);
    CHECK(relative_l2_error(jan, direct) < 1e-6);
  }
}

TEST_CASE("direct frame operator basics") {
  LatticeGen L = diag_lattice(0.5, 1);
  std::mt19937_64 rng(3);
  ModuleVector f1 = random_vector(rng, 2, 1.0), f2 = random_vector(rng, 2, 1.0);
  SampledFunction a = frame_op_apply(gauss(), gauss(), L, on_grid(f1), 14);
  SampledFunction b = frame_op_apply(gauss(), gauss(), L, on_grid(f2), 14);
  SampledFunction s = frame_op_apply(gauss(), gauss(), L, on_grid(f1 + f2.scaled(cplx(0, 2))), 14);
  for (std::size_t i = 0; i < s.values.size(); ++i) CHECK(std::abs(s.values[i] - a.values[i] - cplx(0, 2) * b.values[i]) < 1e-12);
  SampledFunction zero = frame_op_apply(gauss(), gauss(), L, SampledFunction{-10, 1.0 / 32, std::vector<cplx>(641)}, 3);
  for (auto v : zero.values) CHECK(v == cplx(0));
  CHECK_THROWS_AS(frame_op_apply(gauss(), gauss(), L, on_grid(f1), 2), Error);
}

TEST_CASE("frame bounds against the Zak transform") {
  // (1/2)Z x Z: the frame operator is a multiplication in the Zak domain
  auto [A, B] = oracle::zak_frame_bounds(oracle::gaussian, 2);
  FrameReport r = frame_bounds(gauss(), diag_lattice(0.5, 1));
  CHECK(r.certified);
  CHECK(r.converged);
  CHECK(r.neumannRate < 1);
  CHECK(r.bessel >= r.lower);
  CHECK(r.lower > 0);
  CHECK(std::abs(r.bessel - B) < 2e-3);
  CHECK(std::abs(r.lower - A) < 2e-3);

  // at L = I the Gaussian Zak transform vanishes at (1/2, 1/2)
  auto [A1, B1] = oracle::zak_frame_bounds(oracle::gaussian, 1);
  CHECK(A1 < 1e-3);
  FrameReport crit = frame_bounds(gauss(), diag_lattice(1, 1));
  CHECK_FALSE(crit.certified);
  CHECK(std::abs(crit.bessel - B1) < 2e-3);

  FrameReport sparse = frame_bounds(gauss(), diag_lattice(1.2, 1));
  CHECK(sparse.densityAdvisory);
  CHECK_FALSE(sparse.certified);
}

TEST_CASE("frame bounds bracket Rayleigh quotients of the direct operator") {
  LatticeGen L = diag_lattice(0.5, 1);
  FrameReport r = frame_bounds(gauss(), L);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 4; ++trial) {
    SampledFunction f = on_grid(random_vector(rng, 3, 1.5));
    SampledFunction Sf = frame_op_apply(gauss(), gauss(), L, f, 14);
    double q = grid_inner(Sf, f).real() / grid_inner(f, f).real();
    CHECK(q >= r.lower - 2 * r.tol);
    CHECK(q <= r.bessel + 2 * r.tol);
  }
}

TEST_CASE("canonical dual window") {
  LatticeGen L = diag_lattice(0.5, 1);
  const ModuleVector& h = gaussian_dual();
  CHECK(wexler_raz_residual(gauss(), h, L) < 1e-6);
  // the Gaussian is not its own dual: the k = 0 term is |1 - 1/2|
  CHECK(wexler_raz_residual(gauss(), gauss(), L) == doctest::Approx(0.5));
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    SampledFunction f = on_grid(random_vector(rng, 3, 1.5));
    CHECK(relative_l2_error(frame_op_apply(gauss(), h, L, f, 14), f) < 1e-5);
  }
  ModuleVector h2 = dual_window(gauss(), L, {}, 1e-12);
  CHECK(l2_norm(h2 - h) < 1e-6);
  CHECK_THROWS_AS(dual_window(gauss(), diag_lattice(1, 1)), Error);
}

TEST_CASE("scalar frame operator: the dual is a rescaled window") {
  LatticeGen L = diag_lattice(0.5, 1);
  AlgElem b = scale(identity(algebra_B(L)), 2.0);
  ModuleVector h = act_right(gauss(), invert(b, 1e-12, Enclosure{2.0, 2.0}), L);
  CHECK(l2_norm(h - gauss().scaled(0.5)) < 1e-12);
  CHECK(l2_norm(act_right(gauss(), identity(algebra_B(L)), L) - gauss()) < 1e-14);
}

TEST_CASE("multi-window bounds and search") {
  LatticeGen L = diag_lattice(0.5, 1);
  FrameReport one = frame_bounds(gauss(), L);
  FrameReport many = multiwindow_bounds(MultiWindowSet({gauss()}), L);
  CHECK(one.bessel == many.bessel);
  CHECK(one.lower == many.lower);
  CHECK(one.certified == many.certified);

  LatticeGen L2 = diag_lattice(1.5, 1);
  MultiWindowSearch s = multiwindow_search(gauss(), L2);
  REQUIRE(s.found);
  CHECK(s.candidatesTried <= 100);
  CHECK(s.report.certified);
  CHECK(s.report.windowCount == 2);

  Vec sh(2);
  sh << 0.5, 0.5;
  FrameReport dense = multiwindow_bounds(MultiWindowSet({gauss(), ModuleVector::shifted(Window::gaussian(1), sh)}),
                                         diag_lattice(2.5, 1));
  CHECK(dense.densityAdvisory);
  CHECK_FALSE(dense.certified);
  CHECK_THROWS_AS(MultiWindowSet({}), Error);
}

TEST_CASE("single-window module projection") {
  LatticeGen L = diag_lattice(0.5, 1);
  ProjectionResult p = projection_build(MultiWindowSet({gauss()}), L);
  REQUIRE(p.P.size == 1);
  CHECK(p.idempotence < 1e-6);
  CHECK(p.selfAdjointness < 1e-6);
  CHECK(p.partition < 1e-6);
  CHECK(partition_residual({identity(algebra_B(L))}) == 0.0);
  CHECK_THROWS_AS(projection_build(MultiWindowSet({gauss()}), diag_lattice(1, 1)), Error);
}
