#include "doctest.h"
#include "oracles.hpp"

#include "heisenbundle/errors.hpp"
#include "heisenbundle/lattice_phase.hpp"

using namespace hb;

TEST_CASE("heisenberg phase is a normalized 2-cocycle") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    int d = 1 + it % 2;
    Vec z1 = oracle::random_point(rng, 2 * d, 5), z2 = oracle::random_point(rng, 2 * d, 5),
        z3 = oracle::random_point(rng, 2 * d, 5);
    cplx lhs = heisenberg_c(z1, z2) * heisenberg_c(z1 + z2, z3);
    cplx rhs = heisenberg_c(z1, z2 + z3) * heisenberg_c(z2, z3);
    CHECK(std::abs(lhs - rhs) < 1e-13);
    CHECK(std::abs(heisenberg_c(z1, Vec::Zero(2 * d)) - 1.0) == 0.0);
    CHECK(std::abs(heisenberg_c(Vec::Zero(2 * d), z1) - 1.0) == 0.0);
    cplx sym = heisenberg_c(z1, z2) * std::conj(heisenberg_c(z2, z1));
    CHECK(std::abs(sym - symplectic_c(z1, z2)) < 1e-13);
  }
}

TEST_CASE("composition of time-frequency shifts picks up c(z1, z2)") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 20; ++it) {
    Vec z1 = oracle::random_point(rng, 2, 2), z2 = oracle::random_point(rng, 2, 2);
    auto lhs = oracle::tf_shift(z1, oracle::tf_shift(z2, oracle::gaussian));
    auto rhs = oracle::tf_shift(z1 + z2, oracle::gaussian);
    cplx c = heisenberg_c(z1, z2);
    for (double t = -3; t <= 3; t += 0.37) CHECK(std::abs(lhs(t) - c * rhs(t)) < 1e-13);
  }
}

TEST_CASE("phase arguments are reduced before exponentiation") {
  Vec z1(2), z2(2);
  z1 << 1e6 + 0.25, 0;
  z2 << 0, 1.0;
  CHECK(std::abs(heisenberg_c(z1, z2) - cplx(0, -1)) < 1e-9);
  CHECK(std::abs(unit_phase(1e9 + 0.5) + 1.0) < 1e-6);
}

TEST_CASE("make_lattice caches the adjoint generator and Theta") {
  Mat L(2, 2);
  L << 0.5, 0, 0, 1;
  LatticeGen g = make_lattice(L);
  CHECK(g.det == doctest::Approx(0.5));
  Mat expect(2, 2);
  expect << 1, 0, 0, 2;
  CHECK((g.Ladj - expect).norm() < 1e-15);
  CHECK((g.Theta + g.Theta.transpose()).norm() < 1e-15);

  std::mt19937_64 rng(3);
  for (int it = 0; it < 20; ++it) {
    Mat A = oracle::random_lattice(rng, 2 + 2 * (it % 2), 3);
    LatticeGen h = make_lattice(A);
    LatticeGen hh = adjoint_lattice(adjoint_lattice(h));
    CHECK((hh.L - A).norm() < 1e-10 * (1 + A.norm()));
    // symplectic pairing between L and L° is integral
    Mat pair = h.L.transpose() * symplectic_J(h.d) * h.Ladj;
    for (int i = 0; i < pair.size(); ++i)
      CHECK(std::abs(pair.data()[i] - std::nearbyint(pair.data()[i])) < 1e-10);
  }
}

TEST_CASE("singular and misshapen generators are rejected") {
  Mat S(2, 2);
  S << 1, 2, 2, 4;
  CHECK_THROWS_AS(make_lattice(S), Error);
  try {
    make_lattice(S);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularMatrix);
  }
  CHECK_THROWS_AS(make_lattice(Mat::Identity(3, 3)), Error);
  Vec a(2), b(4);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(heisenberg_c(a, b), Error);
}

TEST_CASE("c_L agrees with the lattice cocycle evaluated on points") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> ki(-5, 5);
  for (int it = 0; it < 200; ++it) {
    LatticeGen g = make_lattice(oracle::random_lattice(rng, 2, 4));
    Index k{ki(rng), ki(rng)}, m{ki(rng), ki(rng)};
    CHECK(std::abs(cocycle_eval(lattice_cocycle(g), k, m) - heisenberg_c(g.point(k), g.point(m))) < 1e-12);
    cplx adj = std::conj(heisenberg_c(g.adjoint_point(k), g.adjoint_point(m)));
    double mag = 1 + g.adjoint_point(k).norm() * g.adjoint_point(m).norm();
    CHECK(std::abs(cocycle_eval(adjoint_lattice_cocycle(g), k, m) - adj) < 4e-14 * mag);
  }
}

TEST_CASE("c_L is cohomologous to zeta_{Theta^low} through rho_L") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> ki(-5, 5);
  for (int it = 0; it < 300; ++it) {
    LatticeGen g = make_lattice(oracle::random_lattice(rng, 2, 5));
    Index k{ki(rng), ki(rng)}, m{ki(rng), ki(rng)};
    Index km{k[0] + m[0], k[1] + m[1]};
    cplx lhs = cocycle_eval(lattice_cocycle(g), k, m);
    cplx rhs = cocycle_eval(theta_low_cocycle(g.Theta), k, m) * cochain_rho(g, km) /
               (cochain_rho(g, k) * cochain_rho(g, m));
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("collected-powers correction: closed form matches the product form") {
  std::mt19937_64 rng(2);
  for (int it = 0; it < 20; ++it) {
    LatticeGen g = make_lattice(oracle::random_lattice(rng, 2, 3));
    for (int a = -4; a <= 4; ++a)
      for (int b = -4; b <= 4; ++b) {
        Index k{a, b};
        CHECK(std::abs(collected_P(g, k) - collected_P_product(g, k)) < 1e-12);
      }
    CHECK(std::abs(collected_P(g, {1, 0}) - 1.0) < 1e-15);
    CHECK(std::abs(collected_P(g, {0, 1}) - 1.0) < 1e-15);
    CHECK(std::abs(collected_P(theta_low_cocycle(g.Theta), {3, -2}) - 1.0) < 1e-15);
  }
}

TEST_CASE("twisting coefficients is an l1 isometry") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  LatticeGen g = make_lattice(oracle::random_lattice(rng, 2, 2));
  Coeffs a(2);
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j) a.set({i, j}, cplx(u(rng), u(rng)));
  Coeffs t = twist_coeffs(a, g);
  CHECK(std::abs(sum_abs(t) - sum_abs(a)) < 1e-14 * sum_abs(a));
  CHECK_THROWS_AS(twist_coeffs(Coeffs(4), g), Error);
}
