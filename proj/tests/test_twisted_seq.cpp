#include "doctest.h"
#include "oracles.hpp"

#include "heisenbundle/errors.hpp"
#include "heisenbundle/twisted_seq.hpp"

#include <Eigen/Eigenvalues>

using namespace hb;

namespace {

Coeffs random_coeffs(std::mt19937_64& rng, int n, int radius, int count) {
  std::uniform_int_distribution<int> ki(-radius, radius);
  std::uniform_real_distribution<double> u(-1, 1);
  Coeffs c(n);
  while (static_cast<int>(c.size()) < count) {
    Index k(n);
    int l1 = 0;
    for (auto& v : k) v = ki(rng), l1 += std::abs(v);
    if (l1 <= radius) c.set(k, cplx(u(rng), u(rng)));
  }
  return c;
}

// straight transcription of the twisted convolution
Coeffs naive_tconv(const AlgElem& a, const AlgElem& b) {
  Coeffs out(a.n());
  for (const auto& [k, va] : a.c)
    for (const auto& [m, vb] : b.c) {
      Index km(k.size());
      for (std::size_t i = 0; i < k.size(); ++i) km[i] = k[i] + m[i];
      out.add(km, a.alg.haarScale * va * vb * cocycle_eval(a.alg.zeta, k, m));
    }
  out.prune();
  return out;
}

TwistedAlgebra random_algebra(std::mt19937_64& rng, int which) {
  LatticeGen g = make_lattice(oracle::random_lattice(rng, 2, 2));
  switch (which % 3) {
  case 0: return algebra_A(g);
  case 1: return algebra_B(g);
  default: return algebra_theta(g.Theta);
  }
}

double dense_norm(const Eigen::MatrixXcd& A) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
  return svd.singularValues()(0);
}

} // namespace

TEST_CASE("twisted convolution matches the naive double sum") {
  std::mt19937_64 rng(1);
  for (int it = 0; it < 12; ++it) {
    TwistedAlgebra alg = random_algebra(rng, it);
    AlgElem a{alg, random_coeffs(rng, 2, 3, 10)}, b{alg, random_coeffs(rng, 2, 3, 10)};
    CHECK(max_abs_diff(tconv(a, b).c, naive_tconv(a, b)) < 1e-13);
  }
}

TEST_CASE("algebra laws: associativity, involution, identity") {
  std::mt19937_64 rng(2);
  for (int it = 0; it < 12; ++it) {
    TwistedAlgebra alg = random_algebra(rng, it);
    AlgElem a{alg, random_coeffs(rng, 2, 3, 8)}, b{alg, random_coeffs(rng, 2, 3, 8)},
        c{alg, random_coeffs(rng, 2, 3, 8)};
    CHECK(max_abs_diff(tconv(tconv(a, b), c).c, tconv(a, tconv(b, c)).c) < 1e-13);
    CHECK(max_abs_diff(tstar(tconv(a, b)).c, tconv(tstar(b), tstar(a)).c) < 1e-13);
    CHECK(max_abs_diff(tstar(tstar(a)).c, a.c) < 1e-14);
    AlgElem e = identity(alg);
    CHECK(max_abs_diff(tconv(e, a).c, a.c) < 1e-14);
    CHECK(max_abs_diff(tconv(a, e).c, a.c) < 1e-14);
    CHECK(seq_norm(tconv(a, b), SeqNorm::L1) <= seq_norm(a, SeqNorm::L1) * seq_norm(b, SeqNorm::L1) * (1 + 1e-14));
    CHECK(is_self_adjoint(tconv(tstar(a), a)));
  }
}

TEST_CASE("mixing algebras is rejected") {
  std::mt19937_64 rng(3);
  AlgElem a{random_algebra(rng, 0), Coeffs::delta(2, {0, 0})};
  AlgElem b{random_algebra(rng, 0), Coeffs::delta(2, {0, 0})};
  CHECK_THROWS_AS(tconv(a, b), Error);
  CHECK_THROWS_AS(AlgElem(a.alg, Coeffs(3)), Error);
}

TEST_CASE("compressions: adjoint and products") {
  std::mt19937_64 rng(4);
  TwistedAlgebra alg = random_algebra(rng, 1);
  AlgElem a{alg, random_coeffs(rng, 2, 2, 6)}, b{alg, random_coeffs(rng, 2, 2, 6)};
  const int N = 6;
  Eigen::MatrixXcd Ra = rep_matrix(a, N), Rs = rep_matrix(tstar(a), N);
  CHECK((Ra.adjoint() - Rs).norm() < 1e-13);
  Eigen::MatrixXcd prod = Ra * rep_matrix(b, N), Rab = rep_matrix(tconv(a, b), N);
  // columns whose index sits two support radii from the boundary are exact
  double err = 0;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) {
      auto col = box_position({i, j}, N);
      err = std::max(err, (prod.col(col) - Rab.col(col)).norm());
    }
  CHECK(err < 1e-13);

  BoxOperator op(a, N);
  CVec x = CVec::Random(op.dim()), y, z;
  op.apply(x, y);
  CHECK((y - Ra * x).norm() < 1e-12);
  op.apply_adjoint(x, z);
  CHECK((z - Ra.adjoint() * x).norm() < 1e-12);
}

TEST_CASE("opnorm: unitary-shift element reaches 3/2 from below") {
  std::mt19937_64 rng(5);
  TwistedAlgebra alg = random_algebra(rng, 0);
  Coeffs c(2);
  c.set({0, 0}, 1.0);
  c.set({1, 0}, 0.5);
  NormEstimate e = opnorm({alg, c}, {.tol = 1e-3});
  CHECK(e.converged);
  CHECK(e.value <= 1.5 + 1e-12);
  CHECK(e.value > 1.5 - 2e-3);
  CHECK(e.upperBound == doctest::Approx(1.5));
  for (std::size_t i = 1; i < e.history.size(); ++i) CHECK(e.history[i].second >= e.history[i - 1].second);
}

TEST_CASE("opnorm of a commutative element equals the sup of its symbol") {
  TwistedAlgebra alg{BilinearCocycle{Mat::Zero(2, 2)}, 1.0};
  Coeffs c(2);
  c.set({0, 0}, 1.0);
  c.set({1, 0}, cplx(0.3, 0.2));
  c.set({0, -1}, -0.4);
  c.set({1, 1}, cplx(0, 0.25));
  double sup = 0;
  const int G = 400;
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      cplx s = 0;
      for (const auto& [k, v] : c) s += v * oracle::expi((k[0] * i + k[1] * j) / double(G));
      sup = std::max(sup, std::abs(s));
    }
  NormEstimate e = opnorm({alg, c}, {.tol = 1e-3});
  CHECK(e.value <= sup + 1e-6);
  CHECK(e.value > sup - 2e-3);
}

TEST_CASE("opnorm lower estimate never exceeds a dense SVD of a larger box") {
  std::mt19937_64 rng(6);
  for (int it = 0; it < 4; ++it) {
    TwistedAlgebra alg = random_algebra(rng, it);
    AlgElem a{alg, random_coeffs(rng, 2, 1, 3)};
    NormEstimate e = opnorm(a, {.tol = 1e-2, .boxMax = 8, .throwOnFailure = false});
    double dense = dense_norm(rep_matrix(a, 10));
    CHECK(e.value <= dense + 1e-10);
    CHECK(e.value <= e.upperBound + 1e-12);
  }
}

TEST_CASE("C*-identity on random elements") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 3; ++it) {
    TwistedAlgebra alg = random_algebra(rng, it);
    AlgElem a{alg, random_coeffs(rng, 2, 2, 5)};
    a = scale(a, 1.0 / seq_norm(a, SeqNorm::L1));
    double na = opnorm(a, {.tol = 1e-3}).value;
    double nsa = opnorm(tconv(tstar(a), a), {.tol = 1e-3}).value;
    CHECK(std::abs(nsa - na * na) <= 0.02 * na * na);
  }
}

TEST_CASE("non-convergence is reported") {
  TwistedAlgebra alg{BilinearCocycle{Mat::Zero(2, 2)}, 1.0};
  Coeffs c(2);
  c.set({0, 0}, 1.0);
  c.set({1, 0}, 1.0);
  CHECK_THROWS_AS(opnorm({alg, c}, {.tol = 1e-9, .boxMax = 8}), Error);
  NormEstimate e = opnorm({alg, c}, {.tol = 1e-9, .boxMax = 8, .throwOnFailure = false});
  CHECK_FALSE(e.converged);
}

TEST_CASE("Neumann inverse agrees with the inverse compression") {
  std::mt19937_64 rng(8);
  LatticeGen g = make_lattice(oracle::random_lattice(rng, 2, 1.5));
  TwistedAlgebra alg = algebra_B(g);
  AlgElem h{alg, random_coeffs(rng, 2, 1, 3)};
  // 2e + small self-adjoint perturbation
  AlgElem b = add(scale(identity(alg), 2.0), scale(add(h, tstar(h)), 0.2 / seq_norm(h, SeqNorm::L1)));
  AlgElem x = invert(b, 1e-11);
  CHECK(seq_norm(sub(tconv(b, x), identity(alg)), SeqNorm::L1) < 1e-11);
  const int N = 10;
  Eigen::MatrixXcd R = rep_matrix(b, N);
  Eigen::VectorXcd d0 = Eigen::VectorXcd::Zero(R.rows());
  d0[box_position({0, 0}, N)] = 1.0;
  Eigen::VectorXcd col = R.partialPivLu().solve(d0) / alg.haarScale;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) CHECK(std::abs(col[box_position({i, j}, N)] - x.c.get({i, j})) < 1e-9);

  AlgElem notpos = sub(identity(alg), scale(identity(alg), 2.0));
  CHECK_THROWS_AS(invert(notpos, 1e-8), Error);
}

TEST_CASE("inverse square root agrees with an eigendecomposition") {
  std::mt19937_64 rng(9);
  LatticeGen g = make_lattice(oracle::random_lattice(rng, 2, 1.5));
  TwistedAlgebra alg = algebra_A(g);
  AlgElem h{alg, random_coeffs(rng, 2, 1, 3)};
  AlgElem b = add(identity(alg), scale(add(h, tstar(h)), 0.3 / seq_norm(h, SeqNorm::L1)));
  AlgElem r = inv_sqrt(b, 1e-11);
  CHECK(is_self_adjoint(r, 1e-12));
  const int N = 10;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rep_matrix(b, N));
  Eigen::MatrixXcd isq = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                         es.eigenvectors().adjoint();
  auto col = isq.col(box_position({0, 0}, N));
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) CHECK(std::abs(col[box_position({i, j}, N)] - r.c.get({i, j})) < 1e-9);
}

TEST_CASE("matrices over the algebra") {
  std::mt19937_64 rng(10);
  TwistedAlgebra alg = random_algebra(rng, 0);
  AlgMatrix A{2, {}}, B{2, {}};
  for (int i = 0; i < 4; ++i) {
    A.entries.push_back({alg, random_coeffs(rng, 2, 1, 2)});
    B.entries.push_back({alg, random_coeffs(rng, 2, 1, 2)});
  }
  AlgMatrix lhs = mat_star(mat_mul(A, B)), rhs = mat_mul(mat_star(B), mat_star(A));
  CHECK(mat_max_l1(mat_sub(lhs, rhs)) < 1e-13);
  AlgMatrix C{3, {}};
  CHECK_THROWS_AS(mat_mul(A, C), Error);
  AlgMatrix D = B;
  D.at(0, 0) = AlgElem{random_algebra(rng, 1), Coeffs(2)};
  CHECK_THROWS_AS(mat_mul(A, D), Error);
}

TEST_CASE("coefficient text format round-trips exactly") {
  std::mt19937_64 rng(12);
  Coeffs c = random_coeffs(rng, 2, 4, 20);
  c.set({7, -3}, cplx(1.0 / 3.0, -1e-14));
  Coeffs back = coeffs_from_text(to_text(c), 2);
  CHECK(back.entries() == c.entries());
  CHECK(to_text(back) == to_text(c));
  CHECK_THROWS_AS(coeffs_from_text("1 2 3\n", 2), Error);
  Coeffs p(2);
  p.set({0, 0}, 1e-16);
  CHECK(p.empty());
}
