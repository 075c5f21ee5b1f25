#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "homecore/error.hpp"
#include "homecore/linalg.hpp"
#include "homecore/rng.hpp"
#include "support/oracles.hpp"

using namespace homecore;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("vector and matrix primitives") {
  const Vec3 x{1, 0, 0}, y{0, 1, 0}, z{0, 0, 1};
  CHECK(dot(x, y) == 0.0);
  const Vec3 c = cross(x, y);
  CHECK(c.x == doctest::Approx(z.x));
  CHECK(c.z == doctest::Approx(1.0));
  CHECK(norm(Vec3{3, 4, 0}) == doctest::Approx(5.0));
  CHECK(norm(normalized(Vec3{2, -1, 7})) == doctest::Approx(1.0));

  const Mat3 r = rotation_z(std::numbers::pi / 2);
  const Vec3 rx = r * x;
  CHECK(rx.x == doctest::Approx(0.0));
  CHECK(rx.y == doctest::Approx(1.0));
  CHECK(r.determinant() == doctest::Approx(1.0));

  const Mat3 rt = r.transposed();
  const Vec3 back = rt * rx;
  CHECK(back.x == doctest::Approx(1.0));
  CHECK(back.y == doctest::Approx(0.0));
  const Vec3 back2 = r.transposed_mul(rx);
  CHECK(back2.x == doctest::Approx(back.x));

  const Mat3 prod = r * rt;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(prod.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
            doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("rotation about an arbitrary axis") {
  Rng rng(mix_seed(7, 0));
  for (int t = 0; t < 20; ++t) {
    const Mat3 r = oracles::random_rotation(rng);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-10));
    const Mat3 should_be_identity = r * r.transposed();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(should_be_identity.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
  }
}

TEST_CASE("jacobi eigen decomposition of symmetric 3x3") {
  std::array<double, 3> evals{};
  std::array<Vec3, 3> evecs{};

  Mat3 diag = Mat3::identity();
  diag.m[0][0] = 3.0;
  diag.m[1][1] = 1.0;
  diag.m[2][2] = 2.0;
  jacobi_eigen_sym3(diag, evals, evecs);
  CHECK(evals[0] == doctest::Approx(3.0));
  CHECK(evals[1] == doctest::Approx(2.0));
  CHECK(evals[2] == doctest::Approx(1.0));
  CHECK(std::abs(evecs[0].x) == doctest::Approx(1.0));
  CHECK(std::abs(evecs[1].z) == doctest::Approx(1.0));
  CHECK(std::abs(evecs[2].y) == doctest::Approx(1.0));

  Mat3 coupled = Mat3::identity();
  coupled.m = {{{2, 1, 0}, {1, 2, 0}, {0, 0, 5}}};
  jacobi_eigen_sym3(coupled, evals, evecs);
  CHECK(evals[0] == doctest::Approx(5.0));
  CHECK(evals[1] == doctest::Approx(3.0));
  CHECK(evals[2] == doctest::Approx(1.0));
  CHECK(std::abs(dot(evecs[1], normalized(Vec3{1, 1, 0}))) == doctest::Approx(1.0));

  // Eigenvector property A v = lambda v on random symmetric matrices.
  Rng rng(mix_seed(7, 1));
  for (int t = 0; t < 25; ++t) {
    Mat3 s;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        const double v = rng.uniform(-2.0, 2.0);
        s.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
        s.m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = v;
      }
    jacobi_eigen_sym3(s, evals, evecs);
    CHECK(evals[0] >= evals[1]);
    CHECK(evals[1] >= evals[2]);
    for (int k = 0; k < 3; ++k) {
      const Vec3 av = s * evecs[static_cast<std::size_t>(k)];
      const Vec3 lv = evecs[static_cast<std::size_t>(k)] * evals[static_cast<std::size_t>(k)];
      CHECK(norm(av - lv) < 1e-9);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        CHECK(std::abs(dot(evecs[static_cast<std::size_t>(i)],
                           evecs[static_cast<std::size_t>(j)])) < 1e-9);
  }
}

TEST_CASE("dense matrix helpers") {
  Matrix m(2, 3);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(0, 2) = 3;
  m(1, 0) = 4;
  m(1, 1) = 5;
  m(1, 2) = 6;

  const std::vector<double> mx = matvec(m, {1.0, 1.0, 1.0});
  CHECK(mx[0] == doctest::Approx(6.0));
  CHECK(mx[1] == doctest::Approx(15.0));

  const Matrix g = gram(m);
  CHECK(g.rows == 3);
  CHECK(g(0, 0) == doctest::Approx(17.0));
  CHECK(g(0, 1) == doctest::Approx(22.0));
  CHECK(g(1, 0) == doctest::Approx(22.0));
  CHECK(g(2, 2) == doctest::Approx(45.0));

  const std::vector<double> ty = transpose_matvec(m, {1.0, 2.0});
  CHECK(ty[0] == doctest::Approx(9.0));
  CHECK(ty[1] == doctest::Approx(12.0));
  CHECK(ty[2] == doctest::Approx(15.0));
}

TEST_CASE("cholesky SPD solve matches Gauss-Jordan") {
  Rng rng(mix_seed(7, 2));
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(2, 12));
    Matrix base(n, n);
    for (double& v : base.a) v = rng.uniform(-1.0, 1.0);
    Matrix spd = gram(base);
    for (std::size_t i = 0; i < n; ++i) spd(i, i) += 0.5;

    std::vector<double> b(n);
    for (double& v : b) v = rng.uniform(-2.0, 2.0);

    const std::vector<double> got = cholesky_solve_spd(spd, b);

    std::vector<std::vector<double>> rows(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) rows[i][j] = spd(i, j);
    const std::vector<double> want = oracles::gauss_jordan_solve(rows, b);

    for (std::size_t i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-8));
  }
}

TEST_CASE("cholesky rejects singular systems") {
  Matrix singular(2, 2);
  singular(0, 0) = 1.0;
  singular(0, 1) = 1.0;
  singular(1, 0) = 1.0;
  singular(1, 1) = 1.0;
  CHECK_THROWS_AS((void)cholesky_solve_spd(singular, {1.0, 2.0}), Error);
  try {
    (void)cholesky_solve_spd(singular, {1.0, 2.0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singular_system);
  }
}

TEST_CASE("spectral radius on known matrices") {
  Matrix diag(3, 3);
  diag(0, 0) = -4.0;
  diag(1, 1) = 2.0;
  diag(2, 2) = 1.0;
  CHECK(spectral_radius(diag) == doctest::Approx(4.0).epsilon(1e-9));

  // Pure rotation-scale block: complex conjugate eigenvalues of modulus 3.
  Matrix rot(2, 2);
  rot(0, 0) = 0.0;
  rot(0, 1) = -3.0;
  rot(1, 0) = 3.0;
  rot(1, 1) = 0.0;
  CHECK(spectral_radius(rot) == doctest::Approx(3.0).epsilon(1e-9));

  // Embedded complex pair dominating a real eigenvalue.
  Matrix mixed(3, 3);
  mixed(0, 0) = 0.3;
  mixed(0, 1) = -2.0;
  mixed(1, 0) = 2.0;
  mixed(1, 1) = 0.3;
  mixed(2, 2) = 1.5;
  const double want = std::hypot(0.3, 2.0);
  CHECK(spectral_radius(mixed) == doctest::Approx(want).epsilon(1e-9));

  Matrix zero(4, 4);
  CHECK(spectral_radius(zero) == doctest::Approx(0.0));

  // Nilpotent: all eigenvalues zero.
  Matrix nil(3, 3);
  nil(0, 1) = 5.0;
  nil(1, 2) = 7.0;
  CHECK(spectral_radius(nil) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("spectral radius agrees with the subspace-iteration oracle") {
  Rng rng(mix_seed(7, 3));
  for (int t = 0; t < 15; ++t) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(5, 40));
    Matrix m(n, n);
    // Sparse +/-1 pattern, the reservoir shape.
    for (double& v : m.a)
      if (rng.uniform() < 0.15) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double got = spectral_radius(m);
    const double want = oracles::spectral_radius_oracle(m);
    CHECK(got == doctest::Approx(want).epsilon(1e-7));
  }
}

TEST_CASE("small-matrix eigenvalue modulus via characteristic polynomial") {
  Matrix m(3, 3);
  m(0, 0) = 2.0;
  m(1, 1) = -5.0;
  m(2, 2) = 1.0;
  m(0, 1) = 0.7;
  CHECK(max_eigenvalue_modulus_small(m) == doctest::Approx(5.0).epsilon(1e-8));

  Matrix rot(2, 2);
  rot(0, 0) = 1.0;
  rot(0, 1) = -2.0;
  rot(1, 0) = 2.0;
  rot(1, 1) = 1.0;
  CHECK(max_eigenvalue_modulus_small(rot) == doctest::Approx(std::hypot(1.0, 2.0)).epsilon(1e-8));
}

TEST_CASE("rng streams are deterministic and decorrelated") {
  Rng a(mix_seed(42, 0));
  Rng b(mix_seed(42, 0));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c(mix_seed(42, 1));
  Rng d(mix_seed(43, 0));
  int same_c = 0, same_d = 0;
  Rng fresh(mix_seed(42, 0));
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t base = fresh.next_u64();
    same_c += base == c.next_u64();
    same_d += base == d.next_u64();
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
}

TEST_CASE("rng distributions stay in range") {
  Rng rng(mix_seed(42, 2));
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform(-2.0, 3.0);
    CHECK(v >= -2.0);
    CHECK(v < 3.0);
  }

  std::set<std::int64_t> seen;
  for (int i = 0; i < 400; ++i) {
    const std::int64_t k = rng.uniform_int(-1, 4);
    CHECK(k >= -1);
    CHECK(k <= 4);
    seen.insert(k);
  }
  CHECK(seen.size() == 6);  // inclusive on both ends

  double sum = 0.0, sum2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.normal(1.0, 2.0);
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double stddev = std::sqrt(sum2 / n - mean * mean);
  CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
  CHECK(stddev == doctest::Approx(2.0).epsilon(0.05));

  const std::vector<int> items{10, 20, 30};
  for (int i = 0; i < 50; ++i) {
    const int p = rng.pick(items);
    CHECK((p == 10 || p == 20 || p == 30));
  }
}

TEST_SUITE_END();
