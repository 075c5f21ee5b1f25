#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace homecore {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
};

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  return n > 0.0 ? a * (1.0 / n) : Vec3{0.0, 0.0, 0.0};
}

/// Row-major 3x3 matrix; enough for rotations and covariances.
struct Mat3 {
  std::array<std::array<double, 3>, 3> m{};

  static Mat3 identity() {
    Mat3 r;
    r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
    return r;
  }

  static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    Mat3 r;
    r.m[0] = {c0.x, c1.x, c2.x};
    r.m[1] = {c0.y, c1.y, c2.y};
    r.m[2] = {c0.z, c1.z, c2.z};
    return r;
  }

  Vec3 col(int j) const { return {m[0][j], m[1][j], m[2][j]}; }

  Vec3 operator*(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
        r.m[i][j] = s;
      }
    return r;
  }

  Mat3 transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
  }

  /// Transform by the inverse of a rotation (transpose).
  Vec3 transposed_mul(const Vec3& v) const {
    return {m[0][0] * v.x + m[1][0] * v.y + m[2][0] * v.z,
            m[0][1] * v.x + m[1][1] * v.y + m[2][1] * v.z,
            m[0][2] * v.x + m[1][2] * v.y + m[2][2] * v.z};
  }

  double determinant() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }
};

/// Rotation about an arbitrary unit axis (Rodrigues).
Mat3 rotation_about_axis(const Vec3& axis, double angle);

/// Rotation about the y axis.
Mat3 rotation_y(double angle);

/// Rotation about the z axis.
Mat3 rotation_z(double angle);

/// Eigen decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
/// Iterates until the off-diagonal norm falls below 1e-12 relative to the
/// matrix scale. Results sorted by descending eigenvalue; eigenvectors are
/// orthonormal columns paired with `eigenvalues`.
void jacobi_eigen_sym3(const Mat3& a, std::array<double, 3>& eigenvalues,
                       std::array<Vec3, 3>& eigenvectors);

/// Dense row-major matrix for the reservoir module. Sizes there are small
/// (a few hundred at most), so no blocking or sparsity tricks.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

std::vector<double> matvec(const Matrix& m, const std::vector<double>& x);

/// A^T * A (symmetric result).
Matrix gram(const Matrix& m);

/// A^T * y.
std::vector<double> transpose_matvec(const Matrix& m, const std::vector<double>& y);

/// Solves A x = b for symmetric positive definite A by Cholesky.
/// Throws ErrorCode::singular_system when a pivot drops below tolerance.
std::vector<double> cholesky_solve_spd(Matrix a, std::vector<double> b);

/// Largest eigenvalue modulus of a square real matrix, by block power
/// (subspace) iteration with a 6-dimensional subspace. Plain power iteration
/// fails to settle when the dominant eigenvalues form a complex conjugate
/// pair, which is the common case for random reservoir matrices; the block
/// variant recovers the pair through the Ritz projection. Deterministic.
/// Returns 0 when iterates collapse (nilpotent-to-tolerance input).
double spectral_radius(const Matrix& m, double tol = 1e-10,
                       std::size_t max_iter = 20000);

/// Largest-modulus root estimate of a small dense matrix (up to 8x8) via its
/// characteristic polynomial and Durand-Kerner iteration. Support routine for
/// spectral_radius; exposed for tests.
double max_eigenvalue_modulus_small(const Matrix& m);

}  // namespace homecore
