#include "graphid/expm.hpp"

#include <array>
#include <cmath>

#include "graphid/error.hpp"

namespace graphid {
namespace {

// Largest 1-norm for which the degree-m approximant is accurate to unit roundoff.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double norm1(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

Matrix solve_pade(const Matrix& u, const Matrix& v) {
  // r = (v - u)^{-1} (v + u)
  return (v - u).partialPivLu().solve(v + u);
}

template <std::size_t N>
Matrix pade_low(const Matrix& a, const std::array<double, N>& b) {
  // Degrees 3..9: u = a * sum_k b[2k+1] a^{2k}, v = sum_k b[2k] a^{2k}
  const auto n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix power = ident;
  Matrix u_inner = Matrix::Zero(n, n);
  Matrix v = Matrix::Zero(n, n);
  for (std::size_t k = 0; 2 * k + 1 < N; ++k) {
    u_inner += b[2 * k + 1] * power;
    v += b[2 * k] * power;
    power = power * a2;
  }
  return solve_pade(a * u_inner, v);
}

Matrix pade13(const Matrix& a) {
  constexpr std::array<double, 14> b = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                        1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                        670442572800.0,      33522128640.0,       1323241920.0,
                                        40840800.0,          960960.0,            16380.0,
                                        182.0,               1.0};
  const auto n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
                        b[1] * ident);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
  return solve_pade(u, v);
}

}  // namespace

Matrix expm(const Matrix& m) {
  if (m.rows() != m.cols()) throw StructuralError("expm: matrix must be square");
  if (!m.allFinite()) throw ArgumentError("expm: non-finite entries");
  const auto n = m.rows();
  if (n == 0) return m;

  const double norm = norm1(m);
  if (norm <= kTheta3) return pade_low(m, std::array<double, 4>{120.0, 60.0, 12.0, 1.0});
  if (norm <= kTheta5) {
    return pade_low(m, std::array<double, 6>{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0});
  }
  if (norm <= kTheta7) {
    return pade_low(m, std::array<double, 8>{17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0,
                                             56.0, 1.0});
  }
  if (norm <= kTheta9) {
    return pade_low(m, std::array<double, 10>{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                              30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0});
  }
  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
  Matrix r = pade13(std::ldexp(1.0, -squarings) * m);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

Matrix expm_frechet(const Matrix& m, const Matrix& e) {
  if (m.rows() != m.cols()) throw StructuralError("expm_frechet: matrix must be square");
  if (e.rows() != m.rows() || e.cols() != m.cols()) {
    throw StructuralError("expm_frechet: direction must match the base matrix size");
  }
  const auto n = m.rows();
  if (n == 0) return e;

  // The derivative is linear in e; rescale e by a power of two to the size of m
  // so that a large direction does not inflate the squaring count.
  const double e_norm = norm1(e);
  if (e_norm == 0.0) return Matrix::Zero(n, n);
  const double target = std::max(norm1(m), 1.0);
  const int shift = static_cast<int>(std::lround(std::log2(e_norm / target)));

  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = m;
  block.bottomRightCorner(n, n) = m;
  block.topRightCorner(n, n) = std::ldexp(1.0, -shift) * e;
  return std::ldexp(1.0, shift) * expm(block).topRightCorner(n, n);
}

}  // namespace graphid
