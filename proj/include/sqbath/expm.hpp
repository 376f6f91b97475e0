#pragma once

// Dense matrix exponential by scaling and squaring with diagonal Pade
// approximants of degree 3, 5, 7, 9 or 13 (Higham, SIAM J. Matrix Anal. Appl.
// 26 (2005) 1179). Intended for the small generators of this library
// (at most 64x64), where accuracy matters more than speed.

#include <Eigen/Dense>

#include <cmath>

namespace sqbath {

namespace detail {

template <typename M>
void pade3(const M& a, M& u, M& v) {
  const double b[] = {120.0, 60.0, 12.0, 1.0};
  const M id = M::Identity(a.rows(), a.cols());
  const M a2 = a * a;
  u = a * (b[3] * a2 + b[1] * id);
  v = b[2] * a2 + b[0] * id;
}

template <typename M>
void pade5(const M& a, M& u, M& v) {
  const double b[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  const M id = M::Identity(a.rows(), a.cols());
  const M a2 = a * a;
  const M a4 = a2 * a2;
  u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[4] * a4 + b[2] * a2 + b[0] * id;
}

template <typename M>
void pade7(const M& a, M& u, M& v) {
  const double b[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                      25200.0,    1512.0,    56.0,      1.0};
  const M id = M::Identity(a.rows(), a.cols());
  const M a2 = a * a;
  const M a4 = a2 * a2;
  const M a6 = a4 * a2;
  u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

template <typename M>
void pade9(const M& a, M& u, M& v) {
  const double b[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                      2162160.0,     110880.0,     3960.0,       90.0,        1.0};
  const M id = M::Identity(a.rows(), a.cols());
  const M a2 = a * a;
  const M a4 = a2 * a2;
  const M a6 = a4 * a2;
  const M a8 = a6 * a2;
  u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

template <typename M>
void pade13(const M& a, M& u, M& v) {
  const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                      1187353796428800.0,  129060195264000.0,   10559470521600.0,
                      670442572800.0,      33522128640.0,       1323241920.0,
                      40840800.0,          960960.0,            16380.0,
                      182.0,               1.0};
  const M id = M::Identity(a.rows(), a.cols());
  const M a2 = a * a;
  const M a4 = a2 * a2;
  const M a6 = a4 * a2;
  M tmp = b[13] * a6 + b[11] * a4 + b[9] * a2;
  u = a * (a6 * tmp + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  tmp = b[12] * a6 + b[10] * a4 + b[8] * a2;
  v = a6 * tmp + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

} // namespace detail

/// exp(A) for a square dense Eigen matrix (real or complex scalar).
template <typename Derived>
typename Derived::PlainObject expm(const Eigen::MatrixBase<Derived>& a_in) {
  using M = typename Derived::PlainObject;
  const M a = a_in;
  eigen_assert(a.rows() == a.cols());
  if (a.size() == 0) {
    return a;
  }
  // 1-norm: maximum absolute column sum.
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();

  M u;
  M v;
  int squarings = 0;
  if (norm1 < 1.495585217958292e-2) {
    detail::pade3(a, u, v);
  } else if (norm1 < 2.539398330063230e-1) {
    detail::pade5(a, u, v);
  } else if (norm1 < 9.504178996162932e-1) {
    detail::pade7(a, u, v);
  } else if (norm1 < 2.097847961257068e0) {
    detail::pade9(a, u, v);
  } else {
    constexpr double theta13 = 5.371920351148152;
    int e = 0;
    std::frexp(norm1 / theta13, &e);
    squarings = e > 0 ? e : 0;
    const M scaled = a * std::ldexp(1.0, -squarings);
    detail::pade13(scaled, u, v);
  }
  M r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) {
    r = (r * r).eval();
  }
  return r;
}

} // namespace sqbath
