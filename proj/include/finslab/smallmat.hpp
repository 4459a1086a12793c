#ifndef FINSLAB_SMALLMAT_HPP
#define FINSLAB_SMALLMAT_HPP

#include <array>
#include <cmath>

#include "finslab/common.hpp"
#include "finslab/dual.hpp"

namespace finslab {

template <class T, int N>
struct VecN {
  std::array<T, static_cast<size_t>(N)> a{};
  T& operator[](int i) { return a[static_cast<size_t>(i)]; }
  const T& operator[](int i) const { return a[static_cast<size_t>(i)]; }
  auto begin() { return a.begin(); }
  auto end() { return a.end(); }
  auto begin() const { return a.begin(); }
  auto end() const { return a.end(); }
};

template <class T, int N>
struct MatN {
  std::array<T, N * N> a{};
  T& operator()(int i, int j) { return a[i * N + j]; }
  const T& operator()(int i, int j) const { return a[i * N + j]; }
  static MatN identity() {
    MatN m;
    for (int i = 0; i < N; ++i) m(i, i) = T(1.0);
    return m;
  }
};

template <class T, int N>
struct Ten3 {  // rank-3, used for Cartan tensor and connection coefficients
  std::array<T, N * N * N> a{};
  T& operator()(int i, int j, int k) { return a[(i * N + j) * N + k]; }
  const T& operator()(int i, int j, int k) const { return a[(i * N + j) * N + k]; }
};

template <class T, int N>
struct Ten4 {  // rank-4, used for the Chern curvatures R and P
  std::array<T, N * N * N * N> a{};
  T& operator()(int i, int j, int k, int l) { return a[((i * N + j) * N + k) * N + l]; }
  const T& operator()(int i, int j, int k, int l) const {
    return a[((i * N + j) * N + k) * N + l];
  }
};

template <class T, int N>
T dot(const VecN<T, N>& a, const VecN<T, N>& b) {
  T s{};
  for (int i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <class T, int N>
VecN<T, N> matvec(const MatN<T, N>& m, const VecN<T, N>& x) {
  VecN<T, N> r{};
  for (int i = 0; i < N; ++i) {
    T s{};
    for (int j = 0; j < N; ++j) s += m(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

template <class T, int N>
T quad_form(const MatN<T, N>& m, const VecN<T, N>& x) {
  T s{};
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) s += m(i, j) * x[i] * x[j];
  return s;
}

template <class T, int N>
T det(const MatN<T, N>& m) {
  if constexpr (N == 1) {
    return m(0, 0);
  } else if constexpr (N == 2) {
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  } else {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }
}

// Adjugate-based inverse: branch-free, so it stays exact under nested duals.
template <class T, int N>
MatN<T, N> inverse(const MatN<T, N>& m) {
  const T dd = det<T, N>(m);
  MatN<T, N> r;
  if constexpr (N == 1) {
    r(0, 0) = T(1.0) / dd;
  } else if constexpr (N == 2) {
    const T inv = T(1.0) / dd;
    r(0, 0) = m(1, 1) * inv;
    r(1, 1) = m(0, 0) * inv;
    r(0, 1) = -m(0, 1) * inv;
    r(1, 0) = -m(1, 0) * inv;
  } else {
    const T inv = T(1.0) / dd;
    r(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) * inv;
    r(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) * inv;
    r(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) * inv;
    r(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) * inv;
    r(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) * inv;
    r(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) * inv;
    r(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) * inv;
    r(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) * inv;
    r(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) * inv;
  }
  return r;
}

template <class T, int N>
VecN<T, N> solve(const MatN<T, N>& m, const VecN<T, N>& rhs) {
  return matvec(inverse(m), rhs);
}

// Smallest eigenvalue of a symmetric matrix (double only, N <= 3).
template <int N>
double min_eigenvalue_sym(const MatN<double, N>& m) {
  if constexpr (N == 1) {
    return m(0, 0);
  } else if constexpr (N == 2) {
    const double tr = m(0, 0) + m(1, 1);
    const double dd = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - dd));
    return tr / 2.0 - disc;
  } else {
    // trigonometric closed form for 3x3 symmetric eigenvalues
    const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
    const double q = (m(0, 0) + m(1, 1) + m(2, 2)) / 3.0;
    if (p1 == 0.0) return std::min({m(0, 0), m(1, 1), m(2, 2)});
    const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) +
                      (m(2, 2) - q) * (m(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    MatN<double, 3> b;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b(i, j) = (m(i, j) - (i == j ? q : 0.0)) / p;
    double r = det<double, 3>(b) / 2.0;
    r = std::min(1.0, std::max(-1.0, r));
    const double phi = std::acos(r) / 3.0;
    // smallest root
    return q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  }
}

// Gram-Schmidt orthonormalization of the canonical basis under the inner
// product given by a symmetric PD matrix g. Rows of the result are the frame.
template <int N>
std::array<VecN<double, N>, N> orthonormal_frame(const MatN<double, N>& g) {
  std::array<VecN<double, N>, N> e{};
  for (int i = 0; i < N; ++i) {
    VecN<double, N> v{};
    v[i] = 1.0;
    for (int j = 0; j < i; ++j) {
      double c = 0.0;
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) c += g(a, b) * v[a] * e[j][b];
      for (int a = 0; a < N; ++a) v[a] -= c * e[j][a];
    }
    const double nrm = std::sqrt(quad_form(g, v));
    if (!(nrm > 0.0)) throw NumericError("orthonormal_frame: degenerate metric");
    for (int a = 0; a < N; ++a) v[a] /= nrm;
    e[i] = v;
  }
  return e;
}

// As above but the first frame vector is the given direction (normalized).
template <int N>
std::array<VecN<double, N>, N> orthonormal_frame_from(const MatN<double, N>& g,
                                                      const VecN<double, N>& first) {
  std::array<VecN<double, N>, N> e{};
  VecN<double, N> v0 = first;
  const double n0 = std::sqrt(quad_form(g, v0));
  if (!(n0 > 0.0)) throw DomainError("orthonormal_frame_from: zero direction");
  for (int a = 0; a < N; ++a) v0[a] /= n0;
  e[0] = v0;
  int filled = 1;
  for (int i = 0; i < N && filled < N; ++i) {
    VecN<double, N> v{};
    v[i] = 1.0;
    for (int j = 0; j < filled; ++j) {
      double c = 0.0;
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) c += g(a, b) * v[a] * e[j][b];
      for (int a = 0; a < N; ++a) v[a] -= c * e[j][a];
    }
    const double nrm = std::sqrt(std::max(0.0, quad_form(g, v)));
    if (nrm < 1e-10) continue;  // canonical vector nearly parallel to the span
    for (int a = 0; a < N; ++a) v[a] /= nrm;
    e[filled++] = v;
  }
  if (filled != N) throw NumericError("orthonormal_frame_from: frame completion failed");
  return e;
}

}  // namespace finslab

#endif
