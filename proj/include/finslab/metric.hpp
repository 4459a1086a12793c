#ifndef FINSLAB_METRIC_HPP
#define FINSLAB_METRIC_HPP

#include <span>
#include <string>
#include <vector>

#include "finslab/common.hpp"
#include "finslab/dual.hpp"
#include "finslab/expr.hpp"
#include "finslab/smallmat.hpp"

namespace finslab {

enum class MetricFamily { Euclidean, Riemannian, Randers };

// Parametric Finsler metric family evaluable at any (x, y). Coefficient
// fields are expressions in the chart coordinates x1..xn so that exact x- and
// y-derivatives are available through dual-number evaluation.
struct MetricSpec {
  MetricFamily family = MetricFamily::Euclidean;
  int dim = 2;
  std::vector<Expression> riem_g;       // dim*dim entries, row-major, symmetric
  std::vector<Expression> randers_alpha;  // dim*dim entries, row-major, symmetric
  std::vector<Expression> randers_beta;   // dim entries (one-form components)
};

MetricSpec make_euclidean(int dim);
MetricSpec make_riemannian(int dim, const std::vector<std::string>& g_entries);
MetricSpec make_randers(int dim, const std::vector<std::string>& alpha_entries,
                        const std::vector<std::string>& beta_entries);

// True when no coefficient expression depends on x (Minkowski space:
// geodesics are straight lines and d(p,x) = F(x-p)).
bool metric_is_flat(const MetricSpec& ms);

namespace metric_detail {

template <class T, int N>
T ev(const Expression& e, const VecN<T, N>& x) {
  return e(std::span<const T>(x.a.data(), x.a.size()));
}

template <class T, int N>
MatN<T, N> alpha_matrix(const MetricSpec& ms, const VecN<T, N>& x) {
  MatN<T, N> a;
  switch (ms.family) {
    case MetricFamily::Euclidean:
      return MatN<T, N>::identity();
    case MetricFamily::Riemannian:
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) a(i, j) = ev(ms.riem_g[static_cast<size_t>(i * N + j)], x);
      return a;
    case MetricFamily::Randers:
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          a(i, j) = ev(ms.randers_alpha[static_cast<size_t>(i * N + j)], x);
      return a;
  }
  return a;
}

template <class T, int N>
VecN<T, N> beta_form(const MetricSpec& ms, const VecN<T, N>& x) {
  VecN<T, N> b{};
  if (ms.family == MetricFamily::Randers)
    for (int i = 0; i < N; ++i) b[i] = ev(ms.randers_beta[static_cast<size_t>(i)], x);
  return b;
}

// Strong convexity check for Randers data: ||beta||_alpha < 1.
template <class T, int N>
void check_randers(const MatN<T, N>& a, const VecN<T, N>& b) {
  const MatN<T, N> ainv = inverse(a);
  double b2 = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) b2 += value_of(ainv(i, j)) * value_of(b[i]) * value_of(b[j]);
  if (!(b2 < 1.0))
    throw InvalidMetricError("randers one-form has alpha-norm^2 = " + std::to_string(b2) +
                             " >= 1 (strong convexity violated)");
}

template <class T, int N>
T F(const MetricSpec& ms, const VecN<T, N>& x, const VecN<T, N>& y) {
  const MatN<T, N> a = alpha_matrix<T, N>(ms, x);
  const T q = quad_form(a, y);
  if (ms.family != MetricFamily::Randers) return sqrt(q);
  const VecN<T, N> b = beta_form<T, N>(ms, x);
  check_randers(a, b);
  return sqrt(q) + dot(b, y);
}

template <class T, int N>
T F2(const MetricSpec& ms, const VecN<T, N>& x, const VecN<T, N>& y) {
  const T f = F<T, N>(ms, x, y);
  return f * f;
}

// Closed-form co-norm. For Randers the dual of F = |y|_a + b(y) is
// ( sqrt((1-|b|^2)|xi|^2 + <b,xi>^2) - <b,xi> ) / (1-|b|^2), with |.| and <.,.>
// taken in the inverse alpha metric.
template <class T, int N>
T dual_norm_impl(const MetricSpec& ms, const VecN<T, N>& x, const VecN<T, N>& xi) {
  const MatN<T, N> a = alpha_matrix<T, N>(ms, x);
  const MatN<T, N> ainv = inverse(a);
  const T xi2 = quad_form(ainv, xi);
  if (ms.family != MetricFamily::Randers) return sqrt(xi2);
  const VecN<T, N> b = beta_form<T, N>(ms, x);
  check_randers(a, b);
  const T b2 = quad_form(ainv, b);
  T bxi{};
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) bxi += ainv(i, j) * b[i] * xi[j];
  const T one_m = T(1.0) - b2;
  return (sqrt(one_m * xi2 + bxi * bxi) - bxi) / one_m;
}

// g_ij(x,y) = 1/2 d^2F^2/dy_i dy_j by nested forward-mode differentiation.
template <class T, int N>
MatN<T, N> fundamental(const MetricSpec& ms, const VecN<T, N>& x, const VecN<T, N>& y) {
  using D1 = Dual<T, N>;
  using D2 = Dual<D1, N>;
  VecN<D2, N> xx, yy;
  for (int i = 0; i < N; ++i) {
    xx[i] = D2(D1(x[i]));
    yy[i].v = D1::seed(y[i], i);
    yy[i].d[i] = D1(1.0);
  }
  const D2 r = F2<D2, N>(ms, xx, yy);
  MatN<T, N> g;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) g(i, j) = 0.5 * r.d[i].d[j];
  return g;
}

// C_ijk = 1/4 d^3F^2/dy_i dy_j dy_k, fully symmetric.
template <class T, int N>
Ten3<T, N> cartan_impl(const MetricSpec& ms, const VecN<T, N>& x, const VecN<T, N>& y) {
  using D1 = Dual<T, N>;
  using D2 = Dual<D1, N>;
  using D3 = Dual<D2, N>;
  VecN<D3, N> xx, yy;
  for (int i = 0; i < N; ++i) {
    xx[i] = D3(D2(D1(x[i])));
    yy[i].v.v = D1::seed(y[i], i);
    yy[i].v.d[i] = D1(1.0);
    yy[i].d[i] = D2(D1(1.0));
  }
  const D3 r = F2<D3, N>(ms, xx, yy);
  Ten3<T, N> c;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) c(i, j, k) = 0.25 * r.d[i].d[j].d[k];
  return c;
}

// Legendre covector l(y)_i = g_ij y^j = 1/2 dF^2/dy_i (Euler).
template <class T, int N>
VecN<T, N> legendre_impl(const MetricSpec& ms, const VecN<T, N>& x, const VecN<T, N>& y) {
  using D1 = Dual<T, N>;
  VecN<D1, N> xx, yy;
  for (int i = 0; i < N; ++i) {
    xx[i] = D1(x[i]);
    yy[i] = D1::seed(y[i], i);
  }
  const D1 r = F2<D1, N>(ms, xx, yy);
  VecN<T, N> l{};
  for (int i = 0; i < N; ++i) l[i] = 0.5 * r.d[i];
  return l;
}

template <int N>
bool is_zero_vec(const VecN<double, N>& y) {
  for (int i = 0; i < N; ++i)
    if (y[i] != 0.0) return false;
  return true;
}

// Damped Newton inversion of the Legendre map on one fiber.
template <int N>
VecN<double, N> legendre_inv_impl(const MetricSpec& ms, const VecN<double, N>& x,
                                  const VecN<double, N>& xi) {
  VecN<double, N> y{};
  if (is_zero_vec<N>(xi)) return y;  // l(0) = 0 by convention

  if (ms.family != MetricFamily::Randers) {
    // quadratic F^2: the map is linear, y = g(x)^{-1} xi
    const MatN<double, N> g = alpha_matrix<double, N>(ms, x);
    return solve(g, xi);
  }

  // initial guess: xi read as a vector, rescaled to length F*(xi)
  const double fstar = dual_norm_impl<double, N>(ms, x, xi);
  const double fxi = F<double, N>(ms, x, xi);
  for (int i = 0; i < N; ++i) y[i] = xi[i] * (fstar / fxi);

  auto resid_norm = [&](const VecN<double, N>& yy) {
    const VecN<double, N> l = legendre_impl<double, N>(ms, x, yy);
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += (l[i] - xi[i]) * (l[i] - xi[i]);
    return std::sqrt(s);
  };

  double res = resid_norm(y);
  constexpr int kMaxIter = 50;
  constexpr double kTol = 1e-10;
  for (int it = 0; it < kMaxIter && res > kTol; ++it) {
    const MatN<double, N> g = fundamental<double, N>(ms, x, y);
    const VecN<double, N> l = legendre_impl<double, N>(ms, x, y);
    VecN<double, N> rhs{};
    for (int i = 0; i < N; ++i) rhs[i] = xi[i] - l[i];
    const VecN<double, N> step = solve(g, rhs);
    double damp = 1.0;
    for (int k = 0; k < 30; ++k) {
      VecN<double, N> cand = y;
      for (int i = 0; i < N; ++i) cand[i] += damp * step[i];
      if (!is_zero_vec<N>(cand)) {
        const double r2 = resid_norm(cand);
        if (r2 < res) {
          y = cand;
          res = r2;
          break;
        }
      }
      damp *= 0.5;
      if (k == 29)
        throw NumericError("legendre_inv: damping stalled, residual " + std::to_string(res));
    }
  }
  if (res > kTol)
    throw NumericError("legendre_inv: no convergence after 50 iterations, residual " +
                       std::to_string(res));
  return y;
}

template <int N>
VecN<double, N> to_vecn(std::span<const double> v) {
  VecN<double, N> r{};
  for (int i = 0; i < N; ++i) r[i] = v[static_cast<size_t>(i)];
  return r;
}

}  // namespace metric_detail

// --- runtime-dimension surface ------------------------------------------

double eval_F(const MetricSpec& ms, std::span<const double> x, std::span<const double> y);
// returns row-major n*n matrix; throws InvalidMetricError (with the offending
// eigenvalue) if the result is not positive definite
std::vector<double> fundamental_tensor(const MetricSpec& ms, std::span<const double> x,
                                       std::span<const double> y);
std::vector<double> cartan_tensor(const MetricSpec& ms, std::span<const double> x,
                                  std::span<const double> y);  // n^3, (i*n+j)*n+k
double dual_norm(const MetricSpec& ms, std::span<const double> x, std::span<const double> xi);
std::vector<double> legendre(const MetricSpec& ms, std::span<const double> x,
                             std::span<const double> y);
std::vector<double> legendre_inv(const MetricSpec& ms, std::span<const double> x,
                                 std::span<const double> xi);

struct RegionBox {
  std::vector<double> lo, hi;
};

// Sampled lower estimate of sup g_V(Z,Z)/g_U(Z,Z) over the box; monotone
// nondecreasing in n_dirs. Exactly 1 for quadratic families.
double misalignment(const MetricSpec& ms, const RegionBox& region, int npts_per_axis,
                    int n_dirs);

// Deterministic unit-direction sets: golden-angle in 2-D, Fibonacci sphere in
// 3-D, {+1,-1} in 1-D.
std::vector<std::vector<double>> direction_set(int dim, int count);

void require_nonzero_tangent(std::span<const double> y);
void validate_metric_spec(const MetricSpec& ms);

}  // namespace finslab

#endif
