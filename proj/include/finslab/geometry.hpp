#ifndef FINSLAB_GEOMETRY_HPP
#define FINSLAB_GEOMETRY_HPP

#include <string>
#include <vector>

#include "finslab/measure.hpp"
#include "finslab/metric.hpp"

namespace finslab {

// A smooth tangent vector field given by component expressions in x.
struct VectorField {
  std::vector<Expression> comps;

  static VectorField parse(int dim, const std::vector<std::string>& comp_srcs);
  static VectorField constant(const std::vector<double>& v);

  template <class T, int N>
  VecN<T, N> eval(const VecN<T, N>& x) const {
    VecN<T, N> r{};
    for (int i = 0; i < N; ++i) r[i] = metric_detail::ev(comps[static_cast<size_t>(i)], x);
    return r;
  }
  std::vector<double> at(std::span<const double> x) const;
};

struct ConnectionCoeffs {
  int dim = 0;
  std::vector<double> G;      // spray, n entries
  std::vector<double> Nij;    // nonlinear connection N^i_j, n*n (i*n+j)
  std::vector<double> Gamma;  // Chern coefficients, n^3 ((i*n+j)*n+k)
};

struct ChernCurvature {
  int dim = 0;
  std::vector<double> R;     // R^i_jkl, n^4 (((i*n+j)*n+k)*n+l)
  std::vector<double> P;     // P^i_jkl = -dGamma^i_jk/dy^l
  std::vector<double> Lans;  // Landsberg L_ijk (lowered), n^3
};

struct SCurvatureSample {
  double tau = 0.0;   // distortion
  double S = 0.0;     // derivative of tau along the geodesic
  double Sdot = 0.0;  // second derivative along the geodesic
};

ConnectionCoeffs spray_connection(const MetricSpec& ms, std::span<const double> x,
                                  std::span<const double> y);
ChernCurvature chern_curvature(const MetricSpec& ms, std::span<const double> x,
                               std::span<const double> y);
// Flag curvature K(y,v); throws DomainError when v is parallel to y.
double flag_curvature(const MetricSpec& ms, std::span<const double> x, std::span<const double> y,
                      std::span<const double> v);
double ricci_curvature(const MetricSpec& ms, std::span<const double> x,
                       std::span<const double> y);
SCurvatureSample distortion_s_curvature(const MetricSpec& ms, const MeasureSpec& meas,
                                        std::span<const double> x, std::span<const double> y);
// Weighted Ricci Ric^N; Nval may be infinity. Returns -inf sentinel on the
// N = n, S != 0 branch.
double weighted_ricci(const MetricSpec& ms, const MeasureSpec& meas, double Nval,
                      std::span<const double> x, std::span<const double> y);
double mixed_weighted_ricci(const MetricSpec& ms, const MeasureSpec& meas, double Nval,
                            std::span<const double> x, std::span<const double> V,
                            std::span<const double> W);
// div C(V)^j = C^{ij}_{k|i}(V) V^k, the paper's non-Riemannian hypothesis term.
std::vector<double> div_cartan(const MetricSpec& ms, std::span<const double> x,
                               std::span<const double> V);
// Difference tensor T(V,W)_i = d/dx^i [tau(x,V(x))] - d/dx^i [tau(x,W(x))],
// returned as a covector (the hypothesis evaluates it under F*).
std::vector<double> t_difference(const MetricSpec& ms, const MeasureSpec& meas,
                                 std::span<const double> x, const VectorField& V,
                                 const VectorField& W);

// Hypothesis instrumentation: lattice+direction scan of the mixed weighted
// Ricci ratio and of the non-Riemannian tensor contribution.
struct CurvatureScanRow {
  std::vector<double> x;
  std::vector<double> V, W;
  double mric = 0.0;
  double ratio = 0.0;  // mric / F^2(V)
};
struct CurvatureScan {
  double inf_ratio = 0.0;      // inf of mric/F^2(V)
  double K2R_estimate = 0.0;   // max(0, -inf_ratio)
  double K0_contribution = 0.0;  // max of F(divC(V)) + F*(T(V,W)); U term excluded
  int samples = 0;
  std::vector<CurvatureScanRow> rows;
};
CurvatureScan scan_curvature(const MetricSpec& ms, const MeasureSpec& meas, double Nval,
                             const RegionBox& box, int npts_axis, int ndirs);

namespace geometry_detail {

// Spray coefficients G^i = 1/4 g^{il} ( y^k d2F2/dx^k dy^l - dF2/dx^l ).
template <class T, int N>
VecN<T, N> spray(const MetricSpec& ms, const VecN<T, N>& x, const VecN<T, N>& y) {
  using D1 = Dual<T, N>;
  using D2 = Dual<D1, N>;
  VecN<D2, N> xx, yy;
  for (int i = 0; i < N; ++i) {
    // outer layer: x partials; inner layer: y partials
    xx[i].v = D1(x[i]);
    xx[i].d[i] = D1(1.0);
    yy[i].v = D1::seed(y[i], i);
  }
  const D2 r = metric_detail::F2<D2, N>(ms, xx, yy);
  const MatN<T, N> g = metric_detail::fundamental<T, N>(ms, x, y);
  const MatN<T, N> gi = inverse(g);
  VecN<T, N> G{};
  for (int i = 0; i < N; ++i) {
    T s{};
    for (int l = 0; l < N; ++l) {
      T inner{};
      for (int k = 0; k < N; ++k) inner += y[k] * r.d[k].d[l];
      s += gi(i, l) * (inner - r.d[l].v);
    }
    G[i] = 0.25 * s;
  }
  return G;
}

// N^i_j = dG^i/dy^j
template <class T, int N>
MatN<T, N> nonlinear_connection(const MetricSpec& ms, const VecN<T, N>& x, const VecN<T, N>& y) {
  using D1 = Dual<T, N>;
  VecN<D1, N> xx, yy;
  for (int i = 0; i < N; ++i) {
    xx[i] = D1(x[i]);
    yy[i] = D1::seed(y[i], i);
  }
  const VecN<D1, N> G = spray<D1, N>(ms, xx, yy);
  MatN<T, N> nij;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) nij(i, j) = G[i].d[j];
  return nij;
}

// Chern connection coefficients from the delta-derivative characterization:
// Gamma^i_jk = 1/2 g^{is} ( dg_sj/dx^k + dg_sk/dx^j - dg_jk/dx^s ) with the
// horizontal derivative d/dx^k - N^m_k d/dy^m.
template <class T, int N>
Ten3<T, N> chern_gamma(const MetricSpec& ms, const VecN<T, N>& x, const VecN<T, N>& y) {
  using D1 = Dual<T, N>;
  // dg/dx
  VecN<D1, N> xx, yy;
  for (int i = 0; i < N; ++i) {
    xx[i] = D1::seed(x[i], i);
    yy[i] = D1(y[i]);
  }
  const MatN<D1, N> gx = metric_detail::fundamental<D1, N>(ms, xx, yy);
  // dg/dy = 2 C
  const Ten3<T, N> C = metric_detail::cartan_impl<T, N>(ms, x, y);
  const MatN<T, N> nij = nonlinear_connection<T, N>(ms, x, y);
  const MatN<T, N> g = metric_detail::fundamental<T, N>(ms, x, y);
  const MatN<T, N> gi = inverse(g);

  // delta g_ij / delta x^k
  Ten3<T, N> dg;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        T s = gx(i, j).d[k];
        for (int m = 0; m < N; ++m) s -= nij(m, k) * (2.0 * C(i, j, m));
        dg(i, j, k) = s;
      }

  Ten3<T, N> gamma;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        T s{};
        for (int c = 0; c < N; ++c) s += gi(i, c) * (dg(c, j, k) + dg(c, k, j) - dg(j, k, c));
        gamma(i, j, k) = 0.5 * s;
      }
  return gamma;
}

// distortion tau = 1/2 log det g - log sigma
template <class T, int N>
T distortion(const MetricSpec& ms, const MeasureSpec& meas, const VecN<T, N>& x,
             const VecN<T, N>& y) {
  const MatN<T, N> g = metric_detail::fundamental<T, N>(ms, x, y);
  return 0.5 * log(det<T, N>(g)) - measure_detail::log_sigma<T, N>(meas, ms, x);
}

// S = dtau/dx^i y^i - 2 G^i dtau/dy^i (chain rule through the spray)
template <int N>
double s_curvature_value(const MetricSpec& ms, const MeasureSpec& meas, const VecN<double, N>& x,
                         const VecN<double, N>& y) {
  using D = Dual<double, 2 * N>;
  VecN<D, N> xx, yy;
  for (int i = 0; i < N; ++i) {
    xx[i] = D::seed(x[i], i);
    yy[i] = D::seed(y[i], N + i);
  }
  const D tau = distortion<D, N>(ms, meas, xx, yy);
  const VecN<double, N> G = spray<double, N>(ms, x, y);
  double s = 0.0;
  for (int i = 0; i < N; ++i) s += tau.d[i] * y[i] - 2.0 * G[i] * tau.d[N + i];
  return s;
}

// one RK4 step of the geodesic flow (x' = y, y' = -2G)
template <int N>
void geodesic_rk4_step(const MetricSpec& ms, VecN<double, N>& x, VecN<double, N>& y, double h) {
  auto acc = [&](const VecN<double, N>& xx, const VecN<double, N>& yy) {
    VecN<double, N> a = spray<double, N>(ms, xx, yy);
    for (int i = 0; i < N; ++i) a[i] *= -2.0;
    return a;
  };
  VecN<double, N> k1x = y, k1y = acc(x, y);
  VecN<double, N> x2, y2;
  for (int i = 0; i < N; ++i) {
    x2[i] = x[i] + 0.5 * h * k1x[i];
    y2[i] = y[i] + 0.5 * h * k1y[i];
  }
  VecN<double, N> k2x = y2, k2y = acc(x2, y2);
  VecN<double, N> x3, y3;
  for (int i = 0; i < N; ++i) {
    x3[i] = x[i] + 0.5 * h * k2x[i];
    y3[i] = y[i] + 0.5 * h * k2y[i];
  }
  VecN<double, N> k3x = y3, k3y = acc(x3, y3);
  VecN<double, N> x4, y4;
  for (int i = 0; i < N; ++i) {
    x4[i] = x[i] + h * k3x[i];
    y4[i] = y[i] + h * k3y[i];
  }
  VecN<double, N> k4x = y4, k4y = acc(x4, y4);
  for (int i = 0; i < N; ++i) {
    x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
    y[i] += h / 6.0 * (k1y[i] + 2.0 * k2y[i] + 2.0 * k3y[i] + k4y[i]);
  }
}

}  // namespace geometry_detail

}  // namespace finslab

#endif
