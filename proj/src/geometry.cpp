#include "finslab/geometry.hpp"

#include <cmath>
#include <limits>

namespace finslab {

namespace {

template <class Fn>
auto dispatch_dim(int dim, Fn&& fn) {
  switch (dim) {
    case 1:
      return fn(std::integral_constant<int, 1>{});
    case 2:
      return fn(std::integral_constant<int, 2>{});
    case 3:
      return fn(std::integral_constant<int, 3>{});
    default:
      throw DomainError("unsupported dimension " + std::to_string(dim));
  }
}

constexpr double kTolS = 1e-9;  // "S = 0" branch tolerance in Defs of Ric^N

// Curvature tensors at (x,y), double level. Gamma derivatives come from one
// dual evaluation of the whole connection pipeline seeded in x and y.
template <int N>
struct CurvatureData {
  Ten3<double, N> gamma;
  MatN<double, N> nij;
  Ten4<double, N> R, P;
  Ten3<double, N> lans;  // lowered Landsberg
};

template <int N>
CurvatureData<N> curvature_impl(const MetricSpec& ms, const VecN<double, N>& x,
                                const VecN<double, N>& y) {
  using D = Dual<double, 2 * N>;
  CurvatureData<N> out;
  out.gamma = geometry_detail::chern_gamma<double, N>(ms, x, y);
  out.nij = geometry_detail::nonlinear_connection<double, N>(ms, x, y);

  VecN<D, N> xx, yy;
  for (int i = 0; i < N; ++i) {
    xx[i] = D::seed(x[i], i);
    yy[i] = D::seed(y[i], N + i);
  }
  const Ten3<D, N> gd = geometry_detail::chern_gamma<D, N>(ms, xx, yy);

  // delta Gamma^i_jk / delta x^l = dGamma/dx^l - N^m_l dGamma/dy^m
  Ten4<double, N> dgam;  // (i,j,k,l) horizontal derivative in l
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          double s = gd(i, j, k).d[l];
          for (int m = 0; m < N; ++m) s -= out.nij(m, l) * gd(i, j, k).d[N + m];
          dgam(i, j, k, l) = s;
        }

  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          double s = dgam(i, j, l, k) - dgam(i, j, k, l);
          for (int m = 0; m < N; ++m)
            s += out.gamma(i, k, m) * out.gamma(m, j, l) -
                 out.gamma(i, l, m) * out.gamma(m, j, k);
          out.R(i, j, k, l) = s;
          out.P(i, j, k, l) = -gd(i, j, k).d[N + l];
        }

  // Landsberg as the horizontal derivative of the Cartan tensor along the
  // spray: L_ijk = C_ijk|m y^m. (The y-contraction of P against the last
  // index vanishes identically by Euler's relation, Gamma being
  // 0-homogeneous, so the equivalent covariant-derivative form is used.)
  const Ten3<double, N> C = metric_detail::cartan_impl<double, N>(ms, x, y);
  const Ten3<D, N> Cd = metric_detail::cartan_impl<D, N>(ms, xx, yy);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        double s = 0.0;
        for (int m = 0; m < N; ++m) {
          double dC = Cd(i, j, k).d[m];  // dC/dx^m
          for (int p = 0; p < N; ++p) dC -= out.nij(p, m) * Cd(i, j, k).d[N + p];
          s += y[m] * dC;
        }
        for (int p = 0; p < N; ++p)
          s -= out.nij(p, i) * C(p, j, k) + out.nij(p, j) * C(i, p, k) +
               out.nij(p, k) * C(i, j, p);
        out.lans(i, j, k) = s;
      }
  return out;
}

// R_y(v)^i = R^i_jkl y^j v^k y^l (flag operator; sphere chart fixes the sign)
template <int N>
VecN<double, N> flag_operator(const Ten4<double, N>& R, const VecN<double, N>& y,
                              const VecN<double, N>& v) {
  VecN<double, N> r{};
  for (int i = 0; i < N; ++i) {
    double s = 0.0;
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) s += R(i, j, k, l) * y[j] * v[k] * y[l];
    r[i] = s;
  }
  return r;
}

template <int N>
double ricci_impl(const MetricSpec& ms, const VecN<double, N>& x, const VecN<double, N>& y) {
  const auto cur = curvature_impl<N>(ms, x, y);
  const MatN<double, N> g = metric_detail::fundamental<double, N>(ms, x, y);
  const auto frame = orthonormal_frame_from<N>(g, y);
  double ric = 0.0;
  for (int a = 1; a < N; ++a) {
    const VecN<double, N> rv = flag_operator<N>(cur.R, y, frame[a]);
    double s = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) s += g(i, j) * rv[i] * frame[a][j];
    ric += s;
  }
  return ric;
}

// second derivative of tau along the geodesic through (x,y): central FD with
// Richardson extrapolation at steps h and 2h
template <int N>
double sdot_impl(const MetricSpec& ms, const MeasureSpec& meas, const VecN<double, N>& x,
                 const VecN<double, N>& y) {
  const double h = 1e-3;
  auto S_at = [&](double s) {
    VecN<double, N> xx = x, yy = y;
    const int steps = s < 0 ? -static_cast<int>(std::lround(s / -h)) : static_cast<int>(std::lround(s / h));
    const int nab = std::abs(steps);
    const double hh = s / std::max(1, nab);
    for (int k = 0; k < nab; ++k) geometry_detail::geodesic_rk4_step<N>(ms, xx, yy, hh);
    return geometry_detail::s_curvature_value<N>(ms, meas, xx, yy);
  };
  const double d1 = (S_at(h) - S_at(-h)) / (2.0 * h);
  const double d2 = (S_at(2.0 * h) - S_at(-2.0 * h)) / (4.0 * h);
  return (4.0 * d1 - d2) / 3.0;
}

template <int N>
double mixed_wricci_impl(const MetricSpec& ms, const MeasureSpec& meas, double Nval,
                         const VecN<double, N>& x, const VecN<double, N>& V,
                         const VecN<double, N>& W) {
  if (Nval < N - 1e-12)
    throw DomainError("weighted Ricci: effective dimension N must be >= manifold dimension");

  const auto cur = curvature_impl<N>(ms, x, V);
  const MatN<double, N> gw = metric_detail::fundamental<double, N>(ms, x, W);
  const auto frame = orthonormal_frame<N>(gw);
  double tr = 0.0;
  for (int a = 0; a < N; ++a) {
    const VecN<double, N> rv = flag_operator<N>(cur.R, V, frame[a]);
    double s = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) s += gw(i, j) * rv[i] * frame[a][j];
    tr += s;
  }

  const double S = geometry_detail::s_curvature_value<N>(ms, meas, x, V);
  const double Sdot = sdot_impl<N>(ms, meas, x, V);

  if (std::isinf(Nval)) return tr + Sdot;
  if (std::abs(Nval - N) < 1e-12) {
    if (std::abs(S) > kTolS) return -std::numeric_limits<double>::infinity();
    return tr + Sdot;
  }
  return tr + Sdot - S * S / (Nval - N);
}

}  // namespace

VectorField VectorField::parse(int dim, const std::vector<std::string>& comp_srcs) {
  if (static_cast<int>(comp_srcs.size()) != dim)
    throw ParameterError("vector field needs one component expression per dimension");
  VectorField f;
  for (const auto& s : comp_srcs) f.comps.push_back(Expression::parse_xt(s, dim, false));
  return f;
}

VectorField VectorField::constant(const std::vector<double>& v) {
  std::vector<std::string> srcs;
  for (double c : v) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", c);
    srcs.push_back(buf);
  }
  return parse(static_cast<int>(v.size()), srcs);
}

std::vector<double> VectorField::at(std::span<const double> x) const {
  std::vector<double> out(comps.size());
  std::vector<double> xv(x.begin(), x.end());
  for (size_t i = 0; i < comps.size(); ++i) out[i] = comps[i](xv);
  return out;
}

ConnectionCoeffs spray_connection(const MetricSpec& ms, std::span<const double> x,
                                  std::span<const double> y) {
  require_nonzero_tangent(y);
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    const auto xv = metric_detail::to_vecn<N>(x);
    const auto yv = metric_detail::to_vecn<N>(y);
    ConnectionCoeffs out;
    out.dim = N;
    const auto G = geometry_detail::spray<double, N>(ms, xv, yv);
    const auto nij = geometry_detail::nonlinear_connection<double, N>(ms, xv, yv);
    const auto gamma = geometry_detail::chern_gamma<double, N>(ms, xv, yv);
    out.G.assign(G.begin(), G.end());
    out.Nij.assign(nij.a.begin(), nij.a.end());
    out.Gamma.assign(gamma.a.begin(), gamma.a.end());
    return out;
  });
}

ChernCurvature chern_curvature(const MetricSpec& ms, std::span<const double> x,
                               std::span<const double> y) {
  require_nonzero_tangent(y);
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    const auto cur =
        curvature_impl<N>(ms, metric_detail::to_vecn<N>(x), metric_detail::to_vecn<N>(y));
    ChernCurvature out;
    out.dim = N;
    out.R.assign(cur.R.a.begin(), cur.R.a.end());
    out.P.assign(cur.P.a.begin(), cur.P.a.end());
    out.Lans.assign(cur.lans.a.begin(), cur.lans.a.end());
    return out;
  });
}

double flag_curvature(const MetricSpec& ms, std::span<const double> x, std::span<const double> y,
                      std::span<const double> v) {
  require_nonzero_tangent(y);
  require_nonzero_tangent(v);
  return dispatch_dim(ms.dim, [&](auto nc) -> double {
    constexpr int N = nc();
    const auto xv = metric_detail::to_vecn<N>(x);
    const auto yv = metric_detail::to_vecn<N>(y);
    const auto vv = metric_detail::to_vecn<N>(v);
    const MatN<double, N> g = metric_detail::fundamental<double, N>(ms, xv, yv);
    const double F2 = quad_form(g, yv);
    const double gvv = quad_form(g, vv);
    double gyv = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) gyv += g(i, j) * yv[i] * vv[j];
    const double den = F2 * gvv - gyv * gyv;
    if (den <= 1e-12 * F2 * gvv)
      throw DomainError("flag curvature: v is (nearly) parallel to y, degenerate flag");
    const auto cur = curvature_impl<N>(ms, xv, yv);
    const VecN<double, N> rv = flag_operator<N>(cur.R, yv, vv);
    double num = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) num += g(i, j) * rv[i] * vv[j];
    return num / den;
  });
}

double ricci_curvature(const MetricSpec& ms, std::span<const double> x,
                       std::span<const double> y) {
  require_nonzero_tangent(y);
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    return ricci_impl<N>(ms, metric_detail::to_vecn<N>(x), metric_detail::to_vecn<N>(y));
  });
}

SCurvatureSample distortion_s_curvature(const MetricSpec& ms, const MeasureSpec& meas,
                                        std::span<const double> x, std::span<const double> y) {
  require_nonzero_tangent(y);
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    const auto xv = metric_detail::to_vecn<N>(x);
    const auto yv = metric_detail::to_vecn<N>(y);
    SCurvatureSample out;
    out.tau = geometry_detail::distortion<double, N>(ms, meas, xv, yv);
    out.S = geometry_detail::s_curvature_value<N>(ms, meas, xv, yv);
    out.Sdot = sdot_impl<N>(ms, meas, xv, yv);
    return out;
  });
}

double weighted_ricci(const MetricSpec& ms, const MeasureSpec& meas, double Nval,
                      std::span<const double> x, std::span<const double> y) {
  return mixed_weighted_ricci(ms, meas, Nval, x, y, y);
}

double mixed_weighted_ricci(const MetricSpec& ms, const MeasureSpec& meas, double Nval,
                            std::span<const double> x, std::span<const double> V,
                            std::span<const double> W) {
  require_nonzero_tangent(V);
  require_nonzero_tangent(W);
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    return mixed_wricci_impl<N>(ms, meas, Nval, metric_detail::to_vecn<N>(x),
                                metric_detail::to_vecn<N>(V), metric_detail::to_vecn<N>(W));
  });
}

std::vector<double> div_cartan(const MetricSpec& ms, std::span<const double> x,
                               std::span<const double> V) {
  require_nonzero_tangent(V);
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    const auto xv = metric_detail::to_vecn<N>(x);
    const auto yv = metric_detail::to_vecn<N>(V);

    auto mixed_cartan = [&ms]<class T>(const VecN<T, N>& xx, const VecN<T, N>& yy) {
      const Ten3<T, N> C = metric_detail::cartan_impl<T, N>(ms, xx, yy);
      const MatN<T, N> g = metric_detail::fundamental<T, N>(ms, xx, yy);
      const MatN<T, N> gi = inverse(g);
      Ten3<T, N> cm;  // C^{ij}_k
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          for (int k = 0; k < N; ++k) {
            T s{};
            for (int a = 0; a < N; ++a)
              for (int b = 0; b < N; ++b) s += gi(i, a) * gi(j, b) * C(a, b, k);
            cm(i, j, k) = s;
          }
      return cm;
    };

    const Ten3<double, N> cm = mixed_cartan(xv, yv);
    using D = Dual<double, 2 * N>;
    VecN<D, N> xx, yy;
    for (int i = 0; i < N; ++i) {
      xx[i] = D::seed(xv[i], i);
      yy[i] = D::seed(yv[i], N + i);
    }
    const Ten3<D, N> cmd = mixed_cartan(xx, yy);
    const auto nij = geometry_detail::nonlinear_connection<double, N>(ms, xv, yv);
    const auto gamma = geometry_detail::chern_gamma<double, N>(ms, xv, yv);

    std::vector<double> out(static_cast<size_t>(N), 0.0);
    for (int j = 0; j < N; ++j) {
      double acc = 0.0;
      for (int l = 0; l < N; ++l)
        for (int k = 0; k < N; ++k) {
          // C^{lj}_{k|l} V^k, built from the horizontal derivative
          double d = cmd(l, j, k).d[l];
          for (int m = 0; m < N; ++m) d -= nij(m, l) * cmd(l, j, k).d[N + m];
          for (int s = 0; s < N; ++s)
            d += gamma(l, l, s) * cm(s, j, k) + gamma(j, l, s) * cm(l, s, k) -
                 gamma(s, l, k) * cm(l, j, s);
          acc += d * yv[k];
        }
      out[static_cast<size_t>(j)] = acc;
    }
    return out;
  });
}

std::vector<double> t_difference(const MetricSpec& ms, const MeasureSpec& meas,
                                 std::span<const double> x, const VectorField& V,
                                 const VectorField& W) {
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    using D = Dual<double, N>;
    VecN<D, N> xx;
    for (int i = 0; i < N; ++i) xx[i] = D::seed(x[static_cast<size_t>(i)], i);
    const VecN<D, N> Vx = V.eval(xx);
    const VecN<D, N> Wx = W.eval(xx);
    if (std::abs(value_of(metric_detail::F<D, N>(ms, xx, Vx))) < 1e-14 ||
        std::abs(value_of(metric_detail::F<D, N>(ms, xx, Wx))) < 1e-14)
      throw DomainError("t_difference: reference field vanishes at x");
    const D tv = geometry_detail::distortion<D, N>(ms, meas, xx, Vx);
    const D tw = geometry_detail::distortion<D, N>(ms, meas, xx, Wx);
    std::vector<double> out(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) out[static_cast<size_t>(i)] = tv.d[i] - tw.d[i];
    return out;
  });
}

CurvatureScan scan_curvature(const MetricSpec& ms, const MeasureSpec& meas, double Nval,
                             const RegionBox& box, int npts_axis, int ndirs) {
  CurvatureScan scan;
  scan.inf_ratio = std::numeric_limits<double>::infinity();
  const int n = ms.dim;
  const auto dirs = direction_set(n, ndirs);

  // lattice over the box
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(static_cast<size_t>(n), 0);
  const int m = std::max(1, npts_axis);
  for (;;) {
    std::vector<double> x(static_cast<size_t>(n));
    for (int a = 0; a < n; ++a) {
      const double t = m == 1 ? 0.5 : static_cast<double>(idx[static_cast<size_t>(a)]) / (m - 1);
      x[static_cast<size_t>(a)] =
          box.lo[static_cast<size_t>(a)] +
          t * (box.hi[static_cast<size_t>(a)] - box.lo[static_cast<size_t>(a)]);
    }
    pts.push_back(x);
    int a = 0;
    for (; a < n; ++a) {
      if (++idx[static_cast<size_t>(a)] < m) break;
      idx[static_cast<size_t>(a)] = 0;
    }
    if (a == n) break;
  }

  auto F_or_zero = [&](std::span<const double> x, const std::vector<double>& v) {
    double norm2 = 0.0;
    for (double c : v) norm2 += c * c;
    if (norm2 == 0.0) return 0.0;
    return eval_F(ms, x, v);
  };

  for (const auto& x : pts) {
    for (size_t vi = 0; vi < dirs.size(); ++vi) {
      const auto& V = dirs[vi];
      const double FV = eval_F(ms, x, V);
      const auto divc = div_cartan(ms, x, V);
      for (size_t wi = 0; wi < dirs.size(); ++wi) {
        const auto& W = dirs[wi];
        const double mric = mixed_weighted_ricci(ms, meas, Nval, x, V, W);
        CurvatureScanRow row;
        row.x = x;
        row.V = V;
        row.W = W;
        row.mric = mric;
        row.ratio = mric / (FV * FV);
        scan.inf_ratio = std::min(scan.inf_ratio, row.ratio);
        const auto T = t_difference(ms, meas, x, VectorField::constant(V),
                                    VectorField::constant(W));
        const double k0 = F_or_zero(x, divc) + dual_norm(ms, x, T);
        scan.K0_contribution = std::max(scan.K0_contribution, k0);
        scan.rows.push_back(std::move(row));
        ++scan.samples;
      }
    }
  }
  scan.K2R_estimate = std::max(0.0, -scan.inf_ratio);
  return scan;
}

}  // namespace finslab
