#ifndef FINSLAB_MEASURE_HPP
#define FINSLAB_MEASURE_HPP

#include <string>

#include "finslab/metric.hpp"

namespace finslab {

enum class DensityKind { Lebesgue, ExpressionSigma, BusemannHausdorff };

// Smooth positive reference density sigma(x); d(mu) = sigma dx^1 ^ ... ^ dx^n.
// Phi = log sigma. The Busemann-Hausdorff density is derived from the metric
// in closed form per family.
struct MeasureSpec {
  DensityKind kind = DensityKind::Lebesgue;
  Expression sigma;  // used by ExpressionSigma
};

MeasureSpec make_lebesgue();
MeasureSpec make_sigma_expression(int dim, const std::string& sigma_src);
MeasureSpec make_busemann_hausdorff();

namespace measure_detail {

template <class T, int N>
T sigma_at(const MeasureSpec& meas, const MetricSpec& ms, const VecN<T, N>& x) {
  switch (meas.kind) {
    case DensityKind::Lebesgue:
      return T(1.0);
    case DensityKind::ExpressionSigma: {
      T s = metric_detail::ev(meas.sigma, x);
      if (!(value_of(s) > 0.0)) throw DomainError("measure density must be positive");
      return s;
    }
    case DensityKind::BusemannHausdorff: {
      if (ms.family == MetricFamily::Euclidean) return T(1.0);
      const MatN<T, N> a = metric_detail::alpha_matrix<T, N>(ms, x);
      const T sd = sqrt(det<T, N>(a));
      if (ms.family == MetricFamily::Riemannian) return sd;
      // Randers: vol(unit ball) shrinks by (1 - |beta|^2)^((n+1)/2)
      const VecN<T, N> b = metric_detail::beta_form<T, N>(ms, x);
      const MatN<T, N> ainv = inverse(a);
      const T b2 = quad_form(ainv, b);
      return sd * pow(T(1.0) - b2, 0.5 * (N + 1));
    }
  }
  return T(1.0);
}

template <class T, int N>
T log_sigma(const MeasureSpec& meas, const MetricSpec& ms, const VecN<T, N>& x) {
  if (meas.kind == DensityKind::Lebesgue) return T(0.0);
  return log(sigma_at<T, N>(meas, ms, x));
}

}  // namespace measure_detail

double sigma_value(const MeasureSpec& meas, const MetricSpec& ms, std::span<const double> x);
// dPhi_i = d(log sigma)/dx_i, exact through the expression / closed form
std::vector<double> log_sigma_gradient(const MeasureSpec& meas, const MetricSpec& ms,
                                       std::span<const double> x);

}  // namespace finslab

#endif
