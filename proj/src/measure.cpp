#include "finslab/measure.hpp"

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

}  // namespace

MeasureSpec make_lebesgue() { return MeasureSpec{}; }

MeasureSpec make_sigma_expression(int dim, const std::string& sigma_src) {
  MeasureSpec m;
  m.kind = DensityKind::ExpressionSigma;
  m.sigma = Expression::parse_xt(sigma_src, dim, /*with_t=*/false);
  return m;
}

MeasureSpec make_busemann_hausdorff() {
  MeasureSpec m;
  m.kind = DensityKind::BusemannHausdorff;
  return m;
}

double sigma_value(const MeasureSpec& meas, const MetricSpec& ms, std::span<const double> x) {
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    return measure_detail::sigma_at<double, N>(meas, ms, metric_detail::to_vecn<N>(x));
  });
}

std::vector<double> log_sigma_gradient(const MeasureSpec& meas, const MetricSpec& ms,
                                       std::span<const double> x) {
  if (meas.kind == DensityKind::Lebesgue) return std::vector<double>(x.size(), 0.0);
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    using D = Dual<double, N>;
    VecN<D, N> xx;
    for (int i = 0; i < N; ++i) xx[i] = D::seed(x[static_cast<size_t>(i)], i);
    const D phi = measure_detail::log_sigma<D, N>(meas, ms, xx);
    std::vector<double> out(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) out[static_cast<size_t>(i)] = phi.d[i];
    return out;
  });
}

}  // namespace finslab
