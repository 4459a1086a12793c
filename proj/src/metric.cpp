#include "finslab/metric.hpp"

#include <algorithm>
#include <cmath>

namespace finslab {

namespace {

std::vector<std::string> coord_names(int dim) {
  std::vector<std::string> names;
  for (int i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

// dispatch helper: every templated call site goes through one of these
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
      throw DomainError("unsupported dimension " + std::to_string(dim) +
                        " (supported: 1, 2, 3)");
  }
}

}  // namespace

MetricSpec make_euclidean(int dim) {
  MetricSpec ms;
  ms.family = MetricFamily::Euclidean;
  ms.dim = dim;
  validate_metric_spec(ms);
  return ms;
}

MetricSpec make_riemannian(int dim, const std::vector<std::string>& g_entries) {
  MetricSpec ms;
  ms.family = MetricFamily::Riemannian;
  ms.dim = dim;
  const auto names = coord_names(dim);
  for (const auto& s : g_entries) ms.riem_g.push_back(Expression::parse(s, names));
  validate_metric_spec(ms);
  return ms;
}

MetricSpec make_randers(int dim, const std::vector<std::string>& alpha_entries,
                        const std::vector<std::string>& beta_entries) {
  MetricSpec ms;
  ms.family = MetricFamily::Randers;
  ms.dim = dim;
  const auto names = coord_names(dim);
  for (const auto& s : alpha_entries) ms.randers_alpha.push_back(Expression::parse(s, names));
  for (const auto& s : beta_entries) ms.randers_beta.push_back(Expression::parse(s, names));
  validate_metric_spec(ms);
  return ms;
}

void validate_metric_spec(const MetricSpec& ms) {
  if (ms.dim < 1 || ms.dim > kMaxDim)
    throw DomainError("metric dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  const size_t nn = static_cast<size_t>(ms.dim) * static_cast<size_t>(ms.dim);
  if (ms.family == MetricFamily::Riemannian && ms.riem_g.size() != nn)
    throw ParameterError("riemannian metric needs dim*dim coefficient entries");
  if (ms.family == MetricFamily::Randers) {
    if (ms.randers_alpha.size() != nn)
      throw ParameterError("randers metric needs dim*dim alpha entries");
    if (ms.randers_beta.size() != static_cast<size_t>(ms.dim))
      throw ParameterError("randers metric needs dim beta entries");
  }
}

bool metric_is_flat(const MetricSpec& ms) {
  if (ms.family == MetricFamily::Euclidean) return true;
  auto all_const = [](const std::vector<Expression>& v) {
    return std::all_of(v.begin(), v.end(), [](const Expression& e) { return e.is_constant(); });
  };
  if (ms.family == MetricFamily::Riemannian) return all_const(ms.riem_g);
  return all_const(ms.randers_alpha) && all_const(ms.randers_beta);
}

void require_nonzero_tangent(std::span<const double> y) {
  for (double c : y)
    if (c != 0.0) return;
  throw DomainError("zero tangent vector");
}

double eval_F(const MetricSpec& ms, std::span<const double> x, std::span<const double> y) {
  require_nonzero_tangent(y);
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    return metric_detail::F<double, N>(ms, metric_detail::to_vecn<N>(x),
                                       metric_detail::to_vecn<N>(y));
  });
}

std::vector<double> fundamental_tensor(const MetricSpec& ms, std::span<const double> x,
                                       std::span<const double> y) {
  require_nonzero_tangent(y);
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    const MatN<double, N> g = metric_detail::fundamental<double, N>(
        ms, metric_detail::to_vecn<N>(x), metric_detail::to_vecn<N>(y));
    const double lmin = min_eigenvalue_sym<N>(g);
    if (!(lmin > 0.0))
      throw InvalidMetricError("fundamental tensor not positive definite (min eigenvalue " +
                               std::to_string(lmin) + ")");
    return std::vector<double>(g.a.begin(), g.a.end());
  });
}

std::vector<double> cartan_tensor(const MetricSpec& ms, std::span<const double> x,
                                  std::span<const double> y) {
  require_nonzero_tangent(y);
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    const Ten3<double, N> c = metric_detail::cartan_impl<double, N>(
        ms, metric_detail::to_vecn<N>(x), metric_detail::to_vecn<N>(y));
    return std::vector<double>(c.a.begin(), c.a.end());
  });
}

double dual_norm(const MetricSpec& ms, std::span<const double> x, std::span<const double> xi) {
  bool zero = true;
  for (double c : xi)
    if (c != 0.0) zero = false;
  if (zero) return 0.0;
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    return metric_detail::dual_norm_impl<double, N>(ms, metric_detail::to_vecn<N>(x),
                                                    metric_detail::to_vecn<N>(xi));
  });
}

std::vector<double> legendre(const MetricSpec& ms, std::span<const double> x,
                             std::span<const double> y) {
  require_nonzero_tangent(y);
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    const VecN<double, N> l = metric_detail::legendre_impl<double, N>(
        ms, metric_detail::to_vecn<N>(x), metric_detail::to_vecn<N>(y));
    return std::vector<double>(l.begin(), l.end());
  });
}

std::vector<double> legendre_inv(const MetricSpec& ms, std::span<const double> x,
                                 std::span<const double> xi) {
  return dispatch_dim(ms.dim, [&](auto nc) {
    constexpr int N = nc();
    const VecN<double, N> y = metric_detail::legendre_inv_impl<N>(
        ms, metric_detail::to_vecn<N>(x), metric_detail::to_vecn<N>(xi));
    return std::vector<double>(y.begin(), y.end());
  });
}

std::vector<std::vector<double>> direction_set(int dim, int count) {
  std::vector<std::vector<double>> dirs;
  if (dim == 1) {
    dirs.push_back({1.0});
    dirs.push_back({-1.0});
    return dirs;
  }
  if (dim == 2) {
    const double golden = 2.39996322972865332;  // golden angle
    for (int k = 0; k < count; ++k) {
      const double th = golden * k;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
  }
  if (dim == 3) {
    // Fibonacci sphere
    const double ga = 2.39996322972865332;
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = ga * k;
      dirs.push_back({r * std::cos(th), r * std::sin(th), z});
    }
    return dirs;
  }
  throw DomainError("direction_set: unsupported dimension");
}

double misalignment(const MetricSpec& ms, const RegionBox& region, int npts_per_axis,
                    int n_dirs) {
  if (n_dirs < 2) throw DomainError("misalignment: n_dirs must be >= 2");
  if (ms.family != MetricFamily::Randers) return 1.0;  // g_V independent of V

  return dispatch_dim(ms.dim, [&](auto nc) -> double {
    constexpr int N = nc();
    const auto dirs = direction_set(N, n_dirs);
    // sample points on a regular lattice in the box
    std::vector<VecN<double, N>> pts;
    VecN<int, N> idx{};
    const int m = std::max(1, npts_per_axis);
    for (;;) {
      VecN<double, N> x{};
      for (int a = 0; a < N; ++a) {
        const double t = m == 1 ? 0.5 : static_cast<double>(idx[a]) / (m - 1);
        x[a] = region.lo[a] + t * (region.hi[a] - region.lo[a]);
      }
      pts.push_back(x);
      int a = 0;
      for (; a < N; ++a) {
        if (++idx[a] < m) break;
        idx[a] = 0;
      }
      if (a == N) break;
    }

    double best = 1.0;
    std::vector<MatN<double, N>> gv(dirs.size());
    for (const auto& x : pts) {
      for (size_t v = 0; v < dirs.size(); ++v)
        gv[v] = metric_detail::fundamental<double, N>(ms, x, metric_detail::to_vecn<N>(dirs[v]));
      for (const auto& zdir : dirs) {
        const VecN<double, N> z = metric_detail::to_vecn<N>(zdir);
        double qmax = 0.0, qmin = 0.0;
        bool first = true;
        for (size_t v = 0; v < dirs.size(); ++v) {
          const double q = quad_form(gv[v], z);
          if (first) {
            qmax = qmin = q;
            first = false;
          } else {
            qmax = std::max(qmax, q);
            qmin = std::min(qmin, q);
          }
        }
        if (qmin > 0.0) best = std::max(best, qmax / qmin);
      }
    }
    return best;
  });
}

}  // namespace finslab
