#ifndef FINSLAB_DUAL_HPP
#define FINSLAB_DUAL_HPP

#include <array>
#include <cmath>
#include <type_traits>

namespace finslab {

// Forward-mode dual number carrying M partial derivatives. The component
// type T may itself be a Dual, which is how higher fiber derivatives of the
// metric (fundamental tensor, Cartan tensor, connection coefficients) are
// obtained without finite differences.
template <class T, int M>
struct Dual {
  T v{};
  std::array<T, M> d{};

  Dual() = default;
  Dual(double c) : v(c) {}  // NOLINT: implicit promotion of constants
  template <class U>
    requires(std::is_same_v<U, T> && !std::is_same_v<U, double>)
  explicit Dual(const U& c) : v(c) {}

  static Dual seed(const T& value, int slot) {
    Dual r;
    r.v = value;
    r.d[slot] = T(1.0);
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < M; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < M; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < M; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
};

inline double value_of(double x) { return x; }
template <class T, int M>
double value_of(const Dual<T, M>& x) {
  return value_of(x.v);
}

template <class T, int M>
Dual<T, M> operator-(const Dual<T, M>& x) {
  Dual<T, M> r;
  r.v = -x.v;
  for (int i = 0; i < M; ++i) r.d[i] = -x.d[i];
  return r;
}

template <class T, int M>
Dual<T, M> operator+(const Dual<T, M>& a, const Dual<T, M>& b) {
  Dual<T, M> r(a);
  r += b;
  return r;
}
template <class T, int M>
Dual<T, M> operator-(const Dual<T, M>& a, const Dual<T, M>& b) {
  Dual<T, M> r(a);
  r -= b;
  return r;
}
template <class T, int M>
Dual<T, M> operator*(const Dual<T, M>& a, const Dual<T, M>& b) {
  Dual<T, M> r;
  r.v = a.v * b.v;
  for (int i = 0; i < M; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
template <class T, int M>
Dual<T, M> operator/(const Dual<T, M>& a, const Dual<T, M>& b) {
  Dual<T, M> r;
  r.v = a.v / b.v;
  const T inv2 = T(1.0) / (b.v * b.v);
  for (int i = 0; i < M; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
  return r;
}

// double mixes, avoiding full promotion
template <class T, int M>
Dual<T, M> operator+(const Dual<T, M>& a, double c) {
  Dual<T, M> r(a);
  r.v += T(c);
  return r;
}
template <class T, int M>
Dual<T, M> operator+(double c, const Dual<T, M>& a) {
  return a + c;
}
template <class T, int M>
Dual<T, M> operator-(const Dual<T, M>& a, double c) {
  Dual<T, M> r(a);
  r.v -= T(c);
  return r;
}
template <class T, int M>
Dual<T, M> operator-(double c, const Dual<T, M>& a) {
  Dual<T, M> r = -a;
  r.v += T(c);
  return r;
}
template <class T, int M>
Dual<T, M> operator*(const Dual<T, M>& a, double c) {
  Dual<T, M> r;
  r.v = a.v * T(c);
  for (int i = 0; i < M; ++i) r.d[i] = a.d[i] * T(c);
  return r;
}
template <class T, int M>
Dual<T, M> operator*(double c, const Dual<T, M>& a) {
  return a * c;
}
template <class T, int M>
Dual<T, M> operator/(const Dual<T, M>& a, double c) {
  return a * (1.0 / c);
}
template <class T, int M>
Dual<T, M> operator/(double c, const Dual<T, M>& a) {
  return Dual<T, M>(c) / a;
}

template <class T, int M>
bool operator<(const Dual<T, M>& a, const Dual<T, M>& b) {
  return value_of(a) < value_of(b);
}
template <class T, int M>
bool operator<(const Dual<T, M>& a, double b) {
  return value_of(a) < b;
}
template <class T, int M>
bool operator>(const Dual<T, M>& a, double b) {
  return value_of(a) > b;
}

using std::abs;
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;
using std::tan;
using std::tanh;

template <class T, int M>
Dual<T, M> sqrt(const Dual<T, M>& x) {
  Dual<T, M> r;
  r.v = sqrt(x.v);
  const T s = T(0.5) / r.v;
  for (int i = 0; i < M; ++i) r.d[i] = x.d[i] * s;
  return r;
}
template <class T, int M>
Dual<T, M> exp(const Dual<T, M>& x) {
  Dual<T, M> r;
  r.v = exp(x.v);
  for (int i = 0; i < M; ++i) r.d[i] = x.d[i] * r.v;
  return r;
}
template <class T, int M>
Dual<T, M> log(const Dual<T, M>& x) {
  Dual<T, M> r;
  r.v = log(x.v);
  const T inv = T(1.0) / x.v;
  for (int i = 0; i < M; ++i) r.d[i] = x.d[i] * inv;
  return r;
}
template <class T, int M>
Dual<T, M> sin(const Dual<T, M>& x) {
  Dual<T, M> r;
  r.v = sin(x.v);
  const T c = cos(x.v);
  for (int i = 0; i < M; ++i) r.d[i] = x.d[i] * c;
  return r;
}
template <class T, int M>
Dual<T, M> cos(const Dual<T, M>& x) {
  Dual<T, M> r;
  r.v = cos(x.v);
  const T s = -sin(x.v);
  for (int i = 0; i < M; ++i) r.d[i] = x.d[i] * s;
  return r;
}
template <class T, int M>
Dual<T, M> tan(const Dual<T, M>& x) {
  return sin(x) / cos(x);
}
template <class T, int M>
Dual<T, M> tanh(const Dual<T, M>& x) {
  Dual<T, M> r;
  r.v = tanh(x.v);
  const T s = T(1.0) - r.v * r.v;
  for (int i = 0; i < M; ++i) r.d[i] = x.d[i] * s;
  return r;
}
template <class T, int M>
Dual<T, M> abs(const Dual<T, M>& x) {
  return value_of(x) < 0.0 ? -x : x;
}
// x^p for real exponent; x must be positive unless p is a small integer.
template <class T, int M>
Dual<T, M> pow(const Dual<T, M>& x, double p) {
  if (p == 2.0) return x * x;
  if (p == 1.0) return x;
  if (p == 0.0) return Dual<T, M>(1.0);
  Dual<T, M> r;
  r.v = pow(x.v, p);
  const T s = pow(x.v, p - 1.0) * T(p);
  for (int i = 0; i < M; ++i) r.d[i] = x.d[i] * s;
  return r;
}

}  // namespace finslab

#endif
