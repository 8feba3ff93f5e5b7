#pragma once
// Fixed-order derivative arithmetic.
//
// A Jet<N> holds the derivatives g, g', ..., g^(N) of a scalar function at one
// point. Products follow the Leibniz rule; quotients, square roots and logs use
// the standard recursions, so a composite expression yields exact derivatives
// (up to rounding) without symbolic algebra or numerical differentiation.

#include <array>
#include <cmath>
#include <cstddef>

namespace gapkit {

namespace detail {

constexpr double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

}  // namespace detail

template <std::size_t N>
struct Jet {
  static constexpr std::size_t order = N;
  std::array<double, N + 1> d{};

  static Jet constant(double c) {
    Jet j;
    j.d[0] = c;
    return j;
  }

  static Jet variable(double x) {
    Jet j;
    j.d[0] = x;
    if constexpr (N >= 1) j.d[1] = 1.0;
    return j;
  }

  double value() const { return d[0]; }
  double operator[](std::size_t k) const { return d[k]; }
  double& operator[](std::size_t k) { return d[k]; }

  Jet<N - 1> derivative() const
    requires(N >= 1)
  {
    Jet<N - 1> r;
    for (std::size_t k = 0; k < N; ++k) r.d[k] = d[k + 1];
    return r;
  }

  template <std::size_t M>
  Jet<M> truncate() const
    requires(M <= N)
  {
    Jet<M> r;
    for (std::size_t k = 0; k <= M; ++k) r.d[k] = d[k];
    return r;
  }

  Jet operator-() const {
    Jet r;
    for (std::size_t k = 0; k <= N; ++k) r.d[k] = -d[k];
    return r;
  }
  Jet& operator+=(const Jet& o) {
    for (std::size_t k = 0; k <= N; ++k) d[k] += o.d[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (std::size_t k = 0; k <= N; ++k) d[k] -= o.d[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& x : d) x *= s;
    return *this;
  }
};

template <std::size_t N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) {
  return a += b;
}
template <std::size_t N>
Jet<N> operator-(Jet<N> a, const Jet<N>& b) {
  return a -= b;
}
template <std::size_t N>
Jet<N> operator*(Jet<N> a, double s) {
  return a *= s;
}
template <std::size_t N>
Jet<N> operator*(double s, Jet<N> a) {
  return a *= s;
}
template <std::size_t N>
Jet<N> operator+(Jet<N> a, double s) {
  a.d[0] += s;
  return a;
}
template <std::size_t N>
Jet<N> operator+(double s, Jet<N> a) {
  a.d[0] += s;
  return a;
}
template <std::size_t N>
Jet<N> operator-(Jet<N> a, double s) {
  a.d[0] -= s;
  return a;
}
template <std::size_t N>
Jet<N> operator-(double s, const Jet<N>& a) {
  return (-a) + s;
}

template <std::size_t N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r;
  for (std::size_t n = 0; n <= N; ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k <= n; ++k) s += detail::binomial(n, k) * a.d[k] * b.d[n - k];
    r.d[n] = s;
  }
  return r;
}

template <std::size_t N>
Jet<N> reciprocal(const Jet<N>& s) {
  Jet<N> w;
  w.d[0] = 1.0 / s.d[0];
  for (std::size_t n = 1; n <= N; ++n) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) acc += detail::binomial(n, k) * s.d[k] * w.d[n - k];
    w.d[n] = -acc * w.d[0];
  }
  return w;
}

template <std::size_t N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
  return a * reciprocal(b);
}
template <std::size_t N>
Jet<N> operator/(double a, const Jet<N>& b) {
  return reciprocal(b) * a;
}

template <std::size_t N>
Jet<N> sqrt(const Jet<N>& q) {
  Jet<N> r;
  r.d[0] = std::sqrt(q.d[0]);
  for (std::size_t n = 1; n <= N; ++n) {
    double acc = q.d[n];
    for (std::size_t k = 1; k < n; ++k) acc -= detail::binomial(n, k) * r.d[k] * r.d[n - k];
    r.d[n] = acc / (2.0 * r.d[0]);
  }
  return r;
}

template <std::size_t N>
Jet<N> log(const Jet<N>& g) {
  Jet<N> r;
  r.d[0] = std::log(g.d[0]);
  if constexpr (N >= 1) {
    const Jet<N - 1> ratio = g.derivative() / g.template truncate<N - 1>();
    for (std::size_t k = 0; k < N; ++k) r.d[k + 1] = ratio.d[k];
  }
  return r;
}

template <std::size_t N>
Jet<N> exp(const Jet<N>& g) {
  Jet<N> e;
  e.d[0] = std::exp(g.d[0]);
  for (std::size_t n = 1; n <= N; ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += detail::binomial(n - 1, k) * g.d[k + 1] * e.d[n - 1 - k];
    e.d[n] = acc;
  }
  return e;
}

}  // namespace gapkit
