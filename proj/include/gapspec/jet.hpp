#pragma once

#include <cmath>

namespace gapspec {

// Truncated Taylor jet carrying a value with its first and second derivative.
// Closed-form profiles are written once as templates and evaluated either on
// double or on Jet to get exact derivatives.
struct Jet {
    double v = 0, d = 0, dd = 0;

    constexpr Jet() = default;
    explicit constexpr Jet(double value) : v(value) {}
    constexpr Jet(double value, double d1, double d2) : v(value), d(d1), dd(d2) {}

    static constexpr Jet variable(double x) { return {x, 1.0, 0.0}; }
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.d, -a.dd}; }
inline Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2 * a.d * b.d + a.v * b.dd};
}
inline Jet operator/(const Jet& a, const Jet& b) {
    double q = a.v / b.v;
    double qd = (a.d - q * b.d) / b.v;
    double qdd = (a.dd - 2 * qd * b.d - q * b.dd) / b.v;
    return {q, qd, qdd};
}
inline Jet operator+(const Jet& a, double b) { return {a.v + b, a.d, a.dd}; }
inline Jet operator+(double a, const Jet& b) { return b + a; }
inline Jet operator-(const Jet& a, double b) { return {a.v - b, a.d, a.dd}; }
inline Jet operator-(double a, const Jet& b) { return {a - b.v, -b.d, -b.dd}; }
inline Jet operator*(const Jet& a, double b) { return {a.v * b, a.d * b, a.dd * b}; }
inline Jet operator*(double a, const Jet& b) { return b * a; }
inline Jet operator/(const Jet& a, double b) { return {a.v / b, a.d / b, a.dd / b}; }
inline Jet operator/(double a, const Jet& b) { return Jet(a) / b; }

// f(u) given f, f', f'' at u.v
inline Jet chain(const Jet& u, double f0, double f1, double f2) {
    return {f0, f1 * u.d, f2 * u.d * u.d + f1 * u.dd};
}

inline Jet sin(const Jet& u) { double s = std::sin(u.v), c = std::cos(u.v); return chain(u, s, c, -s); }
inline Jet cos(const Jet& u) { double s = std::sin(u.v), c = std::cos(u.v); return chain(u, c, -s, -c); }
inline Jet sinh(const Jet& u) { double s = std::sinh(u.v), c = std::cosh(u.v); return chain(u, s, c, s); }
inline Jet cosh(const Jet& u) { double s = std::sinh(u.v), c = std::cosh(u.v); return chain(u, c, s, c); }
inline Jet tanh(const Jet& u) {
    double t = std::tanh(u.v), s2 = 1 - t * t;
    return chain(u, t, s2, -2 * t * s2);
}
inline Jet atan(const Jet& u) {
    double w = 1 / (1 + u.v * u.v);
    return chain(u, std::atan(u.v), w, -2 * u.v * w * w);
}
inline Jet exp(const Jet& u) { double e = std::exp(u.v); return chain(u, e, e, e); }
inline Jet log(const Jet& u) { return chain(u, std::log(u.v), 1 / u.v, -1 / (u.v * u.v)); }
inline Jet sqrt(const Jet& u) {
    double s = std::sqrt(u.v);
    return chain(u, s, 0.5 / s, -0.25 / (s * u.v));
}
inline Jet pow(const Jet& u, double p) {
    double f = std::pow(u.v, p);
    return chain(u, f, p * f / u.v, p * (p - 1) * f / (u.v * u.v));
}

template <class T>
T ipow(const T& x, int n) {
    T r(1.0);
    for (int i = 0; i < n; ++i) r = r * x;
    return r;
}

}  // namespace gapspec
