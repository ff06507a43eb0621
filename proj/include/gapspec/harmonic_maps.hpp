#pragma once

#include <cmath>
#include <string>

#include "gapspec/jet.hpp"

namespace gapspec {

enum class GeometryKind { Sphere, YangMills };

struct GeometrySpec {
    GeometryKind kind = GeometryKind::Sphere;
    int k = 1;
    double lambda = 1.0;

    static GeometrySpec sphere(int k, double lambda);
    static GeometrySpec yang_mills(double lambda);

    GeometrySpec with_lambda(double l) const;
    bool is_sphere() const { return kind == GeometryKind::Sphere; }
    std::string label() const;  // "sphere" or "ym"
};

struct EnergyBreakdown {
    double kinetic = 0, gradient = 0, potential = 0, total = 0;
};

double metric_g(const GeometrySpec& geo, double psi);
double metric_g_prime(const GeometrySpec& geo, double psi);
double metric_g_double_prime(const GeometrySpec& geo, double psi);

double eval_Q(const GeometrySpec& geo, double r);
double eval_Q_prime(const GeometrySpec& geo, double r);
double endpoint(const GeometrySpec& geo);

double energy_closed_form(const GeometrySpec& geo);
EnergyBreakdown energy_quadrature(const GeometrySpec& geo, double r_max = 60.0);

// G(psi) = integral of |g| from 0 to psi (psi >= 0), and its inverse.
double amplitude_antiderivative(const GeometrySpec& geo, double psi);
double amplitude_bound(const GeometrySpec& geo, double energy);

// Closed-form profiles, generic over double and Jet.

template <class T>
T profile_Q(const GeometrySpec& geo, const T& r) {
    using std::atan;
    using std::tanh;
    T t = tanh(r * 0.5);
    if (geo.is_sphere()) return 2.0 * atan(std::pow(geo.lambda, geo.k) * ipow(t, geo.k));
    T x = (geo.lambda * geo.lambda) * t * t;
    return 2.0 * x / (x + 1.0);
}

template <class T>
T profile_g(const GeometrySpec& geo, const T& psi) {
    using std::sin;
    if (geo.is_sphere()) return sin(psi);
    return psi - 0.5 * psi * psi;
}

// d/d(lambda) of the profile at fixed r.
template <class T>
T profile_dQ_dlambda(const GeometrySpec& geo, const T& r) {
    using std::tanh;
    T t = tanh(r * 0.5);
    double l = geo.lambda;
    if (geo.is_sphere()) {
        int k = geo.k;
        T tk = ipow(t, k);
        return 2.0 * k * std::pow(l, k - 1) * tk / (std::pow(l, 2 * k) * tk * tk + 1.0);
    }
    T x = (l * l) * t * t + 1.0;
    return 4.0 * l * t * t / (x * x);
}

// zeta_0 (sphere) or eta_0 (Yang-Mills) in the physical coordinate r.
template <class T>
T profile_zero_mode(const GeometrySpec& geo, const T& r) {
    using std::sinh;
    using std::sqrt;
    return sqrt(sinh(r)) * profile_dQ_dlambda(geo, r);
}

}  // namespace gapspec
