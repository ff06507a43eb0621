#include "gapspec/harmonic_maps.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <limits>
#include <vector>

#include "gapspec/errors.hpp"

namespace gapspec {

GeometrySpec GeometrySpec::sphere(int k, double lambda) {
    if (k < 1) throw DomainError("equivariance k must be >= 1");
    if (!(lambda >= 0)) throw DomainError("lambda must be >= 0");
    return {GeometryKind::Sphere, k, lambda};
}

GeometrySpec GeometrySpec::yang_mills(double lambda) {
    if (!(lambda >= 0)) throw DomainError("lambda must be >= 0");
    return {GeometryKind::YangMills, 2, lambda};
}

GeometrySpec GeometrySpec::with_lambda(double l) const {
    return is_sphere() ? sphere(k, l) : yang_mills(l);
}

std::string GeometrySpec::label() const { return is_sphere() ? "sphere" : "ym"; }

double metric_g(const GeometrySpec& geo, double psi) { return profile_g(geo, psi); }

double metric_g_prime(const GeometrySpec& geo, double psi) {
    return geo.is_sphere() ? std::cos(psi) : 1.0 - psi;
}

double metric_g_double_prime(const GeometrySpec& geo, double psi) {
    return geo.is_sphere() ? -std::sin(psi) : -1.0;
}

double eval_Q(const GeometrySpec& geo, double r) {
    if (r < 0) throw DomainError("eval_Q requires r >= 0");
    if (std::isinf(r)) return endpoint(geo);
    return profile_Q(geo, r);
}

double eval_Q_prime(const GeometrySpec& geo, double r) {
    if (r < 0) throw DomainError("eval_Q_prime requires r >= 0");
    double t = std::tanh(0.5 * r);
    double sech2 = 1.0 - t * t;
    double l = geo.lambda;
    if (geo.is_sphere()) {
        int k = geo.k;
        double lk = std::pow(l, k);
        double x = lk * std::pow(t, k);
        return k * lk * std::pow(t, k - 1) * sech2 / (1.0 + x * x);
    }
    double y = 1.0 + l * l * t * t;
    return 2.0 * l * l * t * sech2 / (y * y);
}

double endpoint(const GeometrySpec& geo) {
    double l = geo.lambda;
    if (geo.is_sphere()) return 2.0 * std::atan(std::pow(l, geo.k));
    if (l == 0) return 0.0;
    return 2.0 / (1.0 + 1.0 / (l * l));
}

double energy_closed_form(const GeometrySpec& geo) {
    double l = geo.lambda;
    if (geo.is_sphere()) {
        double x = std::pow(l, 2 * geo.k);
        if (std::isinf(x)) return 2.0 * geo.k;
        return 2.0 * geo.k * x / (1.0 + x);
    }
    double l2 = l * l;
    return 4.0 * l2 * l2 * (3.0 + l2) / (3.0 * std::pow(1.0 + l2, 3));
}

namespace {

// k^2 g(Q)^2 / sinh^2 r, with the leading Taylor form near the origin.
double angular_term(const GeometrySpec& geo, double r) {
    int k = geo.k;
    if (r < 1e-4) {
        return k * k * std::pow(geo.lambda, 2 * k) * std::pow(0.5 * r, 2 * k - 2);
    }
    double q = metric_g(geo, eval_Q(geo, r)) / std::sinh(r);
    return k * k * q * q;
}

struct Density {
    double gradient, potential;
};

Density energy_density(const GeometrySpec& geo, double r) {
    double s = std::sinh(r);
    double qp = eval_Q_prime(geo, r);
    return {0.5 * qp * qp * s, 0.5 * angular_term(geo, r) * s};
}

}  // namespace

EnergyBreakdown energy_quadrature(const GeometrySpec& geo, double r_max) {
    if (r_max < 20) throw DomainError("energy_quadrature requires r_max >= 20");
    EnergyBreakdown out;
    if (geo.lambda == 0) return out;

    // Geometric panels resolve the concentration scale 1/lambda near the origin.
    std::vector<double> breaks{0.0};
    const int levels = 40;
    for (int j = levels; j >= 0; --j) breaks.push_back(r_max * std::ldexp(1.0, -j));

    using Rule = boost::math::quadrature::gauss<double, 20>;
    auto integrate = [&](int subdivisions, auto part) {
        double sum = 0;
        for (size_t p = 0; p + 1 < breaks.size(); ++p) {
            double a = breaks[p], w = (breaks[p + 1] - a) / subdivisions;
            for (int i = 0; i < subdivisions; ++i) {
                double lo = a + i * w;
                sum += Rule::integrate([&](double r) { return part(energy_density(geo, r)); }, lo,
                                       lo + w);
            }
        }
        return sum;
    };
    auto grad = [](const Density& d) { return d.gradient; };
    auto pot = [](const Density& d) { return d.potential; };

    double g_prev = integrate(1, grad), p_prev = integrate(1, pot);
    double change = std::numeric_limits<double>::infinity();
    for (int n = 2; n <= 64; n *= 2) {
        double g = integrate(n, grad), p = integrate(n, pot);
        change = std::abs(g + p - g_prev - p_prev) / std::max(std::abs(g + p), 1e-300);
        g_prev = g;
        p_prev = p;
        if (change < 1e-13) break;
    }
    if (change > 1e-9) {
        throw QuadratureNotConverged("relative change " + std::to_string(change) +
                                     " after refinement");
    }
    // Both densities decay like e^{-r}; the tail beyond r_max is density(r_max).
    Density tail = energy_density(geo, r_max);
    out.gradient = g_prev + tail.gradient;
    out.potential = p_prev + tail.potential;
    out.total = out.kinetic + out.gradient + out.potential;
    return out;
}

double amplitude_antiderivative(const GeometrySpec& geo, double psi) {
    if (psi < 0) throw DomainError("amplitude_antiderivative requires psi >= 0");
    if (geo.is_sphere()) {
        double n = std::floor(psi / M_PI);
        return 2.0 * n + (1.0 - std::cos(psi - n * M_PI));
    }
    if (psi <= 2.0) return psi * psi / 2.0 - psi * psi * psi / 6.0;
    return 4.0 / 3.0 + psi * psi * psi / 6.0 - psi * psi / 2.0;
}

double amplitude_bound(const GeometrySpec& geo, double energy) {
    if (energy < 0) throw DomainError("amplitude_bound requires energy >= 0");
    const double psi_max = geo.is_sphere() ? 16.0 * M_PI : 16.0;
    if (energy > amplitude_antiderivative(geo, psi_max)) {
        throw BoundOutOfRange("energy beyond the inversion range");
    }
    if (energy == 0) return 0.0;
    double lo = 0, hi = psi_max;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        (amplitude_antiderivative(geo, mid) < energy ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace gapspec
