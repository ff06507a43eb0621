#include "gapspec/operators.hpp"

#include <algorithm>
#include <cmath>

#include "gapspec/errors.hpp"

namespace gapspec {

namespace {

void require_positive_lambda(const GeometrySpec& geo) {
    if (!(geo.lambda > 0)) throw DomainError("rescaled operator requires lambda > 0");
}

// cos Q for the sphere and 1 - Q for Yang-Mills, both written as (1 - x)/(1 + x)
// so that the lambda = 1 case keeps full relative accuracy at large r.
double g_prime_of_Q(const GeometrySpec& geo, double r) {
    double t = std::tanh(0.5 * r);
    double sech2 = 1.0 / std::pow(std::cosh(0.5 * r), 2);
    int n = geo.is_sphere() ? geo.k : 1;
    double l2n = std::pow(geo.lambda, 2 * n);
    double t2 = t * t;
    double x = l2n * std::pow(t2, n);
    double num;
    if (l2n == 1.0) {
        double sum = 0, p = 1;
        for (int j = 0; j < n; ++j, p *= t2) sum += p;
        num = sech2 * sum;
    } else {
        num = 1.0 - x;
    }
    return num / (1.0 + x);
}

double potential_V_at_zero(const GeometrySpec& geo) {
    if (!geo.is_sphere()) return -6.0 * geo.lambda * geo.lambda;
    return geo.k == 1 ? -2.0 * geo.lambda * geo.lambda : 0.0;
}

}  // namespace

OperatorSpec OperatorSpec::half_line(const GeometrySpec& geo) {
    OperatorSpec op;
    op.family = OperatorFamily::HalfLine;
    op.geometry = geo;
    op.k = geo.k;
    return op;
}

OperatorSpec OperatorSpec::rescaled(const GeometrySpec& geo) {
    require_positive_lambda(geo);
    OperatorSpec op = half_line(geo);
    op.family = OperatorFamily::Rescaled;
    return op;
}

OperatorSpec OperatorSpec::euclidean(int k) {
    if (k < 1) throw DomainError("equivariance k must be >= 1");
    OperatorSpec op;
    op.family = OperatorFamily::Euclidean;
    op.k = k;
    op.geometry = GeometrySpec::sphere(k, 0.0);
    return op;
}

OperatorSpec OperatorSpec::large_k(int k, double theta) {
    if (k < 0) throw DomainError("large-k family requires k >= 1 or k = infinity");
    if (!(theta > 0)) throw DomainError("Theta must be > 0");
    OperatorSpec op;
    op.family = OperatorFamily::LargeK;
    op.k = k;
    op.theta = theta;
    if (k != k_infinity) op.geometry = GeometrySpec::sphere(k, std::pow(theta, 1.0 / k));
    return op;
}

double OperatorSpec::frobenius_exponent() const {
    if (family != OperatorFamily::LargeK) return k + 0.5;
    // r ~ 2 (rho/Theta)^{1/k} near the origin; the k = infinity limit carries a log factor.
    return k_is_infinite() ? 1.0 : 1.0 + 0.5 / k;
}

std::pair<double, double> OperatorSpec::domain() const {
    if (family == OperatorFamily::LargeK) return {0.0, theta};
    return {0.0, std::numeric_limits<double>::infinity()};
}

Measure OperatorSpec::measure() const {
    return family == OperatorFamily::LargeK ? Measure::OmegaWeighted : Measure::Lebesgue;
}

double OperatorSpec::threshold() const {
    switch (family) {
        case OperatorFamily::Rescaled: return 1.0 / (geometry.lambda * geometry.lambda);
        case OperatorFamily::Euclidean: return 0.0;
        default: return 0.25;
    }
}

double OperatorSpec::energy_scale() const {
    return family == OperatorFamily::Rescaled ? 4.0 / (geometry.lambda * geometry.lambda) : 1.0;
}

double OperatorSpec::length_scale() const {
    return family == OperatorFamily::Rescaled ? 0.5 * geometry.lambda : 1.0;
}

std::string OperatorSpec::label() const {
    switch (family) {
        case OperatorFamily::HalfLine: return "half_line";
        case OperatorFamily::Rescaled: return "rescaled";
        case OperatorFamily::Euclidean: return "euclidean";
        case OperatorFamily::LargeK: return "large_k";
    }
    return "unknown";
}

double potential_V(const GeometrySpec& geo, double r) {
    if (r < 0) throw DomainError("potential_V requires r > 0");
    if (r == 0) return potential_V_at_zero(geo);
    double q = eval_Q(geo, r);
    double s = std::sinh(r);
    if (geo.is_sphere()) {
        double sq = std::sin(q) / s;
        return -2.0 * geo.k * geo.k * sq * sq;
    }
    return 6.0 * (q / s) * ((q - 2.0) / s);
}

double effective_potential(const OperatorSpec& op, double x) {
    auto [lo, hi] = op.domain();
    if (!(x > lo && x < hi)) throw DomainError("effective_potential: x outside the domain");
    const double kk = double(op.k) * op.k - 0.25;
    switch (op.family) {
        case OperatorFamily::HalfLine: {
            double s = std::sinh(x);
            return 0.25 + kk / (s * s) + potential_V(op.geometry, x);
        }
        case OperatorFamily::Rescaled: {
            double l = op.geometry.lambda;
            double r = 2.0 * x / l;
            double s = std::sinh(r);
            return (4.0 / (l * l)) * (0.25 + kk / (s * s) + potential_V(op.geometry, r));
        }
        case OperatorFamily::Euclidean: {
            int k = op.k;
            double p = std::pow(x, 2 * k);
            double v = -8.0 * k * k * std::pow(x, 2 * k - 2) / ((1 + p) * (1 + p));
            return kk / (x * x) + v;
        }
        case OperatorFamily::LargeK: {
            double inv = 1.0 / omega_weight(op.k, op.theta, x);
            double p2 = x * x;
            double c = (1.0 - 6.0 * p2 + p2 * p2) / ((1.0 + p2) * (1.0 + p2));
            double val = 0.25 + inv * inv * c;
            if (!op.k_is_infinite()) val -= inv * inv / (4.0 * op.k * op.k);
            return val;
        }
    }
    return 0.0;
}

double effective_potential_alt(const GeometrySpec& geo, double r) {
    if (!(r > 0)) throw DomainError("effective_potential_alt requires r > 0");
    double q = eval_Q(geo, r);
    double gp = metric_g_prime(geo, q);
    double s = std::sinh(r);
    double w = gp * gp + metric_g(geo, q) * metric_g_double_prime(geo, q);
    return 0.25 + (geo.k * geo.k * w - 0.25) / (s * s);
}

double zero_mode(const GeometrySpec& geo, ZeroModeCoordinate coord, double x) {
    if (!(x > 0)) throw DomainError("zero_mode requires x > 0");
    if (!(geo.lambda > 0)) throw DomainError("zero_mode requires lambda > 0");
    double r = coord == ZeroModeCoordinate::PhysicalR ? x : 2.0 * x / geo.lambda;
    return profile_zero_mode(geo, r);
}

Jet zero_mode_jet(const GeometrySpec& geo, ZeroModeCoordinate coord, double x) {
    if (!(x > 0)) throw DomainError("zero_mode requires x > 0");
    if (!(geo.lambda > 0)) throw DomainError("zero_mode requires lambda > 0");
    Jet xv = Jet::variable(x);
    Jet r = coord == ZeroModeCoordinate::PhysicalR ? xv : xv * (2.0 / geo.lambda);
    return profile_zero_mode(geo, r);
}

double euclidean_zero_mode(int k, double rho) {
    return std::pow(rho, k + 0.5) / (1.0 + std::pow(rho, 2 * k));
}

Jet euclidean_zero_mode_jet(int k, double rho) {
    Jet x = Jet::variable(rho);
    return pow(x, k + 0.5) / (ipow(x, 2 * k) + 1.0);
}

double apply_operator(const OperatorSpec& op, const SampledFunction& phi, double x) {
    double q = effective_potential(op, x);
    Jet f = phi(x);
    if (op.family != OperatorFamily::LargeK) return -f.dd + q * f.v;
    // -A (A' phi' + A phi'') with A = rho / omega
    double z = std::log(op.theta / x);
    double a, ap;
    if (op.k_is_infinite()) {
        a = x * z;
        ap = z - 1.0;
    } else {
        double kk = op.k;
        a = kk * x * std::sinh(z / kk);
        ap = kk * std::sinh(z / kk) - std::cosh(z / kk);
    }
    return -a * (ap * f.d + a * f.dd) + q * f.v;
}

SampledFunction finite_difference_function(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() != values.size() || grid.size() < 5) {
        throw DomainError("finite differences need at least 5 matching samples");
    }
    return [grid = std::move(grid), f = std::move(values)](double x) {
        double h = grid[1] - grid[0];
        long i = std::lround((x - grid[0]) / h);
        if (i < 2 || i + 2 >= long(grid.size())) {
            throw DomainError("finite differences need two neighbours on each side");
        }
        double d1 = (-f[i + 2] + 8 * f[i + 1] - 8 * f[i - 1] + f[i - 2]) / (12 * h);
        double d2 = (-f[i + 2] + 16 * f[i + 1] - 30 * f[i] + 16 * f[i - 1] - f[i - 2]) / (12 * h * h);
        return Jet(f[i], d1, d2);
    };
}

double omega_weight(int k, double theta, double rho) {
    if (!(rho > 0 && rho < theta)) throw DomainError("omega_weight requires 0 < rho < Theta");
    if (k < 0) throw DomainError("omega_weight requires k >= 1 or k = infinity");
    double z = std::log(theta / rho);
    if (k == k_infinity) return 1.0 / z;
    return 1.0 / (k * std::sinh(z / k));
}

double largek_rho_from_r(int k, double theta, double r) {
    if (k == k_infinity || k < 1) throw DomainError("r <-> rho map needs finite k");
    if (!(r > 0)) throw DomainError("r must be > 0");
    return theta * std::pow(std::tanh(0.5 * r), k);
}

double largek_r_from_rho(int k, double theta, double rho) {
    if (k == k_infinity || k < 1) throw DomainError("r <-> rho map needs finite k");
    if (!(rho > 0 && rho < theta)) throw DomainError("rho must lie in (0, Theta)");
    return 2.0 * std::atanh(std::pow(rho / theta, 1.0 / k));
}

double loglog_s_from_rho(double theta, double rho) {
    if (!(rho > 0 && rho < theta)) throw DomainError("rho must lie in (0, Theta)");
    return -std::log(std::log(theta / rho));
}

double loglog_rho_from_s(double theta, double s) {
    if (!std::isfinite(s)) throw DomainError("s must be finite");
    return theta * std::exp(-std::exp(-s));
}

double rescaled_rho_from_r(double lambda, double r) {
    if (!(lambda > 0)) throw DomainError("lambda must be > 0");
    return 0.5 * lambda * r;
}

double rescaled_r_from_rho(double lambda, double rho) {
    if (!(lambda > 0)) throw DomainError("lambda must be > 0");
    return 2.0 * rho / lambda;
}

double convexity_margin(const GeometrySpec& geo, double r) {
    if (!(r > 0)) throw DomainError("convexity_margin requires r > 0");
    return geo.k * std::cosh(r) * g_prime_of_Q(geo, r) - 0.25;
}

std::vector<double> conjugation_transform(ConjugationDirection dir, int k,
                                          const std::vector<double>& r,
                                          const std::vector<double>& samples) {
    if (r.size() != samples.size()) throw DomainError("grid and samples differ in length");
    std::vector<double> out(samples.size());
    for (size_t i = 0; i < r.size(); ++i) {
        if (!(r[i] > 0)) throw DomainError("conjugation requires r > 0");
        double w = std::pow(std::sinh(r[i]), k + 0.5);
        out[i] = dir == ConjugationDirection::ToHalfLine ? samples[i] * w : samples[i] / w;
    }
    return out;
}

std::vector<double> wave_map_substitution(const GeometrySpec& geo, const std::vector<double>& r,
                                          const std::vector<double>& psi) {
    if (r.size() != psi.size()) throw DomainError("grid and samples differ in length");
    std::vector<double> u(psi.size());
    for (size_t i = 0; i < r.size(); ++i) {
        if (!(r[i] > 0)) throw DomainError("substitution requires r > 0");
        u[i] = (psi[i] - eval_Q(geo, r[i])) / std::pow(std::sinh(r[i]), geo.k);
    }
    return u;
}

}  // namespace gapspec
