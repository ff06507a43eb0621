#include "gapspec/ode_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gapspec/errors.hpp"

namespace gapspec {

ShootingCoefficients shooting_coefficients(const OperatorSpec& op, double x) {
    if (op.family != OperatorFamily::LargeK) return {1.0, effective_potential(op, x)};
    double z = std::exp(-x);
    double rho = op.theta * std::exp(-z);
    double p2 = rho * rho;
    double c = (1.0 - 6.0 * p2 + p2 * p2) / ((1.0 + p2) * (1.0 + p2));
    if (op.k_is_infinite()) return {1.0, 0.25 + z * z * c};
    double kk = op.k;
    double inv_omega = kk * std::sinh(z / kk);
    return {z / inv_omega, 0.25 + inv_omega * inv_omega * (c - 0.25 / (kk * kk))};
}

double shooting_threshold(const OperatorSpec& op) { return op.threshold(); }

namespace {

double frobenius_c0(const OperatorSpec& op) {
    const double kk = double(op.k) * op.k - 0.25;
    if (op.family == OperatorFamily::Euclidean) return op.k == 1 ? -8.0 : 0.0;
    const GeometrySpec& geo = op.geometry;
    double v0 = potential_V(geo, 0.0);
    double c0 = 0.25 - kk / 3.0 + v0;
    if (op.family == OperatorFamily::Rescaled) c0 *= 4.0 / (geo.lambda * geo.lambda);
    return c0;
}

// |q(x) - (k^2-1/4)/x^2 - c0|, evaluated without cancellation.
double frobenius_remainder(const OperatorSpec& op, double x) {
    const double kk = std::abs(double(op.k) * op.k - 0.25);
    if (op.family == OperatorFamily::Euclidean) {
        int k = op.k;
        double p = std::pow(x, 2 * k);
        double v = -8.0 * k * k * std::pow(x, 2 * k - 2) / ((1 + p) * (1 + p));
        return std::abs(v - (k == 1 ? -8.0 : 0.0));
    }
    const GeometrySpec& geo = op.geometry;
    double scale = 1.0, r = x;
    if (op.family == OperatorFamily::Rescaled) {
        scale = 4.0 / (geo.lambda * geo.lambda);
        r = 2.0 * x / geo.lambda;
    }
    return scale * (kk * r * r / 15.0 + std::abs(potential_V(geo, r) - potential_V(geo, 0.0)));
}

OperatorSpec equivalent_half_line(const OperatorSpec& op) {
    return OperatorSpec::half_line(GeometrySpec::sphere(op.k, std::pow(op.theta, 1.0 / op.k)));
}

double largek_inf_start_z(const OperatorSpec& op) {
    return std::max(40.0, std::log(op.theta) + 20.0);
}

}  // namespace

double series_dropped_term(const OperatorSpec& op, double mu2, double x0) {
    if (op.family == OperatorFamily::LargeK) {
        double z = std::exp(-x0);
        if (op.k_is_infinite()) return 8.0 * op.theta * op.theta * std::exp(-2.0 * z);
        double r0 = 2.0 * std::atanh(std::exp(-z / op.k));
        return series_dropped_term(equivalent_half_line(op), mu2, r0);
    }
    double s = op.k + 0.5;
    double denom = 8.0 * s + 12.0;
    double c = frobenius_c0(op) - mu2;
    double a2 = c / (4.0 * s + 2.0);
    return frobenius_remainder(op, x0) * x0 * x0 / denom + std::abs(a2 * c) * std::pow(x0, 4) / denom;
}

double default_start_point(const OperatorSpec& op, double mu2) {
    if (op.family == OperatorFamily::LargeK) {
        if (op.k_is_infinite()) return -std::log(largek_inf_start_z(op));
        double r0 = default_start_point(equivalent_half_line(op), mu2);
        double z0 = -op.k * std::log(std::tanh(0.5 * r0));
        return -std::log(z0);
    }
    double ell = 1.0;
    if (op.family != OperatorFamily::Euclidean) {
        ell = std::min(1.0, 1.0 / std::max(op.geometry.lambda, 1e-300)) * op.length_scale();
    }
    double x0 = 1e-3 * ell;
    for (int i = 0; i < 60 && series_dropped_term(op, mu2, x0) > 1e-12; ++i) x0 *= 0.5;
    return x0;
}

StartData series_start(const OperatorSpec& op, double mu2, double x0) {
    if (op.family == OperatorFamily::LargeK) {
        double z = std::exp(-x0);
        if (!op.k_is_infinite()) {
            double r0 = 2.0 * std::atanh(std::exp(-z / op.k));
            StartData st = series_start(equivalent_half_line(op), mu2, r0);
            st.x = x0;  // pi = d(phi)/dr is already the conjugate variable
            return st;
        }
        if (z < 20.0 || series_dropped_term(op, mu2, x0) > 1e-9) {
            throw SeriesRadiusExceeded("large-k start requires log(Theta/rho) >= 20");
        }
        // K_nu(z) asymptotics with 4 nu^2 = 1 - 4 mu2, normalized to rho log^{-1/2}(Theta/rho).
        double four_nu2 = 1.0 - 4.0 * mu2;
        double term = 1.0, S = 1.0, T = 0.0;
        for (int j = 1; j < 60; ++j) {
            double next = term * (four_nu2 - (2.0 * j - 1) * (2.0 * j - 1)) / (8.0 * j * z);
            if (std::abs(next) > std::abs(term)) break;
            term = next;
            S += term;
            T += j * term;
            if (std::abs(term) < 1e-18) break;
        }
        return {x0, S, z * S + 0.5 * S + T, std::log(op.theta) - z - 0.5 * std::log(z)};
    }
    if (!(x0 > 0)) throw DomainError("series start requires x0 > 0");
    if (series_dropped_term(op, mu2, x0) > 1e-9) {
        throw SeriesRadiusExceeded("x0 = " + std::to_string(x0) + " is outside the series radius");
    }
    double s = op.k + 0.5;
    double a2 = (frobenius_c0(op) - mu2) / (4.0 * s + 2.0);
    double x2 = x0 * x0;
    return {x0, 1.0 + a2 * x2, (s + (s + 2.0) * a2 * x2) / x0, s * std::log(x0)};
}

StartData regular_start(const OperatorSpec& op, double mu2) {
    return series_start(op, mu2, default_start_point(op, mu2));
}

double ShootingTrace::phi_relative(size_t i, double reference_log_scale) const {
    return phi[i] * std::exp(log_scale[i] - reference_log_scale);
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct Vec2 {
    double a = 0, b = 0;
};
inline Vec2 operator+(Vec2 u, Vec2 v) { return {u.a + v.a, u.b + v.b}; }
inline Vec2 operator-(Vec2 u, Vec2 v) { return {u.a - v.a, u.b - v.b}; }
inline Vec2 operator*(double s, Vec2 u) { return {s * u.a, s * u.b}; }

struct Rhs {
    const OperatorSpec& op;
    double mu2;
    Vec2 operator()(double x, Vec2 y) const {
        ShootingCoefficients c = shooting_coefficients(op, x);
        return {c.alpha * y.b, c.alpha * (c.q - mu2) * y.a};
    }
};

struct Dense {
    Vec2 r1, r2, r3, r4, r5;
    Vec2 at(double th) const {
        double th1 = 1.0 - th;
        return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
    }
};

double error_norm(Vec2 e, Vec2 y0, Vec2 y1, double atol, double rtol) {
    double sa = atol + rtol * std::max(std::abs(y0.a), std::abs(y1.a));
    double sb = atol + rtol * std::max(std::abs(y0.b), std::abs(y1.b));
    double ea = e.a / sa, eb = e.b / sb;
    return std::sqrt(0.5 * (ea * ea + eb * eb));
}

double initial_step(const Rhs& f, double x, Vec2 y, Vec2 f0, double dir, double hmax,
                    double atol, double rtol) {
    double sa = atol + rtol * std::abs(y.a), sb = atol + rtol * std::abs(y.b);
    double dnf = (f0.a / sa) * (f0.a / sa) + (f0.b / sb) * (f0.b / sb);
    double dny = (y.a / sa) * (y.a / sa) + (y.b / sb) * (y.b / sb);
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, hmax);
    Vec2 y1 = y + (dir * h) * f0;
    Vec2 f1 = f(x + dir * h, y1);
    Vec2 df = f1 - f0;
    double der2 = std::sqrt((df.a / sa) * (df.a / sa) + (df.b / sb) * (df.b / sb)) / h;
    double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100 * h, h1, hmax});
}

}  // namespace

ShootingTrace integrate(const OperatorSpec& op, double mu2, const StartData& start, double x_end,
                        const IntegratorOptions& options) {
    if (op.family != OperatorFamily::LargeK) {
        if (!(start.x > 0) || !(x_end > 0) || !std::isfinite(x_end)) {
            throw DomainError("integration interval must lie in (0, inf)");
        }
    } else if (!std::isfinite(start.x) || !std::isfinite(x_end)) {
        throw DomainError("integration interval must be finite");
    }
    if (start.x == x_end) throw DomainError("start and end coincide");

    const double dir = x_end > start.x ? 1.0 : -1.0;
    const double atol = options.atol, rtol = options.rtol;
    Rhs f{op, mu2};

    ShootingTrace tr;
    tr.direction = dir > 0 ? Direction::Forward : Direction::Backward;
    tr.mu2 = mu2;

    double x = start.x;
    Vec2 y{start.phi, start.pi};
    double ls = start.log_scale;
    auto rescale_if_needed = [&](Vec2& k1) {
        double mag = std::max(std::abs(y.a), std::abs(y.b));
        if (mag > 1e100 || (mag > 0 && mag < 1e-100)) {
            y = (1.0 / mag) * y;
            k1 = (1.0 / mag) * k1;
            ls += std::log(mag);
            tr.scale_ledger.push_back({tr.grid.size(), std::log(mag)});
        }
    };
    auto record = [&](double xs, Vec2 ys) {
        tr.grid.push_back(xs);
        tr.phi.push_back(ys.a);
        tr.pi.push_back(ys.b);
        tr.log_scale.push_back(ls);
    };

    Vec2 k1 = f(x, y);
    rescale_if_needed(k1);

    const bool dense_samples = !options.sample_at.empty();
    size_t next_sample = 0;
    if (dense_samples) {
        while (next_sample < options.sample_at.size() &&
               dir * (options.sample_at[next_sample] - x) <= 0) {
            if (options.sample_at[next_sample] == x) record(x, y);
            ++next_sample;
        }
    } else {
        record(x, y);
    }

    double h = initial_step(f, x, y, k1, dir, std::abs(x_end - x), atol, rtol);
    int last_sign = y.a > 0 ? 1 : (y.a < 0 ? -1 : 0);
    size_t steps = 0;

    while (dir * (x_end - x) > 0) {
        if (++steps > options.max_steps) throw StepSizeUnderflow("step budget exhausted");
        bool last = false;
        if (h >= std::abs(x_end - x)) {
            h = std::abs(x_end - x);
            last = true;
        }
        const double hs = dir * h;
        Vec2 k2 = f(x + c2 * hs, y + hs * (a21 * k1));
        Vec2 k3 = f(x + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        Vec2 k4 = f(x + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        Vec2 k5 = f(x + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Vec2 k6 = f(x + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Vec2 y1 = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        double x1 = last ? x_end : x + hs;
        Vec2 k7 = f(x1, y1);
        Vec2 err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double en = error_norm(err, y, y1, atol, rtol);

        if (!std::isfinite(en)) {
            h *= 0.2;
        } else if (en <= 1.0) {
            Dense dense;
            dense.r1 = y;
            dense.r2 = y1 - y;
            dense.r3 = hs * k1 - dense.r2;
            dense.r4 = dense.r2 - hs * k7 - dense.r3;
            dense.r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

            int sign = y1.a > 0 ? 1 : (y1.a < 0 ? -1 : 0);
            if (sign != 0 && last_sign != 0 && sign != last_sign) {
                double lo = 0, hi = 1;
                double flo = dense.at(0).a;
                while ((hi - lo) * h > 1e-11) {
                    double mid = 0.5 * (lo + hi);
                    double fm = dense.at(mid).a;
                    if ((fm > 0) == (flo > 0) && fm != 0) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                tr.zeros.push_back(x + 0.5 * (lo + hi) * hs);
                ++tr.zero_count;
            }
            if (sign != 0) last_sign = sign;

            if (dense_samples) {
                while (next_sample < options.sample_at.size() &&
                       dir * (options.sample_at[next_sample] - x1) <= 0) {
                    double xs = options.sample_at[next_sample];
                    double th = last && xs == x_end ? 1.0 : (xs - x) / hs;
                    record(xs, th >= 1.0 ? y1 : dense.at(th));
                    ++next_sample;
                }
            }
            x = x1;
            y = y1;
            k1 = k7;
            ++tr.steps;
            if (!dense_samples) record(x, y);
            rescale_if_needed(k1);
            double fac = en == 0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            h *= fac;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
        }
        if (h < 1e-14 * std::max(1.0, std::abs(x))) {
            throw StepSizeUnderflow("step size underflow at x = " + std::to_string(x));
        }
    }
    tr.end_x = x;
    tr.end_phi = y.a;
    tr.end_pi = y.b;
    tr.end_log_scale = ls;
    return tr;
}

StartData tail_start_decaying(const OperatorSpec& op, double mu2, double R) {
    double qinf = shooting_threshold(op);
    double m2 = qinf - mu2;
    if (!(m2 > 0)) throw TailNotAsymptotic("no decaying branch at or above the threshold");
    ShootingCoefficients c = shooting_coefficients(op, R);
    if (!(std::abs(c.q - qinf) < 1e-12 * m2)) {
        throw TailNotAsymptotic("potential tail not negligible at R = " + std::to_string(R));
    }
    double m = std::sqrt(m2);
    return {R, 1.0, -m / c.alpha, -m * R};
}

ThresholdFit fit_threshold(const ShootingTrace& tr, std::pair<double, double> window) {
    auto [w0, w1] = window;
    if (w0 > w1) std::swap(w0, w1);
    std::vector<size_t> idx;
    for (size_t i = 0; i < tr.grid.size(); ++i) {
        if (tr.grid[i] >= w0 && tr.grid[i] <= w1) idx.push_back(i);
    }
    if (idx.size() < 3) throw FitUnreliable("fewer than three samples in the fit window");
    double ref = tr.log_scale[idx.back()];
    double n = idx.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i : idx) {
        double xv = tr.grid[i], yv = tr.phi_relative(i, ref);
        sx += xv;
        sy += yv;
        sxx += xv * xv;
        sxy += xv * yv;
    }
    double det = n * sxx - sx * sx;
    ThresholdFit fit;
    fit.b = (n * sxy - sx * sy) / det;
    fit.a = (sy - fit.b * sx) / n;
    fit.window = {w0, w1};
    fit.log_scale = ref;
    double ss = 0;
    for (size_t i : idx) {
        double d = tr.phi_relative(i, ref) - fit.a - fit.b * tr.grid[i];
        ss += d * d;
    }
    double denom = std::max({std::abs(fit.a), std::abs(fit.b) * (w1 - w0), 1e-300});
    fit.fit_residual = std::sqrt(ss / n) / denom;
    if (!(fit.fit_residual < 1e-6)) {
        throw FitUnreliable("residual " + std::to_string(fit.fit_residual) +
                            " shows the asymptotic regime was not reached");
    }
    return fit;
}

namespace {

// Panels [e_j, e_{j+1}] with their midpoints; geometric near the origin.
std::vector<double> volterra_nodes(double rho_a, double rho_max, double h_max,
                                   std::vector<double> required) {
    std::vector<double> ends{rho_a};
    while (ends.back() < rho_max) {
        double e = ends.back();
        ends.push_back(std::min(rho_max, e + std::min(0.02 * e, h_max)));
    }
    for (double p : required) {
        if (p > rho_a && p < rho_max) ends.push_back(p);
    }
    std::sort(ends.begin(), ends.end());
    std::vector<double> clean{ends.front()};
    for (size_t i = 1; i < ends.size(); ++i) {
        if (ends[i] - clean.back() > 1e-9 * ends[i]) clean.push_back(ends[i]);
    }
    clean.back() = rho_max;
    std::vector<double> nodes;
    for (size_t i = 0; i + 1 < clean.size(); ++i) {
        nodes.push_back(clean[i]);
        nodes.push_back(0.5 * (clean[i] + clean[i + 1]));
    }
    nodes.push_back(clean.back());
    return nodes;
}

// Cumulative Simpson integral over panels (a, m, b) = nodes (2p, 2p+1, 2p+2).
void cumulative_simpson(const std::vector<double>& x, const std::vector<double>& f, double init,
                        std::vector<double>& out) {
    out.assign(x.size(), 0.0);
    out[0] = init;
    for (size_t a = 0; a + 2 < x.size(); a += 2) {
        double h = 0.5 * (x[a + 2] - x[a]);
        out[a + 1] = out[a] + h / 12.0 * (5 * f[a] + 8 * f[a + 1] - f[a + 2]);
        out[a + 2] = out[a] + h / 3.0 * (f[a] + 4 * f[a + 1] + f[a + 2]);
    }
}

}  // namespace

RenormalizedSolution renormalized_f(const GeometrySpec& geo, double mu2, double rho_max,
                                    const IntegratorOptions& options) {
    if (!(geo.lambda > 0)) throw DomainError("renormalization requires lambda > 0");
    if (!(rho_max > 0)) throw DomainError("rho_max must be > 0");
    const double l = geo.lambda;
    const int k = geo.k;
    const double c = 4.0 * mu2 / (l * l);
    OperatorSpec op = OperatorSpec::rescaled(geo);

    double rho_a = default_start_point(op, c);
    if (rho_a >= rho_max) throw DomainError("rho_max below the series start point");
    std::vector<double> required;
    if (l > 1) required.push_back(l * std::atanh(1.0 / l));
    required.push_back(l);
    std::vector<double> x = volterra_nodes(rho_a, rho_max, 0.01 * std::min(1.0, 0.5 * l), required);
    const size_t n = x.size();

    RenormalizedSolution sol;
    sol.grid = x;
    sol.lambda = l;
    sol.mu2 = mu2;
    sol.zeta.resize(n);
    std::vector<double> z2(n);
    for (size_t i = 0; i < n; ++i) {
        sol.zeta[i] = zero_mode(geo, ZeroModeCoordinate::RescaledRho, x[i]);
        z2[i] = sol.zeta[i] * sol.zeta[i];
    }

    // Leading small-rho behaviour on [0, rho_a]: zeta^2 ~ rho^{2k+1}.
    const double kappa = 2.0 * k + 2.0;
    std::vector<double> f(n, 1.0), g(n), inner(n), ratio(n), outer(n);
    double diff = std::numeric_limits<double>::infinity();
    int sweeps = 0;
    while (diff >= 1e-10) {
        if (++sweeps > 5000) throw VolterraDiverged("no contraction after 5000 sweeps");
        for (size_t i = 0; i < n; ++i) g[i] = z2[i] * f[i];
        cumulative_simpson(x, g, z2[0] * rho_a / kappa * f[0], inner);
        for (size_t i = 0; i < n; ++i) ratio[i] = inner[i] / z2[i];
        cumulative_simpson(x, ratio, rho_a * rho_a / (2.0 * kappa), outer);
        diff = 0;
        for (size_t i = 0; i < n; ++i) {
            double fn = 1.0 - c * outer[i];
            if (!std::isfinite(fn)) throw VolterraDiverged("non-finite iterate");
            diff = std::max(diff, std::abs(fn - f[i]));
            f[i] = fn;
        }
        if (diff > 1e200) throw VolterraDiverged("iterates grow without bound");
    }
    for (size_t i = 0; i < n; ++i) g[i] = z2[i] * f[i];
    cumulative_simpson(x, g, z2[0] * rho_a / kappa * f[0], inner);
    sol.f = f;
    sol.f_prime.resize(n);
    for (size_t i = 0; i < n; ++i) sol.f_prime[i] = -c * inner[i] / z2[i];
    sol.sweeps = sweeps;

    // Independent route: shoot the rescaled operator and divide by zeta.
    IntegratorOptions opt = options;
    opt.sample_at = x;
    ShootingTrace tr = integrate(op, c, series_start(op, c, rho_a), rho_max, opt);
    const double log_lead = std::log(2.0 * std::sqrt(2.0) * k * std::pow(l, -1.5));
    sol.f_shooting.resize(n);
    double fmax = 1.0;
    for (double v : f) fmax = std::max(fmax, std::abs(v));
    for (size_t i = 0; i < n; ++i) {
        double logz = std::log(sol.zeta[i]);
        sol.f_shooting[i] = tr.phi[i] * std::exp(tr.log_scale[i] - logz + log_lead);
        sol.max_discrepancy =
            std::max(sol.max_discrepancy, std::abs(sol.f_shooting[i] - f[i]) / fmax);
    }
    return sol;
}

RenormalizationClaims check_renormalization_claims(const GeometrySpec& geo,
                                                   const RenormalizedSolution& sol) {
    RenormalizationClaims out;
    const double l = sol.lambda;
    const int k = geo.k;
    out.limit_bound = 1.0 - std::pow(l, 2 * k - 2) * (1.0 - std::pow(l, -2 * k)) / (32.0 * k * (k + 1));
    const auto& x = sol.grid;
    for (size_t i = 1; i < x.size(); ++i) {
        if (sol.f[i] < 0 && sol.f[i - 1] >= 0) {
            double t = sol.f[i - 1] / (sol.f[i - 1] - sol.f[i]);
            out.sign_change_rho = x[i - 1] + t * (x[i] - x[i - 1]);
            break;
        }
    }
    out.sign_change_before_lambda = out.sign_change_rho && *out.sign_change_rho < l;
    if (!(l > 1)) return out;
    out.rho0 = l * std::atanh(1.0 / l);
    size_t i0 = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - out.rho0) < best) {
            best = std::abs(x[i] - out.rho0);
            i0 = i;
        }
    }
    out.min_f_on_rho0 = 1.0;
    for (size_t i = 0; i <= i0; ++i) out.min_f_on_rho0 = std::min(out.min_f_on_rho0, sol.f[i]);
    out.f_at_least_half = out.min_f_on_rho0 >= 0.5;
    out.f_prime_rho0 = sol.f_prime[i0];
    double z0 = sol.zeta[i0];
    out.f_prime_bound = (double(k) * k / (2.0 * k + 2.0)) * std::pow(l, -5) / (z0 * z0);
    out.f_prime_claim = std::abs(out.f_prime_rho0) >= out.f_prime_bound;
    return out;
}

}  // namespace gapspec
