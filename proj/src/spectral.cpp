#include "gapspec/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "gapspec/errors.hpp"

namespace gapspec {

namespace {

constexpr double gap_top = 0.25;
constexpr double threshold_eps = 1e-8;
constexpr double bracket_width = 1e-10;

IntegratorOptions integrator_options(const SpectralOptions& o) {
    IntegratorOptions io;
    io.rtol = o.rtol;
    io.atol = o.atol;
    return io;
}

double native_energy(const OperatorSpec& op, double mu2) { return mu2 * op.energy_scale(); }

double native_length(const OperatorSpec& op, double R) {
    return op.family == OperatorFamily::LargeK ? R : R * op.length_scale();
}

std::vector<double> uniform(double a, double b, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
    x.back() = b;
    return x;
}

void require_gap_family(const OperatorSpec& op) {
    if (op.family == OperatorFamily::Euclidean) {
        throw DomainError("the flat operator has no spectral gap");
    }
}

double matching_point(const OperatorSpec& op, double E, double x0, double xR) {
    const int n = 4000;
    bool geometric = op.family != OperatorFamily::LargeK;
    double best = x0, best_q = std::numeric_limits<double>::infinity();
    std::optional<double> last_allowed;
    for (int i = 0; i <= n; ++i) {
        double x = geometric ? x0 * std::pow(xR / x0, double(i) / n) : x0 + (xR - x0) * i / n;
        double d = shooting_coefficients(op, x).q - E;
        if (d < 0) last_allowed = x;
        if (d < best_q) {
            best_q = d;
            best = x;
        }
    }
    return last_allowed.value_or(best);
}

}  // namespace

double truncation_radius(double mu2, const SpectralOptions& options) {
    double m2 = gap_top - mu2;
    double R = m2 > 0 ? std::min(200.0, std::max(60.0, 40.0 / std::sqrt(m2))) : 200.0;
    return R * options.R_factor;
}

int count_eigenvalues_below(const OperatorSpec& op, double mu2, double R,
                            const SpectralOptions& options) {
    const double E = native_energy(op, mu2);
    const double xR = native_length(op, R);
    ShootingTrace tr = integrate(op, E, regular_start(op, E), xR, integrator_options(options));
    double m = std::sqrt(std::max(shooting_threshold(op) - E, 0.0));
    double slope = shooting_coefficients(op, xR).alpha * tr.end_pi;
    int extra = 0;
    if (tr.end_phi != 0 && slope / tr.end_phi < -m) extra = 1;
    return tr.zero_count + extra;
}

int count_eigenvalues_below(const OperatorSpec& op, double mu2, const SpectralOptions& options) {
    return count_eigenvalues_below(op, mu2, truncation_radius(mu2, options), options);
}

ThresholdFit threshold_fit(const OperatorSpec& op, const SpectralOptions& options) {
    const double E = shooting_threshold(op);
    const double xR = native_length(op, options.threshold_R);
    StartData st = regular_start(op, E);
    IntegratorOptions io = integrator_options(options);
    io.sample_at = uniform(0.5 * xR, xR, 201);
    if (io.sample_at.front() <= st.x) throw DomainError("threshold window overlaps the start");
    ShootingTrace tr = integrate(op, E, st, xR, io);
    return fit_threshold(tr, {0.5 * xR, xR});
}

MatchResult match_wronskian(const OperatorSpec& op, double mu2, const SpectralOptions& options) {
    const double E = native_energy(op, mu2);
    const double m = std::sqrt(shooting_threshold(op) - E);
    if (!(m > 0)) throw DomainError("matching requires mu2 below the threshold");
    MatchResult out;
    out.R = truncation_radius(mu2, options);
    const double xR = native_length(op, out.R);
    IntegratorOptions io = integrator_options(options);
    StartData fs = regular_start(op, E);
    out.matching_point = matching_point(op, E, fs.x, xR);
    ShootingTrace fw = integrate(op, E, fs, out.matching_point, io);
    ShootingTrace bw = integrate(op, E, tail_start_decaying(op, E, xR), out.matching_point, io);
    double pf = fw.end_phi, qf = fw.end_pi, pb = bw.end_phi, qb = bw.end_pi;
    double w = pf * qb - qf * pb;
    double nf = std::hypot(pf, qf / m), nb = std::hypot(pb, qb / m);
    out.wronskian = w / (nf * nb * m);
    out.residual = std::abs(w) / (std::abs(pf * pb) * m);
    return out;
}

bool negative_scan(const OperatorSpec& op, const SpectralOptions& options) {
    for (double mu2 : {-4.0, -1.0, -0.25, -1e-3}) {
        if (count_eigenvalues_below(op, mu2, options) != 0) return false;
    }
    return true;
}

bool embedded_scan(const OperatorSpec& op, const SpectralOptions& options) {
    const double xR = native_length(op, options.threshold_R);
    for (double mu2 : {0.3, 0.4, 0.5, 0.625, 0.75, 0.875, 1.0}) {
        const double E = native_energy(op, mu2);
        const double kappa = std::sqrt(E - shooting_threshold(op));
        StartData st = regular_start(op, E);
        IntegratorOptions io = integrator_options(options);
        io.sample_at = uniform(st.x, xR, 2001);
        ShootingTrace tr = integrate(op, E, st, xR, io);
        const double ref = tr.end_log_scale;
        double peak = 0, amax = 0, amin = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < tr.grid.size(); ++i) {
            double s = std::exp(tr.log_scale[i] - ref);
            peak = std::max(peak, std::abs(tr.phi[i]) * s);
            if (tr.grid[i] < 0.5 * xR) continue;
            double alpha = shooting_coefficients(op, tr.grid[i]).alpha;
            double a = s * std::hypot(tr.phi[i], alpha * tr.pi[i] / kappa);
            amax = std::max(amax, a);
            amin = std::min(amin, a);
        }
        if (!(amax / amin <= 1.0 + 1e-6) || amax < 1e-8 * peak) return false;
    }
    return true;
}

SpectralReport find_gap_eigenvalues(const OperatorSpec& op, const SpectralOptions& options) {
    require_gap_family(op);
    SpectralReport rep;
    rep.op = op;
    rep.negative_scan_clear = negative_scan(op, options);
    rep.embedded_scan_clear = embedded_scan(op, options);
    if (!rep.negative_scan_clear) rep.notes.push_back("negative scan found a sign change");
    if (!rep.embedded_scan_clear) rep.notes.push_back("embedded scan found a non-oscillatory tail");

    ThresholdFit fit;
    SpectralOptions wide = options;
    try {
        fit = threshold_fit(op, options);
    } catch (const FitUnreliable&) {
        wide.threshold_R = 2 * options.threshold_R;
        fit = threshold_fit(op, wide);
        rep.notes.push_back("threshold fit needed a doubled window");
    }
    double norm = std::hypot(fit.a, fit.b);
    rep.resonance_a = fit.a / norm;
    rep.resonance_b = fit.b / norm;
    rep.resonance_fit_residual = fit.fit_residual;

    const double top = gap_top - threshold_eps;
    const int n_top = count_eigenvalues_below(op, top, options);
    const int n_thr = count_eigenvalues_below(op, gap_top, wide.threshold_R, wide);

    for (int j = 0; j < n_top; ++j) {
        double lo = 0, hi = top;
        if (count_eigenvalues_below(op, lo, options) > j) {
            throw InconsistentCertificate("count at zero energy is positive");
        }
        while (hi - lo > bracket_width) {
            double mid = 0.5 * (lo + hi);
            (count_eigenvalues_below(op, mid, options) > j ? hi : lo) = mid;
        }
        // secant on the Wronskian, kept inside the bracket
        double a = lo, b = hi;
        double wa = match_wronskian(op, a, options).wronskian;
        MatchResult mb = match_wronskian(op, b, options);
        double wb = mb.wronskian;
        for (int it = 0; it < 40 && mb.residual >= 1e-13; ++it) {
            double x = wb != wa ? b - wb * (b - a) / (wb - wa) : 0.5 * (lo + hi);
            if (!(x >= lo - bracket_width && x <= hi + bracket_width)) x = 0.5 * (lo + hi);
            if (x == b) break;
            MatchResult mx = match_wronskian(op, x, options);
            a = b;
            wa = wb;
            b = x;
            wb = mx.wronskian;
            mb = mx;
            if (std::abs(b - a) < 1e-16) break;
        }
        GapEigenvalue ev;
        ev.mu2 = b;
        ev.wronskian_residual = mb.residual;
        ev.R_used = mb.R;
        ev.matching_point = mb.matching_point;
        ev.bracket = {lo, hi};
        ev.certificate = {count_eigenvalues_below(op, b - bracket_width, options),
                          count_eigenvalues_below(op, b + bracket_width, options)};
        if (ev.certificate != std::make_pair(j, j + 1)) {
            throw InconsistentCertificate("oscillation counts " +
                                          std::to_string(ev.certificate.first) + "/" +
                                          std::to_string(ev.certificate.second) + " around mu2 = " +
                                          std::to_string(b));
        }
        if (!(ev.wronskian_residual < 1e-8)) {
            throw InconsistentCertificate("Wronskian residual " +
                                          std::to_string(ev.wronskian_residual) +
                                          " at the oscillation bracket");
        }
        rep.eigenvalues.push_back(ev);
    }
    if (n_thr > n_top) {
        GapEigenvalue ev;
        ev.near_threshold = true;
        ev.bracket = {top, gap_top};
        ev.mu2 = 0.5 * (top + gap_top);
        ev.R_used = wide.threshold_R;
        ev.certificate = {n_top, n_thr};
        rep.eigenvalues.push_back(ev);
        rep.notes.push_back("eigenvalue within 1e-8 of the threshold; reported as a bracket");
    }
    if (rep.eigenvalues.size() > 1) {
        rep.simplicity_violation = true;
        rep.notes.push_back("more than one gap eigenvalue");
    }
    return rep;
}

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& f) {
    size_t workers = jobs > 0 ? size_t(jobs) : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t i; (i = next++) < n;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

GeometrySpec make_geometry(GeometryKind kind, int k, double lambda) {
    return kind == GeometryKind::Sphere ? GeometrySpec::sphere(k, lambda)
                                        : GeometrySpec::yang_mills(lambda);
}

double b_at(GeometryKind kind, int k, double lambda, const SpectralOptions& options) {
    ThresholdFit fit = threshold_fit(OperatorSpec::half_line(make_geometry(kind, k, lambda)), options);
    return fit.b / std::hypot(fit.a, fit.b);
}

bool has_gap_eigenvalue(GeometryKind kind, int k, double lambda, const SpectralOptions& options) {
    OperatorSpec op = OperatorSpec::half_line(make_geometry(kind, k, lambda));
    return count_eigenvalues_below(op, gap_top - threshold_eps, options) > 0;
}

template <class Pred>
std::pair<double, double> refine(double lo, double hi, Pred is_hi) {
    while (hi - lo > 1e-4) {
        double mid = 0.5 * (lo + hi);
        (is_hi(mid) ? hi : lo) = mid;
    }
    return {lo, hi};
}

}  // namespace

SweepReport sweep_lambda(GeometryKind kind, int k, const std::vector<double>& lambdas, int jobs,
                         const SpectralOptions& options) {
    SweepReport rep;
    rep.kind = kind;
    rep.k = kind == GeometryKind::Sphere ? k : 2;
    rep.lambda_grid = lambdas;
    rep.indicator.resize(lambdas.size());
    parallel_for(lambdas.size(), jobs, [&](size_t i) {
        SpectralReport r =
            find_gap_eigenvalues(OperatorSpec::half_line(make_geometry(kind, k, lambdas[i])), options);
        SweepPoint p;
        p.lambda = lambdas[i];
        p.resonance_b = r.resonance_b;
        if (!r.eigenvalues.empty()) p.gap_eigenvalue = r.eigenvalues.front().mu2;
        rep.indicator[i] = p;
    });
    for (size_t i = 0; i + 1 < rep.indicator.size(); ++i) {
        const auto& p = rep.indicator[i];
        const auto& q = rep.indicator[i + 1];
        if (!rep.lambda_sup_bracket && (p.resonance_b > 0) != (q.resonance_b > 0)) {
            bool lo_positive = p.resonance_b > 0;
            rep.lambda_sup_bracket = refine(p.lambda, q.lambda, [&](double l) {
                return (b_at(kind, k, l, options) > 0) != lo_positive;
            });
        }
        if (!rep.Lambda_inf_bracket && !p.gap_eigenvalue && q.gap_eigenvalue) {
            rep.Lambda_inf_bracket = refine(p.lambda, q.lambda, [&](double l) {
                return has_gap_eigenvalue(kind, k, l, options);
            });
        }
    }
    return rep;
}

SweepReport sweep_lambda(GeometryKind kind, int k, double lambda_min, double lambda_max, int steps,
                         int jobs, const SpectralOptions& options) {
    if (!(lambda_min >= 0) || !(lambda_min < lambda_max) || steps < 2) {
        throw DomainError("sweep requires 0 <= lambda_min < lambda_max and steps >= 2");
    }
    return sweep_lambda(kind, k, uniform(lambda_min, lambda_max, steps), jobs, options);
}

MigrationCurve migration_curve(GeometryKind kind, int k, const std::vector<double>& lambdas,
                               int jobs, const SpectralOptions& options) {
    MigrationCurve curve;
    curve.kind = kind;
    curve.k = kind == GeometryKind::Sphere ? k : 2;
    std::vector<std::optional<MigrationPoint>> pts(lambdas.size());
    parallel_for(lambdas.size(), jobs, [&](size_t i) {
        SpectralReport r =
            find_gap_eigenvalues(OperatorSpec::half_line(make_geometry(kind, k, lambdas[i])), options);
        if (r.eigenvalues.empty()) return;
        const GapEigenvalue& ev = r.eigenvalues.front();
        pts[i] = MigrationPoint{lambdas[i], ev.mu2, ev.wronskian_residual, ev.R_used};
    });
    for (size_t i = 0; i < pts.size(); ++i) {
        if (!pts[i]) {
            throw EigenvalueMissing("no gap eigenvalue at lambda = " + std::to_string(lambdas[i]));
        }
        curve.points.push_back(*pts[i]);
    }
    curve.strictly_decreasing = true;
    for (size_t i = 1; i < curve.points.size(); ++i) {
        if (!(curve.points[i].mu2 < curve.points[i - 1].mu2)) curve.strictly_decreasing = false;
    }
    for (const auto& p : curve.points) {
        for (const auto& q : curve.points) {
            if (std::abs(q.lambda - 2 * p.lambda) < 1e-12 * q.lambda) {
                curve.doubling_ratios.emplace_back(p.lambda, q.mu2 / p.mu2);
            }
        }
    }
    return curve;
}

SpectralReport largek_gap_scan(int k, double theta, const SpectralOptions& options) {
    return find_gap_eigenvalues(OperatorSpec::large_k(k, theta), options);
}

}  // namespace gapspec
