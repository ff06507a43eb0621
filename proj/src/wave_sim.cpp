#include "gapspec/wave_sim.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>

#include "gapspec/errors.hpp"
#include "gapspec/ode_engine.hpp"

namespace gapspec {

namespace {

// x - sin x
double x_minus_sin(double x) {
    if (std::abs(x) > 0.1) return x - std::sin(x);
    double x2 = x * x;
    return x * x2 / 6.0 * (1 - x2 / 20.0 * (1 - x2 / 42.0 * (1 - x2 / 72.0 * (1 - x2 / 110.0))));
}

// (g g')(Q + d) - (g g')(Q) - (g g')'(Q) d
double gg_remainder(const GeometrySpec& geo, double Q, double d) {
    if (geo.is_sphere()) {
        double s = std::sin(d);
        return 0.5 * (-2.0 * std::sin(2 * Q) * s * s - std::cos(2 * Q) * x_minus_sin(2 * d));
    }
    return 1.5 * (Q - 1.0) * d * d + 0.5 * d * d * d;
}

struct LogSample {
    double log_abs;
    int sign;
};

std::vector<LogSample> log_samples(const ShootingTrace& tr, double shift) {
    std::vector<LogSample> out;
    for (size_t i = 0; i < tr.grid.size(); ++i) {
        double p = tr.phi[i];
        out.push_back({p == 0 ? -INFINITY : std::log(std::abs(p)) + tr.log_scale[i] + shift,
                       p > 0 ? 1 : (p < 0 ? -1 : 0)});
    }
    return out;
}

std::vector<double> eigenmode_profile(const GeometrySpec& geo, const std::vector<double>& r,
                                      std::optional<double> requested_mu2) {
    OperatorSpec op = OperatorSpec::half_line(geo);
    SpectralReport rep = find_gap_eigenvalues(op);
    if (rep.eigenvalues.empty()) {
        throw NoEigenmode("no gap eigenvalue for " + geo.label() + " lambda = " +
                          std::to_string(geo.lambda));
    }
    const GapEigenvalue& ev = rep.eigenvalues.front();
    if (ev.near_threshold) throw NoEigenmode("gap eigenvalue too close to the threshold");
    double mu2 = requested_mu2.value_or(ev.mu2);
    if (requested_mu2 && std::abs(*requested_mu2 - ev.mu2) > 1e-8) {
        throw NoEigenmode("requested mu2 is not a certified eigenvalue");
    }
    const double m = std::sqrt(0.25 - mu2);
    const double xm = ev.matching_point, R_sp = ev.R_used;
    StartData fs = regular_start(op, mu2);

    std::vector<double> fwd_pts, bwd_pts;
    for (double x : r) {
        if (x >= fs.x && x <= xm) fwd_pts.push_back(x);
        if (x > xm && x <= R_sp) bwd_pts.push_back(x);
    }
    std::reverse(bwd_pts.begin(), bwd_pts.end());

    IntegratorOptions io;
    io.sample_at = fwd_pts;
    ShootingTrace fw = integrate(op, mu2, fs, xm, io);
    io.sample_at = bwd_pts;
    StartData ts = tail_start_decaying(op, mu2, R_sp);
    ShootingTrace bw = integrate(op, mu2, ts, xm, io);

    // match the two branches at the matching point
    double shift = std::log(std::abs(bw.end_phi)) + bw.end_log_scale -
                   std::log(std::abs(fw.end_phi)) - fw.end_log_scale;
    int flip = (bw.end_phi > 0) == (fw.end_phi > 0) ? 1 : -1;
    std::vector<LogSample> fl = log_samples(fw, 0.0), bl = log_samples(bw, -shift);
    for (auto& s : bl) s.sign *= flip;
    std::reverse(bl.begin(), bl.end());
    const LogSample tail{std::log(std::abs(fw.end_phi)) + fw.end_log_scale, fw.end_phi > 0 ? 1 : -1};

    std::vector<LogSample> all(r.size(), LogSample{-INFINITY, 0});
    size_t fi = 0, bi = 0;
    double log_end = bl.empty() ? tail.log_abs : bl.back().log_abs;
    int sign_end = bl.empty() ? tail.sign : bl.back().sign;
    double x_end = bl.empty() ? xm : bwd_pts.front();
    for (size_t i = 0; i < r.size(); ++i) {
        if (r[i] == 0) continue;
        if (r[i] < fs.x) {
            all[i] = {std::log(std::abs(fs.phi)) + fs.log_scale +
                          (op.frobenius_exponent()) * std::log(r[i] / fs.x),
                      1};
        } else if (r[i] <= xm) {
            all[i] = fl[fi++];
        } else if (r[i] <= R_sp) {
            all[i] = bl[bi++];
        } else {
            all[i] = {log_end - m * (r[i] - x_end), sign_end};
        }
    }
    double lmax = -INFINITY;
    for (auto& s : all) lmax = std::max(lmax, s.log_abs);
    std::vector<double> w(r.size(), 0.0);
    for (size_t i = 0; i < r.size(); ++i) w[i] = all[i].sign * std::exp(all[i].log_abs - lmax);
    return w;
}

// Flux form -zeta^{-1} D(zeta^2 D(w / zeta)) when a positive zero mode exists;
// it annihilates the sampled zero mode and has no spurious negative modes.
double operator_row(const WaveState& s, size_t i) {
    const double ih2 = 1.0 / (s.h * s.h);
    if (s.zeta.empty()) return -(s.w[i + 1] - 2 * s.w[i] + s.w[i - 1]) * ih2 + s.q[i] * s.w[i];
    double right = s.zeta_mid[i] * s.zeta_mid[i] * (s.w[i + 1] / s.zeta[i + 1] - s.w[i] / s.zeta[i]);
    double left = i == 1 ? 0.0
                         : s.zeta_mid[i - 1] * s.zeta_mid[i - 1] *
                               (s.w[i] / s.zeta[i] - s.w[i - 1] / s.zeta[i - 1]);
    return -(right - left) * ih2 / s.zeta[i];
}

void compute_accel(WaveState& s) {
    const size_t n = s.w.size();
    s.accel.assign(n, 0.0);
    const int k = s.geometry.k;
    for (size_t i = 1; i + 1 < n; ++i) {
        double a = -operator_row(s, i);
        if (s.mode == WaveMode::Nonlinear) {
            double sh = s.sinh_r[i];
            double d = s.w[i] / std::sqrt(sh);
            a -= k * k * gg_remainder(s.geometry, s.Q[i], d) / (sh * std::sqrt(sh));
        }
        s.accel[i] = a;
    }
}

// Gershgorin bound on the largest eigenvalue of the discrete operator.
double operator_bound(const WaveState& s) {
    const double ih2 = 1.0 / (s.h * s.h);
    if (s.zeta.empty()) return 4.0 * ih2 + std::max(s.q_max, 0.0);
    double bound = 0;
    for (size_t i = 1; i + 1 < s.w.size(); ++i) {
        double zr = s.zeta_mid[i] * s.zeta_mid[i], zl = i == 1 ? 0.0 : s.zeta_mid[i - 1] * s.zeta_mid[i - 1];
        double zi = s.zeta[i];
        double row = (zr + zl) / (zi * zi) + zr / (zi * s.zeta[i + 1]) +
                     (i == 1 ? 0.0 : zl / (zi * s.zeta[i - 1]));
        bound = std::max(bound, row * ih2);
    }
    return bound;
}

}  // namespace

WaveState init_state(const GeometrySpec& geo, WaveMode mode, double R, int points,
                     const InitialData& initial) {
    if (points < 512) throw DomainError("wave grid needs at least 512 points");
    if (!(R >= 40)) throw DomainError("wave domain needs R >= 40");
    WaveState s;
    s.geometry = geo;
    s.mode = mode;
    s.h = R / (points - 1);
    s.grid.resize(points);
    for (int i = 0; i < points; ++i) s.grid[i] = i * s.h;
    s.grid.back() = R;

    OperatorSpec op = OperatorSpec::half_line(geo);
    s.q.assign(points, 0.0);
    s.sinh_r.assign(points, 0.0);
    s.Q.assign(points, 0.0);
    for (int i = 1; i < points; ++i) {
        s.q[i] = effective_potential(op, s.grid[i]);
        s.sinh_r[i] = std::sinh(s.grid[i]);
        s.Q[i] = eval_Q(geo, s.grid[i]);
        s.q_max = std::max(s.q_max, s.q[i]);
    }
    if (geo.lambda > 0 && (geo.k == 1 || geo.lambda > 1e-3)) {
        s.zeta.assign(points, 0.0);
        s.zeta_mid.assign(points, 0.0);
        for (int i = 0; i < points; ++i) {
            if (i > 0) s.zeta[i] = zero_mode(geo, ZeroModeCoordinate::PhysicalR, s.grid[i]);
            if (i + 1 < points) {
                s.zeta_mid[i] = zero_mode(geo, ZeroModeCoordinate::PhysicalR, (i + 0.5) * s.h);
            }
        }
    }
    s.op_bound = operator_bound(s);

    if (auto* em = std::get_if<GapEigenmode>(&initial)) {
        s.w = eigenmode_profile(geo, s.grid, em->mu2);
    } else if (auto* gb = std::get_if<GaussianBump>(&initial)) {
        s.w.resize(points);
        for (int i = 0; i < points; ++i) {
            double z = (s.grid[i] - gb->center) / gb->width;
            s.w[i] = gb->amplitude * std::exp(-z * z);
        }
    } else {
        const auto& c = std::get<Custom>(initial);
        if (c.samples.size() != size_t(points)) {
            throw DomainError("custom initial data must have one sample per grid point");
        }
        s.w = c.samples;
    }
    s.w.front() = 0;
    s.w.back() = 0;
    s.v.assign(points, 0.0);
    return s;
}

double max_stable_dt(const WaveState& s) {
    double spectral = 2.0 / std::sqrt(s.op_bound);
    return 0.9 * std::min(s.h, spectral);
}

void step_in_place(WaveState& s, double dt) {
    if (!(dt > 0) || dt > max_stable_dt(s) * (1 + 1e-12)) {
        throw CFLViolation("dt = " + std::to_string(dt) + " exceeds the stable step " +
                           std::to_string(max_stable_dt(s)));
    }
    const size_t n = s.w.size();
    if (s.accel.size() != n) compute_accel(s);
    for (size_t i = 1; i + 1 < n; ++i) s.v[i] += 0.5 * dt * s.accel[i];
    for (size_t i = 1; i + 1 < n; ++i) s.w[i] += dt * s.v[i];
    compute_accel(s);
    for (size_t i = 1; i + 1 < n; ++i) s.v[i] += 0.5 * dt * s.accel[i];
    s.t += dt;
}

WaveState step(WaveState state, double dt) {
    step_in_place(state, dt);
    return state;
}

std::vector<double> reconstruct_psi(const WaveState& s) {
    std::vector<double> psi(s.w.size(), 0.0);
    for (size_t i = 1; i < s.w.size(); ++i) psi[i] = s.Q[i] + s.w[i] / std::sqrt(s.sinh_r[i]);
    return psi;
}

EnergyBreakdown energy(const WaveState& s) {
    EnergyBreakdown e;
    const size_t n = s.w.size();
    const double h = s.h;
    if (s.mode == WaveMode::Linear) {
        // total = kinetic + <w, L_h w>/2; the potential part is the remainder after the gradient
        double form = 0;
        for (size_t i = 1; i + 1 < n; ++i) {
            e.kinetic += 0.5 * h * s.v[i] * s.v[i];
            form += 0.5 * h * s.w[i] * operator_row(s, i);
        }
        for (size_t i = 0; i + 1 < n; ++i) {
            double d = (s.w[i + 1] - s.w[i]) / h;
            e.gradient += 0.5 * h * d * d;
        }
        e.potential = form - e.gradient;
    } else {
        std::vector<double> psi = reconstruct_psi(s);
        const int k = s.geometry.k;
        for (size_t i = 1; i + 1 < n; ++i) {
            e.kinetic += 0.5 * h * s.v[i] * s.v[i];
            double g = metric_g(s.geometry, psi[i]);
            e.potential += 0.5 * h * k * k * g * g / s.sinh_r[i];
        }
        for (size_t i = 0; i + 1 < n; ++i) {
            double d = (psi[i + 1] - psi[i]) / h;
            e.gradient += 0.5 * h * std::sinh(0.5 * (s.grid[i] + s.grid[i + 1])) * d * d;
        }
    }
    e.total = e.kinetic + e.gradient + e.potential;
    return e;
}

double nonlinear_source(const GeometrySpec& geo, double r, double u) {
    if (!(r > 0)) throw DomainError("nonlinear_source requires r > 0");
    const int k = geo.k;
    double sh = std::sinh(r);
    double shk = std::pow(sh, k);
    double Q = eval_Q(geo, r);
    return -k * k * gg_remainder(geo, Q, shk * u) / (shk * sh * sh);
}

ProbeRecord probe_spectrum(ProbeRecord rec) {
    const size_t n = rec.values.size();
    if (n < 1024 || rec.times.size() != n) throw TooFewSamples("probe spectrum needs >= 1024 samples");
    const double dt = (rec.times.back() - rec.times.front()) / (n - 1);
    double mean = 0;
    for (double x : rec.values) mean += x;
    mean /= n;

    const size_t q = n / 4;
    double first = 0, last = 0;
    for (size_t i = 0; i < q; ++i) first = std::max(first, std::abs(rec.values[i]));
    for (size_t i = n - q; i < n; ++i) last = std::max(last, std::abs(rec.values[i]));
    rec.decay_ratio = first > 0 ? last / first : 0.0;

    std::vector<double> in(n);
    double peak_in = 0;
    for (size_t i = 0; i < n; ++i) {
        in[i] = rec.values[i] - mean;
        peak_in = std::max(peak_in, std::abs(in[i]));
    }
    rec.dominant_frequency.reset();
    if (peak_in == 0) return rec;

    const size_t nb = n / 2 + 1;
    std::unique_ptr<fftw_complex[], decltype(&fftw_free)> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nb)), &fftw_free);
    static std::mutex planner;  // planning is not thread safe in FFTW
    fftw_plan plan;
    {
        std::lock_guard lock(planner);
        plan = fftw_plan_dft_r2c_1d(int(n), in.data(), out.get(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner);
        fftw_destroy_plan(plan);
    }
    std::vector<double> mag(nb);
    for (size_t i = 0; i < nb; ++i) mag[i] = std::hypot(out[i][0], out[i][1]);
    size_t best = 1;
    for (size_t i = 1; i < nb; ++i) {
        if (mag[i] > mag[best]) best = i;
    }
    double delta = 0;
    if (best > 0 && best + 1 < nb) {
        double a = mag[best - 1], b = mag[best], c = mag[best + 1];
        double den = a - 2 * b + c;
        if (den != 0) delta = std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
    }
    rec.dominant_frequency = 2 * M_PI * (best + delta) / (n * dt);
    return rec;
}

EvolutionResult evolve(WaveState state, const EvolutionOptions& o) {
    EvolutionResult res;
    res.dt = o.dt > 0 ? o.dt : 0.5 * max_stable_dt(state);
    const size_t nsteps = size_t(std::ceil((o.t_end - state.t) / res.dt - 1e-9));
    size_t ip = size_t(std::lround(o.r_probe / state.h));
    ip = std::min(ip, state.grid.size() - 1);
    res.probe.r_probe = state.grid[ip];

    auto track_psi = [&] {
        if (state.mode != WaveMode::Nonlinear) return;
        for (double p : reconstruct_psi(state)) res.max_abs_psi = std::max(res.max_abs_psi, std::abs(p));
    };
    const double e0 = energy(state).total;
    auto record_energy = [&] {
        double e = energy(state).total;
        res.energy_trace.emplace_back(state.t, e);
        double scale = std::abs(e0) > 0 ? std::abs(e0) : 1.0;
        res.energy_drift = std::max(res.energy_drift, std::abs(e - e0) / scale);
    };
    res.probe.times.push_back(state.t);
    res.probe.values.push_back(state.w[ip]);
    record_energy();
    track_psi();
    for (size_t s = 1; s <= nsteps; ++s) {
        step_in_place(state, res.dt);
        res.probe.times.push_back(state.t);
        res.probe.values.push_back(state.w[ip]);
        if (s % o.energy_every == 0 || s == nsteps) {
            record_energy();
            track_psi();
        }
    }
    if (res.probe.values.size() >= 1024) res.probe = probe_spectrum(std::move(res.probe));
    res.final_state = std::move(state);
    return res;
}

}  // namespace gapspec
