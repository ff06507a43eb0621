#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "gapspec/harmonic_maps.hpp"
#include "gapspec/spectral.hpp"

namespace gapspec {

enum class WaveMode { Linear, Nonlinear };

// Field w = sinh^{k+1/2}(r) u on a uniform grid over [0, R], Dirichlet at both ends.
struct WaveState {
    GeometrySpec geometry;
    WaveMode mode = WaveMode::Linear;
    std::vector<double> grid;
    double h = 0;
    std::vector<double> w;
    std::vector<double> v;
    double t = 0;

    // cached per grid point
    std::vector<double> q;        // effective potential
    std::vector<double> Q;        // harmonic map profile (nonlinear mode)
    std::vector<double> sinh_r;
    std::vector<double> zeta;      // positive zero mode on the grid (flux form), may be empty
    std::vector<double> zeta_mid;  // at the midpoints r_i + h/2
    std::vector<double> accel;     // acceleration at the current w, empty when stale
    double q_max = 0;
    double op_bound = 0;  // bound on the largest eigenvalue of the discrete operator
};

struct GapEigenmode {
    std::optional<double> mu2;  // computed from the spectral module when empty
};
struct GaussianBump {
    double center = 5;
    double width = 1;
    double amplitude = 1;
};
struct Custom {
    std::vector<double> samples;
};
using InitialData = std::variant<GapEigenmode, GaussianBump, Custom>;

WaveState init_state(const GeometrySpec& geo, WaveMode mode, double R, int points,
                     const InitialData& initial);

// Largest stable leapfrog step for this grid and potential.
double max_stable_dt(const WaveState& state);

// One kick-drift-kick leapfrog step.
void step_in_place(WaveState& state, double dt);
WaveState step(WaveState state, double dt);

EnergyBreakdown energy(const WaveState& state);

// -sinh^{-k} [k^2 (g g')(Q + sinh^k u) - k^2 (g g')(Q) - k^2 (g'^2 + g g'')(Q) sinh^k u] / sinh^2
double nonlinear_source(const GeometrySpec& geo, double r, double u);

// psi = Q + w / sinh^{1/2} r
std::vector<double> reconstruct_psi(const WaveState& state);

struct ProbeRecord {
    double r_probe = 0;
    std::vector<double> times;
    std::vector<double> values;
    std::optional<double> dominant_frequency;  // angular frequency
    double decay_ratio = 0;
};

ProbeRecord probe_spectrum(ProbeRecord record);

struct EvolutionOptions {
    double dt = 0;  // 0: half the stable step
    double t_end = 10;
    double r_probe = 5;
    size_t energy_every = 100;
};

struct EvolutionResult {
    ProbeRecord probe;
    std::vector<std::pair<double, double>> energy_trace;  // (t, total)
    double energy_drift = 0;                              // max |E(t) - E(0)| / |E(0)|
    double max_abs_psi = 0;                               // nonlinear mode
    double dt = 0;
    WaveState final_state;
};

EvolutionResult evolve(WaveState state, const EvolutionOptions& options);

}  // namespace gapspec
