#pragma once

#include <optional>

#include "gapspec/harmonic_maps.hpp"
#include "gapspec/ode_engine.hpp"
#include "gapspec/operators.hpp"
#include "gapspec/spectral.hpp"
#include "gapspec/wave_sim.hpp"
#include "json.hpp"

NLOHMANN_JSON_NAMESPACE_BEGIN
template <typename T>
struct adl_serializer<std::optional<T>> {
    static void to_json(json& j, const std::optional<T>& v) {
        if (v) {
            j = *v;
        } else {
            j = nullptr;
        }
    }
    static void from_json(const json& j, std::optional<T>& v) {
        if (j.is_null()) {
            v.reset();
        } else {
            v = j.get<T>();
        }
    }
};
NLOHMANN_JSON_NAMESPACE_END

namespace gapspec {

using nlohmann::json;

NLOHMANN_JSON_SERIALIZE_ENUM(GeometryKind, {{GeometryKind::Sphere, "sphere"},
                                            {GeometryKind::YangMills, "ym"}})
NLOHMANN_JSON_SERIALIZE_ENUM(OperatorFamily, {{OperatorFamily::HalfLine, "half_line"},
                                              {OperatorFamily::Rescaled, "rescaled"},
                                              {OperatorFamily::Euclidean, "euclidean"},
                                              {OperatorFamily::LargeK, "large_k"}})
NLOHMANN_JSON_SERIALIZE_ENUM(WaveMode, {{WaveMode::Linear, "linear"},
                                        {WaveMode::Nonlinear, "nonlinear"}})

inline void to_json(json& j, const GeometrySpec& g) {
    j = json{{"kind", g.kind}, {"k", g.k}, {"lambda", g.lambda}};
}
inline void from_json(const json& j, GeometrySpec& g) {
    j.at("kind").get_to(g.kind);
    j.at("k").get_to(g.k);
    j.at("lambda").get_to(g.lambda);
}

inline void to_json(json& j, const OperatorSpec& op) {
    j = json{{"family", op.family}, {"geometry", op.geometry}, {"theta", op.theta}};
    if (op.k_is_infinite()) {
        j["k"] = "inf";
    } else {
        j["k"] = op.k;
    }
}
inline void from_json(const json& j, OperatorSpec& op) {
    j.at("family").get_to(op.family);
    j.at("geometry").get_to(op.geometry);
    j.at("theta").get_to(op.theta);
    const json& k = j.at("k");
    op.k = k.is_string() ? k_infinity : k.get<int>();
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EnergyBreakdown, kinetic, gradient, potential, total)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GapEigenvalue, mu2, wronskian_residual, certificate, R_used,
                                   matching_point, near_threshold, bracket)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SpectralReport, op, eigenvalues, resonance_a, resonance_b,
                                   resonance_fit_residual, negative_scan_clear,
                                   embedded_scan_clear, simplicity_violation, notes)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SweepPoint, lambda, resonance_b, gap_eigenvalue)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SweepReport, kind, k, lambda_grid, indicator,
                                   lambda_sup_bracket, Lambda_inf_bracket)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MigrationPoint, lambda, mu2, wronskian_residual, R_used)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MigrationCurve, kind, k, points, strictly_decreasing,
                                   doubling_ratios)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RenormalizedSolution, grid, f, f_prime, zeta, f_shooting,
                                   max_discrepancy, sweeps, lambda, mu2)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RenormalizationClaims, rho0, min_f_on_rho0, f_at_least_half,
                                   f_prime_rho0, f_prime_bound, f_prime_claim, sign_change_rho,
                                   sign_change_before_lambda, limit_bound)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ProbeRecord, r_probe, times, values, dominant_frequency,
                                   decay_ratio)

// The final field state is not part of the artifact.
inline void to_json(json& j, const EvolutionResult& r) {
    j = json{{"probe", r.probe},
             {"energy_trace", r.energy_trace},
             {"energy_drift", r.energy_drift},
             {"max_abs_psi", r.max_abs_psi},
             {"dt", r.dt}};
}
inline void from_json(const json& j, EvolutionResult& r) {
    j.at("probe").get_to(r.probe);
    j.at("energy_trace").get_to(r.energy_trace);
    j.at("energy_drift").get_to(r.energy_drift);
    j.at("max_abs_psi").get_to(r.max_abs_psi);
    j.at("dt").get_to(r.dt);
}

}  // namespace gapspec
