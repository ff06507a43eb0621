#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "gapspec/operators.hpp"

namespace gapspec {

// Shooting works on the first-order system
//   phi' = alpha(x) pi,   pi' = alpha(x) (q(x) - mu2) phi
// in the operator's shooting coordinate x: r (HalfLine), rho (Rescaled,
// Euclidean) or s = -log log(Theta/rho) (LargeK). alpha = 1 except for LargeK
// where alpha = omega_k / omega_inf and pi = omega_k^{-1} rho d(phi)/d(rho).
struct ShootingCoefficients {
    double alpha;
    double q;
};
ShootingCoefficients shooting_coefficients(const OperatorSpec& op, double x);
// Limit of q at the far end of the shooting coordinate.
double shooting_threshold(const OperatorSpec& op);

// True state is (phi, pi) * exp(log_scale).
struct StartData {
    double x = 0;
    double phi = 0;
    double pi = 0;
    double log_scale = 0;
};

enum class Direction { Forward, Backward };

struct LedgerEntry {
    size_t index;       // samples with this index and later carry the factor
    double log_factor;  // log of the magnitude divided out
};

struct IntegratorOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
    size_t max_steps = 5'000'000;
    // When non-empty, samples are recorded only at these points (monotone in
    // the direction of integration) through dense output; otherwise at every
    // accepted step.
    std::vector<double> sample_at;
};

struct ShootingTrace {
    std::vector<double> grid;
    std::vector<double> phi;  // stored values; true = stored * exp(log_scale)
    std::vector<double> pi;
    std::vector<double> log_scale;
    std::vector<LedgerEntry> scale_ledger;
    std::vector<double> zeros;
    int zero_count = 0;
    Direction direction = Direction::Forward;
    double mu2 = 0;
    // state at the end point
    double end_x = 0, end_phi = 0, end_pi = 0, end_log_scale = 0;
    size_t steps = 0;

    // Ledger-reconstructed value, rescaled by exp(-reference_log_scale).
    double phi_relative(size_t i, double reference_log_scale) const;
};

struct ThresholdFit {
    double a = 0, b = 0;
    double fit_residual = 0;
    std::pair<double, double> window{0, 0};
    double log_scale = 0;  // true a, b = stored * exp(log_scale)
};

struct RenormalizedSolution {
    std::vector<double> grid;
    std::vector<double> f;
    std::vector<double> f_prime;
    std::vector<double> zeta;
    std::vector<double> f_shooting;  // phi / zeta from direct shooting, normalized f(0) = 1
    double max_discrepancy = 0;      // max |f - f_shooting| / max(1, max |f|)
    int sweeps = 0;
    double lambda = 0;
    double mu2 = 0;
};

struct RenormalizationClaims {
    double rho0 = 0;  // lambda artanh(1/lambda)
    double min_f_on_rho0 = 0;
    bool f_at_least_half = false;
    double f_prime_rho0 = 0;
    double f_prime_bound = 0;  // zeta(rho0)^{-2} k^2/(2k+2) lambda^{-5}
    bool f_prime_claim = false;
    std::optional<double> sign_change_rho;
    bool sign_change_before_lambda = false;
    double limit_bound = 0;  // 1 - lambda^{2k-2}(1 - lambda^{-2k}) / (32 k (k+1))
};

// Shooting-coordinate point where the two-term Frobenius start is accurate to 1e-12.
double default_start_point(const OperatorSpec& op, double mu2);
// Estimated relative size of the first dropped term at x0 (non-LargeK families).
double series_dropped_term(const OperatorSpec& op, double mu2, double x0);
StartData series_start(const OperatorSpec& op, double mu2, double x0);
StartData regular_start(const OperatorSpec& op, double mu2);

ShootingTrace integrate(const OperatorSpec& op, double mu2, const StartData& start, double x_end,
                        const IntegratorOptions& options = {});

StartData tail_start_decaying(const OperatorSpec& op, double mu2, double R);

ThresholdFit fit_threshold(const ShootingTrace& trace, std::pair<double, double> window);

RenormalizedSolution renormalized_f(const GeometrySpec& geo, double mu2, double rho_max,
                                    const IntegratorOptions& options = {});
RenormalizationClaims check_renormalization_claims(const GeometrySpec& geo,
                                                   const RenormalizedSolution& sol);

}  // namespace gapspec
