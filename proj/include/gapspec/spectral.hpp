#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapspec/ode_engine.hpp"
#include "gapspec/operators.hpp"

namespace gapspec {

// All spectral parameters here are physical mu^2 (gap (0, 1/4)); lengths R are
// physical r except for LargeK, where they are in the log-log coordinate s.
struct SpectralOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
    double R_factor = 1.0;  // multiplies the truncation rule R = max(60, 40/m)
    double threshold_R = 60.0;
};

struct GapEigenvalue {
    double mu2 = 0;
    double wronskian_residual = 0;
    std::pair<int, int> certificate{0, 0};  // counts at mu2 -/+ 1e-10
    double R_used = 0;
    double matching_point = 0;  // shooting coordinate
    bool near_threshold = false;
    std::pair<double, double> bracket{0, 0};
};

struct SpectralReport {
    OperatorSpec op;
    std::vector<GapEigenvalue> eigenvalues;
    // Threshold fit phi ~ a + b x, scaled so that a^2 + b^2 = 1 with phi > 0 near 0.
    double resonance_a = 0;
    double resonance_b = 0;
    double resonance_fit_residual = 0;
    bool negative_scan_clear = false;
    bool embedded_scan_clear = false;
    bool simplicity_violation = false;
    std::vector<std::string> notes;
};

struct SweepPoint {
    double lambda = 0;
    double resonance_b = 0;
    std::optional<double> gap_eigenvalue;
};

struct SweepReport {
    GeometryKind kind = GeometryKind::Sphere;
    int k = 1;
    std::vector<double> lambda_grid;
    std::vector<SweepPoint> indicator;
    std::optional<std::pair<double, double>> lambda_sup_bracket;
    std::optional<std::pair<double, double>> Lambda_inf_bracket;
};

struct MigrationPoint {
    double lambda = 0;
    double mu2 = 0;
    double wronskian_residual = 0;
    double R_used = 0;
};

struct MigrationCurve {
    GeometryKind kind = GeometryKind::Sphere;
    int k = 1;
    std::vector<MigrationPoint> points;
    bool strictly_decreasing = false;
    std::vector<std::pair<double, double>> doubling_ratios;  // (lambda, mu2(2 lambda)/mu2(lambda))
};

// R = max(60, 40/m) capped at 200 (times options.R_factor) in physical units.
double truncation_radius(double mu2, const SpectralOptions& options = {});

// Zero count on (0, R) plus one if the solution at R is about to cross zero
// (log-derivative below the decaying rate); the Sturm count of eigenvalues below mu2.
int count_eigenvalues_below(const OperatorSpec& op, double mu2, double R,
                            const SpectralOptions& options = {});
int count_eigenvalues_below(const OperatorSpec& op, double mu2, const SpectralOptions& options = {});

// Threshold fit of the regular solution at mu2 = 1/4.
ThresholdFit threshold_fit(const OperatorSpec& op, const SpectralOptions& options = {});

// Normalized forward/backward Wronskian at the matching point.
struct MatchResult {
    double wronskian = 0;  // divided by the amplitudes and m; in [-2, 2]
    double residual = 0;   // |W| / (|phi_F phi_B| m)
    double matching_point = 0;
    double R = 0;
};
MatchResult match_wronskian(const OperatorSpec& op, double mu2, const SpectralOptions& options = {});

bool negative_scan(const OperatorSpec& op, const SpectralOptions& options = {});
bool embedded_scan(const OperatorSpec& op, const SpectralOptions& options = {});

SpectralReport find_gap_eigenvalues(const OperatorSpec& op, const SpectralOptions& options = {});

SweepReport sweep_lambda(GeometryKind kind, int k, const std::vector<double>& lambdas, int jobs = 0,
                         const SpectralOptions& options = {});
SweepReport sweep_lambda(GeometryKind kind, int k, double lambda_min, double lambda_max, int steps,
                         int jobs = 0, const SpectralOptions& options = {});

MigrationCurve migration_curve(GeometryKind kind, int k, const std::vector<double>& lambdas,
                               int jobs = 0, const SpectralOptions& options = {});

SpectralReport largek_gap_scan(int k, double theta, const SpectralOptions& options = {});

// Runs f(i) for i in [0, n) on up to jobs threads (0: hardware concurrency).
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& f);

}  // namespace gapspec
