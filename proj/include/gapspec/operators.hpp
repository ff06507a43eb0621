#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gapspec/harmonic_maps.hpp"
#include "gapspec/jet.hpp"

namespace gapspec {

// Marker for the k = infinity member of the large-k family.
inline constexpr int k_infinity = 0;

enum class OperatorFamily { HalfLine, Rescaled, Euclidean, LargeK };
enum class Measure { Lebesgue, OmegaWeighted };

// A half-line Schrodinger operator -d_xx + q(x) (or its omega-weighted large-k
// analogue). The "native" coordinate is r (HalfLine), rho = lambda r / 2
// (Rescaled), rho (Euclidean) or rho in (0, Theta) (LargeK).
struct OperatorSpec {
    OperatorFamily family = OperatorFamily::HalfLine;
    GeometrySpec geometry;  // HalfLine / Rescaled
    int k = 1;              // all families; k_infinity allowed for LargeK
    double theta = 1.0;     // LargeK

    static OperatorSpec half_line(const GeometrySpec& geo);
    static OperatorSpec rescaled(const GeometrySpec& geo);
    static OperatorSpec euclidean(int k);
    static OperatorSpec large_k(int k, double theta);

    bool k_is_infinite() const { return family == OperatorFamily::LargeK && k == k_infinity; }
    double frobenius_exponent() const;
    std::pair<double, double> domain() const;
    Measure measure() const;
    // Bottom of the essential spectrum in native units.
    double threshold() const;
    // native spectral parameter = energy_scale * physical mu^2
    double energy_scale() const;
    // native length = length_scale * physical r (only meaningful away from LargeK)
    double length_scale() const;
    std::string label() const;
};

double potential_V(const GeometrySpec& geo, double r);
double effective_potential(const OperatorSpec& op, double x);
// Same coefficient through g'(Q)^2 + g(Q) g''(Q) (half-line family only).
double effective_potential_alt(const GeometrySpec& geo, double r);

enum class ZeroModeCoordinate { PhysicalR, RescaledRho };
double zero_mode(const GeometrySpec& geo, ZeroModeCoordinate coord, double x);
Jet zero_mode_jet(const GeometrySpec& geo, ZeroModeCoordinate coord, double x);

// rho^{k+1/2} / (1 + rho^{2k})
double euclidean_zero_mode(int k, double rho);
Jet euclidean_zero_mode_jet(int k, double rho);

// A function known through value, first and second derivative.
using SampledFunction = std::function<Jet(double)>;
double apply_operator(const OperatorSpec& op, const SampledFunction& phi, double x);
// Five-point central differences of samples on a uniform grid.
SampledFunction finite_difference_function(std::vector<double> grid, std::vector<double> values);

double omega_weight(int k, double theta, double rho);

// Coordinate maps
double largek_rho_from_r(int k, double theta, double r);
double largek_r_from_rho(int k, double theta, double rho);
double loglog_s_from_rho(double theta, double rho);
double loglog_rho_from_s(double theta, double s);
double rescaled_rho_from_r(double lambda, double r);
double rescaled_r_from_rho(double lambda, double rho);

double convexity_margin(const GeometrySpec& geo, double r);

enum class ConjugationDirection { ToHalfLine, FromHalfLine };
std::vector<double> conjugation_transform(ConjugationDirection dir, int k,
                                          const std::vector<double>& r,
                                          const std::vector<double>& samples);
// psi - Q = sinh^k r * u
std::vector<double> wave_map_substitution(const GeometrySpec& geo, const std::vector<double>& r,
                                          const std::vector<double>& psi);

}  // namespace gapspec
