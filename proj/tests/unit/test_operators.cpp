#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gapspec/errors.hpp"
#include "gapspec/operators.hpp"

using namespace gapspec;

namespace {

double residual_ratio(const OperatorSpec& op, const SampledFunction& phi, double a, double b, int n) {
    double worst = 0, scale = 0;
    for (int i = 0; i <= n; ++i) {
        double x = a + (b - a) * i / n;
        worst = std::max(worst, std::abs(apply_operator(op, phi, x)));
        scale = std::max(scale, std::abs(phi(x).v));
    }
    return worst / scale;
}

}  // namespace

TEST_CASE("potential values") {
    CHECK(potential_V(GeometrySpec::sphere(1, 0), 1) == 0.0);
    CHECK(potential_V(GeometrySpec::yang_mills(0), 3) == 0.0);
    double q = 2 * std::atan(std::tanh(1.0));
    double s = std::sinh(2.0);
    CHECK(potential_V(GeometrySpec::sphere(1, 1), 2) ==
          doctest::Approx(-(1 - std::cos(2 * q)) / (s * s)).epsilon(1e-14));
    CHECK(std::isfinite(potential_V(GeometrySpec::sphere(2, 3), 0)));
    CHECK(potential_V(GeometrySpec::sphere(1, 2), 1e-9) ==
          doctest::Approx(potential_V(GeometrySpec::sphere(1, 2), 0)).epsilon(1e-6));
}

TEST_CASE("potential is nonpositive with an exponential tail") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ur(0.01, 30), ul(0, 40);
    for (int i = 0; i < 500; ++i) {
        auto g = i % 3 ? GeometrySpec::sphere(1 + i % 5, ul(rng)) : GeometrySpec::yang_mills(ul(rng));
        CHECK(potential_V(g, ur(rng)) <= 0.0);
    }
    for (auto g : {GeometrySpec::sphere(2, 3), GeometrySpec::yang_mills(2)}) {
        double c20 = potential_V(g, 20) * std::exp(40);
        double c25 = potential_V(g, 25) * std::exp(50);
        CHECK(c20 == doctest::Approx(c25).epsilon(1e-3));
    }
}

TEST_CASE("potential is the linearized nonlinearity") {
    // -k^2 (cos 2(Q+e) - cos 2Q) / (2 e sinh^2) against V + k^2 / sinh^2
    auto g = GeometrySpec::sphere(1, 1);
    double r = 2, q = eval_Q(g, r), s = std::sinh(r), e = 1e-6;
    double lin = (std::sin(2 * (q + e)) - std::sin(2 * (q - e))) / (4 * e) / (s * s);
    CHECK(-1.0 / (s * s) + lin * 1.0 == doctest::Approx(potential_V(g, r)).epsilon(1e-8));
}

TEST_CASE("effective potential values") {
    auto free2 = OperatorSpec::half_line(GeometrySpec::sphere(2, 0));
    double s = std::sinh(1.0);
    CHECK(effective_potential(free2, 1) == doctest::Approx(0.25 + 3.75 / (s * s)));
    CHECK(effective_potential(OperatorSpec::euclidean(2), 1) == doctest::Approx(-4.25));
    CHECK(effective_potential(OperatorSpec::large_k(k_infinity, std::exp(1.0)), 1) ==
          doctest::Approx(0.25 - 1));
    CHECK_THROWS_AS(effective_potential(OperatorSpec::euclidean(2), -1), DomainError);
}

TEST_CASE("two effective potential forms agree") {
    for (double l : {0.5, 2.0, 20.0}) {
        for (auto g : {GeometrySpec::sphere(1, l), GeometrySpec::sphere(3, l), GeometrySpec::yang_mills(l)}) {
            auto op = OperatorSpec::half_line(g);
            for (double r = 0.05; r < 20; r *= 1.3) {
                double a = effective_potential(op, r), b = effective_potential_alt(g, r);
                CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
            }
        }
    }
}

TEST_CASE("zero mode values") {
    double t = std::tanh(0.5);
    double want = 4 * t * t * std::sqrt(std::sinh(1.0)) / (1 + t * t * t * t);
    CHECK(zero_mode(GeometrySpec::sphere(2, 1), ZeroModeCoordinate::PhysicalR, 1) == doctest::Approx(want));
    auto ym = GeometrySpec::yang_mills(2);
    double c1 = zero_mode(ym, ZeroModeCoordinate::PhysicalR, 1e-3) / std::pow(1e-3, 2.5);
    double c2 = zero_mode(ym, ZeroModeCoordinate::PhysicalR, 1e-4) / std::pow(1e-4, 2.5);
    CHECK(c1 > 0);
    CHECK(c1 == doctest::Approx(c2).epsilon(1e-5));
    auto g = GeometrySpec::sphere(1, 1);
    for (double rho = 0.1; rho < 5; rho += 0.3) {
        CHECK(zero_mode(g, ZeroModeCoordinate::RescaledRho, rho) ==
              zero_mode(g, ZeroModeCoordinate::PhysicalR, 2 * rho / g.lambda));
    }
}

TEST_CASE("zero modes are annihilated") {
    for (int k : {1, 2, 3}) {
        for (double l : {0.5, 1.0, 3.0, 10.0}) {
            auto g = GeometrySpec::sphere(k, l);
            SampledFunction z = [g](double r) { return zero_mode_jet(g, ZeroModeCoordinate::PhysicalR, r); };
            CHECK(residual_ratio(OperatorSpec::half_line(g), z, 0.01, 20, 800) < 1e-6);
            SampledFunction zr = [g](double p) { return zero_mode_jet(g, ZeroModeCoordinate::RescaledRho, p); };
            CHECK(residual_ratio(OperatorSpec::rescaled(g), zr, 0.05, 10, 400) < 1e-6);
        }
    }
    auto ym = GeometrySpec::yang_mills(3);
    SampledFunction eta = [ym](double r) { return zero_mode_jet(ym, ZeroModeCoordinate::PhysicalR, r); };
    CHECK(residual_ratio(OperatorSpec::half_line(ym), eta, 0.1, 10, 400) < 1e-6);
    for (int k : {2, 3}) {
        SampledFunction e = [k](double p) { return euclidean_zero_mode_jet(k, p); };
        CHECK(residual_ratio(OperatorSpec::euclidean(k), e, 0.1, 10, 400) < 1e-8);
    }
}

TEST_CASE("finite-difference samples") {
    auto g = GeometrySpec::sphere(2, 2);
    std::vector<double> grid, vals;
    for (int i = 0; i <= 2000; ++i) {
        grid.push_back(0.5 + i * 0.005);
        vals.push_back(zero_mode(g, ZeroModeCoordinate::PhysicalR, grid.back()));
    }
    auto f = finite_difference_function(grid, vals);
    CHECK(residual_ratio(OperatorSpec::half_line(g), f, 1, 10, 100) < 1e-6);
    CHECK_THROWS_AS(f(0.5), DomainError);
}

TEST_CASE("omega weight") {
    CHECK(omega_weight(k_infinity, std::exp(1.0), 1) == doctest::Approx(1.0));
    CHECK(omega_weight(1, 2, 1) == doctest::Approx(4.0 / 3.0));
    CHECK(omega_weight(5, 2, 1) <= 1 / std::log(2.0));
    CHECK_THROWS_AS(omega_weight(2, 1, 2), DomainError);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ut(0.1, 100), uf(1e-6, 1 - 1e-6);
    for (int i = 0; i < 300; ++i) {
        double th = ut(rng), rho = th * uf(rng);
        double inf = omega_weight(k_infinity, th, rho);
        double prev = 0;
        for (int k = 1; k <= 50; ++k) {
            double w = omega_weight(k, th, rho);
            CHECK(w <= inf);
            CHECK(w >= prev);
            prev = w;
        }
    }
}

TEST_CASE("coordinate maps") {
    CHECK(largek_rho_from_r(2, 4, 2 * std::atanh(0.5)) == doctest::Approx(1.0));
    CHECK(rescaled_rho_from_r(10, 0.2) == doctest::Approx(1.0));
    CHECK(loglog_s_from_rho(std::exp(1.0), 1.0) == doctest::Approx(0.0));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int i = 0; i < 200; ++i) {
        double th = 0.5 + 10 * u(rng), rho = th * u(rng);
        int k = 1 + i % 9;
        CHECK(largek_rho_from_r(k, th, largek_r_from_rho(k, th, rho)) == doctest::Approx(rho).epsilon(1e-12));
        CHECK(loglog_rho_from_s(th, loglog_s_from_rho(th, rho)) == doctest::Approx(rho).epsilon(1e-12));
        CHECK(rescaled_r_from_rho(th, rescaled_rho_from_r(th, rho)) == doctest::Approx(rho).epsilon(1e-14));
    }
    CHECK_THROWS_AS(largek_rho_from_r(k_infinity, 2, 1), DomainError);
}

TEST_CASE("convexity margin") {
    for (double r = 0.1; r < 10; r += 0.7) {
        CHECK(convexity_margin(GeometrySpec::sphere(1, 1), r) == doctest::Approx(0.75).epsilon(1e-12));
    }
    CHECK(convexity_margin(GeometrySpec::sphere(3, 0.5), 1) > 0);
    CHECK(convexity_margin(GeometrySpec::yang_mills(1), 0.5) > 0);
}

TEST_CASE("conjugation transform") {
    std::vector<double> r, ones;
    for (int i = 1; i <= 50; ++i) {
        r.push_back(0.2 * i);
        ones.push_back(1.0);
    }
    auto w = conjugation_transform(ConjugationDirection::ToHalfLine, 1, r, ones);
    for (size_t i = 0; i < r.size(); ++i) {
        CHECK(w[i] == doctest::Approx(std::pow(std::sinh(r[i]), 1.5)));
    }
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    std::vector<double> x(r.size());
    for (auto& v : x) v = n(rng);
    auto back = conjugation_transform(ConjugationDirection::FromHalfLine, 3, r,
                                      conjugation_transform(ConjugationDirection::ToHalfLine, 3, r, x));
    for (size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) <= 1e-14 * std::abs(x[i]) + 1e-300);
}

TEST_CASE("conjugated operator matches the radial one") {
    // H = -d_rr - (2k+1) coth r d_r - k(k+1) + V
    for (auto g : {GeometrySpec::sphere(1, 2), GeometrySpec::sphere(2, 0.7), GeometrySpec::yang_mills(3)}) {
        int k = g.k;
        auto op = OperatorSpec::half_line(g);
        auto phi = [](const Jet& r) { return exp(r * -0.3) * sin(r * 1.7); };
        SampledFunction w = [&](double x) {
            Jet xv = Jet::variable(x);
            return pow(sinh(xv), k + 0.5) * phi(xv);
        };
        for (double r = 0.3; r < 8; r += 0.5) {
            Jet p = phi(Jet::variable(r));
            double H = -p.dd - (2 * k + 1) / std::tanh(r) * p.d + (potential_V(g, r) - k * (k + 1)) * p.v;
            CHECK(apply_operator(op, w, r) == doctest::Approx(std::pow(std::sinh(r), k + 0.5) * H).epsilon(1e-9));
        }
    }
}

TEST_CASE("wave map substitution") {
    auto g = GeometrySpec::sphere(2, 1.5);
    std::vector<double> r{0.5, 1, 2}, psi;
    for (double x : r) psi.push_back(eval_Q(g, x) + 0.1 * std::pow(std::sinh(x), 2));
    for (double u : wave_map_substitution(g, r, psi)) CHECK(u == doctest::Approx(0.1));
}

TEST_CASE("rescaled operator scales") {
    for (double l : {0.5, 3.0, 17.0}) {
        auto g = GeometrySpec::sphere(2, l);
        auto h = OperatorSpec::half_line(g), rs = OperatorSpec::rescaled(g);
        for (double rho = 0.1; rho < 20; rho *= 1.7) {
            double r = 2 * rho / l;
            CHECK(effective_potential(rs, rho) == doctest::Approx(4 / (l * l) * effective_potential(h, r)));
        }
    }
}

TEST_CASE("rescaled potential tends to the Euclidean one") {
    for (int k : {1, 2, 3}) {
        for (double rho : {0.5, 1.0, 2.0}) {
            double prev = 1e300;
            for (double l : {10.0, 100.0, 1000.0}) {
                double d = std::abs(effective_potential(OperatorSpec::rescaled(GeometrySpec::sphere(k, l)), rho) -
                                    effective_potential(OperatorSpec::euclidean(k), rho));
                CHECK(d < prev);
                prev = d;
            }
            CHECK(prev < 1e-3);
        }
    }
}
