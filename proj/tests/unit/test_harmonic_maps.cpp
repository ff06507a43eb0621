#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gapspec/errors.hpp"
#include "gapspec/harmonic_maps.hpp"

using namespace gapspec;
using std::numbers::pi;

namespace {

// Composite Simpson on [a, b] with n panels.
template <class F>
double simpson(F f, double a, double b, int n) {
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// Energy density of the closed-form profile, written out independently.
double energy_oracle(int k, double lambda, bool ym) {
    auto dens = [&](double r) {
        if (r == 0) return 0.0;
        double t = std::tanh(r / 2);
        double q, qr, g;
        double sech2 = 0.5 / (std::cosh(r / 2) * std::cosh(r / 2));
        if (ym) {
            double x = lambda * lambda * t * t;
            q = 2 * x / (1 + x);
            qr = 4 * lambda * lambda * t * sech2 / ((1 + x) * (1 + x));
            g = q - q * q / 2;
        } else {
            double a = std::pow(lambda, k) * std::pow(t, k);
            q = 2 * std::atan(a);
            qr = 2 * k * std::pow(lambda, k) * std::pow(t, k - 1) * sech2 / (1 + a * a);
            g = std::sin(q);
        }
        double s = std::sinh(r);
        return 0.5 * (qr * qr * s + k * k * g * g / s);
    };
    double total = 0;
    for (int j = 0; j < 60; ++j) total += simpson(dens, j, j + 1.0, 400);
    return total;
}

}  // namespace

TEST_CASE("metric g values") {
    CHECK(metric_g(GeometrySpec::sphere(1, 1), pi / 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(metric_g(GeometrySpec::yang_mills(1), 1.0) == doctest::Approx(0.5));
    CHECK(metric_g(GeometrySpec::yang_mills(1), 2.0) == doctest::Approx(0.0));
    CHECK(metric_g_prime(GeometrySpec::yang_mills(1), 1.0) == doctest::Approx(0.0));
}

TEST_CASE("profile limits") {
    CHECK(eval_Q(GeometrySpec::sphere(1, 1), 60) == doctest::Approx(pi / 2).epsilon(1e-12));
    CHECK(eval_Q(GeometrySpec::sphere(2, 0), 5) == 0.0);
    CHECK(eval_Q(GeometrySpec::yang_mills(0), 5) == 0.0);
    CHECK(eval_Q(GeometrySpec::yang_mills(1), 60) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(endpoint(GeometrySpec::sphere(3, 1)) == doctest::Approx(pi / 2));
    CHECK(endpoint(GeometrySpec::sphere(2, 2)) == doctest::Approx(2 * std::atan(4.0)));
    CHECK(endpoint(GeometrySpec::sphere(2, 2)) == doctest::Approx(eval_Q(GeometrySpec::sphere(2, 2), 60)));
    CHECK(endpoint(GeometrySpec::yang_mills(1e6)) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_THROWS_AS(eval_Q(GeometrySpec::sphere(1, 1), -1), DomainError);
}

TEST_CASE("endpoint agrees with eval_Q far out") {
    for (int k : {1, 2, 3}) {
        for (double l : {0.1, 1.0, 10.0, 100.0}) {
            auto g = GeometrySpec::sphere(k, l);
            CHECK(std::abs(endpoint(g) - eval_Q(g, 100)) < 1e-10);
        }
    }
    for (double l : {0.5, 3.0, 100.0}) {
        auto g = GeometrySpec::yang_mills(l);
        CHECK(std::abs(endpoint(g) - eval_Q(g, 100)) < 1e-10);
    }
}

TEST_CASE("closed-form energies") {
    CHECK(energy_closed_form(GeometrySpec::sphere(1, 1)) == doctest::Approx(1.0));
    CHECK(energy_closed_form(GeometrySpec::sphere(3, 0)) == 0.0);
    CHECK(energy_closed_form(GeometrySpec::yang_mills(1)) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("quadrature energies against an independent oracle") {
    CHECK(energy_quadrature(GeometrySpec::sphere(1, 1)).total == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(energy_quadrature(GeometrySpec::yang_mills(0)).total == 0.0);
    struct Case { int k; double l; bool ym; };
    for (auto c : {Case{1, 0.5, false}, Case{2, 2, false}, Case{3, 0.7, false}, Case{2, 1.5, true}}) {
        auto g = c.ym ? GeometrySpec::yang_mills(c.l) : GeometrySpec::sphere(c.k, c.l);
        auto e = energy_quadrature(g);
        CHECK(e.kinetic == 0.0);
        CHECK(e.total == doctest::Approx(e.kinetic + e.gradient + e.potential).epsilon(1e-12));
        CHECK(e.total == doctest::Approx(energy_oracle(c.k, c.l, c.ym)).epsilon(1e-8));
    }
    // k >= 2 follows k (1 - cos alpha)
    double q = 2 * std::atan(4.0);
    CHECK(energy_quadrature(GeometrySpec::sphere(2, 2)).total ==
          doctest::Approx(2 * (1 - std::cos(q))).epsilon(1e-8));
}

TEST_CASE("energy is increasing in lambda") {
    for (int k : {1, 2, 4}) {
        double prev = -1;
        for (double l = 0.25; l < 4; l += 0.25) {
            double e = energy_quadrature(GeometrySpec::sphere(k, l)).total;
            CHECK(e > prev);
            prev = e;
        }
    }
}

TEST_CASE("amplitude bound") {
    auto s = GeometrySpec::sphere(1, 1);
    CHECK(amplitude_bound(s, 0) == 0.0);
    CHECK(amplitude_bound(s, 1) == doctest::Approx(pi / 2));
    CHECK(amplitude_bound(s, 2) == doctest::Approx(pi));
    CHECK_THROWS(amplitude_bound(s, -1));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.9);
    for (int i = 0; i < 200; ++i) {
        double e = u(rng);
        double p = amplitude_bound(s, e);
        CHECK(amplitude_antiderivative(s, p) == doctest::Approx(e).epsilon(1e-10));
    }
}

TEST_CASE("profile solves the harmonic map equation") {
    // Q'' + coth r Q' - k^2 g g'(Q) / sinh^2 r = 0, checked by central differences
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ur(0.2, 8.0), ul(0.2, 20.0);
    for (int i = 0; i < 100; ++i) {
        bool ym = i % 4 == 0;
        int k = ym ? 2 : 1 + i % 3;
        auto g = ym ? GeometrySpec::yang_mills(ul(rng)) : GeometrySpec::sphere(k, ul(rng));
        double r = ur(rng), h = 1e-3;
        double q = eval_Q(g, r);
        double qp = (eval_Q(g, r + h) - eval_Q(g, r - h)) / (2 * h);
        double qpp = (eval_Q(g, r + h) - 2 * q + eval_Q(g, r - h)) / (h * h);
        double s = std::sinh(r);
        double res = qpp + qp / std::tanh(r) - k * k * metric_g(g, q) * metric_g_prime(g, q) / (s * s);
        CHECK(std::abs(res) < 1e-4 * (1 + std::abs(qpp)));
        CHECK(eval_Q_prime(g, r) == doctest::Approx(qp).epsilon(1e-5));
    }
}

TEST_CASE("profile is monotone") {
    for (double l : {0.3, 1.0, 7.0}) {
        for (auto g : {GeometrySpec::sphere(2, l), GeometrySpec::yang_mills(l)}) {
            double prev = -1;
            for (double r = 0; r < 30; r += 0.1) {
                double q = eval_Q(g, r);
                CHECK(q >= prev);
                prev = q;
            }
        }
    }
}
