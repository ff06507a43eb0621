#include <cmath>
#include <random>

#include "doctest.h"
#include "gapspec/errors.hpp"
#include "gapspec/ode_engine.hpp"
#include "gapspec/spectral.hpp"

using namespace gapspec;

TEST_CASE("series starts") {
    auto euc = OperatorSpec::euclidean(2);
    auto s = series_start(euc, 0, 1e-3);
    CHECK(s.phi * std::exp(s.log_scale) / std::pow(1e-3, 2.5) == doctest::Approx(1.0).epsilon(1e-6));

    auto free1 = OperatorSpec::half_line(GeometrySpec::sphere(1, 0));
    auto f = series_start(free1, 0.25, 1e-3);
    CHECK(f.phi * std::exp(f.log_scale) == doctest::Approx(std::pow(1e-3, 1.5)).epsilon(1e-6));

    CHECK_THROWS_AS(series_start(free1, 0.25, 5.0), SeriesRadiusExceeded);
}

TEST_CASE("start point self-convergence") {
    auto op = OperatorSpec::half_line(GeometrySpec::sphere(2, 3));
    double mu2 = 0.1;
    auto run = [&](double r0) {
        auto tr = integrate(op, mu2, series_start(op, mu2, r0), 6.0);
        return tr.end_pi / tr.end_phi;
    };
    double a = run(1e-3), b = run(5e-4);
    CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(a)));
}

TEST_CASE("regular solution at zero energy is positive") {
    auto op = OperatorSpec::half_line(GeometrySpec::sphere(1, 1));
    auto tr = integrate(op, 0, regular_start(op, 0), 30);
    CHECK(tr.zero_count == 0);
    for (double p : tr.phi) CHECK(p >= 0);
}

TEST_CASE("free oscillation") {
    for (int k : {1, 2, 3}) {
        auto op = OperatorSpec::half_line(GeometrySpec::sphere(k, 0));
        StartData st{1.0, 1.0, 0.0, 0.0};
        auto tr = integrate(op, 1.25, st, 30);
        CHECK(tr.zero_count >= 8);
        CHECK(tr.zeros.size() == size_t(tr.zero_count));
    }
}

TEST_CASE("Euclidean zero mode is reproduced") {
    auto op = OperatorSpec::euclidean(2);
    IntegratorOptions o;
    o.sample_at = {10, 20, 30, 40, 50};
    auto tr = integrate(op, 0, regular_start(op, 0), 50, o);
    CHECK(tr.zero_count == 0);
    double ref = tr.phi_relative(0, tr.log_scale[0]) / euclidean_zero_mode(2, 10);
    for (size_t i = 1; i < tr.grid.size(); ++i) {
        double c = tr.phi_relative(i, tr.log_scale[0]) / euclidean_zero_mode(2, tr.grid[i]);
        CHECK(c == doctest::Approx(ref).epsilon(1e-4));
    }
}

TEST_CASE("rescale ledger matches long double") {
    // phi'' = 4 phi grows like e^{2x}; 400 units overflows any unscaled double path
    auto op = OperatorSpec::half_line(GeometrySpec::sphere(1, 0));
    double mu2 = 0.25 - 4.0;
    StartData st{20.0, 1.0, 2.0, 0.0};
    auto tr = integrate(op, mu2, st, 420);
    CHECK(!tr.scale_ledger.empty());
    long double log_true = std::log(std::abs(tr.end_phi)) + tr.end_log_scale;
    // sinh^{-2} term is below 1e-17 past 20: pure exponential
    long double expect = 2.0L * 400;
    CHECK(double(std::abs(log_true - expect)) < 1e-8 * 800);
}

TEST_CASE("trace samples at requested points") {
    auto op = OperatorSpec::half_line(GeometrySpec::sphere(2, 2));
    IntegratorOptions o;
    o.sample_at = {1, 2, 3};
    auto tr = integrate(op, 0.1, regular_start(op, 0.1), 4, o);
    REQUIRE(tr.grid.size() == 3);
    CHECK(tr.grid[1] == doctest::Approx(2.0));
}

TEST_CASE("tail start") {
    auto op = OperatorSpec::half_line(GeometrySpec::sphere(2, 3));
    auto t = tail_start_decaying(op, 0, 60);
    CHECK(t.pi / t.phi == doctest::Approx(-0.5));
    CHECK_THROWS_AS(tail_start_decaying(OperatorSpec::euclidean(2), 0.24, 30), TailNotAsymptotic);
    CHECK_THROWS_AS(tail_start_decaying(OperatorSpec::half_line(GeometrySpec::sphere(2, 3)), 0.24, 2),
                    TailNotAsymptotic);
}

TEST_CASE("backward tail matches at an eigenvalue") {
    auto op = OperatorSpec::half_line(GeometrySpec::sphere(2, 5));
    auto rep = find_gap_eigenvalues(op);
    REQUIRE(rep.eigenvalues.size() == 1);
    double mu2 = rep.eigenvalues[0].mu2;
    auto fw = integrate(op, mu2, regular_start(op, mu2), 5);
    auto bw = integrate(op, mu2, tail_start_decaying(op, mu2, 45), 5);
    double w = fw.end_phi * bw.end_pi - fw.end_pi * bw.end_phi;
    double n = std::hypot(fw.end_phi, fw.end_pi) * std::hypot(bw.end_phi, bw.end_pi);
    CHECK(std::abs(w) / n < 1e-7);
}

TEST_CASE("threshold fit") {
    IntegratorOptions o;
    for (double x = 30; x <= 60; x += 0.25) o.sample_at.push_back(x);
    auto free1 = OperatorSpec::half_line(GeometrySpec::sphere(1, 0));
    auto tr = integrate(free1, 0.25, regular_start(free1, 0.25), 60, o);
    auto fit = fit_threshold(tr, {30, 60});
    CHECK(fit.b > 0);
    CHECK(fit.fit_residual < 1e-6);

    auto op = OperatorSpec::half_line(GeometrySpec::sphere(1, 1));
    auto t2 = integrate(op, 0.25, regular_start(op, 0.25), 60, o);
    CHECK(std::abs(fit_threshold(t2, {30, 60}).b) > 0);
}

TEST_CASE("Sturm count is monotone in the energy") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ul(0.5, 40);
    for (int i = 0; i < 6; ++i) {
        auto g = i % 2 ? GeometrySpec::yang_mills(ul(rng)) : GeometrySpec::sphere(1 + i % 3, ul(rng));
        auto op = OperatorSpec::half_line(g);
        int prev = 0;
        for (double mu2 = -1; mu2 <= 0.25; mu2 += 0.05) {
            int c = count_eigenvalues_below(op, std::min(mu2, 0.25 - 1e-8));
            CHECK(c >= prev);
            prev = c;
        }
    }
}

TEST_CASE("renormalized f at zero energy") {
    auto g = GeometrySpec::sphere(2, 10);
    auto sol = renormalized_f(g, 0, 12);
    for (double f : sol.f) CHECK(f == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.max_discrepancy < 1e-6);
}

TEST_CASE("renormalized f agrees with shooting") {
    auto g = GeometrySpec::sphere(2, 20);
    double mu2 = 0.25;  // rescaled energy 1/lambda^2
    auto sol = renormalized_f(g, mu2, 25);
    CHECK(sol.f.front() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(sol.f_prime.front()) < 1e-6);
    CHECK(sol.max_discrepancy < 1e-6);
}
