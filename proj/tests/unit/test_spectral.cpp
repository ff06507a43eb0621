#include <atomic>
#include <cmath>

#include "doctest.h"
#include "gapspec/errors.hpp"
#include "gapspec/spectral.hpp"

using namespace gapspec;

TEST_CASE("eigenvalue counts") {
    auto v11 = OperatorSpec::half_line(GeometrySpec::sphere(1, 1));
    CHECK(count_eigenvalues_below(v11, 0.25 - 1e-6, 60) == 0);
    auto v20 = OperatorSpec::half_line(GeometrySpec::sphere(2, 20));
    CHECK(count_eigenvalues_below(v20, 0.25 - 1e-6, 60) == 1);
    CHECK(count_eigenvalues_below(v20, -1, 60) == 0);
    CHECK(count_eigenvalues_below(OperatorSpec::half_line(GeometrySpec::yang_mills(30)), -1, 60) == 0);
}

TEST_CASE("truncation radius") {
    CHECK(truncation_radius(0) == doctest::Approx(80.0));
    CHECK(truncation_radius(0.2499) <= 200.0);
    CHECK(truncation_radius(-3) == doctest::Approx(60.0));
}

TEST_CASE("no gap eigenvalue at small lambda") {
    auto rep = find_gap_eigenvalues(OperatorSpec::half_line(GeometrySpec::sphere(2, 1)));
    CHECK(rep.eigenvalues.empty());
    CHECK(std::abs(rep.resonance_b) > 1e-4 * std::abs(rep.resonance_a));
    CHECK(rep.negative_scan_clear);
    CHECK(rep.embedded_scan_clear);
    CHECK(find_gap_eigenvalues(OperatorSpec::half_line(GeometrySpec::yang_mills(0.8))).eigenvalues.empty());
}

TEST_CASE("unique eigenvalue for large lambda") {
    auto rep = find_gap_eigenvalues(OperatorSpec::half_line(GeometrySpec::yang_mills(15)));
    REQUIRE(rep.eigenvalues.size() == 1);
    auto& e = rep.eigenvalues[0];
    CHECK(e.mu2 > 0);
    CHECK(e.mu2 < 0.25);
    CHECK(e.certificate.first == 0);
    CHECK(e.certificate.second == 1);
    CHECK(e.wronskian_residual < 1e-8);
    CHECK(!rep.simplicity_violation);
}

TEST_CASE("eigenvalue is invariant under rescaling") {
    auto g = GeometrySpec::sphere(2, 10);
    auto h = find_gap_eigenvalues(OperatorSpec::half_line(g));
    auto r = find_gap_eigenvalues(OperatorSpec::rescaled(g));
    REQUIRE(h.eigenvalues.size() == 1);
    REQUIRE(r.eigenvalues.size() == 1);
    CHECK(r.eigenvalues[0].mu2 == doctest::Approx(h.eigenvalues[0].mu2).epsilon(1e-8));
}

TEST_CASE("Euclidean family is rejected") {
    CHECK_THROWS_AS(find_gap_eigenvalues(OperatorSpec::euclidean(2)), DomainError);
}

TEST_CASE("sweep with no eigenvalue") {
    auto rep = sweep_lambda(GeometryKind::Sphere, 1, 0.1, 1.3, 13);
    CHECK(rep.indicator.size() == 13);
    CHECK(!rep.lambda_sup_bracket);
    for (auto& p : rep.indicator) {
        CHECK(!p.gap_eigenvalue);
        CHECK(p.resonance_b > 0);
    }
    CHECK_THROWS(sweep_lambda(GeometryKind::Sphere, 1, 2.0, 1.0, 5));
}

TEST_CASE("sweep over theta for k = 2") {
    std::vector<double> lambdas;
    for (double th = 0.5; th <= 1.0001; th += 0.05) lambdas.push_back(std::sqrt(th));
    auto rep = sweep_lambda(GeometryKind::Sphere, 2, lambdas);
    for (auto& p : rep.indicator) CHECK(!p.gap_eigenvalue);
    CHECK(!rep.lambda_sup_bracket);
}

TEST_CASE("migration") {
    auto c = migration_curve(GeometryKind::YangMills, 2, {5, 10, 20});
    CHECK(c.strictly_decreasing);
    CHECK(c.points.size() == 3);
    CHECK(c.doubling_ratios.size() == 2);
    CHECK_THROWS_AS(migration_curve(GeometryKind::Sphere, 2, {1}), EigenvalueMissing);
}

TEST_CASE("large-k scans") {
    auto clear = largek_gap_scan(k_infinity, 1);
    CHECK(clear.eigenvalues.empty());
    CHECK(std::abs(clear.resonance_b) > 1e-4 * std::abs(clear.resonance_a));
    CHECK(largek_gap_scan(k_infinity, 50).eigenvalues.size() >= 1);
    CHECK(largek_gap_scan(20, 0.9).eigenvalues.empty());
}

TEST_CASE("large-k agrees with the direct operator") {
    double theta = 100;
    int k = 8;
    auto lk = largek_gap_scan(k, theta);
    auto direct = find_gap_eigenvalues(OperatorSpec::half_line(GeometrySpec::sphere(k, std::pow(theta, 1.0 / k))));
    REQUIRE(lk.eigenvalues.size() == direct.eigenvalues.size());
    for (size_t i = 0; i < lk.eigenvalues.size(); ++i) {
        CHECK(lk.eigenvalues[i].mu2 == doctest::Approx(direct.eigenvalues[i].mu2).epsilon(1e-7));
    }
}

TEST_CASE("parallel_for runs every index and rethrows") {
    std::atomic<int> sum{0};
    parallel_for(100, 4, [&](size_t i) { sum += int(i); });
    CHECK(sum == 4950);
    CHECK_THROWS_AS(parallel_for(10, 3, [](size_t i) { if (i == 7) throw FitUnreliable("x"); }),
                    FitUnreliable);
}
