#include <doctest.h>

#include <cmath>

#include "cwm/error.hpp"
#include "cwm/exact_dist.hpp"
#include "cwm/meanfield.hpp"

using namespace cwm;

TEST_CASE("solve_magnetization below, at and above the critical temperature") {
    const auto below = solve_magnetization(SelfConsistency(1.0, 1.0));
    CHECK(below.roots == std::vector<double>{0.0});
    CHECK(below.stable_flags == std::vector<bool>{true});

    const auto at = solve_magnetization(SelfConsistency(2.0, 1.0));
    CHECK(at.roots == std::vector<double>{0.0});

    // Independent route: fixed-point iteration of m <- tanh(2m) from m = 1.
    double m = 1.0;
    for (int i = 0; i < 2000; ++i) m = std::tanh(2.0 * m);
    const auto above = solve_magnetization(SelfConsistency(4.0, 1.0));
    REQUIRE(above.roots.size() == 3);
    CHECK(above.roots[2] == doctest::Approx(m).epsilon(1e-12));
    CHECK(above.roots[0] == -above.roots[2]);
    CHECK(above.roots[1] == 0.0);
    CHECK(above.stable_flags == std::vector<bool>{true, false, true});
    CHECK(std::abs(above.roots[2] - std::tanh(2.0 * above.roots[2])) < 1e-12);
}

TEST_CASE("root residuals and bifurcation on a 100-point grid") {
    for (int i = 0; i < 100; ++i) {
        const double beta = 0.1 * i;
        for (double m_prev : {-1.0, -0.7, 0.0, 0.3, 0.5, 1.0}) {
            const SelfConsistency sc(beta, m_prev);
            const auto r = solve_magnetization(sc);
            const double slope = beta * m_prev * m_prev / 2.0;
            CHECK(r.roots.size() == (slope > 1.0 ? 3u : 1u));
            for (double root : r.roots) CHECK(std::abs(root - std::tanh(slope * root)) < sc.tolerance);
        }
    }
}

TEST_CASE("root count near the onset is resolved") {
    const auto just_above = solve_magnetization(SelfConsistency(2.0 * (1.0 + 1e-6), 1.0));
    REQUIRE(just_above.roots.size() == 3);
    CHECK(just_above.roots[2] > 0.0);
    CHECK(just_above.roots[2] < 1e-2);
}

TEST_CASE("critical_beta") {
    CHECK(critical_beta(1.0) == 2.0);
    CHECK(critical_beta(-1.0) == 2.0);
    CHECK(critical_beta(0.5) == 8.0);
    CHECK_THROWS_AS(critical_beta(0.0), DomainError);
    for (double m_prev : {1.0, 0.5, 0.8}) {
        const double c = critical_beta(m_prev);
        CHECK(solve_magnetization(SelfConsistency(c * (1 - 1e-3), m_prev)).roots.size() == 1);
        CHECK(solve_magnetization(SelfConsistency(c * (1 + 1e-3), m_prev)).roots.size() == 3);
    }
    CHECK(locate_bifurcation(1.0, 1.0, 3.0, 1e-10) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(locate_bifurcation(1.0, 2.5, 3.0), DomainError);
}

TEST_CASE("stability_threshold") {
    CHECK(stability_threshold(2.0) == 1.0);
    CHECK(stability_threshold(8.0) == 0.5);
    CHECK_THROWS_AS(stability_threshold(0.0), DomainError);
    CHECK_THROWS_AS(stability_threshold(-1.0), DomainError);
    for (double beta : {0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 20.0})
        for (int i = 0; i <= 40; ++i) {
            const double m_prev = i / 40.0;
            if (std::abs(m_prev - stability_threshold(beta)) < 1e-12) continue;
            const bool inside = m_prev < stability_threshold(beta);
            CHECK(inside == (solve_magnetization(SelfConsistency(beta, m_prev)).roots.size() == 1));
            CHECK(inside == (free_energy(0.0, m_prev, beta).curvature > 0.0));
        }
}

TEST_CASE("free_energy") {
    const auto zero = free_energy(0.0, 0.7, 3.0);
    CHECK(zero.value == doctest::Approx(std::log(0.5)).epsilon(1e-15));
    CHECK(zero.curvature == doctest::Approx(1.0 - 1.5 * 0.49).epsilon(1e-15));
    CHECK(free_energy(0.3, 0.7, 3.0).value == free_energy(-0.3, 0.7, 3.0).value);
    CHECK_THROWS_AS(free_energy(1.0, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(free_energy(-1.2, 0.5, 1.0), DomainError);
}

TEST_CASE("free_energy curvature matches finite differences") {
    const double h = 1e-4;
    for (double beta : {0.5, 2.0, 6.0})
        for (double m_prev : {0.2, 1.0})
            for (int i = -9; i <= 9; ++i) {
                const double m = i / 10.0;
                const double fd = (free_energy(m + h, m_prev, beta).value - 2 * free_energy(m, m_prev, beta).value +
                                   free_energy(m - h, m_prev, beta).value) /
                                  (h * h);
                const double exact = free_energy(m, m_prev, beta).curvature;
                CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
            }
}

TEST_CASE("partition_saddle_point") {
    CHECK(partition_saddle_point(10, 0.0, 0.3) == doctest::Approx(1024.0 * std::sqrt(2 * M_PI / 10)).epsilon(1e-15));
    CHECK_THROWS_AS(partition_saddle_point(10, 2.0, 1.0), SaddlePointInvalid);
    CHECK_THROWS_AS(partition_saddle_point(10, 3.0, 1.0), SaddlePointInvalid);
    const auto d = partition_saddle_point_diagnostic(20, 1.0, 0.5);
    CHECK(d.approximate == doctest::Approx(partition_saddle_point(20, 1.0, 0.5)));
    CHECK(d.exact == doctest::Approx(std::exp(log_partition(20, 1.0, shell_for(20, 10).hamiltonian))).epsilon(1e-12));
    CHECK(d.ratio == doctest::Approx(d.approximate / d.exact));
}

TEST_CASE("SelfConsistency validation") {
    CHECK_THROWS_AS(SelfConsistency(-1.0, 0.5), DomainError);
    CHECK_THROWS_AS(SelfConsistency(1.0, 1.5), DomainError);
    CHECK_THROWS_AS(SelfConsistency(1.0, 0.5, 0.1), DomainError);
    CHECK_THROWS_AS(SelfConsistency(1.0, 0.5, 0.0), DomainError);
}
