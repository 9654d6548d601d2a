#include "cwm/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cwm/error.hpp"
#include "cwm/spin_core.hpp"

namespace cwm {

SelfConsistency::SelfConsistency(double b, double m, double tol) : beta(b), m_prev(m), tolerance(tol) {
    if (!std::isfinite(b) || b < 0.0) throw DomainError("beta must be finite and non-negative");
    if (!(std::abs(m) <= 1.0)) throw DomainError("m_prev must lie in [-1, 1]");
    if (!(tol > 0.0 && tol <= 1e-3)) throw DomainError("tolerance must lie in (0, 1e-3]");
}

RootSet solve_magnetization(const SelfConsistency& sc) {
    const double slope = sc.beta * sc.m_prev * sc.m_prev / 2.0;
    RootSet out;
    if (slope <= 1.0) {
        out.roots = {0.0};
        out.stable_flags = {slope < 1.0};
        return out;
    }
    auto f = [slope](double m) { return m - std::tanh(slope * m); };
    // f(1) > 0 always; walk down until f < 0 to bracket the positive root.
    double lo = 0.5;
    while (f(lo) >= 0.0) {
        lo *= 0.5;
        if (lo < 1e-300) throw DomainError("could not bracket the non-zero magnetization");
    }
    double hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    if (std::abs(f(root)) >= sc.tolerance)
        throw DomainError("bisection residual " + std::to_string(std::abs(f(root))) + " exceeds tolerance");
    const double t = std::tanh(slope * root);
    const bool outer_stable = std::abs(slope * (1.0 - t * t)) < 1.0;
    out.roots = {-root, 0.0, root};
    out.stable_flags = {outer_stable, false, outer_stable};
    return out;
}

double critical_beta(double m_prev) {
    if (!(std::abs(m_prev) <= 1.0)) throw DomainError("m_prev must lie in [-1, 1]");
    if (m_prev == 0.0) throw DomainError("m_prev = 0: the self-consistency slope is zero for every beta");
    return 2.0 / (m_prev * m_prev);
}

double stability_threshold(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("stability threshold needs beta > 0");
    return std::sqrt(2.0 / beta);
}

FreeEnergyPoint free_energy(double m, double m_prev, double beta) {
    if (!(std::abs(m) < 1.0)) throw DomainError("free energy is defined for |m| < 1");
    const double up = (1.0 + m) / 2.0;
    const double down = (1.0 - m) / 2.0;
    FreeEnergyPoint p;
    p.m = m;
    p.m_prev = m_prev;
    p.value = up * std::log(up) + down * std::log(down) - beta / 4.0 * m * m * m_prev * m_prev;
    p.curvature = 1.0 / (1.0 - m * m) - beta / 2.0 * m_prev * m_prev;
    return p;
}

namespace {

double saddle_curvature(double beta, double m_prev) {
    const double c = 1.0 - beta / 2.0 * m_prev * m_prev;
    if (!(c > 0.0))
        throw SaddlePointInvalid("1 - (beta/2) m_prev^2 = " + std::to_string(c) +
                                 " is not positive; the Gaussian approximation does not apply");
    return c;
}

}  // namespace

double partition_saddle_point(int n_traders, double beta, double m_prev) {
    if (n_traders < 1) throw DomainError("n_traders must be positive");
    const double c = saddle_curvature(beta, m_prev);
    return std::ldexp(std::sqrt(2.0 * M_PI / (n_traders * c)), n_traders);
}

SaddlePointDiagnostic partition_saddle_point_diagnostic(int n_traders, double beta, double m_prev) {
    const double c = saddle_curvature(beta, m_prev);
    const double log_approx = n_traders * std::log(2.0) + 0.5 * std::log(2.0 * M_PI / (n_traders * c));
    const double h_prev = (1.0 - n_traders * m_prev * m_prev) / 2.0;
    const auto shells = enumerate_shells(n_traders);
    std::vector<double> logs;
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& s : shells) {
        logs.push_back(log_big(s.multiplicity) + beta * s.hamiltonian_value() * h_prev / n_traders);
        top = std::max(top, logs.back());
    }
    double acc = 0.0;
    for (double v : logs) acc += std::exp(v - top);
    const double log_exact = top + std::log(acc);
    return {std::exp(log_approx), std::exp(log_exact), std::exp(log_approx - log_exact)};
}

double locate_bifurcation(double m_prev, double beta_low, double beta_high, double tolerance) {
    auto count = [m_prev](double beta) { return solve_magnetization(SelfConsistency(beta, m_prev)).roots.size(); };
    if (count(beta_low) != 1 || count(beta_high) != 3)
        throw DomainError("bifurcation is not bracketed by [" + std::to_string(beta_low) + ", " +
                          std::to_string(beta_high) + "]");
    while (beta_high - beta_low > tolerance) {
        const double mid = 0.5 * (beta_low + beta_high);
        (count(mid) == 1 ? beta_low : beta_high) = mid;
    }
    return 0.5 * (beta_low + beta_high);
}

}  // namespace cwm
