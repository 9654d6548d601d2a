#pragma once

#include <vector>

namespace cwm {

/// Inputs of m = tanh(beta m m_prev^2 / 2).
struct SelfConsistency {
    double beta = 0.0;
    double m_prev = 0.0;
    double tolerance = 1e-12;

    SelfConsistency() = default;
    SelfConsistency(double beta, double m_prev, double tolerance = 1e-12);  // validates
};

struct RootSet {
    std::vector<double> roots;      // ascending, symmetric about 0
    std::vector<bool> stable_flags; // |g'(root)| < 1 for g(m) = tanh(beta m m_prev^2 / 2)
};

struct FreeEnergyPoint {
    double m = 0.0;
    double m_prev = 0.0;
    double value = 0.0;
    double curvature = 0.0;
};

RootSet solve_magnetization(const SelfConsistency& sc);

/// 2 / m_prev^2: the temperature at which the non-zero roots appear.
double critical_beta(double m_prev);

/// sqrt(2 / beta): largest |m_prev| for which only the zero root survives.
double stability_threshold(double beta);

FreeEnergyPoint free_energy(double m, double m_prev, double beta);

/// 2^N sqrt(2 pi / (N (1 - (beta/2) m_prev^2))).
double partition_saddle_point(int n_traders, double beta, double m_prev);

struct SaddlePointDiagnostic {
    double approximate = 0.0;
    double exact = 0.0;   // sum over shells of multiplicity * exp(beta H H_prev / N)
    double ratio = 0.0;   // approximate / exact
};
/// The exact value conditions on H_prev = (1 - N m_prev^2) / 2.
SaddlePointDiagnostic partition_saddle_point_diagnostic(int n_traders, double beta, double m_prev);

/// Locates the beta at which solve_magnetization changes from one root to
/// three by bisection on [beta_low, beta_high].
double locate_bifurcation(double m_prev, double beta_low, double beta_high, double tolerance = 1e-10);

}  // namespace cwm
