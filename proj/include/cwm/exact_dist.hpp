#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cwm/spin_core.hpp"

namespace cwm {

/// Probability table over shells, sorted by pair sum T.
struct DistributionTable {
    std::vector<ShellValue> labels;
    std::vector<BigInt> counts;  // shell multiplicities
    std::vector<double> probs;

    std::size_t size() const noexcept { return probs.size(); }
    double total() const;
};

/// Law of the next shell given the shell of the previous configuration.
struct TransitionKernel {
    ShellValue condition;
    DistributionTable row;
    double partition_value = 0.0;  // Z over configurations; +inf once it overflows a double
    double log_partition = 0.0;
};

/// Law of the next magnetization given the previous one (all N+1 values).
struct MagnetizationKernel {
    Magnetization condition;
    std::vector<Magnetization> support;  // ascending spin sum
    std::vector<BigInt> counts;          // C(N, N(1+m)/2)
    std::vector<double> probs;
    double partition_value = 0.0;
    double log_partition = 0.0;
};

enum class MomentsMethod { DirectSum, LogZDerivative, Asymptotic };
std::string to_string(MomentsMethod method);

struct MomentsReport {
    double mean = 0.0;
    double variance = 0.0;
    MomentsMethod method = MomentsMethod::DirectSum;
    /// LogZDerivative only: (N/h)^2 times the first derivative of ln Z.
    /// Not a variance in general; kept for comparison.
    std::optional<double> first_derivative_variance;
};

/// Finite-difference steps for the ln Z derivatives, scaled by max(1, beta).
struct DerivativeSteps {
    double first = 1e-5;
    double second = 1e-3;
};

// --- static laws of the pair sum T ------------------------------------------

DistributionTable independent_pmf(int n_traders);
/// Weights multiplicity(T) * exp(T beta / N), normalised.
DistributionTable gibbs_static_pmf(int n_traders, double beta);

// --- one-step kernels --------------------------------------------------------

MagnetizationKernel mean_field_kernel(int n_traders, double beta, const Magnetization& m_prev);
TransitionKernel hamiltonian_kernel(int n_traders, double beta, const ShellValue& h_prev);
/// Row-stochastic matrix K[i][j] = P(shell j | shell i) over enumerate_shells(n).
std::vector<std::vector<double>> shell_kernel_matrix(int n_traders, double beta);

/// ln Z_{h_prev}(beta) = ln sum_shells multiplicity * exp(beta H H_prev / N).
/// Defined for negative beta as well so central differences work at 0.
double log_partition(int n_traders, double beta, const Rational& h_prev);

/// Closed form of the Hamiltonian kernel written with a single symbol h,
/// evaluated under two readings of that symbol and compared with the
/// canonical kernel.
struct KernelReading {
    std::string name;
    std::vector<double> row;  // normalised, same shell order as the canonical row
    double total_variation = 0.0;
    bool zero_shell_matches = false;     // s = 0 entry (the "h_t = 1/2" case)
    bool general_case_matches = false;   // every s > 0 entry
    bool matches = false;
};

struct KernelReconciliation {
    int n_traders = 0;
    double beta = 0.0;
    ShellValue condition;
    std::vector<double> canonical;
    std::vector<KernelReading> readings;  // "H-reading", "T-reading"
};

KernelReconciliation reconcile_hamiltonian_kernel(int n_traders, double beta, const ShellValue& h_prev);

// --- conditional moments -----------------------------------------------------

MomentsReport conditional_moments_direct(int n_traders, double beta, const ShellValue& h_prev);
MomentsReport conditional_moments_logZ(int n_traders, double beta, const ShellValue& h_prev,
                                       DerivativeSteps steps = {});

// --- large-N approximations (diagnostics) ------------------------------------

/// (pi (2h + N))^{-1/2} exp(-(2h + N)/4) for the pair sum h.
double asymptotic_pmf(int n_traders, std::int64_t h);

struct AsymptoticPmfDiagnostic {
    int n_traders = 0;
    double total_mass = 0.0;          // formula summed over the shell support (s > 0)
    double max_ratio = 0.0;           // max formula/exact over the support with s > 0
    double min_ratio = 0.0;
    double max_abs_error = 0.0;
    std::vector<std::pair<std::int64_t, double>> ratios;  // (T, formula/exact)
};
AsymptoticPmfDiagnostic asymptotic_pmf_diagnostic(int n_traders);

MomentsReport asymptotic_moments(int n_traders, double beta, const ShellValue& h_prev);

// --- stationarity ------------------------------------------------------------

/// pi over shells, shell weight = multiplicity * Z_x.
DistributionTable stationary_distribution(int n_traders, double beta);
/// max over shell pairs of |pi(x) p(y|x) - pi(y) p(x|y)|, per configuration.
double detailed_balance_residual(int n_traders, double beta);
/// max_j |(pi K)_j - pi_j|.
double stationarity_residual(int n_traders, double beta);

// --- pairwise products under independence -----------------------------------

/// Max |P(X_iX_j=a, X_kX_l=b) - P(X_iX_j=a)P(X_kX_l=b)| over all distinct
/// index pairs sharing at most one index. Indices are zero-based.
double pairwise_product_independence_check(int n_traders);
double pairwise_product_independence_check(int n_traders, std::pair<int, int> first,
                                           std::pair<int, int> second);

/// Total variation distance between two probability vectors of equal length.
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace cwm
