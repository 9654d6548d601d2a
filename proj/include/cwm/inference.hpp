#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cwm/exact_dist.hpp"

namespace cwm {

/// Disjoint sets of pair-sum values T that together cover every shell of N.
class ClassScheme {
public:
    ClassScheme(int n_traders, std::vector<std::vector<std::int64_t>> classes);

    /// One class per shell.
    static ClassScheme singletons(int n_traders);
    /// Parses "-5|-3|3|13..45": classes separated by '|', members by ',',
    /// and "a..b" selects every support value in [a, b].
    static ClassScheme parse(int n_traders, const std::string& spec);
    /// Singleton classes from the low end, merging the upper tail (and then
    /// any remaining sparse class into its upper neighbour) until every
    /// expected count is at least min_expected or only two classes remain.
    static ClassScheme tail_merged(int n_traders, std::size_t n_obs, double min_expected = 2.0);

    int n_traders() const noexcept { return n_; }
    std::size_t size() const noexcept { return classes_.size(); }
    const std::vector<std::vector<std::int64_t>>& classes() const noexcept { return classes_; }
    /// Class index holding T, or -1.
    int class_of(std::int64_t t) const;
    std::string describe() const;  // same grammar as parse()
    std::vector<std::string> labels() const;  // "-5", "13..45", ...

private:
    int n_;
    std::vector<std::vector<std::int64_t>> classes_;
};

struct FrequencyTable {
    std::vector<std::uint64_t> observed;
    std::vector<double> expected;
    std::uint64_t n_obs = 0;
};

struct ChiSquareReport {
    std::vector<std::string> class_labels;
    FrequencyTable frequencies;
    double statistic = 0.0;
    int df = 1;
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false;
    double critical_value = 0.0;
    std::string caveat;
};

/// Text appended to every report: windows are treated as independent draws.
extern const char* const kIndependenceCaveat;

std::vector<std::uint64_t> bin_observations(const std::vector<std::int64_t>& h_series, const ClassScheme& scheme);
std::vector<double> expected_counts(const ClassScheme& scheme, std::uint64_t n_obs, const DistributionTable& null_pmf);
double chi_square_statistic(const FrequencyTable& freq);

/// Regularised upper incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);
/// P(chi^2_df > x).
double chi_square_survival(double x, int df);
/// C with chi_square_survival(C, df) = alpha, by bisection to 1e-12.
double chi_square_critical_value(double alpha, int df);

ChiSquareReport test_independence(const std::vector<std::int64_t>& h_series, const ClassScheme& scheme, double alpha,
                                  const DistributionTable& null_pmf);

}  // namespace cwm
