#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwm/exact_dist.hpp"
#include "cwm/inference.hpp"
#include "cwm/meanfield.hpp"

namespace cwm {

/// "%.12g"; the single number format used by every CSV and JSON writer.
std::string format_real(double value);
std::string format_rational(const Rational& value);

/// Columns: T,H,abs_spin_sum,count,probability.
void write_distribution_csv(std::ostream& out, const DistributionTable& table);
/// Columns: from_T,from_H,<one column per destination T>.
void write_kernel_csv(std::ostream& out, const std::vector<ShellValue>& shells,
                      const std::vector<std::vector<double>>& matrix);
/// Self-contained bar chart of the probabilities against T.
void write_histogram_svg(std::ostream& out, const DistributionTable& table, const std::string& title);

nlohmann::json to_json(const ChiSquareReport& report);
void write_report_text(std::ostream& out, const ChiSquareReport& report);

nlohmann::json to_json(const RootSet& roots);

/// Asymptotic pmf and moment approximations against the exact values for
/// each N, as CSV rows: kind,N,beta,condition_T,approx,exact,ratio.
void write_asymptotic_report(std::ostream& out, const std::vector<int>& n_values, const std::vector<double>& betas);

}  // namespace cwm
