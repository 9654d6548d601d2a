#include "cwm/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace cwm {

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string format_rational(const Rational& value) {
    std::string s = std::to_string(value.numerator());
    if (value.denominator() != 1) s += "/" + std::to_string(value.denominator());
    return s;
}

void write_distribution_csv(std::ostream& out, const DistributionTable& table) {
    out << "T,H,abs_spin_sum,count,probability\n";
    for (std::size_t k = 0; k < table.size(); ++k) {
        const auto& s = table.labels[k];
        out << s.pair_sum << ',' << format_rational(s.hamiltonian) << ',' << s.abs_spin_sum << ',' << table.counts[k]
            << ',' << format_real(table.probs[k]) << '\n';
    }
}

void write_kernel_csv(std::ostream& out, const std::vector<ShellValue>& shells,
                      const std::vector<std::vector<double>>& matrix) {
    out << "from_T,from_H";
    for (const auto& s : shells) out << ",T=" << s.pair_sum;
    out << '\n';
    for (std::size_t i = 0; i < shells.size(); ++i) {
        out << shells[i].pair_sum << ',' << format_rational(shells[i].hamiltonian);
        for (double p : matrix[i]) out << ',' << format_real(p);
        out << '\n';
    }
}

void write_histogram_svg(std::ostream& out, const DistributionTable& table, const std::string& title) {
    const int width = 640;
    const int height = 400;
    const int left = 70, right = 20, top = 40, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    double pmax = 0.0;
    for (double p : table.probs) pmax = std::max(pmax, p);
    if (pmax <= 0.0) pmax = 1.0;
    const auto n = static_cast<double>(table.size());
    const double slot = plot_w / std::max(1.0, n);
    const double bar = slot * 0.7;

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"15\">" << title << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = pmax * tick / 4.0;
        const double y = top + plot_h - plot_h * tick / 4.0;
        out << "<text x=\"" << left - 6 << "\" y=\"" << format_real(y + 4) << "\" text-anchor=\"end\" "
            << "font-family=\"sans-serif\" font-size=\"11\">" << format_real(v) << "</text>\n";
    }
    for (std::size_t k = 0; k < table.size(); ++k) {
        const double h = plot_h * table.probs[k] / pmax;
        const double x = left + slot * static_cast<double>(k) + (slot - bar) / 2.0;
        out << "<rect x=\"" << format_real(x) << "\" y=\"" << format_real(top + plot_h - h) << "\" width=\""
            << format_real(bar) << "\" height=\"" << format_real(h) << "\" fill=\"#4a6fa5\"/>\n";
        out << "<text x=\"" << format_real(x + bar / 2.0) << "\" y=\"" << format_real(top + plot_h + 16)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << table.labels[k].pair_sum
            << "</text>\n";
    }
    out << "<text x=\"" << format_real(left + plot_w / 2.0) << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">pair sum T</text>\n";
    out << "<text x=\"16\" y=\"" << format_real(top + plot_h / 2.0) << "\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " << format_real(top + plot_h / 2.0)
        << ")\">probability</text>\n";
    out << "</svg>\n";
}

nlohmann::json to_json(const ChiSquareReport& r) {
    nlohmann::json classes = nlohmann::json::array();
    for (std::size_t k = 0; k < r.class_labels.size(); ++k)
        classes.push_back({{"class", r.class_labels[k]},
                           {"observed", r.frequencies.observed[k]},
                           {"expected", r.frequencies.expected[k]}});
    return {{"classes", classes},
            {"n_obs", r.frequencies.n_obs},
            {"statistic", r.statistic},
            {"df", r.df},
            {"p_value", r.p_value},
            {"alpha", r.alpha},
            {"critical_value", r.critical_value},
            {"reject", r.reject},
            {"decision", r.reject ? "reject independence" : "fail to reject independence"},
            {"caveat", r.caveat}};
}

void write_report_text(std::ostream& out, const ChiSquareReport& r) {
    out << "class,observed,expected\n";
    for (std::size_t k = 0; k < r.class_labels.size(); ++k)
        out << r.class_labels[k] << ',' << r.frequencies.observed[k] << ',' << format_real(r.frequencies.expected[k])
            << '\n';
    out << "n_obs=" << r.frequencies.n_obs << '\n';
    out << "statistic=" << format_real(r.statistic) << '\n';
    out << "df=" << r.df << '\n';
    out << "p_value=" << format_real(r.p_value) << '\n';
    out << "alpha=" << format_real(r.alpha) << '\n';
    out << "critical_value=" << format_real(r.critical_value) << '\n';
    out << "decision=" << (r.reject ? "reject independence" : "fail to reject independence") << '\n';
    out << "note: " << r.caveat << '\n';
}

nlohmann::json to_json(const RootSet& roots) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < roots.roots.size(); ++i)
        arr.push_back({{"root", roots.roots[i]}, {"stable", static_cast<bool>(roots.stable_flags[i])}});
    return {{"roots", arr}};
}

void write_asymptotic_report(std::ostream& out, const std::vector<int>& n_values, const std::vector<double>& betas) {
    out << "kind,N,beta,condition_T,approx,exact,ratio\n";
    for (int n : n_values) {
        const auto diag = asymptotic_pmf_diagnostic(n);
        const auto exact = independent_pmf(n);
        for (const auto& [t, ratio] : diag.ratios) {
            const int idx = shell_index_for_pair_sum(n, t);
            out << "pmf," << n << ",0," << t << ',' << format_real(asymptotic_pmf(n, t)) << ','
                << format_real(exact.probs[static_cast<std::size_t>(idx)]) << ',' << format_real(ratio) << '\n';
        }
        out << "pmf_total_mass," << n << ",0,," << format_real(diag.total_mass) << ",1,"
            << format_real(diag.total_mass) << '\n';

        const auto shells = enumerate_shells(n);
        std::vector<std::size_t> picks = {shells.size() - 1, shells.size() / 2, shells.size() > 1 ? 1u : 0u};
        std::sort(picks.begin(), picks.end());
        picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
        for (double beta : betas) {
            for (auto k : picks) {
                const auto& shell = shells[k];
                if (shell.hamiltonian.numerator() == 0) continue;
                const auto direct = conditional_moments_direct(n, beta, shell);
                const auto approx = asymptotic_moments(n, beta, shell);
                out << "mean," << n << ',' << format_real(beta) << ',' << shell.pair_sum << ','
                    << format_real(approx.mean) << ',' << format_real(direct.mean) << ','
                    << format_real(approx.mean / direct.mean) << '\n';
                out << "variance," << n << ',' << format_real(beta) << ',' << shell.pair_sum << ','
                    << format_real(approx.variance) << ',' << format_real(direct.variance) << ','
                    << format_real(approx.variance / direct.variance) << '\n';
            }
        }
    }
}

}  // namespace cwm
