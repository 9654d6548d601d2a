#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cwm/error.hpp"
#include "cwm/exact_dist.hpp"
#include "cwm/inference.hpp"
#include "cwm/market_io.hpp"
#include "cwm/meanfield.hpp"
#include "cwm/report.hpp"
#include "cwm/simulate.hpp"

namespace cwm::cli {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    const auto path = fs::path(dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot write " + path.string());
    return f;
}

struct TradeOptions {
    std::string input;
    std::size_t n_top = 10;
    std::vector<std::string> traders;
    std::string window = "10m";
    std::string inactive_rule = "carry-forward";
    std::string tie_rule = "carry-forward";
};

void add_trade_options(CLI::App* cmd, TradeOptions& o) {
    cmd->add_option("--input", o.input, "Delimiter-separated trade file")->required();
    cmd->add_option("--n-top", o.n_top, "Track the N most active traders")->check(CLI::PositiveNumber);
    cmd->add_option("--traders", o.traders, "Explicit trader list (overrides --n-top)")->delimiter(',');
    cmd->add_option("--window", o.window, "Window width, e.g. 10m, 600s");
    cmd->add_option("--inactive-rule", o.inactive_rule, "carry-forward | drop-window")
        ->check(CLI::IsMember({"carry-forward", "drop-window"}));
    cmd->add_option("--tie-rule", o.tie_rule, "carry-forward | net-quantity")
        ->check(CLI::IsMember({"carry-forward", "net-quantity"}));
}

SpinSeries load_series(const TradeOptions& o, std::ostream& err) {
    std::ifstream in(o.input, std::ios::binary);
    if (!in) throw FormatError("cannot open " + o.input);
    const auto parsed = parse_trades(in);
    for (const auto& e : parsed.errors) err << o.input << ":" << e.line << ": " << e.message << '\n';
    WindowingPolicy policy;
    policy.width_us = parse_duration(o.window);
    policy.trader_set = o.traders.empty() ? top_traders(parsed.records, o.n_top) : o.traders;
    policy.inactive_rule = o.inactive_rule == "drop-window" ? InactiveRule::DropWindow : InactiveRule::CarryForward;
    policy.tie_rule = o.tie_rule == "net-quantity" ? TieRule::NetQuantity : TieRule::CarryForward;
    auto series = windowize(parsed.records, policy);
    for (const auto& d : series.dropped) err << "dropped window " << format_timestamp(d.start_us) << ": " << d.reason << '\n';
    for (const auto& w : series.warnings) err << "warning: " << w << '\n';
    return series;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Curie-Weiss space-time market model: exact laws, mean-field analysis, sampling and "
                 "independence testing"};
    app.name("cwmarket");
    app.require_subcommand(1);

    int n = 10;
    double beta = 0.0;
    double m_prev = 1.0;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int steps = 100000;
    std::size_t burn_in = 1000;
    double alpha = 0.05;
    std::string classes;
    bool json = false;
    std::vector<int> n_list{10, 100, 1000};
    std::vector<double> beta_list{0.0, 1.0};
    TradeOptions trade;

    auto* dist = app.add_subcommand("dist", "Exact distribution of the pair sum (CSV on stdout, CSV+SVG in --out)");
    dist->add_option("--n", n, "Number of traders")->required();
    dist->add_option("--beta", beta, "Market temperature (0 = independent traders)");
    dist->add_option("--out", out_dir, "Directory for CSV and SVG files")->capture_default_str();

    auto* kernel = app.add_subcommand("kernel", "Shell transition matrix of the Hamiltonian chain");
    kernel->add_option("--n", n)->required();
    kernel->add_option("--beta", beta)->required();

    auto* stationary = app.add_subcommand("stationary", "Stationary law over shells with balance residuals");
    stationary->add_option("--n", n)->required();
    stationary->add_option("--beta", beta)->required();

    auto* moments = app.add_subcommand("moments", "Conditional mean and variance of H by every method");
    moments->add_option("--n", n)->required();
    moments->add_option("--beta", beta)->required();

    auto* reconcile = app.add_subcommand("reconcile", "Compare closed-form kernel readings against the exact kernel");
    reconcile->add_option("--n", n)->required();
    reconcile->add_option("--beta", beta)->required();

    auto* meanfield = app.add_subcommand("meanfield", "Roots of m = tanh(beta m m_prev^2 / 2) and stability");
    meanfield->add_option("--beta", beta)->required();
    meanfield->add_option("--m-prev", m_prev)->required();
    meanfield->add_option("--n", n, "Traders for the saddle-point partition function");
    meanfield->add_flag("--json", json);

    auto* simulate = app.add_subcommand("simulate", "Sample a trajectory and compare occupancy with the stationary law");
    simulate->add_option("--n", n)->required();
    simulate->add_option("--beta", beta)->required();
    simulate->add_option("--steps", steps)->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed);
    simulate->add_option("--burn-in", burn_in);
    simulate->add_option("--out", out_dir, "Directory for trajectory.csv");

    auto* series_cmd = app.add_subcommand("series", "Window trade data into spin configurations (CSV)");
    add_trade_options(series_cmd, trade);

    auto* test = app.add_subcommand("test", "Chi-square test of trader independence on windowed trade data");
    add_trade_options(test, trade);
    test->add_option("--alpha", alpha)->check(CLI::Range(0.0, 1.0));
    test->add_option("--classes", classes, "Class scheme, e.g. \"-5|-3|3|13..45\"");
    test->add_flag("--json", json);

    auto* asym = app.add_subcommand("asymptotics", "Large-N approximations against exact values (CSV)");
    asym->add_option("--n", n_list)->delimiter(',');
    asym->add_option("--beta", beta_list)->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*dist) {
            const auto table = beta == 0.0 ? independent_pmf(n) : gibbs_static_pmf(n, beta);
            write_distribution_csv(out, table);
            const std::string stem = "energy_distribution_n" + std::to_string(n);
            auto csv = open_output(out_dir, stem + ".csv");
            write_distribution_csv(csv, table);
            auto svg = open_output(out_dir, stem + ".svg");
            write_histogram_svg(svg, table, "Exact distribution of the energy function, N = " + std::to_string(n));
        } else if (*kernel) {
            write_kernel_csv(out, enumerate_shells(n), shell_kernel_matrix(n, beta));
        } else if (*stationary) {
            write_distribution_csv(out, stationary_distribution(n, beta));
            out << "# detailed_balance_residual=" << format_real(detailed_balance_residual(n, beta)) << '\n';
            out << "# stationarity_residual=" << format_real(stationarity_residual(n, beta)) << '\n';
        } else if (*moments) {
            out << "T,H,direct_mean,direct_variance,logz_mean,logz_variance,first_derivative_variance,asymptotic_mean,"
                   "asymptotic_variance\n";
            for (const auto& shell : enumerate_shells(n)) {
                const auto d = conditional_moments_direct(n, beta, shell);
                out << shell.pair_sum << ',' << format_rational(shell.hamiltonian) << ',' << format_real(d.mean) << ','
                    << format_real(d.variance);
                if (shell.hamiltonian.numerator() == 0) {
                    out << ",,,,,\n";
                    continue;
                }
                const auto l = conditional_moments_logZ(n, beta, shell);
                out << ',' << format_real(l.mean) << ',' << format_real(l.variance) << ','
                    << format_real(*l.first_derivative_variance);
                try {
                    const auto a = asymptotic_moments(n, beta, shell);
                    out << ',' << format_real(a.mean) << ',' << format_real(a.variance) << '\n';
                } catch (const SingularityError&) {
                    out << ",,\n";
                }
            }
        } else if (*reconcile) {
            out << "condition_T,reading,total_variation,zero_shell_matches,general_case_matches,matches\n";
            for (const auto& shell : enumerate_shells(n)) {
                const auto rec = reconcile_hamiltonian_kernel(n, beta, shell);
                for (const auto& r : rec.readings)
                    out << shell.pair_sum << ',' << r.name << ',' << format_real(r.total_variation) << ','
                        << r.zero_shell_matches << ',' << r.general_case_matches << ',' << r.matches << '\n';
            }
        } else if (*meanfield) {
            const auto roots = solve_magnetization(SelfConsistency(beta, m_prev));
            auto j = to_json(roots);
            j["beta"] = beta;
            j["m_prev"] = m_prev;
            j["f_curvature_at_zero"] = free_energy(0.0, m_prev, beta).curvature;
            if (m_prev != 0.0) j["critical_beta"] = critical_beta(m_prev);
            if (beta > 0.0) j["stability_threshold"] = stability_threshold(beta);
            try {
                const auto sp = partition_saddle_point_diagnostic(n, beta, m_prev);
                j["saddle_point"] = {{"n", n}, {"approximate", sp.approximate}, {"exact", sp.exact}, {"ratio", sp.ratio}};
            } catch (const SaddlePointInvalid& e) {
                j["saddle_point"] = {{"n", n}, {"error", e.what()}};
            }
            if (json) {
                out << j.dump(2) << '\n';
            } else {
                out << "root,stable\n";
                for (std::size_t i = 0; i < roots.roots.size(); ++i)
                    out << format_real(roots.roots[i]) << ',' << (roots.stable_flags[i] ? "true" : "false") << '\n';
                if (j.contains("critical_beta")) out << "# critical_beta=" << format_real(j["critical_beta"]) << '\n';
                if (j.contains("stability_threshold"))
                    out << "# stability_threshold=" << format_real(j["stability_threshold"]) << '\n';
                out << "# f_curvature_at_zero=" << format_real(j["f_curvature_at_zero"]) << '\n';
            }
        } else if (*simulate) {
            SamplerSpec spec{ModelParams(n, beta), steps, seed, SpinConfiguration::all_up(n)};
            const auto traj = simulate_trajectory(spec);
            const auto empirical = empirical_distribution(traj, burn_in);
            const auto exact = stationary_distribution(n, beta);
            out << "# generator=" << traj.generator << " seed=" << traj.seed << " steps=" << steps
                << " burn_in=" << burn_in << '\n';
            out << "T,H,empirical,stationary\n";
            for (std::size_t k = 0; k < exact.size(); ++k)
                out << exact.labels[k].pair_sum << ',' << format_rational(exact.labels[k].hamiltonian) << ','
                    << format_real(empirical.probs[k]) << ',' << format_real(exact.probs[k]) << '\n';
            out << "# total_variation=" << format_real(total_variation(empirical.probs, exact.probs)) << '\n';
            if (simulate->count("--out") > 0) {
                auto f = open_output(out_dir, "trajectory.csv");
                f << "# generator=" << traj.generator << " seed=" << traj.seed << '\n';
                f << "t,spin_sum,T,H,config\n";
                for (std::size_t t = 0; t < traj.size(); ++t) {
                    f << t << ',' << traj.magnetizations[t].spin_sum() << ',' << traj.shells[t].pair_sum << ','
                      << format_rational(traj.shells[t].hamiltonian) << ',';
                    for (int x : traj.configs[t].spins()) f << (x > 0 ? '+' : '-');
                    f << '\n';
                }
            }
        } else if (*series_cmd) {
            write_spin_series_csv(out, load_series(trade, err));
        } else if (*test) {
            const auto series = load_series(trade, err);
            const auto h = hamiltonian_series(series);
            const int n_traders = static_cast<int>(series.traders.size());
            const auto scheme = classes.empty() ? ClassScheme::tail_merged(n_traders, h.size())
                                                : ClassScheme::parse(n_traders, classes);
            const auto report = test_independence(h, scheme, alpha, independent_pmf(n_traders));
            if (json) {
                auto j = to_json(report);
                j["traders"] = series.traders;
                j["windows"] = series.size();
                out << j.dump(2) << '\n';
            } else {
                out << "traders=";
                for (std::size_t i = 0; i < series.traders.size(); ++i) out << (i ? "," : "") << series.traders[i];
                out << "\nwindows=" << series.size() << '\n';
                write_report_text(out, report);
            }
        } else if (*asym) {
            write_asymptotic_report(out, n_list, beta_list);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.category() == Error::Category::Data ? kDataError : kNumericalError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kOk;
}

}  // namespace cwm::cli
