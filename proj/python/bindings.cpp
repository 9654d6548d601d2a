#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "cwm/error.hpp"
#include "cwm/exact_dist.hpp"
#include "cwm/inference.hpp"
#include "cwm/market_io.hpp"
#include "cwm/meanfield.hpp"
#include "cwm/report.hpp"
#include "cwm/simulate.hpp"

namespace py = pybind11;
using namespace cwm;

namespace {

py::object to_py(const BigInt& v) {
    return py::reinterpret_steal<py::object>(PyLong_FromString(v.str().c_str(), nullptr, 10));
}

py::object to_py(const Rational& r) {
    return py::module_::import("fractions").attr("Fraction")(r.numerator(), r.denominator());
}

Rational to_rational(const py::object& value) {
    const auto fraction = py::module_::import("fractions").attr("Fraction")(value);
    return Rational(fraction.attr("numerator").cast<std::int64_t>(), fraction.attr("denominator").cast<std::int64_t>());
}

py::list counts_to_py(const std::vector<BigInt>& counts) {
    py::list out;
    for (const auto& c : counts) out.append(to_py(c));
    return out;
}

SpinConfiguration to_config(const std::vector<int>& spins) { return SpinConfiguration(spins); }

std::vector<int> to_list(const SpinConfiguration& c) { return {c.spins().begin(), c.spins().end()}; }

InactiveRule inactive_rule(const std::string& s) {
    if (s == "carry-forward") return InactiveRule::CarryForward;
    if (s == "drop-window") return InactiveRule::DropWindow;
    throw DomainError("inactive_rule must be 'carry-forward' or 'drop-window'");
}

TieRule tie_rule(const std::string& s) {
    if (s == "carry-forward") return TieRule::CarryForward;
    if (s == "net-quantity") return TieRule::NetQuantity;
    throw DomainError("tie_rule must be 'carry-forward' or 'net-quantity'");
}

SpinSeries series_from_file(const std::string& path, std::size_t n_top, const std::vector<std::string>& traders,
                            const std::string& window, const std::string& inactive, const std::string& tie) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    const auto parsed = parse_trades(in);
    WindowingPolicy policy;
    policy.width_us = parse_duration(window);
    policy.trader_set = traders.empty() ? top_traders(parsed.records, n_top) : traders;
    policy.inactive_rule = inactive_rule(inactive);
    policy.tie_rule = tie_rule(tie);
    return windowize(parsed.records, policy);
}

}  // namespace

PYBIND11_MODULE(_cwmarket, m) {
    m.doc() = "Curie-Weiss space-time market model";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", error.ptr());
    py::register_exception<CapacityError>(m, "CapacityError", error.ptr());
    py::register_exception<SingularityError>(m, "SingularityError", error.ptr());
    py::register_exception<SaddlePointInvalid>(m, "SaddlePointInvalid", error.ptr());
    py::register_exception<DegenerateClassError>(m, "DegenerateClassError", error.ptr());
    py::register_exception<FormatError>(m, "FormatError", error.ptr());

    // spin core
    py::class_<ShellValue>(m, "Shell")
        .def_readonly("n_traders", &ShellValue::n_traders)
        .def_readonly("abs_spin_sum", &ShellValue::abs_spin_sum)
        .def_readonly("pair_sum", &ShellValue::pair_sum)
        .def_property_readonly("multiplicity", [](const ShellValue& s) { return to_py(s.multiplicity); })
        .def_property_readonly("hamiltonian", [](const ShellValue& s) { return to_py(s.hamiltonian); })
        .def("__repr__", [](const ShellValue& s) { return "Shell(" + s.label() + ")"; });

    m.def("spin_sum", [](const std::vector<int>& x) { return spin_sum(to_config(x)); }, py::arg("spins"));
    m.def("pair_sum", [](const std::vector<int>& x) { return pair_sum(to_config(x)); }, py::arg("spins"));
    m.def("hamiltonian", [](const std::vector<int>& x) { return to_py(hamiltonian(to_config(x))); }, py::arg("spins"));
    m.def("magnetization", [](const std::vector<int>& x) { return to_py(magnetization(to_config(x)).value()); },
          py::arg("spins"));
    m.def("enumerate_shells", &enumerate_shells, py::arg("n"));
    m.def("shell_for", &shell_for, py::arg("n"), py::arg("abs_spin_sum"));

    // exact distributions
    py::class_<DistributionTable>(m, "DistributionTable")
        .def_readonly("labels", &DistributionTable::labels)
        .def_property_readonly("counts", [](const DistributionTable& t) { return counts_to_py(t.counts); })
        .def_readonly("probs", &DistributionTable::probs)
        .def_property_readonly("pair_sums",
                               [](const DistributionTable& t) {
                                   std::vector<std::int64_t> out;
                                   for (const auto& s : t.labels) out.push_back(s.pair_sum);
                                   return out;
                               })
        .def("__len__", &DistributionTable::size)
        .def("to_csv", [](const DistributionTable& t) {
            std::ostringstream out;
            write_distribution_csv(out, t);
            return out.str();
        });

    py::class_<TransitionKernel>(m, "TransitionKernel")
        .def_readonly("condition", &TransitionKernel::condition)
        .def_readonly("row", &TransitionKernel::row)
        .def_readonly("log_partition", &TransitionKernel::log_partition);

    py::class_<MomentsReport>(m, "Moments")
        .def_readonly("mean", &MomentsReport::mean)
        .def_readonly("variance", &MomentsReport::variance)
        .def_readonly("first_derivative_variance", &MomentsReport::first_derivative_variance)
        .def_property_readonly("method", [](const MomentsReport& r) { return to_string(r.method); });

    m.def("independent_pmf", &independent_pmf, py::arg("n"));
    m.def("gibbs_static_pmf", &gibbs_static_pmf, py::arg("n"), py::arg("beta"));
    m.def("hamiltonian_kernel",
          [](int n, double beta, int abs_spin_sum) { return hamiltonian_kernel(n, beta, shell_for(n, abs_spin_sum)); },
          py::arg("n"), py::arg("beta"), py::arg("abs_spin_sum"));
    m.def("shell_kernel_matrix", &shell_kernel_matrix, py::arg("n"), py::arg("beta"));
    m.def("log_partition", [](int n, double beta, const py::object& h) { return log_partition(n, beta, to_rational(h)); },
          py::arg("n"), py::arg("beta"), py::arg("h_prev"));
    m.def("stationary_distribution", &stationary_distribution, py::arg("n"), py::arg("beta"));
    m.def("detailed_balance_residual", &detailed_balance_residual, py::arg("n"), py::arg("beta"));
    m.def("stationarity_residual", &stationarity_residual, py::arg("n"), py::arg("beta"));
    m.def("conditional_moments",
          [](int n, double beta, int abs_spin_sum, const std::string& method) {
              const auto shell = shell_for(n, abs_spin_sum);
              if (method == "direct-sum") return conditional_moments_direct(n, beta, shell);
              if (method == "logZ-derivative") return conditional_moments_logZ(n, beta, shell);
              if (method == "asymptotic") return asymptotic_moments(n, beta, shell);
              throw DomainError("method must be 'direct-sum', 'logZ-derivative' or 'asymptotic'");
          },
          py::arg("n"), py::arg("beta"), py::arg("abs_spin_sum"), py::arg("method") = "direct-sum");
    m.def("asymptotic_pmf", &asymptotic_pmf, py::arg("n"), py::arg("pair_sum"));
    m.def("asymptotic_report",
          [](const std::vector<int>& n_values, const std::vector<double>& betas) {
              std::ostringstream out;
              write_asymptotic_report(out, n_values, betas);
              return out.str();
          },
          py::arg("n_values") = std::vector<int>{10, 100, 1000}, py::arg("betas") = std::vector<double>{0.0, 1.0});
    m.def("total_variation", &total_variation, py::arg("p"), py::arg("q"));

    // mean field
    py::class_<RootSet>(m, "RootSet")
        .def_readonly("roots", &RootSet::roots)
        .def_readonly("stable", &RootSet::stable_flags);
    m.def("solve_magnetization",
          [](double beta, double m_prev, double tol) { return solve_magnetization(SelfConsistency(beta, m_prev, tol)); },
          py::arg("beta"), py::arg("m_prev"), py::arg("tol") = 1e-12);
    m.def("critical_beta", &critical_beta, py::arg("m_prev"));
    m.def("stability_threshold", &stability_threshold, py::arg("beta"));
    m.def("free_energy",
          [](double mm, double m_prev, double beta) {
              const auto f = free_energy(mm, m_prev, beta);
              return py::make_tuple(f.value, f.curvature);
          },
          py::arg("m"), py::arg("m_prev"), py::arg("beta"));
    m.def("partition_saddle_point", &partition_saddle_point, py::arg("n"), py::arg("beta"), py::arg("m_prev"));
    m.def("locate_bifurcation", &locate_bifurcation, py::arg("m_prev"), py::arg("beta_low"), py::arg("beta_high"),
          py::arg("tol") = 1e-10);

    // simulation
    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("configs",
                               [](const Trajectory& t) {
                                   std::vector<std::vector<int>> out;
                                   for (const auto& c : t.configs) out.push_back(to_list(c));
                                   return out;
                               })
        .def_property_readonly("pair_sums",
                               [](const Trajectory& t) {
                                   std::vector<std::int64_t> out;
                                   for (const auto& s : t.shells) out.push_back(s.pair_sum);
                                   return out;
                               })
        .def_readonly("generator", &Trajectory::generator)
        .def_readonly("seed", &Trajectory::seed)
        .def("__len__", &Trajectory::size)
        .def("empirical_distribution", &empirical_distribution, py::arg("burn_in") = 0);
    m.def("simulate",
          [](int n, double beta, int steps, std::uint64_t seed, std::optional<std::vector<int>> initial) {
              SamplerSpec spec{ModelParams(n, beta), steps, seed,
                               initial ? to_config(*initial) : SpinConfiguration::all_up(n)};
              return simulate_trajectory(spec);
          },
          py::arg("n"), py::arg("beta"), py::arg("steps"), py::arg("seed") = 1, py::arg("initial") = py::none());

    // inference
    py::class_<ClassScheme>(m, "ClassScheme")
        .def_static("parse", &ClassScheme::parse, py::arg("n"), py::arg("spec"))
        .def_static("singletons", &ClassScheme::singletons, py::arg("n"))
        .def_static("tail_merged", &ClassScheme::tail_merged, py::arg("n"), py::arg("n_obs"),
                    py::arg("min_expected") = 2.0)
        .def_property_readonly("labels", &ClassScheme::labels)
        .def("__len__", &ClassScheme::size)
        .def("__str__", &ClassScheme::describe);

    py::class_<ChiSquareReport>(m, "ChiSquareReport")
        .def_readonly("class_labels", &ChiSquareReport::class_labels)
        .def_property_readonly("observed", [](const ChiSquareReport& r) { return r.frequencies.observed; })
        .def_property_readonly("expected", [](const ChiSquareReport& r) { return r.frequencies.expected; })
        .def_readonly("statistic", &ChiSquareReport::statistic)
        .def_readonly("df", &ChiSquareReport::df)
        .def_readonly("p_value", &ChiSquareReport::p_value)
        .def_readonly("alpha", &ChiSquareReport::alpha)
        .def_readonly("critical_value", &ChiSquareReport::critical_value)
        .def_readonly("reject", &ChiSquareReport::reject)
        .def_readonly("caveat", &ChiSquareReport::caveat)
        .def("to_json", [](const ChiSquareReport& r) { return to_json(r).dump(); });

    m.def("test_independence",
          [](const std::vector<std::int64_t>& series, int n, const std::string& classes, double alpha) {
              const auto scheme =
                  classes.empty() ? ClassScheme::tail_merged(n, series.size()) : ClassScheme::parse(n, classes);
              return test_independence(series, scheme, alpha, independent_pmf(n));
          },
          py::arg("pair_sums"), py::arg("n"), py::arg("classes") = "", py::arg("alpha") = 0.05);
    m.def("chi_square_survival", &chi_square_survival, py::arg("x"), py::arg("df"));
    m.def("chi_square_critical_value", &chi_square_critical_value, py::arg("alpha"), py::arg("df"));

    // market data
    py::class_<SpinSeries>(m, "SpinSeries")
        .def_readonly("traders", &SpinSeries::traders)
        .def_readonly("starts", &SpinSeries::starts)
        .def_readonly("coverage", &SpinSeries::coverage)
        .def_readonly("warnings", &SpinSeries::warnings)
        .def_property_readonly("configs",
                               [](const SpinSeries& s) {
                                   std::vector<std::vector<int>> out;
                                   for (const auto& c : s.configs) out.push_back(to_list(c));
                                   return out;
                               })
        .def_property_readonly("dropped",
                               [](const SpinSeries& s) {
                                   std::vector<std::pair<std::int64_t, std::string>> out;
                                   for (const auto& d : s.dropped) out.emplace_back(d.start_us, d.reason);
                                   return out;
                               })
        .def("pair_sums", &hamiltonian_series)
        .def("__len__", &SpinSeries::size)
        .def("to_csv", [](const SpinSeries& s) {
            std::ostringstream out;
            write_spin_series_csv(out, s);
            return out.str();
        });
    m.def("load_series", &series_from_file, py::arg("path"), py::arg("n_top") = 10,
          py::arg("traders") = std::vector<std::string>{}, py::arg("window") = "10m",
          py::arg("inactive_rule") = "carry-forward", py::arg("tie_rule") = "carry-forward");
}
