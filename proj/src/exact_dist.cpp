#include "cwm/exact_dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cwm/error.hpp"

namespace cwm {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;

double log_sum_exp(const std::vector<double>& logs) {
    double top = -std::numeric_limits<double>::infinity();
    for (double v : logs) top = std::max(top, v);
    if (!std::isfinite(top)) return top;
    double acc = 0.0;
    for (double v : logs) acc += std::exp(v - top);
    return top + std::log(acc);
}

std::vector<double> normalise_logs(const std::vector<double>& logs, double& log_total) {
    log_total = log_sum_exp(logs);
    std::vector<double> probs(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) probs[i] = std::exp(logs[i] - log_total);
    return probs;
}

void check_beta(double beta) {
    if (!std::isfinite(beta) || beta < 0.0) throw DomainError("beta must be finite and non-negative");
}

void check_condition(int n, const ShellValue& shell) {
    if (shell.n_traders != n || shell.abs_spin_sum < 0 || shell.abs_spin_sum > n ||
        (n - shell.abs_spin_sum) % 2 != 0 || !(shell == shell_for(n, shell.abs_spin_sum)))
        throw DomainError("conditioning state " + shell.label() + " is not a shell of N=" + std::to_string(n));
}

DistributionTable table_from_shells(std::vector<ShellValue> shells, std::vector<double> probs) {
    DistributionTable t;
    t.counts.reserve(shells.size());
    for (const auto& s : shells) t.counts.push_back(s.multiplicity);
    t.labels = std::move(shells);
    t.probs = std::move(probs);
    return t;
}

// Exponent coefficient of beta for shell k: H_k * H_prev / N.
std::vector<double> coupling(const std::vector<ShellValue>& shells, const Rational& h_prev, int n) {
    std::vector<double> c(shells.size());
    for (std::size_t k = 0; k < shells.size(); ++k)
        c[k] = boost::rational_cast<double>(shells[k].hamiltonian * h_prev) / n;
    return c;
}

// ln Z split as offset + reduced(beta), with reduced(0) = 0. The reduced part
// is evaluated as log1p(sum p0 expm1(beta c)) so that finite differences in
// beta do not lose digits against the N ln 2 offset.
struct ReducedLogPartition {
    std::vector<double> p0;
    std::vector<double> log_mult;
    std::vector<double> c;
    double offset = 0.0;
    bool small_n = true;

    ReducedLogPartition(int n, const Rational& h_prev) {
        const auto shells = enumerate_shells(n);
        c = coupling(shells, h_prev, n);
        offset = n * kLn2;
        small_n = n <= 1000;
        for (const auto& s : shells) {
            p0.push_back(ratio_to_pow2(s.multiplicity, n));
            log_mult.push_back(log_big(s.multiplicity));
        }
    }

    double operator()(double beta) const {
        double max_exp = 0.0;
        for (double ck : c) max_exp = std::max(max_exp, beta * ck);
        if (small_n && max_exp < 700.0) {
            double acc = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k) acc += p0[k] * std::expm1(beta * c[k]);
            return std::log1p(acc);
        }
        std::vector<double> logs(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) logs[k] = log_mult[k] + beta * c[k];
        return log_sum_exp(logs) - offset;
    }
};

}  // namespace

std::string to_string(MomentsMethod method) {
    switch (method) {
        case MomentsMethod::DirectSum: return "direct-sum";
        case MomentsMethod::LogZDerivative: return "logZ-derivative";
        case MomentsMethod::Asymptotic: return "asymptotic";
    }
    return "unknown";
}

double DistributionTable::total() const {
    double t = 0.0;
    for (double p : probs) t += p;
    return t;
}

DistributionTable independent_pmf(int n_traders) {
    auto shells = enumerate_shells(n_traders);
    std::vector<double> probs;
    probs.reserve(shells.size());
    for (const auto& s : shells) probs.push_back(ratio_to_pow2(s.multiplicity, n_traders));
    return table_from_shells(std::move(shells), std::move(probs));
}

DistributionTable gibbs_static_pmf(int n_traders, double beta) {
    check_beta(beta);
    auto shells = enumerate_shells(n_traders);
    if (beta == 0.0) return independent_pmf(n_traders);
    std::vector<double> logs;
    logs.reserve(shells.size());
    for (const auto& s : shells)
        logs.push_back(log_big(s.multiplicity) + static_cast<double>(s.pair_sum) * beta / n_traders);
    double log_z = 0.0;
    auto probs = normalise_logs(logs, log_z);
    return table_from_shells(std::move(shells), std::move(probs));
}

MagnetizationKernel mean_field_kernel(int n_traders, double beta, const Magnetization& m_prev) {
    check_beta(beta);
    (void)ModelParams{n_traders, beta};
    if (m_prev.n_traders() != n_traders)
        throw DomainError("previous magnetization was built for N=" + std::to_string(m_prev.n_traders()) +
                          ", expected N=" + std::to_string(n_traders));
    const double h_prev = boost::rational_cast<double>(m_prev.hamiltonian());
    MagnetizationKernel k{m_prev, {}, {}, {}, 0.0, 0.0};
    std::vector<double> logs;
    for (int sum = -n_traders; sum <= n_traders; sum += 2) {
        Magnetization m(n_traders, sum);
        BigInt count = binomial(n_traders, (n_traders + sum) / 2);
        const double h = boost::rational_cast<double>(m.hamiltonian());
        logs.push_back(log_big(count) + beta * h * h_prev / n_traders);
        k.support.push_back(m);
        k.counts.push_back(std::move(count));
    }
    k.probs = normalise_logs(logs, k.log_partition);
    k.partition_value = std::exp(k.log_partition);
    return k;
}

TransitionKernel hamiltonian_kernel(int n_traders, double beta, const ShellValue& h_prev) {
    check_beta(beta);
    check_condition(n_traders, h_prev);
    auto shells = enumerate_shells(n_traders);
    const auto c = coupling(shells, h_prev.hamiltonian, n_traders);
    std::vector<double> logs(shells.size());
    for (std::size_t k = 0; k < shells.size(); ++k) logs[k] = log_big(shells[k].multiplicity) + beta * c[k];
    TransitionKernel kernel;
    kernel.condition = h_prev;
    auto probs = normalise_logs(logs, kernel.log_partition);
    kernel.partition_value = std::exp(kernel.log_partition);
    kernel.row = table_from_shells(std::move(shells), std::move(probs));
    return kernel;
}

std::vector<std::vector<double>> shell_kernel_matrix(int n_traders, double beta) {
    const auto shells = enumerate_shells(n_traders);
    std::vector<std::vector<double>> k;
    k.reserve(shells.size());
    for (const auto& s : shells) k.push_back(hamiltonian_kernel(n_traders, beta, s).row.probs);
    return k;
}

double log_partition(int n_traders, double beta, const Rational& h_prev) {
    ReducedLogPartition f(n_traders, h_prev);
    return f.offset + f(beta);
}

KernelReconciliation reconcile_hamiltonian_kernel(int n_traders, double beta, const ShellValue& h_prev) {
    const auto kernel = hamiltonian_kernel(n_traders, beta, h_prev);
    const auto& shells = kernel.row.labels;
    const int n = n_traders;
    const double hp = h_prev.hamiltonian_value();
    const double tp = static_cast<double>(h_prev.pair_sum);

    std::vector<double> canonical_logs(shells.size());
    for (std::size_t k = 0; k < shells.size(); ++k)
        canonical_logs[k] = log_big(shells[k].multiplicity) + beta * shells[k].hamiltonian_value() * hp / n;

    KernelReconciliation out;
    out.n_traders = n;
    out.beta = beta;
    out.condition = h_prev;
    out.canonical = kernel.row.probs;

    // Both readings select the case "h_t = 1/2" and the binomial index
    // (N + sqrt(N(1 - 2 h_t)))/2 from the scaled Hamiltonian; they differ in
    // which quantity the exponent multiplies.
    auto evaluate = [&](const std::string& name, bool pair_sum_exponent) {
        KernelReading r;
        r.name = name;
        std::vector<double> logs(shells.size());
        bool general_ok = true;
        bool zero_ok = true;
        for (std::size_t k = 0; k < shells.size(); ++k) {
            const double ht = shells[k].hamiltonian_value();
            const double prev = pair_sum_exponent ? tp : hp;
            const double cur = pair_sum_exponent ? static_cast<double>(shells[k].pair_sum) : ht;
            if (shells[k].hamiltonian == Rational(1, 2)) {
                logs[k] = log_big(binomial(n, n / 2)) - beta / 2.0 * prev;
            } else {
                const double root = std::sqrt(n * (1.0 - 2.0 * ht));
                const int index = static_cast<int>(std::lround((n + root) / 2.0));
                logs[k] = std::log(2.0) + log_big(binomial(n, index)) + beta / n * cur * prev;
            }
            const bool ok = std::abs(std::expm1(logs[k] - canonical_logs[k])) < 1e-12;
            if (shells[k].abs_spin_sum == 0) zero_ok = ok;
            else general_ok = general_ok && ok;
        }
        double log_z = 0.0;
        r.row = normalise_logs(logs, log_z);
        r.total_variation = total_variation(r.row, out.canonical);
        r.zero_shell_matches = zero_ok;
        r.general_case_matches = general_ok;
        r.matches = zero_ok && general_ok;
        return r;
    };
    out.readings.push_back(evaluate("H-reading", false));
    out.readings.push_back(evaluate("T-exponent-reading", true));
    return out;
}

MomentsReport conditional_moments_direct(int n_traders, double beta, const ShellValue& h_prev) {
    const auto kernel = hamiltonian_kernel(n_traders, beta, h_prev);
    double mean = 0.0;
    for (std::size_t k = 0; k < kernel.row.size(); ++k)
        mean += kernel.row.labels[k].hamiltonian_value() * kernel.row.probs[k];
    double var = 0.0;
    for (std::size_t k = 0; k < kernel.row.size(); ++k) {
        const double d = kernel.row.labels[k].hamiltonian_value() - mean;
        var += d * d * kernel.row.probs[k];
    }
    return {mean, var, MomentsMethod::DirectSum, std::nullopt};
}

MomentsReport conditional_moments_logZ(int n_traders, double beta, const ShellValue& h_prev, DerivativeSteps steps) {
    check_beta(beta);
    check_condition(n_traders, h_prev);
    if (h_prev.hamiltonian.numerator() == 0)
        throw SingularityError("conditioning Hamiltonian is zero; E = (N/h) d lnZ/dbeta is undefined");
    if (!(steps.first > 0.0) || !(steps.second > 0.0)) throw DomainError("derivative steps must be positive");
    const ReducedLogPartition f(n_traders, h_prev.hamiltonian);
    const double scale = std::max(1.0, beta);
    const double h1 = steps.first * scale;
    const double h2 = steps.second * scale;
    const double d1 = (f(beta + h1) - f(beta - h1)) / (2.0 * h1);
    const double d2 = (f(beta + h2) - 2.0 * f(beta) + f(beta - h2)) / (h2 * h2);
    const double factor = n_traders / h_prev.hamiltonian_value();
    MomentsReport r;
    r.mean = factor * d1;
    r.variance = factor * factor * d2;
    r.method = MomentsMethod::LogZDerivative;
    r.first_derivative_variance = factor * factor * d1;
    return r;
}

double asymptotic_pmf(int n_traders, std::int64_t h) {
    const double x = 2.0 * static_cast<double>(h) + n_traders;
    if (!(x > 0.0)) throw DomainError("asymptotic pmf needs 2h + N > 0, got " + std::to_string(x));
    return std::exp(-x / 4.0) / std::sqrt(M_PI * x);
}

AsymptoticPmfDiagnostic asymptotic_pmf_diagnostic(int n_traders) {
    const auto exact = independent_pmf(n_traders);
    AsymptoticPmfDiagnostic d;
    d.n_traders = n_traders;
    d.min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < exact.size(); ++k) {
        const auto t = exact.labels[k].pair_sum;
        if (exact.labels[k].abs_spin_sum == 0) continue;
        const double approx = asymptotic_pmf(n_traders, t);
        d.total_mass += approx;
        d.max_abs_error = std::max(d.max_abs_error, std::abs(approx - exact.probs[k]));
        const double ratio = exact.probs[k] > 0.0 ? approx / exact.probs[k] : std::numeric_limits<double>::infinity();
        d.ratios.emplace_back(t, ratio);
        d.max_ratio = std::max(d.max_ratio, ratio);
        d.min_ratio = std::min(d.min_ratio, ratio);
    }
    return d;
}

MomentsReport asymptotic_moments(int n_traders, double beta, const ShellValue& h_prev) {
    check_beta(beta);
    check_condition(n_traders, h_prev);
    if (h_prev.hamiltonian.numerator() == 0) throw SingularityError("asymptotic moments are singular at h = 0");
    const double h = h_prev.hamiltonian_value();
    const double n = n_traders;
    const double den = n - beta / 2.0 * (1.0 - 2.0 * h);
    if (den == 0.0) throw SingularityError("asymptotic moments: N - (beta/2)(1 - 2h) vanishes");
    MomentsReport r;
    r.mean = n * (1.0 - 2.0 * h) / (4.0 * h * den);
    r.variance = n * n * (1.0 - 2.0 * h) * (1.0 - 2.0 * h) / (8.0 * h * h * den * den);
    r.method = MomentsMethod::Asymptotic;
    return r;
}

namespace {

// ln Z_x for every shell x, over configurations.
std::vector<double> log_partitions_by_shell(const std::vector<ShellValue>& shells, int n, double beta) {
    std::vector<double> log_mult(shells.size());
    std::vector<double> h(shells.size());
    for (std::size_t k = 0; k < shells.size(); ++k) {
        log_mult[k] = log_big(shells[k].multiplicity);
        h[k] = shells[k].hamiltonian_value();
    }
    std::vector<double> out(shells.size());
    std::vector<double> logs(shells.size());
    for (std::size_t x = 0; x < shells.size(); ++x) {
        for (std::size_t y = 0; y < shells.size(); ++y) logs[y] = log_mult[y] + beta * h[x] * h[y] / n;
        out[x] = log_sum_exp(logs);
    }
    return out;
}

}  // namespace

DistributionTable stationary_distribution(int n_traders, double beta) {
    check_beta(beta);
    auto shells = enumerate_shells(n_traders);
    const auto log_z = log_partitions_by_shell(shells, n_traders, beta);
    std::vector<double> logs(shells.size());
    for (std::size_t x = 0; x < shells.size(); ++x) logs[x] = log_big(shells[x].multiplicity) + log_z[x];
    double log_total = 0.0;
    auto probs = normalise_logs(logs, log_total);
    return table_from_shells(std::move(shells), std::move(probs));
}

double detailed_balance_residual(int n_traders, double beta) {
    check_beta(beta);
    const auto shells = enumerate_shells(n_traders);
    const auto log_z = log_partitions_by_shell(shells, n_traders, beta);
    std::vector<double> log_mult(shells.size());
    for (std::size_t k = 0; k < shells.size(); ++k) log_mult[k] = log_big(shells[k].multiplicity);
    std::vector<double> logs(shells.size());
    for (std::size_t x = 0; x < shells.size(); ++x) logs[x] = log_mult[x] + log_z[x];
    const double log_total = log_sum_exp(logs);

    // Per configuration: pi(x) = Z_x / sum Z, p(y|x) = exp(beta H(x) H(y) / N) / Z_x.
    // Per shell: pi_s(x) K(x, y) with K from the normalised kernel rows.
    const auto kernel = shell_kernel_matrix(n_traders, beta);
    const auto pi = stationary_distribution(n_traders, beta).probs;
    double worst = 0.0;
    for (std::size_t x = 0; x < shells.size(); ++x) {
        for (std::size_t y = 0; y < shells.size(); ++y) {
            const double e = beta * shells[x].hamiltonian_value() * shells[y].hamiltonian_value() / n_traders;
            const double pi_x = std::exp(log_z[x] - log_total);
            const double pi_y = std::exp(log_z[y] - log_total);
            const double p_yx = std::exp(e - log_z[x]);
            const double p_xy = std::exp(e - log_z[y]);
            worst = std::max(worst, std::abs(pi_x * p_yx - pi_y * p_xy));
            worst = std::max(worst, std::abs(pi[x] * kernel[x][y] - pi[y] * kernel[y][x]));
        }
    }
    return worst;
}

double stationarity_residual(int n_traders, double beta) {
    const auto pi = stationary_distribution(n_traders, beta).probs;
    const auto k = shell_kernel_matrix(n_traders, beta);
    double worst = 0.0;
    for (std::size_t j = 0; j < pi.size(); ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < pi.size(); ++i) acc += pi[i] * k[i][j];
        worst = std::max(worst, std::abs(acc - pi[j]));
    }
    return worst;
}

namespace {

void check_enumeration_range(int n) {
    if (n < 3 || n > 12)
        throw CapacityError("pairwise product check enumerates 2^N states and accepts 3 <= N <= 12, got " +
                            std::to_string(n));
}

// plus[mask] = 1 when x_i x_j = +1 in the configuration encoded by mask.
std::vector<unsigned char> product_plus(int n, int i, int j) {
    const std::uint64_t total = std::uint64_t{1} << n;
    std::vector<unsigned char> plus(total);
    for (std::uint64_t m = 0; m < total; ++m) plus[m] = ((m >> i) & 1U) == ((m >> j) & 1U);
    return plus;
}

double deviation(const std::vector<unsigned char>& a, const std::vector<unsigned char>& b) {
    double joint[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t m = 0; m < a.size(); ++m) joint[a[m]][b[m]] += 1.0;
    const double total = static_cast<double>(a.size());
    double worst = 0.0;
    for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
            const double pa = (joint[u][0] + joint[u][1]) / total;
            const double pb = (joint[0][v] + joint[1][v]) / total;
            worst = std::max(worst, std::abs(joint[u][v] / total - pa * pb));
        }
    }
    return worst;
}

}  // namespace

double pairwise_product_independence_check(int n_traders) {
    check_enumeration_range(n_traders);
    std::vector<std::vector<unsigned char>> products;
    for (int i = 0; i < n_traders; ++i)
        for (int j = i + 1; j < n_traders; ++j) products.push_back(product_plus(n_traders, i, j));
    double worst = 0.0;
    for (std::size_t p = 0; p < products.size(); ++p)
        for (std::size_t q = p + 1; q < products.size(); ++q) worst = std::max(worst, deviation(products[p], products[q]));
    return worst;
}

double pairwise_product_independence_check(int n_traders, std::pair<int, int> first, std::pair<int, int> second) {
    check_enumeration_range(n_traders);
    auto valid = [&](std::pair<int, int> p) {
        return p.first >= 0 && p.second >= 0 && p.first < n_traders && p.second < n_traders && p.first != p.second;
    };
    if (!valid(first) || !valid(second)) throw DomainError("index pair out of range or degenerate");
    auto norm = [](std::pair<int, int> p) { return std::pair<int, int>(std::minmax(p.first, p.second)); };
    if (norm(first) == norm(second)) throw DomainError("pairs must be distinct");
    return deviation(product_plus(n_traders, first.first, first.second),
                     product_plus(n_traders, second.first, second.second));
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw DomainError("total variation needs equal-length vectors");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
    return 0.5 * acc;
}

}  // namespace cwm
