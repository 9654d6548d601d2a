#include "cwm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "cwm/error.hpp"

namespace cwm {

const char* const kIndependenceCaveat =
    "windows are treated as independent draws from the null law; under the space-time model successive "
    "windows are Markov dependent";

namespace {

std::vector<std::int64_t> support_of(int n) {
    std::vector<std::int64_t> t;
    for (const auto& s : enumerate_shells(n)) t.push_back(s.pair_sum);
    return t;
}

std::int64_t parse_int(const std::string& token, const std::string& spec) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != token.size())
        throw DomainError("class spec '" + spec + "': '" + token + "' is not an integer");
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

// Continued fraction for Q(a, x), modified Lentz; x >= a + 1.
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Series for P(a, x); x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

ClassScheme::ClassScheme(int n_traders, std::vector<std::vector<std::int64_t>> classes)
    : n_(n_traders), classes_(std::move(classes)) {
    if (classes_.size() < 2) throw DomainError("a class scheme needs at least two classes");
    const auto support = support_of(n_);
    std::set<std::int64_t> seen;
    for (auto& c : classes_) {
        if (c.empty()) throw DomainError("class scheme contains an empty class");
        std::sort(c.begin(), c.end());
        for (auto t : c) {
            if (!std::binary_search(support.begin(), support.end(), t))
                throw DomainError("class value " + std::to_string(t) + " is not a pair sum of N=" + std::to_string(n_));
            if (!seen.insert(t).second) throw DomainError("class value " + std::to_string(t) + " appears twice");
        }
    }
    if (seen.size() != support.size())
        throw DomainError("class scheme does not cover every pair sum of N=" + std::to_string(n_));
    std::sort(classes_.begin(), classes_.end());
}

ClassScheme ClassScheme::singletons(int n_traders) {
    std::vector<std::vector<std::int64_t>> classes;
    for (auto t : support_of(n_traders)) classes.push_back({t});
    return ClassScheme(n_traders, std::move(classes));
}

ClassScheme ClassScheme::parse(int n_traders, const std::string& spec) {
    const auto support = support_of(n_traders);
    std::vector<std::vector<std::int64_t>> classes;
    for (const auto& part : split(spec, '|')) {
        if (part.empty()) throw DomainError("class spec '" + spec + "' has an empty class");
        std::vector<std::int64_t> members;
        for (const auto& item : split(part, ',')) {
            const auto dots = item.find("..");
            if (dots == std::string::npos) {
                members.push_back(parse_int(item, spec));
                continue;
            }
            const auto lo = parse_int(trim(item.substr(0, dots)), spec);
            const auto hi = parse_int(trim(item.substr(dots + 2)), spec);
            bool any = false;
            for (auto t : support)
                if (t >= lo && t <= hi) {
                    members.push_back(t);
                    any = true;
                }
            if (!any) throw DomainError("class spec range '" + item + "' selects no pair sum");
        }
        classes.push_back(std::move(members));
    }
    return ClassScheme(n_traders, std::move(classes));
}

ClassScheme ClassScheme::tail_merged(int n_traders, std::size_t n_obs, double min_expected) {
    const auto null_pmf = independent_pmf(n_traders);
    std::vector<std::vector<std::int64_t>> classes;
    std::vector<double> expected;
    for (std::size_t k = 0; k < null_pmf.size(); ++k) {
        classes.push_back({null_pmf.labels[k].pair_sum});
        expected.push_back(static_cast<double>(n_obs) * null_pmf.probs[k]);
    }
    auto merge_into_next = [&](std::size_t i) {
        classes[i].insert(classes[i].end(), classes[i + 1].begin(), classes[i + 1].end());
        expected[i] += expected[i + 1];
        classes.erase(classes.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        expected.erase(expected.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    };
    while (classes.size() > 2 && expected.back() < min_expected) merge_into_next(classes.size() - 2);
    for (std::size_t i = 0; classes.size() > 2 && i + 1 < classes.size();) {
        if (expected[i] < min_expected) merge_into_next(i);
        else ++i;
    }
    return ClassScheme(n_traders, std::move(classes));
}

int ClassScheme::class_of(std::int64_t t) const {
    for (std::size_t k = 0; k < classes_.size(); ++k)
        if (std::binary_search(classes_[k].begin(), classes_[k].end(), t)) return static_cast<int>(k);
    return -1;
}

std::vector<std::string> ClassScheme::labels() const {
    const auto support = support_of(n_);
    std::vector<std::string> out;
    for (const auto& c : classes_) {
        const auto first = std::lower_bound(support.begin(), support.end(), c.front());
        const bool contiguous = c.size() > 1 && static_cast<std::size_t>(support.end() - first) >= c.size() &&
                                std::equal(c.begin(), c.end(), first);
        if (contiguous) {
            out.push_back(std::to_string(c.front()) + ".." + std::to_string(c.back()));
        } else {
            std::string s;
            for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + std::to_string(c[i]);
            out.push_back(s);
        }
    }
    return out;
}

std::string ClassScheme::describe() const {
    std::string s;
    for (const auto& l : labels()) s += (s.empty() ? "" : "|") + l;
    return s;
}

std::vector<std::uint64_t> bin_observations(const std::vector<std::int64_t>& h_series, const ClassScheme& scheme) {
    std::vector<std::uint64_t> counts(scheme.size(), 0);
    for (auto t : h_series) {
        const int k = scheme.class_of(t);
        if (k < 0) throw DomainError("observation " + std::to_string(t) + " lies outside every class");
        ++counts[static_cast<std::size_t>(k)];
    }
    return counts;
}

std::vector<double> expected_counts(const ClassScheme& scheme, std::uint64_t n_obs, const DistributionTable& null_pmf) {
    std::vector<double> out;
    for (const auto& c : scheme.classes()) {
        double p = 0.0;
        for (auto t : c) {
            const auto it = std::find_if(null_pmf.labels.begin(), null_pmf.labels.end(),
                                         [t](const ShellValue& s) { return s.pair_sum == t; });
            if (it == null_pmf.labels.end())
                throw DomainError("null distribution has no mass entry for T=" + std::to_string(t));
            p += null_pmf.probs[static_cast<std::size_t>(it - null_pmf.labels.begin())];
        }
        if (!(p > 0.0)) throw DegenerateClassError("a class has zero probability under the null law");
        out.push_back(static_cast<double>(n_obs) * p);
    }
    return out;
}

double chi_square_statistic(const FrequencyTable& freq) {
    if (freq.observed.size() != freq.expected.size())
        throw DomainError("observed and expected counts differ in length");
    double s = 0.0;
    for (std::size_t k = 0; k < freq.observed.size(); ++k) {
        const double e = freq.expected[k];
        if (!(e > 0.0)) throw DomainError("expected count " + std::to_string(e) + " is not positive");
        const double d = static_cast<double>(freq.observed[k]) - e;
        s += d * d / e;
    }
    return s;
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0)) throw DomainError("incomplete gamma needs a > 0");
    if (x < 0.0 || std::isnan(x)) throw DomainError("incomplete gamma needs x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double chi_square_survival(double x, int df) {
    if (df < 1) throw DomainError("degrees of freedom must be positive");
    if (x < 0.0 || std::isnan(x)) throw DomainError("chi-square survival needs x >= 0");
    return regularized_gamma_q(df / 2.0, x / 2.0);
}

double chi_square_critical_value(double alpha, int df) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(df));
    while (chi_square_survival(hi, df) > alpha) hi *= 2.0;
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (chi_square_survival(mid, df) > alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ChiSquareReport test_independence(const std::vector<std::int64_t>& h_series, const ClassScheme& scheme, double alpha,
                                  const DistributionTable& null_pmf) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
    if (h_series.empty()) throw DomainError("no observations to test");
    ChiSquareReport r;
    r.class_labels = scheme.labels();
    r.frequencies.observed = bin_observations(h_series, scheme);
    r.frequencies.n_obs = h_series.size();
    r.frequencies.expected = expected_counts(scheme, r.frequencies.n_obs, null_pmf);
    r.statistic = chi_square_statistic(r.frequencies);
    r.df = static_cast<int>(scheme.size()) - 1;
    r.alpha = alpha;
    r.p_value = chi_square_survival(r.statistic, r.df);
    r.critical_value = chi_square_critical_value(alpha, r.df);
    r.reject = r.p_value < alpha;
    r.caveat = kIndependenceCaveat;
    return r;
}

}  // namespace cwm
