#include "cwm/spin_core.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cwm/error.hpp"

namespace cwm {

namespace {

void check_n(int n) {
    if (n < 2) throw DomainError("n_traders must be at least 2, got " + std::to_string(n));
    if (n > kMaxTraders)
        throw CapacityError("n_traders " + std::to_string(n) + " exceeds the exact-arithmetic limit of " +
                            std::to_string(kMaxTraders));
}

ShellValue make_shell(int n, int s, BigInt multiplicity) {
    ShellValue shell;
    shell.n_traders = n;
    shell.abs_spin_sum = s;
    shell.multiplicity = std::move(multiplicity);
    shell.pair_sum = (static_cast<std::int64_t>(s) * s - n) / 2;
    shell.hamiltonian = Rational(-shell.pair_sum, n);
    return shell;
}

}  // namespace

ModelParams::ModelParams(int n, double b) : n_traders(n), beta(b) {
    check_n(n);
    if (!std::isfinite(b) || b < 0.0) throw DomainError("beta must be finite and non-negative");
}

SpinConfiguration::SpinConfiguration(std::vector<int> spins) : spins_(std::move(spins)) {
    for (int x : spins_)
        if (x != 1 && x != -1) throw DomainError("spin values must be +1 or -1, got " + std::to_string(x));
}

SpinConfiguration SpinConfiguration::all_up(int n) {
    return SpinConfiguration(std::vector<int>(static_cast<std::size_t>(n), 1));
}

SpinConfiguration SpinConfiguration::from_mask(int n, std::uint64_t mask) {
    if (n > 64) throw CapacityError("from_mask supports at most 64 traders");
    std::vector<int> spins(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) spins[static_cast<std::size_t>(i)] = ((mask >> i) & 1U) ? 1 : -1;
    SpinConfiguration c;
    c.spins_ = std::move(spins);
    return c;
}

SpinConfiguration SpinConfiguration::flipped() const {
    SpinConfiguration c = *this;
    for (int& x : c.spins_) x = -x;
    return c;
}

Magnetization::Magnetization(int n_traders, int spin_sum) : n_(n_traders), sum_(spin_sum) {
    if (n_traders < 1) throw DomainError("magnetization needs at least one trader");
    if (std::abs(spin_sum) > n_traders || (n_traders - spin_sum) % 2 != 0)
        throw DomainError("spin sum " + std::to_string(spin_sum) + " is not attainable with " +
                          std::to_string(n_traders) + " traders");
}

Magnetization Magnetization::from_value(int n_traders, double value) {
    if (!(std::abs(value) <= 1.0)) throw DomainError("magnetization must lie in [-1, 1]");
    const double scaled = value * n_traders;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-9 * n_traders)
        throw DomainError("magnetization " + std::to_string(value) + " is not representable with " +
                          std::to_string(n_traders) + " traders");
    return Magnetization(n_traders, static_cast<int>(rounded));
}

Rational Magnetization::hamiltonian() const {
    const std::int64_t s = sum_;
    return Rational(static_cast<std::int64_t>(n_) - s * s, 2 * static_cast<std::int64_t>(n_));
}

std::string ShellValue::label() const {
    std::ostringstream os;
    os << "s=" << abs_spin_sum << ",T=" << pair_sum << ",H=" << hamiltonian.numerator();
    if (hamiltonian.denominator() != 1) os << '/' << hamiltonian.denominator();
    return os.str();
}

bool operator==(const ShellValue& a, const ShellValue& b) {
    return a.n_traders == b.n_traders && a.abs_spin_sum == b.abs_spin_sum && a.multiplicity == b.multiplicity &&
           a.pair_sum == b.pair_sum && a.hamiltonian == b.hamiltonian;
}

int spin_sum(const SpinConfiguration& config) {
    int total = 0;
    for (int x : config.spins()) total += x;
    return total;
}

std::int64_t pair_sum(const SpinConfiguration& config) {
    const std::int64_t s = spin_sum(config);
    return (s * s - config.size()) / 2;
}

Rational hamiltonian(const SpinConfiguration& config) {
    return Rational(-pair_sum(config), config.size());
}

Magnetization magnetization(const SpinConfiguration& config) {
    return Magnetization(config.size(), spin_sum(config));
}

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt c = 1;
    for (int i = 0; i < k; ++i) {
        c *= n - i;
        c /= i + 1;
    }
    return c;
}

std::vector<ShellValue> enumerate_shells(int n_traders) {
    check_n(n_traders);
    const int n = n_traders;
    // C(n, k) for k = n/2 .. n via the downward recurrence from C(n, n) = 1.
    std::vector<BigInt> upper(static_cast<std::size_t>(n + 1));
    BigInt c = 1;
    for (int k = n; k >= (n + 1) / 2; --k) {
        upper[static_cast<std::size_t>(k)] = c;
        c *= k;
        c /= n - k + 1;
    }
    std::vector<ShellValue> shells;
    shells.reserve(static_cast<std::size_t>(n / 2 + 1));
    for (int s = n % 2; s <= n; s += 2) {
        const int k = (n + s) / 2;
        BigInt mult = upper[static_cast<std::size_t>(k)];
        if (s > 0) mult *= 2;
        shells.push_back(make_shell(n, s, std::move(mult)));
    }
    return shells;
}

ShellValue shell_for(int n_traders, int abs_spin_sum) {
    check_n(n_traders);
    if (abs_spin_sum < 0 || abs_spin_sum > n_traders || (n_traders - abs_spin_sum) % 2 != 0)
        throw DomainError("|spin sum| " + std::to_string(abs_spin_sum) + " is not a shell of N=" +
                          std::to_string(n_traders));
    BigInt mult = binomial(n_traders, (n_traders + abs_spin_sum) / 2);
    if (abs_spin_sum > 0) mult *= 2;
    return make_shell(n_traders, abs_spin_sum, std::move(mult));
}

ShellValue shell_of(const SpinConfiguration& config) {
    return shell_for(config.size(), std::abs(spin_sum(config)));
}

int shell_index_for_pair_sum(int n_traders, std::int64_t t) {
    const std::int64_t sq = 2 * t + n_traders;
    if (sq < 0) return -1;
    auto s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(sq))));
    while (s * s > sq) --s;
    while ((s + 1) * (s + 1) <= sq) ++s;
    if (s * s != sq || s > n_traders || (n_traders - s) % 2 != 0) return -1;
    return static_cast<int>(s / 2);
}

int shell_index_for_hamiltonian(int n_traders, const Rational& h) {
    // T = -N h must be an integer.
    const Rational t = -h * Rational(n_traders);
    if (t.denominator() != 1) return -1;
    return shell_index_for_pair_sum(n_traders, t.numerator());
}

double log_big(const BigInt& value) {
    if (value <= 0) return value == 0 ? -INFINITY : NAN;
    const auto bits = static_cast<long>(boost::multiprecision::msb(value));
    if (bits < 1000) return std::log(value.convert_to<double>());
    const long shift = bits - 62;
    const BigInt top = value >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

double ratio_to_pow2(const BigInt& value, int exponent) {
    if (value == 0) return 0.0;
    const auto bits = static_cast<long>(boost::multiprecision::msb(value));
    if (bits < 1000) return std::ldexp(value.convert_to<double>(), -exponent);
    const long shift = bits - 62;
    const BigInt top = value >> shift;
    return std::ldexp(top.convert_to<double>(), static_cast<int>(shift) - exponent);
}

}  // namespace cwm
