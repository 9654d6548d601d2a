#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace cwm {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<std::int64_t>;

/// Largest trader count accepted by the exact shell routines. Shell
/// multiplicities are held as big integers; beyond this the table of
/// binomial coefficients becomes impractically large.
inline constexpr int kMaxTraders = 20000;

/// Number of traders N and market temperature beta.
struct ModelParams {
    int n_traders = 2;
    double beta = 0.0;

    ModelParams() = default;
    ModelParams(int n, double b);  // validates
};

/// One decision per trader, +1 (buy) or -1 (sell).
class SpinConfiguration {
public:
    SpinConfiguration() = default;
    explicit SpinConfiguration(std::vector<int> spins);

    static SpinConfiguration all_up(int n);
    /// Bit i of mask set means trader i buys. Used by enumeration code.
    static SpinConfiguration from_mask(int n, std::uint64_t mask);

    int size() const noexcept { return static_cast<int>(spins_.size()); }
    int operator[](int i) const { return spins_[static_cast<std::size_t>(i)]; }
    std::span<const int> spins() const noexcept { return spins_; }
    SpinConfiguration flipped() const;

    friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;

private:
    std::vector<int> spins_;
};

/// m = (sum of spins) / N, stored as the integer spin sum to stay exact.
class Magnetization {
public:
    Magnetization(int n_traders, int spin_sum);

    /// Nearest representable magnetization for a real value; throws
    /// DomainError when |value| > 1 or value is not a multiple of 2/N.
    static Magnetization from_value(int n_traders, double value);

    int n_traders() const noexcept { return n_; }
    int spin_sum() const noexcept { return sum_; }
    Rational value() const { return Rational(sum_, n_); }
    double as_double() const noexcept { return static_cast<double>(sum_) / n_; }
    /// H = (1 - N m^2) / 2.
    Rational hamiltonian() const;

    friend bool operator==(const Magnetization&, const Magnetization&) = default;

private:
    int n_;
    int sum_;
};

/// All configurations sharing |sum of spins| = s.
struct ShellValue {
    int n_traders = 0;
    int abs_spin_sum = 0;
    BigInt multiplicity;
    std::int64_t pair_sum = 0;  // T = (s^2 - N) / 2
    Rational hamiltonian;       // H = -T / N

    double hamiltonian_value() const { return boost::rational_cast<double>(hamiltonian); }
    std::string label() const;  // e.g. "s=2,T=-3,H=3/10"
};

bool operator==(const ShellValue& a, const ShellValue& b);

int spin_sum(const SpinConfiguration& config);
/// Sum over i<j of x_i x_j.
std::int64_t pair_sum(const SpinConfiguration& config);
/// -pair_sum / N, exact.
Rational hamiltonian(const SpinConfiguration& config);
Magnetization magnetization(const SpinConfiguration& config);

/// Shells ordered by increasing |spin sum| (equivalently increasing T).
std::vector<ShellValue> enumerate_shells(int n_traders);

/// The shell with the given |spin sum|; DomainError if s has the wrong
/// parity or exceeds N.
ShellValue shell_for(int n_traders, int abs_spin_sum);
ShellValue shell_of(const SpinConfiguration& config);

/// Index of a shell with pair sum T inside enumerate_shells(n); -1 if none.
int shell_index_for_pair_sum(int n_traders, std::int64_t pair_sum);
/// Index of the shell whose Hamiltonian equals h exactly; -1 if none.
int shell_index_for_hamiltonian(int n_traders, const Rational& h);

BigInt binomial(int n, int k);
/// Natural log of a non-negative big integer, accurate to double precision
/// for any magnitude.
double log_big(const BigInt& value);
/// value / 2^exponent as a double without intermediate overflow.
double ratio_to_pow2(const BigInt& value, int exponent);

}  // namespace cwm
