#include <doctest.h>

#include <random>

#include "cwm/error.hpp"
#include "cwm/spin_core.hpp"
#include "oracle/enumeration.hpp"

using namespace cwm;

TEST_CASE("spin_sum examples") {
    CHECK(spin_sum(SpinConfiguration::all_up(10)) == 10);
    CHECK(spin_sum(SpinConfiguration({1, -1})) == 0);
    CHECK(spin_sum(SpinConfiguration({1, 1, -1})) == 1);
}

TEST_CASE("pair_sum examples") {
    CHECK(pair_sum(SpinConfiguration::all_up(10)) == 45);
    CHECK(pair_sum(SpinConfiguration({1, -1})) == -1);
    // Every N=4 configuration with spin sum 2 has T = 0 (brute force over 16).
    for (std::uint64_t m = 0; m < 16; ++m) {
        const auto c = oracle::make_config(4, m);
        if (c.spin_sum == 2) {
            CHECK(c.pair_sum == 0);
            CHECK(pair_sum(SpinConfiguration(c.x)) == 0);
        }
    }
}

TEST_CASE("hamiltonian examples") {
    CHECK(hamiltonian(SpinConfiguration::all_up(10)) == Rational(-9, 2));
    CHECK(hamiltonian(SpinConfiguration({1, -1, 1, -1})) == Rational(1, 2));
    CHECK(hamiltonian(SpinConfiguration({1, -1, 1, -1, 1, -1})) == Rational(1, 2));
    CHECK(hamiltonian(SpinConfiguration::all_up(4)) == Rational(-3, 2));
    CHECK(hamiltonian(SpinConfiguration::all_up(4).flipped()) == Rational(-3, 2));
}

TEST_CASE("invalid spins are rejected") {
    CHECK_THROWS_AS(SpinConfiguration({1, 0, -1}), DomainError);
    CHECK_THROWS_AS(ModelParams(1, 0.0), DomainError);
    CHECK_THROWS_AS(ModelParams(4, -0.1), DomainError);
    CHECK_THROWS_AS(Magnetization(4, 1), DomainError);
    CHECK_THROWS_AS(Magnetization::from_value(4, 0.3), DomainError);
    CHECK(Magnetization::from_value(4, 0.5).spin_sum() == 2);
}

TEST_CASE("H = (1 - N m^2)/2 exactly, flip invariant, for every configuration up to N=12") {
    for (int n = 2; n <= 12; ++n) {
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
            const auto c = SpinConfiguration::from_mask(n, m);
            const auto mag = magnetization(c).value();
            REQUIRE(hamiltonian(c) == (Rational(1) - Rational(n) * mag * mag) / Rational(2));
            REQUIRE(hamiltonian(c) == hamiltonian(c.flipped()));
            REQUIRE(hamiltonian(c) == magnetization(c).hamiltonian());
        }
    }
}

TEST_CASE("enumerate_shells N=10 support and multiplicities") {
    const auto shells = enumerate_shells(10);
    REQUIRE(shells.size() == 6);
    const std::int64_t t[] = {-5, -3, 3, 13, 27, 45};
    const int mult[] = {252, 420, 240, 90, 20, 2};
    for (int k = 0; k < 6; ++k) {
        CHECK(shells[static_cast<std::size_t>(k)].pair_sum == t[k]);
        CHECK(shells[static_cast<std::size_t>(k)].multiplicity == mult[k]);
        CHECK(shells[static_cast<std::size_t>(k)].hamiltonian == Rational(-t[k], 10));
    }
}

TEST_CASE("enumerate_shells small N") {
    const auto two = enumerate_shells(2);
    REQUIRE(two.size() == 2);
    CHECK(two[0].abs_spin_sum == 0);
    CHECK(two[0].multiplicity == 2);
    CHECK(two[0].pair_sum == -1);
    CHECK(two[1].abs_spin_sum == 2);
    CHECK(two[1].multiplicity == 2);
    CHECK(two[1].pair_sum == 1);

    const auto three = enumerate_shells(3);
    REQUIRE(three.size() == 2);
    CHECK(three[0].abs_spin_sum == 1);
    CHECK(three[0].multiplicity == 6);
    CHECK(three[0].pair_sum == -1);
    CHECK(three[1].abs_spin_sum == 3);
    CHECK(three[1].multiplicity == 2);
    CHECK(three[1].pair_sum == 3);
}

TEST_CASE("shell multiplicities reproduce brute-force counts for N in [2,12]") {
    for (int n = 2; n <= 12; ++n) {
        const auto shells = enumerate_shells(n);
        const auto counts = oracle::shell_counts(n);
        REQUIRE(shells.size() == counts.size());
        REQUIRE(static_cast<int>(shells.size()) == n / 2 + 1);
        BigInt total = 0;
        for (std::size_t k = 0; k < shells.size(); ++k) {
            CHECK(shells[k].multiplicity == counts[k]);
            CHECK(shells[k].hamiltonian == Rational(1, 2) - Rational(shells[k].abs_spin_sum * shells[k].abs_spin_sum, 2 * n));
            if (k > 0) CHECK(shells[k].pair_sum > shells[k - 1].pair_sum);
            total += shells[k].multiplicity;
        }
        CHECK(total == (BigInt(1) << n));
    }
}

TEST_CASE("multiplicities are exact beyond 64 bits") {
    const auto shells = enumerate_shells(100);
    CHECK(shells.front().multiplicity == binomial(100, 50));
    CHECK(shells.front().multiplicity.str() == "100891344545564193334812497256");
    BigInt total = 0;
    for (const auto& s : shells) total += s.multiplicity;
    CHECK(total == (BigInt(1) << 100));
}

TEST_CASE("capacity and domain errors") {
    CHECK_THROWS_AS(enumerate_shells(kMaxTraders + 1), CapacityError);
    CHECK_THROWS_AS(enumerate_shells(1), DomainError);
    CHECK_THROWS_AS(shell_for(10, 3), DomainError);
    CHECK_THROWS_AS(shell_for(10, 12), DomainError);
}

TEST_CASE("shell lookup by T and by H") {
    CHECK(shell_index_for_pair_sum(10, 13) == 3);
    CHECK(shell_index_for_pair_sum(10, 12) == -1);
    CHECK(shell_index_for_hamiltonian(10, Rational(-13, 10)) == 3);
    CHECK(shell_index_for_hamiltonian(10, Rational(1, 3)) == -1);
    CHECK(shell_of(SpinConfiguration({1, 1, 1, -1})) == shell_for(4, 2));
}

TEST_CASE("log_big and ratio_to_pow2 across magnitudes") {
    CHECK(log_big(BigInt(252)) == doctest::Approx(std::log(252.0)));
    const BigInt big = BigInt(1) << 5000;
    CHECK(log_big(big) == doctest::Approx(5000 * std::log(2.0)).epsilon(1e-14));
    CHECK(ratio_to_pow2(big * 3, 5001) == doctest::Approx(1.5));
    CHECK(ratio_to_pow2(BigInt(252), 10) == 252.0 / 1024.0);
}
