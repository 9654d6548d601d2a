#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cwm/error.hpp"
#include "cwm/inference.hpp"
#include "cwm/market_io.hpp"

using namespace cwm;

namespace {

const std::string kFixture = std::string(CWM_DATA_DIR) + "/steel_synthetic_2008-10-22.csv";

ParsedTrades parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_trades(in);
}

ParsedTrades parse_fixture() {
    std::ifstream in(kFixture);
    REQUIRE(in);
    return parse_trades(in);
}

TradeRecord trade(const std::string& id, std::int64_t t, Side side, double q) {
    TradeRecord r;
    r.trader_id = id;
    r.timestamp_us = t;
    r.side = side;
    r.quantity = q;
    return r;
}

constexpr std::int64_t kMin = 60'000'000;

}  // namespace

TEST_CASE("parse a small well-formed file") {
    const auto parsed = parse_text(
        "trader_id,timestamp,side,quantity\n"
        "B,2008-10-22T09:05:00Z,sell,10\n"
        "A,2008-10-22T09:00:00Z,buy,5\n"
        "\n"
        "# comment\n"
        "C,1224666000.5,BUY,1\n"
        "A,2008-10-22 09:07:30.25+00:00,Sell,2.5\n");
    REQUIRE(parsed.records.size() == 4);
    CHECK(parsed.errors.empty());
    for (std::size_t i = 1; i < 4; ++i) CHECK(parsed.records[i - 1].timestamp_us <= parsed.records[i].timestamp_us);
    CHECK(parsed.records[0].trader_id == "A");
    CHECK(parsed.records[0].spin() == 1);
    CHECK(parsed.records[1].trader_id == "C");
    CHECK(parsed.records[1].timestamp_us == 1224666000'500000);
    CHECK(parsed.records[3].quantity == 2.5);
    CHECK(parsed.records[3].spin() == -1);
}

TEST_CASE("bad rows are collected with line numbers") {
    const auto parsed = parse_text(
        "timestamp;quantity;side;trader_id;venue\n"
        "2008-10-22T09:00:00Z;5;buy;A;X\n"
        "2008-10-22T09:01:00Z;5;hold;B;X\n"
        "2008-10-22T09:02:00Z;5;sell;C;X\n"
        "2008-10-22T09:03:00Z;5;sell;D;X\n");
    CHECK(parsed.delimiter == ';');
    CHECK(parsed.records.size() == 3);
    REQUIRE(parsed.errors.size() == 1);
    CHECK(parsed.errors[0].line == 3);

    const auto more = parse_text(
        "trader_id\ttimestamp\tside\tquantity\n"
        "A\tyesterday\tbuy\t1\n"
        "A\t2008-10-22T09:00:00Z\tbuy\t-1\n"
        "A\t2008-10-22T09:00:00Z\tbuy\n");
    CHECK(more.records.empty());
    CHECK(more.errors.size() == 3);
}

TEST_CASE("missing columns are format errors") {
    CHECK_THROWS_AS(parse_text("trader_id,timestamp,quantity\nA,0,1\n"), FormatError);
    CHECK_THROWS_AS(parse_text(""), FormatError);
}

TEST_CASE("timestamps and durations") {
    CHECK(parse_timestamp("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_timestamp("2008-10-22T09:00:00Z") == 1224666000LL * 1'000'000);
    CHECK(parse_timestamp("2008-10-22T11:00:00+02:00") == 1224666000LL * 1'000'000);
    CHECK(parse_timestamp("1224666000") == 1224666000LL * 1'000'000);
    CHECK(format_timestamp(1224666000LL * 1'000'000) == "2008-10-22T09:00:00Z");
    CHECK(parse_timestamp(format_timestamp(1224666123'456789)) == 1224666123'456789);
    CHECK_THROWS_AS(parse_timestamp("2008-13-01T00:00:00Z"), FormatError);
    CHECK_THROWS_AS(parse_timestamp("noon"), FormatError);

    CHECK(parse_duration("10m") == 600'000'000);
    CHECK(parse_duration("600s") == 600'000'000);
    CHECK(parse_duration("600") == 600'000'000);
    CHECK(parse_duration("1h") == 3'600'000'000);
    CHECK(parse_duration("250ms") == 250'000);
    CHECK(parse_duration("5us") == 5);
    CHECK_THROWS_AS(parse_duration("0m"), FormatError);
    CHECK_THROWS_AS(parse_duration("10 parsecs"), FormatError);
    CHECK_THROWS_AS(parse_duration("m"), FormatError);
}

TEST_CASE("tie rule: equal buy and sell carries the prior spin forward") {
    const std::vector<TradeRecord> records = {
        trade("A", 1 * kMin, Side::Buy, 4), trade("B", 2 * kMin, Side::Sell, 1),
        trade("A", 11 * kMin, Side::Buy, 3), trade("A", 12 * kMin, Side::Sell, 3), trade("B", 13 * kMin, Side::Sell, 1)};
    WindowingPolicy policy;
    policy.trader_set = {"A", "B"};
    const auto carry = windowize(records, policy);
    REQUIRE(carry.size() == 2);
    CHECK(carry.configs[1][0] == 1);
    CHECK(carry.warnings.empty());

    policy.tie_rule = TieRule::NetQuantity;
    CHECK(windowize(records, policy).configs[1][0] == 1);

    // A first-window tie has no history: +1 with a warning.
    const std::vector<TradeRecord> first = {trade("A", 0, Side::Sell, 2), trade("A", 1, Side::Buy, 2), trade("B", 2, Side::Sell, 1)};
    policy.tie_rule = TieRule::CarryForward;
    const auto s = windowize(first, policy);
    CHECK(s.configs[0][0] == 1);
    CHECK(s.warnings.size() == 1);
}

TEST_CASE("tie rule carry-forward uses a negative history") {
    const std::vector<TradeRecord> records = {trade("A", 0, Side::Sell, 1), trade("A", 10 * kMin, Side::Buy, 2),
                                              trade("A", 10 * kMin + 1, Side::Sell, 2)};
    WindowingPolicy policy;
    policy.trader_set = {"A"};
    CHECK(windowize(records, policy).configs[1][0] == -1);
    policy.tie_rule = TieRule::NetQuantity;
    CHECK(windowize(records, policy).configs[1][0] == 1);
}

TEST_CASE("inactive rule") {
    const std::vector<TradeRecord> records = {
        trade("A", 0, Side::Buy, 1), trade("B", 1, Side::Sell, 1),
        trade("B", 10 * kMin, Side::Buy, 1),
        trade("C", 20 * kMin, Side::Buy, 1), trade("A", 20 * kMin, Side::Sell, 1), trade("B", 20 * kMin, Side::Buy, 1)};
    WindowingPolicy policy;
    policy.trader_set = {"A", "B"};
    const auto carry = windowize(records, policy);
    REQUIRE(carry.size() == 3);
    CHECK(carry.configs[1][0] == 1);  // A inactive in window 2, carried from window 1
    CHECK(carry.configs[1][1] == 1);
    CHECK(carry.coverage == std::vector<int>{2, 1, 2});
    CHECK(carry.starts == std::vector<std::int64_t>{0, 10 * kMin, 20 * kMin});

    policy.inactive_rule = InactiveRule::DropWindow;
    const auto drop = windowize(records, policy);
    REQUIRE(drop.size() == 2);
    REQUIRE(drop.dropped.size() == 1);
    CHECK(drop.dropped[0].start_us == 10 * kMin);

    // No history to carry: the window is dropped and reported.
    policy.inactive_rule = InactiveRule::CarryForward;
    policy.trader_set = {"A", "C"};
    const auto late = windowize(records, policy);
    CHECK(late.size() == 1);
    CHECK(late.dropped.size() == 1);
    CHECK(late.dropped[0].start_us == 0);
}

TEST_CASE("windowize errors") {
    WindowingPolicy policy;
    policy.trader_set = {"A"};
    CHECK_THROWS_AS(windowize({}, policy), DomainError);
    CHECK_THROWS_AS(windowize({trade("A", 5, Side::Buy, 1), trade("A", 1, Side::Buy, 1)}, policy), DomainError);
    policy.trader_set = {"A", "A"};
    CHECK_THROWS_AS(windowize({trade("A", 0, Side::Buy, 1)}, policy), DomainError);
    policy.trader_set = {};
    CHECK_THROWS_AS(windowize({trade("A", 0, Side::Buy, 1)}, policy), DomainError);
    policy.trader_set = {"A"};
    policy.width_us = 0;
    CHECK_THROWS_AS(windowize({trade("A", 0, Side::Buy, 1)}, policy), DomainError);
}

TEST_CASE("top_traders") {
    const std::vector<TradeRecord> records = {trade("Z", 0, Side::Buy, 1), trade("Y", 1, Side::Buy, 1), trade("Z", 2, Side::Buy, 1),
                                              trade("X", 3, Side::Buy, 1), trade("Y", 4, Side::Buy, 1), trade("W", 5, Side::Buy, 1)};
    CHECK(top_traders(records, 3) == std::vector<std::string>{"Y", "Z", "W"});
    CHECK_THROWS_AS(top_traders(records, 5), DomainError);
}

TEST_CASE("hamiltonian_series") {
    SpinSeries series;
    series.traders = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
    series.width_us = 1;
    series.starts = {0, 1};
    series.configs = {SpinConfiguration::all_up(10), SpinConfiguration({1, -1, 1, -1, 1, -1, 1, -1, 1, -1})};
    series.coverage = {10, 10};
    CHECK(hamiltonian_series(series) == std::vector<std::int64_t>{45, -5});
    CHECK(scaled_hamiltonian_series(series) == std::vector<Rational>{Rational(-9, 2), Rational(1, 2)});
}

TEST_CASE("synthetic steel fixture") {
    const auto parsed = parse_fixture();
    CHECK(parsed.errors.empty());
    const auto traders = top_traders(parsed.records, 10);
    CHECK(traders.size() == 10);

    for (auto inactive : {InactiveRule::CarryForward, InactiveRule::DropWindow})
        for (auto tie : {TieRule::CarryForward, TieRule::NetQuantity}) {
            WindowingPolicy policy;
            policy.trader_set = traders;
            policy.inactive_rule = inactive;
            policy.tie_rule = tie;
            const auto series = windowize(parsed.records, policy);
            CHECK(series.size() == 20);
            CHECK(series.dropped.empty());
            CHECK(series.warnings.empty());
            const auto counts = bin_observations(hamiltonian_series(series), ClassScheme::parse(10, "-5|-3|3|13..45"));
            CHECK(counts == std::vector<std::uint64_t>{2, 13, 4, 1});
        }
}

TEST_CASE("spin series CSV round trip and determinism") {
    const auto parsed = parse_fixture();
    WindowingPolicy policy;
    policy.trader_set = top_traders(parsed.records, 10);
    const auto series = windowize(parsed.records, policy);
    std::ostringstream out;
    write_spin_series_csv(out, series);
    std::istringstream in(out.str());
    const auto back = read_spin_series_csv(in);
    CHECK(back.traders == series.traders);
    CHECK(back.width_us == series.width_us);
    CHECK(back.starts == series.starts);
    CHECK(back.configs == series.configs);
    CHECK(back.coverage == series.coverage);

    std::ostringstream again;
    write_spin_series_csv(again, windowize(parse_fixture().records, policy));
    CHECK(again.str() == out.str());

    std::istringstream junk("a,b\n1,2\n");
    CHECK_THROWS_AS(read_spin_series_csv(junk), FormatError);
}
