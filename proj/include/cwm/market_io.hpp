#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cwm/spin_core.hpp"

namespace cwm {

enum class Side { Buy, Sell };

struct TradeRecord {
    std::string trader_id;
    std::int64_t timestamp_us = 0;  // microseconds since the Unix epoch, UTC
    Side side = Side::Buy;
    double quantity = 0.0;
    int line = 0;  // 1-based source line

    int spin() const noexcept { return side == Side::Buy ? 1 : -1; }
};

struct RowError {
    int line = 0;
    std::string message;
};

/// delimiter 0 means auto-detect among ',', ';' and '\t' from the header.
struct FormatDescriptor {
    char delimiter = 0;
};

struct ParsedTrades {
    std::vector<TradeRecord> records;  // stable-sorted by timestamp
    std::vector<RowError> errors;
    char delimiter = ',';
};

/// Header must name trader_id, timestamp, side and quantity (any order, extra
/// columns ignored). Blank lines and lines starting with '#' are skipped.
/// A missing column throws FormatError; bad rows land in `errors`.
ParsedTrades parse_trades(std::istream& in, FormatDescriptor format = {});

/// ISO-8601 ("2008-10-22T09:00:00Z", optional fraction and offset, 'T' or
/// space separator) or epoch seconds (optionally fractional).
std::int64_t parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t timestamp_us);
/// "10m", "90s", "1h", "250ms", "5us"; a bare number is seconds.
std::int64_t parse_duration(const std::string& text);

enum class InactiveRule { CarryForward, DropWindow };
enum class TieRule { NetQuantity, CarryForward };

struct WindowingPolicy {
    std::int64_t width_us = 600'000'000;  // ten minutes
    std::vector<std::string> trader_set;
    InactiveRule inactive_rule = InactiveRule::CarryForward;
    TieRule tie_rule = TieRule::CarryForward;

    void validate() const;
};

struct DroppedWindow {
    std::int64_t start_us = 0;
    std::string reason;
};

struct SpinSeries {
    std::vector<std::string> traders;
    std::int64_t width_us = 0;
    std::vector<std::int64_t> starts;
    std::vector<SpinConfiguration> configs;
    std::vector<int> coverage;  // traders with observed activity per window
    std::vector<DroppedWindow> dropped;
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return configs.size(); }
};

/// The n most active traders by trade count, ties broken by id.
std::vector<std::string> top_traders(const std::vector<TradeRecord>& records, std::size_t n);

/// Windows are aligned to multiples of the width since the epoch; windows
/// without any activity from tracked traders are skipped.
SpinSeries windowize(const std::vector<TradeRecord>& records, const WindowingPolicy& policy);

/// Pair sum T per window.
std::vector<std::int64_t> hamiltonian_series(const SpinSeries& series);
/// Scaled H = -T / N per window.
std::vector<Rational> scaled_hamiltonian_series(const SpinSeries& series);

void write_spin_series_csv(std::ostream& out, const SpinSeries& series);
SpinSeries read_spin_series_csv(std::istream& in);

}  // namespace cwm
