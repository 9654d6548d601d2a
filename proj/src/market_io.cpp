#include "cwm/market_io.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "cwm/error.hpp"

namespace cwm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

char detect_delimiter(const std::string& header) {
    const char candidates[] = {',', ';', '\t'};
    char best = ',';
    long most = 0;
    for (char c : candidates) {
        const long count = std::count(header.begin(), header.end(), c);
        if (count > most) {
            most = count;
            best = c;
        }
    }
    return best;
}

bool all_digits(const std::string& s, std::size_t from, std::size_t len) {
    if (from + len > s.size()) return false;
    for (std::size_t i = from; i < from + len; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

int digits(const std::string& s, std::size_t from, std::size_t len) { return std::stoi(s.substr(from, len)); }

std::optional<std::int64_t> parse_iso(const std::string& s) {
    // YYYY-MM-DD[T ]HH:MM:SS[.f+][Z|+HH:MM|-HH:MM]
    if (s.size() < 19 || !all_digits(s, 0, 4) || s[4] != '-' || !all_digits(s, 5, 2) || s[7] != '-' ||
        !all_digits(s, 8, 2) || (s[10] != 'T' && s[10] != ' ') || !all_digits(s, 11, 2) || s[13] != ':' ||
        !all_digits(s, 14, 2) || s[16] != ':' || !all_digits(s, 17, 2))
        return std::nullopt;
    using namespace std::chrono;
    const year_month_day ymd{year{digits(s, 0, 4)}, month{static_cast<unsigned>(digits(s, 5, 2))},
                             day{static_cast<unsigned>(digits(s, 8, 2))}};
    if (!ymd.ok()) return std::nullopt;
    const int hh = digits(s, 11, 2);
    const int mm = digits(s, 14, 2);
    const int ss = digits(s, 17, 2);
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    std::int64_t us = 0;
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::int64_t scale = 100000;
        const std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            us += (s[pos] - '0') * scale;
            scale /= 10;
            ++pos;
        }
        if (pos == start) return std::nullopt;
    }
    std::int64_t offset_s = 0;
    if (pos < s.size()) {
        if (s[pos] == 'Z' && pos + 1 == s.size()) {
            ++pos;
        } else if ((s[pos] == '+' || s[pos] == '-') && all_digits(s, pos + 1, 2) && s.size() == pos + 6 &&
                   s[pos + 3] == ':' && all_digits(s, pos + 4, 2)) {
            const int sign = s[pos] == '+' ? 1 : -1;
            offset_s = sign * (digits(s, pos + 1, 2) * 3600 + digits(s, pos + 4, 2) * 60);
            pos = s.size();
        } else {
            return std::nullopt;
        }
    }
    const auto days = sys_days{ymd}.time_since_epoch().count();
    const std::int64_t seconds = static_cast<std::int64_t>(days) * 86400 + hh * 3600 + mm * 60 + ss - offset_s;
    return seconds * 1'000'000 + us;
}

std::optional<Side> parse_side(const std::string& token) {
    const auto t = lower(token);
    if (t == "buy" || t == "b" || t == "+1" || t == "1") return Side::Buy;
    if (t == "sell" || t == "s" || t == "-1") return Side::Sell;
    return std::nullopt;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::int64_t parse_timestamp(const std::string& text) {
    const auto s = trim(text);
    if (auto iso = parse_iso(s)) return *iso;
    // epoch seconds
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v) || std::isalpha(static_cast<unsigned char>(s[0])))
        throw FormatError("unparseable timestamp '" + text + "'");
    return static_cast<std::int64_t>(std::llround(v * 1e6));
}

std::string format_timestamp(std::int64_t timestamp_us) {
    using namespace std::chrono;
    const std::int64_t secs = floor_div(timestamp_us, 1'000'000);
    const std::int64_t frac = timestamp_us - secs * 1'000'000;
    const std::int64_t day_count = floor_div(secs, 86400);
    const std::int64_t sod = secs - day_count * 86400;
    const year_month_day ymd{sys_days{days{day_count}}};
    char buf[64];
    if (frac == 0)
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(sod / 3600),
                      static_cast<int>(sod / 60 % 60), static_cast<int>(sod % 60));
    else
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%06lldZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(sod / 3600),
                      static_cast<int>(sod / 60 % 60), static_cast<int>(sod % 60), static_cast<long long>(frac));
    return buf;
}

std::int64_t parse_duration(const std::string& text) {
    const auto s = trim(text);
    std::size_t i = 0;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
    if (i == 0) throw FormatError("unparseable duration '" + text + "'");
    const double value = std::stod(s.substr(0, i));
    const auto unit = lower(s.substr(i));
    double scale = 0.0;
    if (unit.empty() || unit == "s") scale = 1e6;
    else if (unit == "m" || unit == "min") scale = 60e6;
    else if (unit == "h") scale = 3600e6;
    else if (unit == "ms") scale = 1e3;
    else if (unit == "us") scale = 1.0;
    else throw FormatError("unknown duration unit in '" + text + "'");
    const auto us = static_cast<std::int64_t>(std::llround(value * scale));
    if (us <= 0) throw FormatError("duration '" + text + "' must be positive");
    return us;
}

ParsedTrades parse_trades(std::istream& in, FormatDescriptor format) {
    ParsedTrades out;
    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.delimiter = format.delimiter ? format.delimiter : detect_delimiter(t);
        header = split(t, out.delimiter);
        break;
    }
    if (header.empty()) throw FormatError("trade file has no header row");
    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < header.size(); ++i) column.emplace(lower(header[i]), i);
    std::size_t idx[4];
    const char* required[] = {"trader_id", "timestamp", "side", "quantity"};
    for (int k = 0; k < 4; ++k) {
        const auto it = column.find(required[k]);
        if (it == column.end()) throw FormatError(std::string("trade file header lacks required column '") + required[k] + "'");
        idx[k] = it->second;
    }
    const std::size_t width = *std::max_element(idx, idx + 4) + 1;

    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto fields = split(t, out.delimiter);
        auto fail = [&](const std::string& msg) { out.errors.push_back({line_no, msg}); };
        if (fields.size() < width) {
            fail("expected at least " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
            continue;
        }
        TradeRecord r;
        r.line = line_no;
        r.trader_id = fields[idx[0]];
        if (r.trader_id.empty()) {
            fail("empty trader_id");
            continue;
        }
        try {
            r.timestamp_us = parse_timestamp(fields[idx[1]]);
        } catch (const FormatError& e) {
            fail(e.what());
            continue;
        }
        const auto side = parse_side(fields[idx[2]]);
        if (!side) {
            fail("unknown side '" + fields[idx[2]] + "'");
            continue;
        }
        r.side = *side;
        std::size_t used = 0;
        try {
            r.quantity = std::stod(fields[idx[3]], &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != fields[idx[3]].size() || !(r.quantity > 0.0) || !std::isfinite(r.quantity)) {
            fail("quantity '" + fields[idx[3]] + "' is not a positive number");
            continue;
        }
        out.records.push_back(std::move(r));
    }
    std::stable_sort(out.records.begin(), out.records.end(),
                     [](const TradeRecord& a, const TradeRecord& b) { return a.timestamp_us < b.timestamp_us; });
    return out;
}

void WindowingPolicy::validate() const {
    if (width_us <= 0) throw DomainError("window width must be positive");
    if (trader_set.empty()) throw DomainError("trader set is empty");
    std::set<std::string> unique(trader_set.begin(), trader_set.end());
    if (unique.size() != trader_set.size()) throw DomainError("trader set contains duplicates");
}

std::vector<std::string> top_traders(const std::vector<TradeRecord>& records, std::size_t n) {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : records) ++counts[r.trader_id];
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() < n)
        throw DomainError("asked for the " + std::to_string(n) + " most active traders but only " +
                          std::to_string(ranked.size()) + " traded");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(ranked[i].first);
    return out;
}

SpinSeries windowize(const std::vector<TradeRecord>& records, const WindowingPolicy& policy) {
    policy.validate();
    if (records.empty()) throw DomainError("no trade records to windowize");
    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].timestamp_us < records[i - 1].timestamp_us) throw DomainError("trade records are not time-sorted");

    std::map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < policy.trader_set.size(); ++i) slot.emplace(policy.trader_set[i], i);
    const std::size_t n = policy.trader_set.size();

    SpinSeries series;
    series.traders = policy.trader_set;
    series.width_us = policy.width_us;

    // Net signed quantity and activity per window for tracked traders.
    struct Window {
        std::vector<double> net;
        std::vector<bool> active;
    };
    std::map<std::int64_t, Window> windows;
    for (const auto& r : records) {
        const auto it = slot.find(r.trader_id);
        if (it == slot.end()) continue;
        auto& w = windows[floor_div(r.timestamp_us, policy.width_us)];
        if (w.net.empty()) {
            w.net.assign(n, 0.0);
            w.active.assign(n, false);
        }
        w.net[it->second] += r.spin() * r.quantity;
        w.active[it->second] = true;
    }

    std::vector<int> last(n, 0);  // 0 = no history yet
    for (const auto& [index, w] : windows) {
        const std::int64_t start = index * policy.width_us;
        std::vector<int> spins(n, 0);
        int coverage = 0;
        std::string unresolved;
        for (std::size_t i = 0; i < n; ++i) {
            if (w.active[i]) {
                ++coverage;
                if (w.net[i] > 0.0) {
                    spins[i] = 1;
                } else if (w.net[i] < 0.0) {
                    spins[i] = -1;
                } else if (policy.tie_rule == TieRule::CarryForward && last[i] != 0) {
                    spins[i] = last[i];
                } else {
                    spins[i] = 1;
                    if (policy.tie_rule == TieRule::CarryForward)
                        series.warnings.push_back("tie for " + policy.trader_set[i] + " in window " +
                                                  format_timestamp(start) + " without history; using +1");
                }
            } else if (policy.inactive_rule == InactiveRule::CarryForward && last[i] != 0) {
                spins[i] = last[i];
            } else if (unresolved.empty()) {
                unresolved = policy.trader_set[i];
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (spins[i] != 0) last[i] = spins[i];
        if (!unresolved.empty()) {
            const std::string why = policy.inactive_rule == InactiveRule::DropWindow
                                        ? "trader " + unresolved + " inactive"
                                        : "trader " + unresolved + " inactive with no earlier spin to carry forward";
            series.dropped.push_back({start, why});
            continue;
        }
        series.starts.push_back(start);
        series.configs.emplace_back(std::move(spins));
        series.coverage.push_back(coverage);
    }
    return series;
}

std::vector<std::int64_t> hamiltonian_series(const SpinSeries& series) {
    std::vector<std::int64_t> t;
    t.reserve(series.size());
    for (const auto& c : series.configs) t.push_back(pair_sum(c));
    return t;
}

std::vector<Rational> scaled_hamiltonian_series(const SpinSeries& series) {
    std::vector<Rational> h;
    h.reserve(series.size());
    for (const auto& c : series.configs) h.push_back(hamiltonian(c));
    return h;
}

void write_spin_series_csv(std::ostream& out, const SpinSeries& series) {
    out << "# width_us=" << series.width_us << '\n';
    out << "window_start_us,window_start,coverage";
    for (const auto& t : series.traders) out << ',' << t;
    out << '\n';
    for (std::size_t w = 0; w < series.size(); ++w) {
        out << series.starts[w] << ',' << format_timestamp(series.starts[w]) << ',' << series.coverage[w];
        for (int x : series.configs[w].spins()) out << ',' << (x > 0 ? "+1" : "-1");
        out << '\n';
    }
}

SpinSeries read_spin_series_csv(std::istream& in) {
    SpinSeries series;
    std::string line;
    bool have_header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const auto eq = t.find("width_us=");
            if (eq != std::string::npos) series.width_us = std::stoll(t.substr(eq + 9));
            continue;
        }
        const auto fields = split(t, ',');
        if (!have_header) {
            if (fields.size() < 4 || fields[0] != "window_start_us" || fields[2] != "coverage")
                throw FormatError("spin series header not recognised");
            series.traders.assign(fields.begin() + 3, fields.end());
            have_header = true;
            continue;
        }
        if (fields.size() != series.traders.size() + 3)
            throw FormatError("line " + std::to_string(line_no) + ": wrong number of fields");
        try {
            series.starts.push_back(std::stoll(fields[0]));
            series.coverage.push_back(std::stoi(fields[2]));
            std::vector<int> spins;
            for (std::size_t i = 3; i < fields.size(); ++i) spins.push_back(std::stoi(fields[i]));
            series.configs.emplace_back(std::move(spins));
        } catch (const std::exception& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_header) throw FormatError("spin series has no header");
    return series;
}

}  // namespace cwm
