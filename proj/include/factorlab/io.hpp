#pragma once

// Long-form delimited panel I/O.
//
// Canonical format: one row per (date, stock) observation with a header
// row naming the columns. Mandatory columns: date, stock_id, return,
// dollar_volume, market_cap. Any further columns become per-stock
// characteristics, except the optional "country" tag. Dates are ISO-8601.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "factorlab/core.hpp"

namespace factorlab {

struct PanelSchema {
    char delimiter = ',';
    std::string date_col = "date";
    std::string stock_col = "stock_id";
    std::string return_col = "return";
    std::string volume_col = "dollar_volume";
    std::string cap_col = "market_cap";
    std::string country_col = "country";
    // Missing cap/volume may be carried forward this many trading days.
    // Returns are never filled: a missing return makes the cell non-member.
    int max_forward_fill = 5;
};

struct DroppedRow {
    std::size_t line;      // 1-based line number in the source file
    std::string date;
    std::string stock;
    std::string reason;
};

struct LoadReport {
    std::vector<DroppedRow> dropped;
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace detail

inline TradingPanel load_panel(const std::string& path, const PanelSchema& schema,
                               LoadReport* report = nullptr) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open panel file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw LoadError(path + ": empty file");
    const auto header = detail::split_line(line, schema.delimiter);

    auto find_col = [&](const std::string& name) -> int {
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    };
    const int c_date = find_col(schema.date_col);
    const int c_stock = find_col(schema.stock_col);
    const int c_ret = find_col(schema.return_col);
    const int c_vol = find_col(schema.volume_col);
    const int c_cap = find_col(schema.cap_col);
    const int c_country = find_col(schema.country_col);
    if (c_date < 0 || c_stock < 0 || c_ret < 0 || c_vol < 0 || c_cap < 0)
        throw LoadError(path + ": missing mandatory column in header");

    std::vector<int> char_cols;
    for (int c = 0; c < static_cast<int>(header.size()); ++c)
        if (c != c_date && c != c_stock && c != c_ret && c != c_vol && c != c_cap &&
            c != c_country)
            char_cols.push_back(c);

    struct Row {
        std::size_t line;
        std::string date, stock, country;
        std::optional<double> ret, vol, cap;
        std::vector<std::optional<double>> extra;
    };
    std::vector<Row> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = detail::split_line(line, schema.delimiter);
        if (f.size() != header.size())
            throw LoadError(path + ": wrong field count at line " + std::to_string(lineno));
        Row r;
        r.line = lineno;
        r.date = f[c_date];
        r.stock = f[c_stock];
        if (c_country >= 0) r.country = f[c_country];
        if (r.date.empty() || r.stock.empty())
            throw LoadError(path + ": empty date or stock_id at line " + std::to_string(lineno));
        r.ret = detail::parse_double(f[c_ret]);
        if (!f[c_ret].empty() && !r.ret)
            throw LoadError(path + ": unparseable return at line " + std::to_string(lineno));
        r.vol = detail::parse_double(f[c_vol]);
        if (!f[c_vol].empty() && !r.vol)
            throw LoadError(path + ": unparseable dollar_volume at line " +
                            std::to_string(lineno));
        r.cap = detail::parse_double(f[c_cap]);
        if (!f[c_cap].empty() && !r.cap)
            throw LoadError(path + ": unparseable market_cap at line " + std::to_string(lineno));
        for (int c : char_cols) r.extra.push_back(detail::parse_double(f[c]));
        if (r.ret && *r.ret <= -1.0)
            throw ValidationError(path + ": return <= -1 at date " + r.date + ", stock " +
                                  r.stock);
        rows.push_back(std::move(r));
    }

    // Collect the aligned axes.
    std::vector<std::string> dates, stocks;
    std::unordered_map<std::string, std::size_t> date_idx, stock_idx;
    for (const auto& r : rows) {
        if (date_idx.emplace(r.date, 0).second) dates.push_back(r.date);
        if (stock_idx.emplace(r.stock, 0).second) stocks.push_back(r.stock);
    }
    std::sort(dates.begin(), dates.end());
    std::sort(stocks.begin(), stocks.end());
    for (std::size_t t = 0; t < dates.size(); ++t) date_idx[dates[t]] = t;
    for (std::size_t i = 0; i < stocks.size(); ++i) stock_idx[stocks[i]] = i;

    // Per-stock date monotonicity in the raw file order.
    std::unordered_map<std::string, std::string> last_seen;
    for (const auto& r : rows) {
        auto it = last_seen.find(r.stock);
        if (it != last_seen.end() && !(it->second < r.date))
            throw ValidationError(path + ": non-monotone dates for stock " + r.stock +
                                  " at line " + std::to_string(r.line));
        last_seen[r.stock] = r.date;
    }

    TradingPanel panel;
    panel.dates = dates;
    panel.stocks = stocks;
    panel.country.assign(stocks.size(), "");
    const std::size_t n = stocks.size();
    panel.returns = Grid(dates.size(), n);
    panel.dollar_volume = Grid(dates.size(), n);
    panel.market_cap = Grid(dates.size(), n);
    panel.member.assign(dates.size() * n, 0);
    for (int c : char_cols) panel.characteristics[header[c]] = Grid(dates.size(), n);

    LoadReport local_report;
    for (const auto& r : rows) {
        const std::size_t t = date_idx[r.date];
        const std::size_t i = stock_idx[r.stock];
        if (!r.country.empty()) panel.country[i] = r.country;
        if (r.ret) panel.returns(t, i) = *r.ret;
        if (r.vol) panel.dollar_volume(t, i) = *r.vol;
        if (r.cap) panel.market_cap(t, i) = *r.cap;
        for (std::size_t k = 0; k < char_cols.size(); ++k)
            if (r.extra[k]) panel.characteristics[header[char_cols[k]]](t, i) = *r.extra[k];
        if (!r.ret || !r.vol || !r.cap) {
            std::string missing;
            if (!r.ret) missing = "return";
            else if (!r.vol) missing = "dollar_volume";
            else missing = "market_cap";
            local_report.dropped.push_back({r.line, r.date, r.stock, "missing " + missing});
        } else {
            panel.set_member(t, i, true);
        }
    }

    // Forward-fill stale cap/volume where only the return is fresh.
    if (schema.max_forward_fill > 0) {
        for (std::size_t i = 0; i < n; ++i) {
            int vol_age = schema.max_forward_fill + 1, cap_age = vol_age;
            double last_vol = kNaN, last_cap = kNaN;
            for (std::size_t t = 0; t < dates.size(); ++t) {
                if (!is_missing(panel.dollar_volume(t, i))) {
                    last_vol = panel.dollar_volume(t, i);
                    vol_age = 0;
                } else {
                    ++vol_age;
                }
                if (!is_missing(panel.market_cap(t, i))) {
                    last_cap = panel.market_cap(t, i);
                    cap_age = 0;
                } else {
                    ++cap_age;
                }
                if (panel.is_member(t, i) || is_missing(panel.returns(t, i))) continue;
                bool vol_ok = !is_missing(panel.dollar_volume(t, i)) ||
                              (vol_age <= schema.max_forward_fill && !is_missing(last_vol));
                bool cap_ok = !is_missing(panel.market_cap(t, i)) ||
                              (cap_age <= schema.max_forward_fill && !is_missing(last_cap));
                if (vol_ok && cap_ok) {
                    if (is_missing(panel.dollar_volume(t, i))) panel.dollar_volume(t, i) = last_vol;
                    if (is_missing(panel.market_cap(t, i))) panel.market_cap(t, i) = last_cap;
                    panel.set_member(t, i, true);
                    // The row is no longer dropped; remove its report entry.
                    auto& d = local_report.dropped;
                    d.erase(std::remove_if(d.begin(), d.end(),
                                           [&](const DroppedRow& dr) {
                                               return dr.date == dates[t] &&
                                                      dr.stock == stocks[i];
                                           }),
                            d.end());
                }
            }
        }
    }

    panel.validate();
    if (report) *report = std::move(local_report);
    return panel;
}

// Numeric formatting used by every artifact writer: 12 significant digits.
inline std::string format_value(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

inline void save_panel(const TradingPanel& panel, const std::string& path,
                       char delimiter = ',') {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write panel file: " + path);
    out << "date" << delimiter << "stock_id" << delimiter << "return" << delimiter
        << "dollar_volume" << delimiter << "market_cap";
    bool any_country = std::any_of(panel.country.begin(), panel.country.end(),
                                   [](const std::string& c) { return !c.empty(); });
    if (any_country) out << delimiter << "country";
    for (const auto& [name, grid] : panel.characteristics) out << delimiter << name;
    out << '\n';
    for (std::size_t t = 0; t < panel.n_dates(); ++t) {
        for (std::size_t i = 0; i < panel.n_stocks(); ++i) {
            if (!panel.is_member(t, i)) continue;
            out << panel.dates[t] << delimiter << panel.stocks[i] << delimiter
                << format_value(panel.returns(t, i)) << delimiter
                << format_value(panel.dollar_volume(t, i)) << delimiter
                << format_value(panel.market_cap(t, i));
            if (any_country) out << delimiter << panel.country[i];
            for (const auto& [name, grid] : panel.characteristics) {
                out << delimiter;
                if (!is_missing(grid(t, i))) out << format_value(grid(t, i));
            }
            out << '\n';
        }
    }
}

}  // namespace factorlab
