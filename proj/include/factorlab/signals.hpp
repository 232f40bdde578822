#pragma once

// Cross-sectional rank scores in [-1, 1], rebalanced every day.
//
// Per date, members with a defined characteristic value are ranked
// ascending; rank k of N maps to 2(k-1)/(N-1) - 1, signed so that
// orientation long-low hands +1 to the smallest value. Ties get the mean
// score of their rank span, which keeps the cross-section zero-sum.

#include <algorithm>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "factorlab/core.hpp"
#include "factorlab/estimators.hpp"

namespace factorlab {

enum class Orientation { LongLow, LongHigh };

struct RankSignal {
    std::string name;
    Orientation orientation;
    std::vector<std::string> dates;
    std::vector<std::string> stocks;
    Grid scores;  // NaN where no score emitted
};

namespace detail {

// Ranks one cross-section in place. values/idx hold the defined members.
inline void score_cross_section(const std::vector<double>& values,
                                const std::vector<std::size_t>& idx, Orientation orientation,
                                std::size_t t, Grid& scores) {
    const std::size_t n = values.size();
    if (n < 2) return;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const double sign = orientation == Orientation::LongLow ? -1.0 : 1.0;
    std::size_t k = 0;
    while (k < n) {
        std::size_t j = k;
        while (j + 1 < n && values[order[j + 1]] == values[order[k]]) ++j;
        // mean base score over the tied span [k, j]
        double mean = 0.0;
        for (std::size_t m = k; m <= j; ++m)
            mean += 2.0 * (double)m / (double)(n - 1) - 1.0;
        mean /= (double)(j - k + 1);
        for (std::size_t m = k; m <= j; ++m) scores(t, idx[order[m]]) = sign * mean;
        k = j + 1;
    }
}

}  // namespace detail

// Core ranking over an arbitrary (dates x stocks) value grid. A cell takes
// part on date t when `member(t,i)` is true and `values(t,i)` is defined.
inline RankSignal rank_signal_grid(const std::string& name, const Grid& values,
                                   const TradingPanel& panel, Orientation orientation,
                                   bool per_country = false) {
    const std::size_t T = panel.n_dates(), N = panel.n_stocks();
    RankSignal out{name, orientation, panel.dates, panel.stocks, Grid(T, N)};

    std::vector<std::string> groups;
    if (per_country) {
        groups = panel.country;
        std::sort(groups.begin(), groups.end());
        groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
    } else {
        groups.push_back("");
    }

    std::vector<double> vals;
    std::vector<std::size_t> idx;
    for (std::size_t t = 0; t < T; ++t) {
        for (const auto& g : groups) {
            vals.clear();
            idx.clear();
            for (std::size_t i = 0; i < N; ++i) {
                if (per_country && panel.country[i] != g) continue;
                if (!panel.is_member(t, i) || is_missing(values(t, i))) continue;
                vals.push_back(values(t, i));
                idx.push_back(i);
            }
            detail::score_cross_section(vals, idx, orientation, t, out.scores);
        }
    }
    return out;
}

inline RankSignal rank_signal(const StatSurface& surface, const std::string& name,
                              const TradingPanel& panel, Orientation orientation,
                              bool per_country = false) {
    return rank_signal_grid(name, surface.values, panel, orientation, per_country);
}

// Raw characteristics are lagged by one day before ranking so scores at t
// depend only on data at dates <= t-1.
inline RankSignal rank_signal_characteristic(const TradingPanel& panel,
                                             const std::string& column,
                                             const std::string& name,
                                             Orientation orientation,
                                             bool per_country = false) {
    auto it = panel.characteristics.find(column);
    if (it == panel.characteristics.end())
        throw ParameterError("unknown characteristic column: " + column);
    const std::size_t T = panel.n_dates(), N = panel.n_stocks();
    Grid lagged(T, N);
    for (std::size_t t = 1; t < T; ++t)
        for (std::size_t i = 0; i < N; ++i)
            if (panel.is_member(t - 1, i)) lagged(t, i) = it->second(t - 1, i);
    return rank_signal_grid(name, lagged, panel, orientation, per_country);
}

inline void save_signal(const RankSignal& signal, const std::string& path,
                        char delimiter = ',') {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write signal file: " + path);
    out << "date" << delimiter << "stock_id" << delimiter << "signal" << delimiter
        << "score\n";
    for (std::size_t t = 0; t < signal.dates.size(); ++t)
        for (std::size_t i = 0; i < signal.stocks.size(); ++i)
            if (!is_missing(signal.scores(t, i)))
                out << signal.dates[t] << delimiter << signal.stocks[i] << delimiter
                    << signal.name << delimiter << format_value(signal.scores(t, i)) << '\n';
}

}  // namespace factorlab
