#pragma once

// Signal-to-position conversion, beta hedging via an index overlay, and
// daily close-to-close PnL.
//
// Convention: positions formed at close t earn returns t -> t+1. Books are
// kept at unit gross including the overlay, so PnL series are directly
// comparable across factor definitions.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "factorlab/core.hpp"
#include "factorlab/estimators.hpp"
#include "factorlab/signals.hpp"

namespace factorlab {

struct PositionBook {
    std::vector<std::string> dates;
    std::vector<std::string> stocks;
    Grid weights;                      // signed, 0 where flat
    std::vector<double> index_overlay; // signed weight on the cap-weighted index

    double gross(std::size_t t) const {
        double g = std::abs(index_overlay[t]);
        for (std::size_t i = 0; i < stocks.size(); ++i) g += std::abs(weights(t, i));
        return g;
    }
};

struct PnLSeries {
    std::string label;
    std::vector<std::string> dates;
    std::vector<double> returns;  // NaN where the strategy had no book

    std::size_t n_defined() const {
        std::size_t n = 0;
        for (double r : returns)
            if (!is_missing(r)) ++n;
        return n;
    }
};

inline PositionBook build_positions(const RankSignal& signal) {
    const std::size_t T = signal.dates.size(), N = signal.stocks.size();
    PositionBook book{signal.dates, signal.stocks, Grid(T, N, 0.0),
                      std::vector<double>(T, 0.0)};
    for (std::size_t t = 0; t < T; ++t) {
        double gross = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double s = signal.scores(t, i);
            if (!is_missing(s)) gross += std::abs(s);
        }
        if (gross <= 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) {
            const double s = signal.scores(t, i);
            if (!is_missing(s)) book.weights(t, i) = s / gross;
        }
    }
    return book;
}

// Hedge log: count of held positions zeroed for lack of a beta estimate.
struct HedgeLog {
    std::size_t dropped_positions = 0;
};

// Offsets the predicted book beta with an index overlay, then rescales the
// whole book (overlay included) back to unit gross.
inline PositionBook beta_hedge(const PositionBook& book, const StatSurface& beta,
                               const IndexSeries& index, HedgeLog* log = nullptr) {
    if (beta.kind != SurfaceKind::Beta)
        throw ParameterError("beta_hedge: surface kind must be beta");
    if (book.dates != beta.dates || book.stocks != beta.stocks)
        throw ParameterError("beta_hedge: beta surface not aligned to book");
    if (index.dates != book.dates)
        throw ParameterError("beta_hedge: index not aligned to book");
    const std::size_t T = book.dates.size(), N = book.stocks.size();
    PositionBook out = book;
    HedgeLog local;
    for (std::size_t t = 0; t < T; ++t) {
        double predicted_beta = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < N; ++i) {
            double w = out.weights(t, i);
            if (w == 0.0) continue;
            if (!beta.has(t, i)) {
                out.weights(t, i) = 0.0;
                ++local.dropped_positions;
                continue;
            }
            predicted_beta += w * beta.values(t, i);
            any = true;
        }
        if (!any && out.index_overlay[t] == 0.0) continue;
        out.index_overlay[t] -= predicted_beta;
        const double gross = out.gross(t);
        if (gross <= 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) out.weights(t, i) /= gross;
        out.index_overlay[t] /= gross;
    }
    if (log) *log = local;
    return out;
}

struct LegSplit {
    PositionBook long_leg;
    PositionBook short_leg;
    std::vector<double> long_gross;   // pre-renormalization gross per date
    std::vector<double> short_gross;
};

// Partitions a book into its long and short legs, each renormalized to unit
// gross so each can be beta-hedged independently.
inline LegSplit leg_split(const PositionBook& book) {
    const std::size_t T = book.dates.size(), N = book.stocks.size();
    LegSplit out{
        {book.dates, book.stocks, Grid(T, N, 0.0), std::vector<double>(T, 0.0)},
        {book.dates, book.stocks, Grid(T, N, 0.0), std::vector<double>(T, 0.0)},
        std::vector<double>(T, 0.0),
        std::vector<double>(T, 0.0)};
    for (std::size_t t = 0; t < T; ++t) {
        double gl = 0.0, gs = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double w = book.weights(t, i);
            if (w > 0) gl += w;
            else if (w < 0) gs -= w;
        }
        out.long_gross[t] = gl;
        out.short_gross[t] = gs;
        for (std::size_t i = 0; i < N; ++i) {
            const double w = book.weights(t, i);
            if (w > 0 && gl > 0) out.long_leg.weights(t, i) = w / gl;
            else if (w < 0 && gs > 0) out.short_leg.weights(t, i) = w / gs;
        }
    }
    return out;
}

struct PnLLog {
    std::size_t departed_positions = 0;  // held stocks that left membership next day
};

inline PnLSeries compute_pnl(const PositionBook& book, const TradingPanel& panel,
                             const IndexSeries& index, const std::string& label = "",
                             PnLLog* log = nullptr) {
    if (book.dates != panel.dates) {
        for (std::size_t t = 0; t < std::min(book.dates.size(), panel.dates.size()); ++t)
            if (book.dates[t] != panel.dates[t])
                throw ParameterError("compute_pnl: date mismatch at " + panel.dates[t]);
        throw ParameterError("compute_pnl: book and panel have different date ranges");
    }
    const std::size_t T = panel.n_dates(), N = panel.n_stocks();
    PnLSeries out{label, panel.dates, std::vector<double>(T, kNaN)};
    PnLLog local;
    for (std::size_t t = 0; t + 1 < T; ++t) {
        bool open = book.index_overlay[t] != 0.0;
        double pnl = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double w = book.weights(t, i);
            if (w == 0.0) continue;
            open = true;
            if (!panel.is_member(t + 1, i)) {
                ++local.departed_positions;
                continue;  // contributes 0
            }
            pnl += w * panel.returns(t + 1, i);
        }
        if (!open) continue;
        if (book.index_overlay[t] != 0.0) {
            if (is_missing(index.index_return[t + 1]))
                throw ParameterError("compute_pnl: index return missing at " +
                                     panel.dates[t + 1]);
            pnl += book.index_overlay[t] * index.index_return[t + 1];
        }
        out.returns[t + 1] = pnl;
    }
    if (log) *log = local;
    return out;
}

// The portfolio-level beta convention: full-sample correlation between the
// strategy and the cap-weighted index.
inline double portfolio_beta_report(const PnLSeries& pnl, const IndexSeries& index) {
    if (pnl.dates != index.dates)
        throw ParameterError("portfolio_beta_report: series not aligned");
    long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < pnl.dates.size(); ++t) {
        const double x = pnl.returns[t], y = index.index_return[t];
        if (is_missing(x) || is_missing(y)) continue;
        sx += x;
        sy += y;
        sxx += (long double)x * x;
        syy += (long double)y * y;
        sxy += (long double)x * y;
        ++n;
    }
    if (n < 30) throw InsufficientDataError("portfolio_beta_report: fewer than 30 dates");
    const long double vx = sxx - sx * sx / (long double)n;
    const long double vy = syy - sy * sy / (long double)n;
    const long double cov = sxy - sx * sy / (long double)n;
    if (vx <= 0 || vy <= 0)
        throw InsufficientDataError("portfolio_beta_report: zero variance");
    return (double)(cov / std::sqrt((double)vx * (double)vy));
}

inline void save_pnl(const PnLSeries& pnl, const std::string& path,
                     const std::string& settings_comment = "", char delimiter = ',') {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write pnl file: " + path);
    out << "# strategy=" << pnl.label << " gross=unit";
    if (!settings_comment.empty()) out << ' ' << settings_comment;
    out << '\n';
    out << "date" << delimiter << "return\n";
    for (std::size_t t = 0; t < pnl.dates.size(); ++t)
        if (!is_missing(pnl.returns[t]))
            out << pnl.dates[t] << delimiter << format_value(pnl.returns[t]) << '\n';
}

inline void save_positions(const PositionBook& book, const std::string& path,
                           char delimiter = ',') {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write position file: " + path);
    out << "date" << delimiter << "stock_id" << delimiter << "weight\n";
    for (std::size_t t = 0; t < book.dates.size(); ++t) {
        for (std::size_t i = 0; i < book.stocks.size(); ++i)
            if (book.weights(t, i) != 0.0)
                out << book.dates[t] << delimiter << book.stocks[i] << delimiter
                    << format_value(book.weights(t, i)) << '\n';
        if (book.index_overlay[t] != 0.0)
            out << book.dates[t] << delimiter << "__INDEX__" << delimiter
                << format_value(book.index_overlay[t]) << '\n';
    }
}

}  // namespace factorlab
