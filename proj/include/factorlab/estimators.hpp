#pragma once

// Causal rolling per-stock estimators. Every value at (t, i) is computed
// from panel data at dates <= t-1 only, over the trailing window
// (t-window, t-1] restricted to member days.
//
// Implementation uses per-stock masked prefix sums in long double, so a
// window statistic is an O(1) difference of prefixes and matches a direct
// recomputation of the raw window slice to ~1e-15.

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "factorlab/core.hpp"
#include "factorlab/io.hpp"

namespace factorlab {

enum class SurfaceKind { Adv, Vol, Corr, Beta, Liq };

inline const char* surface_kind_name(SurfaceKind k) {
    switch (k) {
        case SurfaceKind::Adv: return "adv";
        case SurfaceKind::Vol: return "vol";
        case SurfaceKind::Corr: return "corr";
        case SurfaceKind::Beta: return "beta";
        case SurfaceKind::Liq: return "liq";
    }
    return "?";
}

struct StatSurface {
    SurfaceKind kind;
    std::vector<std::string> dates;
    std::vector<std::string> stocks;
    Grid values;       // NaN where not emitted
    int window = 0;
    int min_obs = 0;

    bool has(std::size_t t, std::size_t i) const { return !is_missing(values(t, i)); }
};

namespace detail {

inline void check_window(int window, int min_obs) {
    if (min_obs < 1 || window < min_obs)
        throw ParameterError("estimator window must satisfy window >= min_obs >= 1");
}

}  // namespace detail

// Trailing mean of dollar volume over member days.
inline StatSurface trailing_adv(const TradingPanel& panel, int window, int min_obs) {
    detail::check_window(window, min_obs);
    const std::size_t T = panel.n_dates(), N = panel.n_stocks();
    StatSurface out{SurfaceKind::Adv, panel.dates, panel.stocks, Grid(T, N), window, min_obs};

    std::vector<long double> psum(T + 1);
    std::vector<int> pcnt(T + 1);
    for (std::size_t i = 0; i < N; ++i) {
        psum[0] = 0;
        pcnt[0] = 0;
        for (std::size_t t = 0; t < T; ++t) {
            const bool m = panel.is_member(t, i);
            psum[t + 1] = psum[t] + (m ? (long double)panel.dollar_volume(t, i) : 0.0L);
            pcnt[t + 1] = pcnt[t] + (m ? 1 : 0);
        }
        for (std::size_t t = 1; t < T; ++t) {
            // window covers panel dates [t-window, t-1]
            const std::size_t lo = t >= (std::size_t)window ? t - window : 0;
            const int cnt = pcnt[t] - pcnt[lo];
            if (cnt < min_obs) continue;
            out.values(t, i) = (double)((psum[t] - psum[lo]) / cnt);
        }
    }
    return out;
}

// Trailing sample standard deviation (n-1 divisor) of daily returns.
inline StatSurface trailing_vol(const TradingPanel& panel, int window, int min_obs) {
    detail::check_window(window, min_obs);
    if (min_obs < 2) min_obs = 2;
    const std::size_t T = panel.n_dates(), N = panel.n_stocks();
    StatSurface out{SurfaceKind::Vol, panel.dates, panel.stocks, Grid(T, N), window, min_obs};

    std::vector<long double> ps(T + 1), ps2(T + 1);
    std::vector<int> pcnt(T + 1);
    for (std::size_t i = 0; i < N; ++i) {
        // center at the stock's first member return: shift-invariant variance,
        // no catastrophic cancellation, and bit-exact causality (the shift
        // never depends on later data)
        long double shift = 0;
        for (std::size_t t = 0; t < T; ++t)
            if (panel.is_member(t, i)) {
                shift = panel.returns(t, i);
                break;
            }
        ps[0] = ps2[0] = 0;
        pcnt[0] = 0;
        for (std::size_t t = 0; t < T; ++t) {
            const bool m = panel.is_member(t, i);
            const long double r = m ? (long double)panel.returns(t, i) - shift : 0.0L;
            ps[t + 1] = ps[t] + r;
            ps2[t + 1] = ps2[t] + r * r;
            pcnt[t + 1] = pcnt[t] + (m ? 1 : 0);
        }
        for (std::size_t t = 1; t < T; ++t) {
            const std::size_t lo = t >= (std::size_t)window ? t - window : 0;
            const int cnt = pcnt[t] - pcnt[lo];
            if (cnt < min_obs) continue;
            const long double s = ps[t] - ps[lo];
            const long double s2 = ps2[t] - ps2[lo];
            long double var = (s2 - s * s / cnt) / (cnt - 1);
            // Prefix-sum roundoff scales with the whole accumulator, not the
            // window, so compare against the global per-observation mean
            // square: a window whose values sit near the centering shift is
            // cancellation-prone even if s2/cnt looks healthy. Recompute the
            // cell two-pass around the window's own mean in that case.
            if (var * 1e4L < ps2[t] / pcnt[t]) {
                long double mean = 0;
                for (std::size_t u = lo; u < t; ++u)
                    if (panel.is_member(u, i)) mean += panel.returns(u, i);
                mean /= cnt;
                long double ss = 0;
                for (std::size_t u = lo; u < t; ++u)
                    if (panel.is_member(u, i)) {
                        const long double d = (long double)panel.returns(u, i) - mean;
                        ss += d * d;
                    }
                var = ss / (cnt - 1);
            }
            if (var < 0) var = 0;
            out.values(t, i) = (double)std::sqrt((double)var);
        }
    }
    return out;
}

struct CorrBeta {
    StatSurface corr;
    StatSurface beta;
};

// Pearson correlation and beta of stock vs index returns over the trailing
// window. beta = corr * vol_stock / vol_index = cov / var_index.
inline CorrBeta rolling_corr_beta(const TradingPanel& panel, const IndexSeries& index,
                                  int window, int min_obs) {
    detail::check_window(window, min_obs);
    if (min_obs < 2) min_obs = 2;
    if (index.dates != panel.dates)
        throw ParameterError("rolling_corr_beta: index not aligned to panel dates");
    const std::size_t T = panel.n_dates(), N = panel.n_stocks();
    CorrBeta out{
        {SurfaceKind::Corr, panel.dates, panel.stocks, Grid(T, N), window, min_obs},
        {SurfaceKind::Beta, panel.dates, panel.stocks, Grid(T, N), window, min_obs}};

    std::vector<long double> px(T + 1), py(T + 1), px2(T + 1), py2(T + 1), pxy(T + 1);
    std::vector<int> pcnt(T + 1);
    for (std::size_t i = 0; i < N; ++i) {
        // first paired observation as the centering shift (see trailing_vol)
        long double shift_x = 0, shift_y = 0;
        for (std::size_t t = 0; t < T; ++t)
            if (panel.is_member(t, i) && !is_missing(index.index_return[t])) {
                shift_x = panel.returns(t, i);
                shift_y = index.index_return[t];
                break;
            }
        px[0] = py[0] = px2[0] = py2[0] = pxy[0] = 0;
        pcnt[0] = 0;
        for (std::size_t t = 0; t < T; ++t) {
            const bool m = panel.is_member(t, i) && !is_missing(index.index_return[t]);
            const long double x = m ? (long double)panel.returns(t, i) - shift_x : 0.0L;
            const long double y = m ? (long double)index.index_return[t] - shift_y : 0.0L;
            px[t + 1] = px[t] + x;
            py[t + 1] = py[t] + y;
            px2[t + 1] = px2[t] + x * x;
            py2[t + 1] = py2[t] + y * y;
            pxy[t + 1] = pxy[t] + x * y;
            pcnt[t + 1] = pcnt[t] + (m ? 1 : 0);
        }
        for (std::size_t t = 1; t < T; ++t) {
            const std::size_t lo = t >= (std::size_t)window ? t - window : 0;
            const int cnt = pcnt[t] - pcnt[lo];
            if (cnt < min_obs) continue;
            const long double sx = px[t] - px[lo], sy = py[t] - py[lo];
            const long double sxx = px2[t] - px2[lo], syy = py2[t] - py2[lo];
            const long double sxy = pxy[t] - pxy[lo];
            long double vx = sxx - sx * sx / cnt;
            long double vy = syy - sy * sy / cnt;
            long double cov = sxy - sx * sy / cnt;
            // cancellation guard against the global per-observation scale
            // (see trailing_vol): recompute the cell around the window means
            const long double mx2 = px2[t] / pcnt[t], my2 = py2[t] / pcnt[t];
            const long double mag =
                cnt * std::sqrt((double)((mx2 + 1e-300L) * (my2 + 1e-300L)));
            if (vx * 1e4L < mx2 || vy * 1e4L < my2 ||
                (cov < mag * 1e-4L && cov > -mag * 1e-4L)) {
                long double mx = 0, my = 0;
                for (std::size_t u = lo; u < t; ++u)
                    if (panel.is_member(u, i) && !is_missing(index.index_return[u])) {
                        mx += panel.returns(u, i);
                        my += index.index_return[u];
                    }
                mx /= cnt;
                my /= cnt;
                vx = vy = cov = 0;
                for (std::size_t u = lo; u < t; ++u)
                    if (panel.is_member(u, i) && !is_missing(index.index_return[u])) {
                        const long double dx = (long double)panel.returns(u, i) - mx;
                        const long double dy = (long double)index.index_return[u] - my;
                        vx += dx * dx;
                        vy += dy * dy;
                        cov += dx * dy;
                    }
            }
            if (vy <= 0 || vx < 0) continue;  // zero index variance: no estimate
            if (vx == 0) {
                out.corr.values(t, i) = 0.0;
                out.beta.values(t, i) = 0.0;
                continue;
            }
            double c = (double)(cov / std::sqrt((double)vx * (double)vy));
            if (c > 1.0) c = 1.0;
            if (c < -1.0) c = -1.0;
            out.corr.values(t, i) = c;
            out.beta.values(t, i) = c * std::sqrt((double)vx / (double)vy);
        }
    }
    return out;
}

// LIQ = ADV / volatility where both are defined and vol > 0.
inline StatSurface liq_surface(const StatSurface& adv, const StatSurface& vol) {
    if (adv.kind != SurfaceKind::Adv || vol.kind != SurfaceKind::Vol)
        throw ParameterError("liq_surface: inputs must be (adv, vol) surfaces");
    if (adv.dates != vol.dates || adv.stocks != vol.stocks)
        throw ParameterError("liq_surface: surfaces on different grids");
    const std::size_t T = adv.dates.size(), N = adv.stocks.size();
    StatSurface out{SurfaceKind::Liq, adv.dates, adv.stocks, Grid(T, N),
                    std::max(adv.window, vol.window), std::max(adv.min_obs, vol.min_obs)};
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t i = 0; i < N; ++i) {
            const double a = adv.values(t, i), v = vol.values(t, i);
            if (is_missing(a) || is_missing(v) || v <= 0.0) continue;
            out.values(t, i) = a / v;
        }
    return out;
}

inline void save_surface(const StatSurface& surface, const std::string& path,
                         char delimiter = ',') {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write surface file: " + path);
    out << "date" << delimiter << "stock_id" << delimiter << "kind" << delimiter
        << "value\n";
    for (std::size_t t = 0; t < surface.dates.size(); ++t)
        for (std::size_t i = 0; i < surface.stocks.size(); ++i)
            if (surface.has(t, i))
                out << surface.dates[t] << delimiter << surface.stocks[i] << delimiter
                    << surface_kind_name(surface.kind) << delimiter
                    << format_value(surface.values(t, i)) << '\n';
}

}  // namespace factorlab
