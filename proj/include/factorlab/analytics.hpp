#pragma once

// Diagnostic statistics: strategy t-stats, single-name moment measures,
// rank profiles, extreme-day decile decomposition, and the two-piece
// uniform log-utility illustration.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "factorlab/core.hpp"
#include "factorlab/estimators.hpp"
#include "factorlab/portfolio.hpp"

namespace factorlab {

inline double tstat(const PnLSeries& pnl) {
    std::vector<double> r;
    for (double x : pnl.returns)
        if (!is_missing(x)) r.push_back(x);
    const std::size_t n = r.size();
    if (n < 30) throw InsufficientDataError("tstat: fewer than 30 observations");
    long double s = 0, s2 = 0;
    for (double x : r) {
        s += x;
        s2 += (long double)x * x;
    }
    const long double mean = s / (long double)n;
    const long double var = (s2 - s * s / (long double)n) / (long double)(n - 1);
    if (var <= 0) throw InsufficientDataError("tstat: zero variance");
    return (double)(mean / std::sqrt((double)var) * std::sqrt((double)n));
}

namespace detail {

struct Moments {
    std::size_t n = 0;
    double mean = 0, m2 = 0, m3 = 0, mad = 0;  // central moments, mean |r - mean|
};

inline Moments central_moments(const std::vector<double>& r) {
    Moments mo;
    mo.n = r.size();
    if (mo.n == 0) return mo;
    long double s = 0;
    for (double x : r) s += x;
    const long double mean = s / (long double)mo.n;
    long double s2 = 0, s3 = 0, sa = 0;
    for (double x : r) {
        const long double d = (long double)x - mean;
        s2 += d * d;
        s3 += d * d * d;
        sa += std::abs((double)d);
    }
    mo.mean = (double)mean;
    mo.m2 = (double)(s2 / (long double)mo.n);
    mo.m3 = (double)(s3 / (long double)mo.n);
    mo.mad = (double)(sa / (long double)mo.n);
    return mo;
}

}  // namespace detail

// Standardized third central moment m3 / m2^(3/2).
inline double single_name_skewness(const std::vector<double>& returns,
                                   std::size_t min_obs = 60) {
    if (returns.size() < min_obs)
        throw InsufficientDataError("single_name_skewness: too few observations");
    const auto mo = detail::central_moments(returns);
    if (mo.m2 <= 0) throw InsufficientDataError("single_name_skewness: zero variance");
    return mo.m3 / std::pow(mo.m2, 1.5);
}

// Fat-tail measure from moments of order <= 2: E[(r-m)^2]/E[|r-m|]^2 - pi/2.
// Zero for Gaussian data since E|x| = sigma * sqrt(2/pi).
inline double lm_kurtosis(const std::vector<double>& returns, std::size_t min_obs = 60) {
    if (returns.size() < min_obs)
        throw InsufficientDataError("lm_kurtosis: too few observations");
    const auto mo = detail::central_moments(returns);
    if (mo.mad <= 0) throw InsufficientDataError("lm_kurtosis: zero absolute deviation");
    return mo.m2 / (mo.mad * mo.mad) - std::acos(-1.0) / 2.0;
}

struct DrawdownFrequency {
    std::size_t stock;     // index into panel.stocks
    std::size_t n_blocks = 0;
    std::size_t n_events = 0;
    double frequency = 0.0;
};

// Frequency of {block return < -threshold * sigma_w} over non-overlapping
// horizon-day blocks, sigma_w = causal daily vol at block start * sqrt(horizon).
// Blocks with a non-member day or no vol estimate at the start are skipped.
inline std::vector<DrawdownFrequency> drawdown_probability(const TradingPanel& panel,
                                                           const StatSurface& vol,
                                                           double threshold = 5.0,
                                                           int horizon = 5) {
    if (vol.kind != SurfaceKind::Vol)
        throw ParameterError("drawdown_probability: surface kind must be vol");
    if (vol.dates != panel.dates || vol.stocks != panel.stocks)
        throw ParameterError("drawdown_probability: vol surface not aligned to panel");
    if (horizon < 1 || threshold <= 0)
        throw ParameterError("drawdown_probability: bad threshold or horizon");
    const std::size_t T = panel.n_dates(), N = panel.n_stocks();
    std::vector<DrawdownFrequency> out;
    for (std::size_t i = 0; i < N; ++i) {
        DrawdownFrequency f;
        f.stock = i;
        for (std::size_t t0 = 0; t0 + horizon <= T; t0 += horizon) {
            if (!vol.has(t0, i) || vol.values(t0, i) <= 0.0) continue;
            bool ok = true;
            double block_ret = 0.0;
            for (int j = 0; j < horizon; ++j) {
                if (!panel.is_member(t0 + j, i)) {
                    ok = false;
                    break;
                }
                block_ret += panel.returns(t0 + j, i);
            }
            if (!ok) continue;
            ++f.n_blocks;
            const double sigma_w = vol.values(t0, i) * std::sqrt((double)horizon);
            if (block_ret < -threshold * sigma_w) ++f.n_events;
        }
        if (f.n_blocks == 0) continue;  // excluded, nothing to report
        f.frequency = (double)f.n_events / (double)f.n_blocks;
        out.push_back(f);
    }
    return out;
}

enum class ProfileCharacteristic { MarketCap, Adv };
enum class ProfileStatistic { Vol, Beta, Corr, Skewness, LmKurtosis, DrawdownProb };

inline const char* profile_statistic_name(ProfileStatistic s) {
    switch (s) {
        case ProfileStatistic::Vol: return "vol";
        case ProfileStatistic::Beta: return "beta";
        case ProfileStatistic::Corr: return "corr";
        case ProfileStatistic::Skewness: return "skewness";
        case ProfileStatistic::LmKurtosis: return "lm_kurtosis";
        case ProfileStatistic::DrawdownProb: return "drawdown_prob";
    }
    return "?";
}

struct ProfileBin {
    double rank_center = 0.0;
    std::size_t count = 0;
    double mean = kNaN;
    double stderror = kNaN;
};

struct RankProfile {
    ProfileCharacteristic characteristic;
    ProfileStatistic statistic;
    std::vector<ProfileBin> bins;
};

namespace detail {

// Normalized cross-sectional ranks in (0,1): (k - 0.5)/N over defined members.
inline std::vector<double> cross_section_ranks(const Grid& values,
                                               const TradingPanel& panel, std::size_t t) {
    const std::size_t N = panel.n_stocks();
    std::vector<double> ranks(N, kNaN);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < N; ++i)
        if (panel.is_member(t, i) && !is_missing(values(t, i))) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return values(t, a) < values(t, b);
    });
    for (std::size_t k = 0; k < idx.size(); ++k)
        ranks[idx[k]] = ((double)k + 0.5) / (double)idx.size();
    return ranks;
}

struct BinAccumulator {
    std::size_t n = 0;
    long double s = 0, s2 = 0;

    void add(double x) {
        ++n;
        s += x;
        s2 += (long double)x * x;
    }
    ProfileBin finish(double center) const {
        ProfileBin b;
        b.rank_center = center;
        b.count = n;
        if (n == 0) return b;
        b.mean = (double)(s / (long double)n);
        if (n >= 2) {
            long double var = (s2 - s * s / (long double)n) / (long double)(n - 1);
            if (var < 0) var = 0;
            b.stderror = std::sqrt((double)var / (double)n);
        }
        return b;
    }
};

inline RankProfile finish_profile(ProfileCharacteristic c, ProfileStatistic s,
                                  const std::vector<BinAccumulator>& acc) {
    RankProfile p{c, s, {}};
    const std::size_t K = acc.size();
    for (std::size_t b = 0; b < K; ++b)
        p.bins.push_back(acc[b].finish(((double)b + 0.5) / (double)K));
    return p;
}

inline std::size_t bin_of(double rank, std::size_t K) {
    auto b = (std::size_t)(rank * (double)K);
    return b >= K ? K - 1 : b;
}

}  // namespace detail

// Profile of a per-(date,stock) surface statistic, bucketed date by date by
// the characteristic's cross-sectional rank.
inline RankProfile rank_profile_surface(const TradingPanel& panel,
                                        const Grid& characteristic,
                                        ProfileCharacteristic char_kind,
                                        const StatSurface& statistic,
                                        ProfileStatistic stat_kind, std::size_t bins) {
    if (bins < 1) throw ParameterError("rank_profile: bins must be >= 1");
    std::vector<detail::BinAccumulator> acc(bins);
    for (std::size_t t = 0; t < panel.n_dates(); ++t) {
        const auto ranks = detail::cross_section_ranks(characteristic, panel, t);
        for (std::size_t i = 0; i < panel.n_stocks(); ++i) {
            if (is_missing(ranks[i]) || !statistic.has(t, i)) continue;
            acc[detail::bin_of(ranks[i], bins)].add(statistic.values(t, i));
        }
    }
    return detail::finish_profile(char_kind, stat_kind, acc);
}

// Lifetime median rank per stock, for profiles of per-stock statistics.
inline std::vector<double> lifetime_median_rank(const TradingPanel& panel,
                                                const Grid& characteristic) {
    const std::size_t N = panel.n_stocks();
    std::vector<std::vector<double>> per_stock(N);
    for (std::size_t t = 0; t < panel.n_dates(); ++t) {
        const auto ranks = detail::cross_section_ranks(characteristic, panel, t);
        for (std::size_t i = 0; i < N; ++i)
            if (!is_missing(ranks[i])) per_stock[i].push_back(ranks[i]);
    }
    std::vector<double> med(N, kNaN);
    for (std::size_t i = 0; i < N; ++i) {
        auto& v = per_stock[i];
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size();
        med[i] = m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
    }
    return med;
}

// Profile of a per-stock statistic (one value per stock, NaN = excluded),
// bucketed by the stock's lifetime median rank of the characteristic.
inline RankProfile rank_profile_per_stock(const TradingPanel& panel,
                                          const Grid& characteristic,
                                          ProfileCharacteristic char_kind,
                                          const std::vector<double>& per_stock_value,
                                          ProfileStatistic stat_kind, std::size_t bins) {
    if (bins < 1) throw ParameterError("rank_profile: bins must be >= 1");
    const auto med = lifetime_median_rank(panel, characteristic);
    std::vector<detail::BinAccumulator> acc(bins);
    for (std::size_t i = 0; i < panel.n_stocks(); ++i) {
        if (is_missing(med[i]) || is_missing(per_stock_value[i])) continue;
        acc[detail::bin_of(med[i], bins)].add(per_stock_value[i]);
    }
    return detail::finish_profile(char_kind, stat_kind, acc);
}

// Member return history of one stock, for the per-stock moment statistics.
inline std::vector<double> stock_return_history(const TradingPanel& panel, std::size_t i) {
    std::vector<double> r;
    for (std::size_t t = 0; t < panel.n_dates(); ++t)
        if (panel.is_member(t, i)) r.push_back(panel.returns(t, i));
    return r;
}

enum class ExtremeSide { Best, Worst };

struct ExtremeDayReport {
    ExtremeSide side;
    std::size_t n_days = 0;
    std::vector<double> decile_avg;  // average stock-level PnL per ADV decile
    double overlay_avg = 0.0;        // overlay contribution, reported separately
    bool truncated = false;          // fewer days available than requested
};

// Attributes each stock's contribution w_i * r_i on the n best / n worst
// strategy days to its ADV decile that day. Held stocks without an ADV
// estimate fall into the bottom decile so the partition stays exact.
inline std::pair<ExtremeDayReport, ExtremeDayReport> extreme_day_decomposition(
    const PositionBook& book, const TradingPanel& panel, const IndexSeries& index,
    const StatSurface& adv, std::size_t n = 100, std::size_t deciles = 10) {
    if (adv.kind != SurfaceKind::Adv)
        throw ParameterError("extreme_day_decomposition: surface kind must be adv");
    if (book.dates != panel.dates || adv.dates != panel.dates)
        throw ParameterError("extreme_day_decomposition: inputs not aligned");
    if (deciles < 1) throw ParameterError("extreme_day_decomposition: deciles must be >= 1");
    const std::size_t T = panel.n_dates(), N = panel.n_stocks();

    struct Day {
        std::size_t t;  // PnL date (positions formed at t-1)
        double total;   // stock-level + overlay
        std::vector<double> decile;
        double overlay;
    };
    std::vector<Day> days;
    for (std::size_t t = 1; t < T; ++t) {
        const std::size_t f = t - 1;  // formation date
        const auto ranks = detail::cross_section_ranks(adv.values, panel, t);
        Day d{t, 0.0, std::vector<double>(deciles, 0.0), 0.0};
        bool open = false;
        for (std::size_t i = 0; i < N; ++i) {
            const double w = book.weights(f, i);
            if (w == 0.0) continue;
            open = true;
            if (!panel.is_member(t, i)) continue;
            const double contrib = w * panel.returns(t, i);
            const std::size_t b =
                is_missing(ranks[i]) ? 0 : detail::bin_of(ranks[i], deciles);
            d.decile[b] += contrib;
        }
        if (book.index_overlay[f] != 0.0) {
            open = true;
            if (!is_missing(index.index_return[t]))
                d.overlay = book.index_overlay[f] * index.index_return[t];
        }
        if (!open) continue;
        for (double x : d.decile) d.total += x;
        d.total += d.overlay;
        days.push_back(std::move(d));
    }

    auto make_report = [&](ExtremeSide side) {
        ExtremeDayReport rep;
        rep.side = side;
        rep.decile_avg.assign(deciles, 0.0);
        std::size_t take = std::min(n, days.size());
        rep.truncated = take < n;
        rep.n_days = take;
        if (take == 0) return rep;
        std::vector<std::size_t> order(days.size());
        for (std::size_t k = 0; k < days.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return side == ExtremeSide::Best ? days[a].total > days[b].total
                                             : days[a].total < days[b].total;
        });
        for (std::size_t k = 0; k < take; ++k) {
            const Day& d = days[order[k]];
            for (std::size_t b = 0; b < deciles; ++b) rep.decile_avg[b] += d.decile[b];
            rep.overlay_avg += d.overlay;
        }
        for (std::size_t b = 0; b < deciles; ++b) rep.decile_avg[b] /= (double)take;
        rep.overlay_avg /= (double)take;
        return rep;
    };
    return {make_report(ExtremeSide::Best), make_report(ExtremeSide::Worst)};
}

struct LogUtilityExample {
    double mean = 0.0;
    double rms = 0.0;
    double skewness = 0.0;
    double expected_log_utility = 0.0;
    double p_negative = 0.0;  // mixture weight of the negative branch
};

// Two-piece uniform mixture: negative returns uniform on (neg_low, 0),
// positive uniform on (0, pos_high), weights solved so the mean is zero.
// All outputs in closed form.
inline LogUtilityExample log_utility_example(double neg_low = -1.0, double pos_high = 3.0) {
    if (!(neg_low >= -1.0 && neg_low < 0.0) || !(pos_high > 0.0))
        throw ParameterError("log_utility_example: need neg_low in [-1,0), pos_high > 0");
    LogUtilityExample out;
    const double p_neg = pos_high / (pos_high - neg_low);
    const double p_pos = 1.0 - p_neg;
    out.p_negative = p_neg;
    out.mean = p_neg * neg_low / 2.0 + p_pos * pos_high / 2.0;
    const double m2 = p_neg * neg_low * neg_low / 3.0 + p_pos * pos_high * pos_high / 3.0;
    const double m3 =
        p_neg * neg_low * neg_low * neg_low / 4.0 + p_pos * pos_high * pos_high * pos_high / 4.0;
    out.rms = std::sqrt(m2);
    out.skewness = m3 / std::pow(m2, 1.5);
    // antiderivative of ln(1+r): F(r) = (1+r)ln(1+r) - (1+r); F(-1) = 0 in the limit
    auto F = [](double r) {
        const double u = 1.0 + r;
        return u == 0.0 ? 0.0 : u * std::log(u) - u;
    };
    const double mean_log_neg = (F(0.0) - F(neg_low)) / (0.0 - neg_low);
    const double mean_log_pos = (F(pos_high) - F(0.0)) / pos_high;
    out.expected_log_utility = p_neg * mean_log_neg + p_pos * mean_log_pos;
    return out;
}

inline double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline void save_profile(const RankProfile& p, const std::string& path,
                         char delimiter = ',') {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write profile file: " + path);
    out << "rank_center" << delimiter << "mean" << delimiter << "stderr" << delimiter
        << "count\n";
    for (const auto& b : p.bins) {
        out << format_value(b.rank_center) << delimiter;
        if (b.count > 0) out << format_value(b.mean);
        out << delimiter;
        if (!is_missing(b.stderror)) out << format_value(b.stderror);
        out << delimiter << b.count << '\n';
    }
}

inline void save_extreme_report(const ExtremeDayReport& r, const std::string& path,
                                char delimiter = ',') {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write extreme-day report: " + path);
    out << "# side=" << (r.side == ExtremeSide::Best ? "best" : "worst")
        << " n_days=" << r.n_days << " overlay_avg=" << format_value(r.overlay_avg)
        << (r.truncated ? " truncated=1" : "") << '\n';
    out << "decile" << delimiter << "avg_pnl\n";
    for (std::size_t b = 0; b < r.decile_avg.size(); ++b)
        out << (b + 1) << delimiter << format_value(r.decile_avg[b]) << '\n';
}

}  // namespace factorlab
