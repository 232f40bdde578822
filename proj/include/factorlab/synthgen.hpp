#pragma once

// Synthetic daily stock panels with planted, parameterized anomalies.
//
// Return model per stock i (persistent size rank u_i = (i+0.5)/N):
//   r_i(t) = beta_i * f(t) + lambda * s_i + lambda_lowvol * z_i + eps_i(t)
// where f is a Gaussian market factor, beta_i = rho(u_i) * sigma(u_i) / sigma_m,
// s_i is the planted size score (+1 smallest ADV), z_i the planted low-vol
// score (+1 lowest volatility), and eps_i a standardized skew-and-tail
// mixture scaled to the planted idiosyncratic volatility. Market caps follow
// a slow mean-reverting geometric process; log dollar volumes share the cap
// fluctuations through `size_turnover_link`.
//
// RNG: xoshiro256++ streams seeded by splitmix64. The market factor uses
// substream 0 of the master seed, stock i uses substream 1 + i, with the
// master seed diffused through splitmix64 before the substream offset is
// added so that nearby master seeds (e.g. a seed sweep 1..K) produce
// unrelated panels. Draws per (stock, day) have a fixed layout, so
// generation is bit-identical regardless of the number of workers or stock
// evaluation order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "factorlab/core.hpp"

namespace factorlab {

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Decorrelated substream key: diffuse the master seed before adding the
// substream index, then diffuse the pair. Without the first diffusion,
// master seeds s and s+1 would share all but one per-stock stream.
inline std::uint64_t substream_key(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t sm = seed;
    sm = splitmix64(sm) + index;
    return splitmix64(sm);
}

// xoshiro256++ with state derived from a 64-bit key via splitmix64.
class Stream {
public:
    explicit Stream(std::uint64_t key) {
        std::uint64_t sm = key;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in (0, 1), 53-bit resolution
    double next_uniform() {
        return ((double)(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    // Box-Muller, one fresh pair per call (no caching, fixed draw count)
    double next_normal() {
        const double u1 = next_uniform(), u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::acos(-1.0) * u2);
    }

    double next_exponential() { return -std::log(next_uniform()); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace rng

// Piecewise-linear profile over rank in [0, 1], clamped at the ends.
struct Profile {
    std::vector<std::pair<double, double>> anchors;  // (rank, value), rank ascending

    double operator()(double u) const {
        if (anchors.empty()) throw ParameterError("profile has no anchors");
        if (u <= anchors.front().first) return anchors.front().second;
        if (u >= anchors.back().first) return anchors.back().second;
        for (std::size_t k = 1; k < anchors.size(); ++k)
            if (u <= anchors[k].first) {
                const auto& [x0, y0] = anchors[k - 1];
                const auto& [x1, y1] = anchors[k];
                return y0 + (y1 - y0) * (u - x0) / (x1 - x0);
            }
        return anchors.back().second;
    }
};

struct SynthConfig {
    std::size_t n_stocks = 100;
    std::size_t n_days = 500;
    std::uint64_t seed = 1;

    double premium_lambda = 0.0;   // daily expected return per unit of CMH score
    double lowvol_premium = 0.0;   // daily expected return per unit of low-vol score

    double sigma_market = 0.01;    // daily vol of the market factor
    Profile vol_profile{{{0.0, 0.03}, {1.0, 0.015}}};   // sigma(rank)
    Profile corr_profile{{{0.0, 0.3}, {1.0, 0.7}}};     // rho(rank)
    bool beta_hump = false;        // override profiles so beta(rank) is hump-shaped

    double small_stock_skew = 0.0;  // up-jump mixture weight at rank 0 (fades to 0)
    double small_stock_tail = 0.0;  // down-jump mixture weight at rank 0 (fades to 0)

    double size_turnover_link = 0.9;  // corr of log-cap and log-volume fluctuations

    double log_cap_low = std::log(1e8), log_cap_high = std::log(1e10);
    double log_adv_low = std::log(1e5), log_adv_high = std::log(1e9);
    double cap_mean_reversion = 0.995;  // AR(1) coefficient of log-cap fluctuations
    double cap_shock_vol = 0.01;
    double volume_noise_vol = 0.15;    // day-to-day log dollar-volume noise

    // Jump sizes of the skew/tail mixture, in units of the Gaussian body.
    double up_jump_scale = 4.0;
    double down_jump_scale = 4.0;

    Profile effective_vol_profile() const {
        if (beta_hump) return Profile{{{0.0, 0.045}, {0.4, 0.028}, {1.0, 0.016}}};
        return vol_profile;
    }
    Profile effective_corr_profile() const {
        if (beta_hump) return Profile{{{0.0, 0.20}, {0.4, 0.65}, {1.0, 0.70}}};
        return corr_profile;
    }

    void validate() const {
        if (n_stocks < 2 || n_days < 2) throw ParameterError("synth: need >= 2 stocks and days");
        if (sigma_market <= 0) throw ParameterError("synth: sigma_market must be > 0");
        for (const auto& [u, v] : effective_vol_profile().anchors)
            if (v <= 0) throw ParameterError("synth: vol profile anchor must be > 0");
        for (const auto& [u, v] : effective_corr_profile().anchors)
            if (v <= -1.0 || v >= 1.0)
                throw ParameterError("synth: corr profile anchor must lie in (-1, 1)");
        if (small_stock_skew < 0 || small_stock_tail < 0 ||
            small_stock_skew + small_stock_tail >= 1.0)
            throw ParameterError("synth: mixture weights must be in [0, 1)");
        if (size_turnover_link < -1.0 || size_turnover_link > 1.0)
            throw ParameterError("synth: size_turnover_link must lie in [-1, 1]");
    }
};

namespace detail {

// Rank-score in [-1, 1] of `values` (long-low orientation: smallest gets +1),
// mean-rank ties. Mirror of the signal scorer, kept local so the oracle does
// not depend on estimated panels.
inline std::vector<double> planted_rank_score(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> score(n, 0.0);
    std::size_t k = 0;
    while (k < n) {
        std::size_t j = k;
        while (j + 1 < n && values[order[j + 1]] == values[order[k]]) ++j;
        double mean = 0.0;
        for (std::size_t m = k; m <= j; ++m)
            mean += 2.0 * (double)m / (double)(n - 1) - 1.0;
        mean /= (double)(j - k + 1);
        for (std::size_t m = k; m <= j; ++m) score[order[m]] = -mean;
        k = j + 1;
    }
    return score;
}

// Raw (pre-standardization) moments of the skew/tail mixture:
// Y = up_jump*Exp(1) w.p. p, -down_jump*Exp(1) w.p. q, N(0,1) otherwise.
struct MixtureMoments {
    double mean, var, sd, skew;
};

inline MixtureMoments mixture_moments(double p, double q, double ju, double jd) {
    MixtureMoments m;
    const double g = 1.0 - p - q;
    m.mean = p * ju - q * jd;
    const double m2 = p * 2.0 * ju * ju + q * 2.0 * jd * jd + g;
    m.var = m2 - m.mean * m.mean;
    m.sd = std::sqrt(m.var);
    const double m3 = p * 6.0 * ju * ju * ju - q * 6.0 * jd * jd * jd;
    const double c3 = m3 - 3.0 * m.mean * m2 + 2.0 * m.mean * m.mean * m.mean;
    m.skew = c3 / (m.var * m.sd);
    return m;
}

// P(X < -x) for the standardized mixture, x > 0.
inline double mixture_lower_tail(double p, double q, double ju, double jd, double x) {
    const auto m = mixture_moments(p, q, ju, jd);
    const double y = m.mean - x * m.sd;  // threshold in raw Y units
    double prob = (1.0 - p - q) * 0.5 * std::erfc(-y / std::sqrt(2.0));
    if (y < 0) prob += q * std::exp(y / jd);
    else prob += q;  // whole negative branch below threshold
    return prob;
}

inline std::string iso_date_from_day_number(long day) {
    // civil-from-days, days since 1970-01-01; panels start at 1990-01-01
    long z = day + 719468 + 7305;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = (unsigned)(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = (long)yoe + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    const long year = y + (m <= 2);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04ld-%02u-%02u", year, m, d);
    return buf;
}

}  // namespace detail

// Per-stock planted truths and expected strategy statistics implied by a
// config, computed from the config alone (no simulation).
struct PlantedOracle {
    std::vector<double> rank;             // u_i
    std::vector<double> sigma;            // total daily vol per stock
    std::vector<double> rho;              // correlation with the market factor
    std::vector<double> beta_vs_index;    // expected estimated beta vs cap-weighted index
    std::vector<double> idio_skewness;    // skewness of eps_i
    std::vector<double> weekly_exceed_5sigma;  // approx P(5-day return < -5 sigma_w)
    std::vector<double> size_score;       // planted CMH/SMB score s_i
    std::vector<double> lowvol_score;     // planted low-vol score z_i

    struct Strategy {
        double daily_mean, daily_vol, tstat, book_beta;
    };
    Strategy cmh_hedged, cmh_unhedged;
};

inline PlantedOracle planted_oracle(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t N = cfg.n_stocks;
    const auto volp = cfg.effective_vol_profile();
    const auto corrp = cfg.effective_corr_profile();
    PlantedOracle o;
    o.rank.resize(N);
    o.sigma.resize(N);
    o.rho.resize(N);
    o.beta_vs_index.resize(N);
    o.idio_skewness.resize(N);
    o.weekly_exceed_5sigma.resize(N);

    std::vector<double> beta_f(N), base_cap(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double u = ((double)i + 0.5) / (double)N;
        o.rank[i] = u;
        o.sigma[i] = volp(u);
        o.rho[i] = corrp(u);
        beta_f[i] = o.rho[i] * o.sigma[i] / cfg.sigma_market;
        base_cap[i] = std::exp(cfg.log_cap_low + u * (cfg.log_cap_high - cfg.log_cap_low));
        const double p = cfg.small_stock_skew * (1.0 - u);
        const double q = cfg.small_stock_tail * (1.0 - u);
        o.idio_skewness[i] =
            detail::mixture_moments(p, q, cfg.up_jump_scale, cfg.down_jump_scale).skew;
        // single-large-jump approximation for the 5-day block; exact Gaussian
        // case reduces to Phi(-5) since daily draws are iid
        const double thr = 5.0 * std::sqrt(5.0);
        if (p == 0.0 && q == 0.0) {
            o.weekly_exceed_5sigma[i] = 0.5 * std::erfc(5.0 / std::sqrt(2.0));
        } else {
            const double daily =
                detail::mixture_lower_tail(p, q, cfg.up_jump_scale, cfg.down_jump_scale, thr);
            o.weekly_exceed_5sigma[i] = std::min(1.0, 5.0 * daily);
        }
    }

    // Index is dominated by the factor: estimated stock beta vs index scales
    // by the cap-weighted mean factor beta.
    double wsum = 0, wbeta = 0;
    for (std::size_t i = 0; i < N; ++i) {
        wsum += base_cap[i];
        wbeta += base_cap[i] * beta_f[i];
    }
    const double beta_bar = wbeta / wsum;
    for (std::size_t i = 0; i < N; ++i) o.beta_vs_index[i] = beta_f[i] / beta_bar;

    // Planted scores: size rank is u by construction; low-vol score ranks sigma.
    std::vector<double> adv_level(N);
    for (std::size_t i = 0; i < N; ++i)
        adv_level[i] = cfg.log_adv_low + o.rank[i] * (cfg.log_adv_high - cfg.log_adv_low);
    o.size_score = detail::planted_rank_score(adv_level);
    o.lowvol_score = detail::planted_rank_score(o.sigma);

    auto strategy_stats = [&](bool hedged) {
        PlantedOracle::Strategy st{};
        double gross = 0;
        for (double s : o.size_score) gross += std::abs(s);
        long double mean = 0, idio_var = 0, fbeta = 0;
        for (std::size_t i = 0; i < N; ++i) {
            const double w = o.size_score[i] / gross;
            mean += w * (cfg.premium_lambda * o.size_score[i] +
                         cfg.lowvol_premium * o.lowvol_score[i]);
            const double sidio = o.sigma[i] * std::sqrt(1.0 - o.rho[i] * o.rho[i]);
            idio_var += (long double)w * w * sidio * sidio;
            fbeta += w * beta_f[i];
        }
        st.book_beta = (double)fbeta / beta_bar;
        double var = (double)idio_var;
        if (!hedged) var += (double)(fbeta * fbeta) * cfg.sigma_market * cfg.sigma_market;
        st.daily_mean = (double)mean;
        st.daily_vol = std::sqrt(var);
        st.tstat = st.daily_mean / st.daily_vol * std::sqrt((double)cfg.n_days);
        return st;
    };
    o.cmh_hedged = strategy_stats(true);
    o.cmh_unhedged = strategy_stats(false);
    return o;
}

inline TradingPanel generate(const SynthConfig& cfg) {
    cfg.validate();
    const auto oracle = planted_oracle(cfg);
    const std::size_t N = cfg.n_stocks, T = cfg.n_days;

    TradingPanel panel;
    panel.dates.resize(T);
    for (std::size_t t = 0; t < T; ++t)
        panel.dates[t] = detail::iso_date_from_day_number((long)t);
    panel.stocks.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "S%05zu", i);
        panel.stocks[i] = buf;
    }
    panel.country.assign(N, "");
    panel.returns = Grid(T, N);
    panel.dollar_volume = Grid(T, N);
    panel.market_cap = Grid(T, N);
    panel.member.assign(T * N, 1);

    // Market factor path from its own stream.
    rng::Stream market(rng::substream_key(cfg.seed, 0));
    std::vector<double> f(T);
    for (std::size_t t = 0; t < T; ++t) f[t] = cfg.sigma_market * market.next_normal();

    const double link = cfg.size_turnover_link;
    const double link_orth = std::sqrt(std::max(0.0, 1.0 - link * link));
    const double phi = cfg.cap_mean_reversion;
    // stationary scale for the AR(1) log-cap fluctuation
    const double ar_sd = cfg.cap_shock_vol / std::sqrt(std::max(1e-12, 1.0 - phi * phi));

    for (std::size_t i = 0; i < N; ++i) {
        rng::Stream st(rng::substream_key(cfg.seed, 1 + (std::uint64_t)i));
        const double u = oracle.rank[i];
        const double sigma = oracle.sigma[i];
        const double rho = oracle.rho[i];
        const double beta_f = rho * sigma / cfg.sigma_market;
        const double sigma_idio = sigma * std::sqrt(1.0 - rho * rho);
        const double drift = cfg.premium_lambda * oracle.size_score[i] +
                             cfg.lowvol_premium * oracle.lowvol_score[i];
        const double p = cfg.small_stock_skew * (1.0 - u);
        const double q = cfg.small_stock_tail * (1.0 - u);
        const auto mm = detail::mixture_moments(p, q, cfg.up_jump_scale, cfg.down_jump_scale);
        const double base_log_cap =
            cfg.log_cap_low + u * (cfg.log_cap_high - cfg.log_cap_low);
        const double base_log_adv =
            cfg.log_adv_low + u * (cfg.log_adv_high - cfg.log_adv_low);

        double y = ar_sd * st.next_normal();   // log-cap fluctuation
        double w = ar_sd * st.next_normal();   // independent log-volume fluctuation
        for (std::size_t t = 0; t < T; ++t) {
            // fixed draw layout: body normal, branch uniform, jump exponential,
            // cap shock, volume shock, volume day noise
            const double z = st.next_normal();
            const double ub = st.next_uniform();
            const double ex = st.next_exponential();
            const double cap_shock = st.next_normal();
            const double vol_shock = st.next_normal();
            const double vol_day = st.next_normal();

            double raw;
            if (ub < p) raw = cfg.up_jump_scale * ex;
            else if (ub < p + q) raw = -cfg.down_jump_scale * ex;
            else raw = z;
            const double eps = sigma_idio * (raw - mm.mean) / mm.sd;

            double r = beta_f * f[t] + drift + eps;
            if (r < -0.95) r = -0.95;  // keep returns > -1; ~1e-7 tail event
            panel.returns(t, i) = r;
            panel.market_cap(t, i) = std::exp(base_log_cap + y);
            const double lw = link * y + link_orth * w;
            panel.dollar_volume(t, i) =
                std::exp(base_log_adv + lw + cfg.volume_noise_vol * vol_day);

            y = phi * y + cfg.cap_shock_vol * cap_shock;
            w = phi * w + cfg.cap_shock_vol * vol_shock;
        }
    }
    return panel;
}

}  // namespace factorlab
