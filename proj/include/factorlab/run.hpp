#pragma once

// Config-driven run orchestration: load or generate a panel, build the
// named strategies, hedge / neutralize, and write report tables plus a
// manifest that is sufficient to reproduce the run.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "factorlab/analytics.hpp"
#include "factorlab/core.hpp"
#include "factorlab/estimators.hpp"
#include "factorlab/io.hpp"
#include "factorlab/neutralizer.hpp"
#include "factorlab/portfolio.hpp"
#include "factorlab/signals.hpp"
#include "factorlab/synthgen.hpp"

namespace factorlab {

using json = nlohmann::json;

struct StageError : std::runtime_error {
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error("[stage: " + stage + "] " + what) {}
};

struct StrategyDef {
    std::string name;
    std::string signal;          // smb|cmh|lowvol|bab|liq|quality|<characteristic>
    std::string orientation;     // "long-low" | "long-high" | "" (signal default)
    bool hedge = true;
    bool per_leg = false;
    bool per_country = false;
};

struct NeutralizationDef {
    std::string name;
    std::string target;
    std::vector<std::string> regressors;
};

struct ProfileDef {
    std::string characteristic;  // "mcap" | "adv"
    std::string statistic;       // vol|beta|corr|skewness|lm_kurtosis|drawdown_prob
    std::size_t bins = 10;
};

struct RunConfig {
    std::optional<std::string> panel_file;
    char delimiter = ',';
    std::optional<SynthConfig> synth;

    int adv_window = 90, vol_window = 250, corr_window = 250;
    // min_obs defaults to 60% of the window when left at 0
    int adv_min_obs = 0, vol_min_obs = 0, corr_min_obs = 0;

    std::vector<StrategyDef> strategies;
    std::vector<NeutralizationDef> neutralizations;
    std::vector<ProfileDef> profiles;
    std::optional<std::string> extreme_strategy;
    std::size_t extreme_days = 100;
    bool utility_example = false;
    std::string correlation_frequency = "daily";  // plus "weekly"
    bool correlation_matrix = false;

    json echo;  // raw config document, for the manifest
};

namespace detail {

inline SynthConfig parse_synth_config(const json& j) {
    SynthConfig c;
    c.n_stocks = j.value("n_stocks", c.n_stocks);
    c.n_days = j.value("n_days", c.n_days);
    c.seed = j.value("seed", c.seed);
    c.premium_lambda = j.value("premium_lambda", c.premium_lambda);
    c.lowvol_premium = j.value("lowvol_premium", c.lowvol_premium);
    c.sigma_market = j.value("sigma_market", c.sigma_market);
    c.beta_hump = j.value("beta_hump", c.beta_hump);
    c.small_stock_skew = j.value("small_stock_skew", c.small_stock_skew);
    c.small_stock_tail = j.value("small_stock_tail", c.small_stock_tail);
    c.size_turnover_link = j.value("size_turnover_link", c.size_turnover_link);
    c.volume_noise_vol = j.value("volume_noise_vol", c.volume_noise_vol);
    auto parse_profile = [&](const char* key, Profile& p) {
        if (!j.contains(key)) return;
        p.anchors.clear();
        for (const auto& a : j.at(key))
            p.anchors.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
    };
    parse_profile("vol_profile", c.vol_profile);
    parse_profile("corr_profile", c.corr_profile);
    return c;
}

inline RunConfig parse_run_config(const json& j) {
    RunConfig c;
    c.echo = j;
    const auto& data = j.at("data");
    if (data.contains("file")) {
        c.panel_file = data.at("file").get<std::string>();
        if (data.contains("delimiter"))
            c.delimiter = data.at("delimiter").get<std::string>().at(0);
    } else if (data.contains("synth")) {
        c.synth = parse_synth_config(data.at("synth"));
    } else {
        throw ParameterError("config: data needs either 'file' or 'synth'");
    }
    if (j.contains("estimators")) {
        const auto& e = j.at("estimators");
        c.adv_window = e.value("adv_window", c.adv_window);
        c.vol_window = e.value("vol_window", c.vol_window);
        c.corr_window = e.value("corr_window", c.corr_window);
        c.adv_min_obs = e.value("adv_min_obs", 0);
        c.vol_min_obs = e.value("vol_min_obs", 0);
        c.corr_min_obs = e.value("corr_min_obs", 0);
    }
    for (const auto& s : j.value("strategies", json::array())) {
        StrategyDef d;
        d.name = s.at("name").get<std::string>();
        d.signal = s.at("signal").get<std::string>();
        d.orientation = s.value("orientation", "");
        d.hedge = s.value("hedge", true);
        d.per_leg = s.value("per_leg", false);
        d.per_country = s.value("per_country", false);
        c.strategies.push_back(d);
    }
    for (const auto& nj : j.value("neutralizations", json::array())) {
        NeutralizationDef d;
        d.name = nj.at("name").get<std::string>();
        d.target = nj.at("target").get<std::string>();
        for (const auto& r : nj.at("regressors")) d.regressors.push_back(r.get<std::string>());
        c.neutralizations.push_back(d);
    }
    if (j.contains("analytics")) {
        const auto& a = j.at("analytics");
        for (const auto& p : a.value("profiles", json::array())) {
            ProfileDef d;
            d.characteristic = p.at("characteristic").get<std::string>();
            d.statistic = p.at("statistic").get<std::string>();
            d.bins = p.value("bins", (std::size_t)10);
            c.profiles.push_back(d);
        }
        if (a.contains("extreme_days")) {
            c.extreme_strategy = a.at("extreme_days").at("strategy").get<std::string>();
            c.extreme_days = a.at("extreme_days").value("n", (std::size_t)100);
        }
        c.utility_example = a.value("utility_example", false);
        c.correlation_matrix = a.value("correlation_matrix", false);
        c.correlation_frequency = a.value("correlation_frequency", "daily");
    }
    return c;
}

inline std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot checksum file: " + path);
    std::uint64_t h = 14695981039346656037ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize k = 0; k < in.gcount(); ++k)
            h = (h ^ (unsigned char)buf[k]) * 1099511628211ULL;
        if (!in) break;
    }
    return h;
}

inline std::uint64_t fnv1a_string(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
}

}  // namespace detail

struct RunArtifacts {
    TradingPanel panel;
    IndexSeries index;
    StatSurface adv, vol, corr, beta, liq;
    std::map<std::string, PnLSeries> pnls;          // by strategy / neutralization name
    std::map<std::string, PositionBook> books;      // by strategy name
    json summary = json::object();
};

// Builds the shared estimator surfaces and all configured strategies.
// Strategy PnLs are computed in parallel when threads > 1; results are
// independent of the thread count (each strategy writes its own slot).
inline RunArtifacts run_pipeline(const RunConfig& cfg, int threads = 1) {
    RunArtifacts art;

    try {
        if (cfg.panel_file) {
            PanelSchema schema;
            schema.delimiter = cfg.delimiter;
            art.panel = load_panel(*cfg.panel_file, schema);
        } else {
            art.panel = generate(*cfg.synth);
        }
    } catch (const std::exception& e) {
        throw StageError("panel", e.what());
    }

    try {
        art.index = cap_weighted_index(art.panel);
    } catch (const std::exception& e) {
        throw StageError("index", e.what());
    }

    try {
        auto mo = [](int window, int configured) {
            return configured > 0 ? configured : std::max(1, (int)(0.6 * window));
        };
        art.adv = trailing_adv(art.panel, cfg.adv_window, mo(cfg.adv_window, cfg.adv_min_obs));
        art.vol = trailing_vol(art.panel, cfg.vol_window, mo(cfg.vol_window, cfg.vol_min_obs));
        auto cb = rolling_corr_beta(art.panel, art.index, cfg.corr_window,
                                    mo(cfg.corr_window, cfg.corr_min_obs));
        art.corr = std::move(cb.corr);
        art.beta = std::move(cb.beta);
        art.liq = liq_surface(art.adv, art.vol);
    } catch (const std::exception& e) {
        throw StageError("estimators", e.what());
    }

    auto build_one = [&](const StrategyDef& d) -> std::pair<PositionBook, PnLSeries> {
        RankSignal sig = [&] {
            const bool lh = d.orientation == "long-high";
            const Orientation fallback_low = lh ? Orientation::LongHigh : Orientation::LongLow;
            if (d.signal == "smb")
                return rank_signal_grid(d.name, art.panel.market_cap, art.panel,
                                        fallback_low, d.per_country);
            if (d.signal == "cmh")
                return rank_signal(art.adv, d.name, art.panel, fallback_low, d.per_country);
            if (d.signal == "lowvol")
                return rank_signal(art.vol, d.name, art.panel, fallback_low, d.per_country);
            if (d.signal == "bab")
                return rank_signal(art.beta, d.name, art.panel, fallback_low, d.per_country);
            if (d.signal == "liq")
                return rank_signal(art.liq, d.name, art.panel, fallback_low, d.per_country);
            if (d.signal == "quality")
                return rank_signal_characteristic(
                    art.panel, "roa", d.name,
                    d.orientation == "long-low" ? Orientation::LongLow : Orientation::LongHigh,
                    d.per_country);
            // any loaded characteristic column
            return rank_signal_characteristic(
                art.panel, d.signal, d.name,
                lh ? Orientation::LongHigh : Orientation::LongLow, d.per_country);
        }();
        // Caps at close t are known when positions form at close t, so SMB
        // ranks contemporaneous caps; estimator surfaces are already causal.
        PositionBook book = build_positions(sig);
        if (d.hedge && !d.per_leg) {
            book = beta_hedge(book, art.beta, art.index);
        } else if (d.hedge && d.per_leg) {
            auto legs = leg_split(book);
            auto hl = beta_hedge(legs.long_leg, art.beta, art.index);
            auto hs = beta_hedge(legs.short_leg, art.beta, art.index);
            PositionBook combined = book;
            for (std::size_t t = 0; t < book.dates.size(); ++t) {
                for (std::size_t i = 0; i < book.stocks.size(); ++i)
                    combined.weights(t, i) =
                        0.5 * (hl.weights(t, i) + hs.weights(t, i));
                combined.index_overlay[t] =
                    0.5 * (hl.index_overlay[t] + hs.index_overlay[t]);
            }
            book = combined;
        }
        PnLSeries pnl = compute_pnl(book, art.panel, art.index, d.name);
        return {std::move(book), std::move(pnl)};
    };

    try {
        std::vector<std::pair<PositionBook, PnLSeries>> results(cfg.strategies.size());
        if (threads > 1 && cfg.strategies.size() > 1) {
            std::vector<std::future<void>> futs;
            std::atomic<std::size_t> next{0};
            for (int k = 0; k < threads; ++k)
                futs.push_back(std::async(std::launch::async, [&] {
                    for (std::size_t s; (s = next.fetch_add(1)) < cfg.strategies.size();)
                        results[s] = build_one(cfg.strategies[s]);
                }));
            for (auto& f : futs) f.get();
        } else {
            for (std::size_t s = 0; s < cfg.strategies.size(); ++s)
                results[s] = build_one(cfg.strategies[s]);
        }
        for (std::size_t s = 0; s < cfg.strategies.size(); ++s) {
            const auto& name = cfg.strategies[s].name;
            art.books.emplace(name, std::move(results[s].first));
            art.pnls.emplace(name, std::move(results[s].second));
        }
    } catch (const std::exception& e) {
        throw StageError("portfolio", e.what());
    }

    try {
        for (const auto& d : cfg.strategies) {
            const auto& pnl = art.pnls.at(d.name);
            if (pnl.n_defined() >= 30) {
                art.summary["tstat_" + d.name] = tstat(pnl);
                art.summary["portfolio_beta_" + d.name] =
                    portfolio_beta_report(pnl, art.index);
            }
        }
        for (const auto& nd : cfg.neutralizations) {
            auto it = art.pnls.find(nd.target);
            if (it == art.pnls.end())
                throw ParameterError("neutralization target not defined: " + nd.target);
            std::vector<PnLSeries> regs;
            for (const auto& rn : nd.regressors) {
                auto rit = art.pnls.find(rn);
                if (rit == art.pnls.end())
                    throw ParameterError("neutralization regressor not defined: " + rn);
                regs.push_back(rit->second);
            }
            auto res = residualize(it->second, regs);
            res.residual_plus_intercept.label = nd.name;
            art.summary["tstat_" + nd.name] = tstat(res.residual_plus_intercept);
            json coefs = json::object();
            for (std::size_t a = 0; a < res.coefficients.size(); ++a)
                coefs[res.regressor_labels[a]] = res.coefficients[a];
            art.summary["coefficients_" + nd.name] = coefs;
            art.pnls.emplace(nd.name, std::move(res.residual_plus_intercept));
        }
        if (cfg.correlation_matrix) {
            const auto freq = cfg.correlation_frequency == "weekly" ? CorrFrequency::Weekly
                                                                    : CorrFrequency::Daily;
            json corr = json::object();
            for (auto a = art.pnls.begin(); a != art.pnls.end(); ++a)
                for (auto b = std::next(a); b != art.pnls.end(); ++b)
                    if (a->second.n_defined() >= 30 && b->second.n_defined() >= 30)
                        corr[a->first + "/" + b->first] =
                            pnl_correlation(a->second, b->second, freq);
            art.summary["correlation_" + cfg.correlation_frequency] = corr;
        }
        if (cfg.utility_example) {
            const auto u = log_utility_example();
            art.summary["utility_example"] = {{"mean", u.mean},
                                              {"rms", u.rms},
                                              {"skewness", u.skewness},
                                              {"expected_log_utility",
                                               u.expected_log_utility}};
        }
    } catch (const std::exception& e) {
        throw StageError("analytics", e.what());
    }

    return art;
}

// Full run: pipeline + artifact files + manifest under out_dir.
// Returns the manifest document.
inline json run(const json& config_doc, const std::string& out_dir,
                std::optional<std::uint64_t> seed_override = std::nullopt,
                int threads = 1) {
    RunConfig cfg = detail::parse_run_config(config_doc);
    if (seed_override && cfg.synth) {
        cfg.synth->seed = *seed_override;
        cfg.echo["data"]["synth"]["seed"] = *seed_override;
    }

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    json manifest;
    manifest["config"] = cfg.echo;
    manifest["config_hash"] = detail::fnv1a_string(cfg.echo.dump());
    if (cfg.synth) manifest["seed"] = cfg.synth->seed;
    manifest["status"] = "incomplete";

    auto manifest_path = (fs::path(out_dir) / "manifest.json").string();
    auto write_manifest = [&] {
        std::ofstream out(manifest_path);
        out << manifest.dump(2) << '\n';
    };
    write_manifest();

    try {
        if (cfg.panel_file) {
            try {
                manifest["input_checksum"] = detail::fnv1a_file(*cfg.panel_file);
            } catch (const std::exception& e) {
                throw StageError("panel", e.what());
            }
        }
        RunArtifacts art = run_pipeline(cfg, threads);

        json artifacts = json::object();
        auto emit = [&](const std::string& name) {
            artifacts[name] = detail::fnv1a_file((fs::path(out_dir) / name).string());
        };
        for (const auto& [name, pnl] : art.pnls) {
            const std::string fname = "pnl_" + name + ".csv";
            save_pnl(pnl, (fs::path(out_dir) / fname).string());
            emit(fname);
        }
        for (const auto& d : cfg.profiles) {
            const bool mcap = d.characteristic == "mcap";
            const Grid& char_grid = mcap ? art.panel.market_cap : art.adv.values;
            const auto ck = mcap ? ProfileCharacteristic::MarketCap : ProfileCharacteristic::Adv;
            RankProfile p = [&] {
                if (d.statistic == "vol")
                    return rank_profile_surface(art.panel, char_grid, ck, art.vol,
                                                ProfileStatistic::Vol, d.bins);
                if (d.statistic == "beta")
                    return rank_profile_surface(art.panel, char_grid, ck, art.beta,
                                                ProfileStatistic::Beta, d.bins);
                if (d.statistic == "corr")
                    return rank_profile_surface(art.panel, char_grid, ck, art.corr,
                                                ProfileStatistic::Corr, d.bins);
                const std::size_t N = art.panel.n_stocks();
                std::vector<double> per_stock(N, kNaN);
                if (d.statistic == "drawdown_prob") {
                    for (const auto& f : drawdown_probability(art.panel, art.vol))
                        per_stock[f.stock] = f.frequency;
                    return rank_profile_per_stock(art.panel, char_grid, ck, per_stock,
                                                  ProfileStatistic::DrawdownProb, d.bins);
                }
                for (std::size_t i = 0; i < N; ++i) {
                    const auto hist = stock_return_history(art.panel, i);
                    if (hist.size() < 60) continue;
                    per_stock[i] = d.statistic == "skewness" ? single_name_skewness(hist)
                                                             : lm_kurtosis(hist);
                }
                return rank_profile_per_stock(
                    art.panel, char_grid, ck, per_stock,
                    d.statistic == "skewness" ? ProfileStatistic::Skewness
                                              : ProfileStatistic::LmKurtosis,
                    d.bins);
            }();
            const std::string fname = "profile_" + d.characteristic + "_" + d.statistic + ".csv";
            save_profile(p, (fs::path(out_dir) / fname).string());
            emit(fname);
        }
        if (cfg.extreme_strategy) {
            auto it = art.books.find(*cfg.extreme_strategy);
            if (it == art.books.end())
                throw StageError("analytics", "extreme_days strategy not defined: " +
                                                  *cfg.extreme_strategy);
            auto [best, worst] = extreme_day_decomposition(it->second, art.panel, art.index,
                                                           art.adv, cfg.extreme_days);
            save_extreme_report(best, (fs::path(out_dir) / "extreme_best.csv").string());
            save_extreme_report(worst, (fs::path(out_dir) / "extreme_worst.csv").string());
            emit("extreme_best.csv");
            emit("extreme_worst.csv");
        }
        {
            std::ofstream out((fs::path(out_dir) / "summary.json").string());
            out << art.summary.dump(2) << '\n';
        }
        emit("summary.json");

        manifest["artifacts"] = artifacts;
        manifest["status"] = "complete";
        write_manifest();
    } catch (...) {
        write_manifest();  // leaves status=incomplete
        throw;
    }
    return manifest;
}

}  // namespace factorlab
