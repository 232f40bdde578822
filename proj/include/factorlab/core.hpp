#pragma once

// Core panel types shared by every stage of the pipeline.
//
// All per-(date, stock) data lives in date-major dense matrices with a
// boolean membership mask. Non-member cells hold NaN and are skipped by
// every cross-sectional computation.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace factorlab {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double x) { return std::isnan(x); }

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense date-major matrix: cell (t, i) = data[t * n_cols + i].
class Grid {
public:
    Grid() = default;
    Grid(std::size_t n_rows, std::size_t n_cols, double fill = kNaN)
        : n_rows_(n_rows), n_cols_(n_cols), data_(n_rows * n_cols, fill) {}

    double operator()(std::size_t t, std::size_t i) const { return data_[t * n_cols_ + i]; }
    double& operator()(std::size_t t, std::size_t i) { return data_[t * n_cols_ + i]; }

    std::size_t rows() const { return n_rows_; }
    std::size_t cols() const { return n_cols_; }
    bool empty() const { return data_.empty(); }

    const std::vector<double>& raw() const { return data_; }

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<double> data_;
};

// Aligned daily stock panel. Immutable after construction by convention:
// loaders and generators build it, everything downstream only reads.
struct TradingPanel {
    std::vector<std::string> dates;       // ISO-8601, strictly increasing
    std::vector<std::string> stocks;      // unique identifiers
    std::vector<std::string> country;     // optional per-stock tag ("" if unset)
    Grid returns;                         // simple close-to-close returns
    Grid dollar_volume;                   // traded value per day
    Grid market_cap;                      // capitalisation
    std::map<std::string, Grid> characteristics;  // e.g. "roa"
    std::vector<std::uint8_t> member;     // date-major validity mask

    std::size_t n_dates() const { return dates.size(); }
    std::size_t n_stocks() const { return stocks.size(); }

    bool is_member(std::size_t t, std::size_t i) const {
        return member[t * stocks.size() + i] != 0;
    }
    void set_member(std::size_t t, std::size_t i, bool m) {
        member[t * stocks.size() + i] = m ? 1 : 0;
    }

    // Throws ValidationError on the first violated cell invariant.
    void validate() const {
        const std::size_t n = n_stocks();
        for (std::size_t t = 0; t < n_dates(); ++t) {
            if (t > 0 && !(dates[t - 1] < dates[t]))
                throw ValidationError("dates not strictly increasing at " + dates[t]);
            for (std::size_t i = 0; i < n; ++i) {
                if (!is_member(t, i)) continue;
                const double r = returns(t, i);
                if (is_missing(r) || r <= -1.0)
                    throw ValidationError("invalid return at date " + dates[t] +
                                          ", stock " + stocks[i]);
                const double dv = dollar_volume(t, i);
                if (is_missing(dv) || dv < 0.0)
                    throw ValidationError("negative dollar_volume at date " + dates[t] +
                                          ", stock " + stocks[i]);
                const double mc = market_cap(t, i);
                if (is_missing(mc) || mc <= 0.0)
                    throw ValidationError("non-positive market_cap at date " + dates[t] +
                                          ", stock " + stocks[i]);
            }
        }
    }
};

// Daily return series of the cap-weighted index. index_return[0] is NaN
// (no prior-day caps to weight with).
struct IndexSeries {
    std::vector<std::string> dates;
    std::vector<double> index_return;
};

// Builds the market-cap weighted index with strictly lagged weights:
// w_i(t) = cap_i(t-1) / sum_j cap_j(t-1) over stocks member at both t-1 and t.
inline IndexSeries cap_weighted_index(const TradingPanel& panel) {
    if (panel.n_dates() < 2)
        throw ParameterError("cap_weighted_index: panel needs at least 2 dates");
    const std::size_t n = panel.n_stocks();
    IndexSeries out;
    out.dates = panel.dates;
    out.index_return.assign(panel.n_dates(), kNaN);
    for (std::size_t t = 1; t < panel.n_dates(); ++t) {
        double cap_sum = 0.0, ret_sum = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!panel.is_member(t - 1, i) || !panel.is_member(t, i)) continue;
            const double c = panel.market_cap(t - 1, i);
            cap_sum += c;
            ret_sum += c * panel.returns(t, i);
            any = true;
        }
        if (!any || cap_sum <= 0.0)
            throw ValidationError("cap_weighted_index: no common members on date " +
                                  panel.dates[t]);
        out.index_return[t] = ret_sum / cap_sum;
    }
    return out;
}

}  // namespace factorlab
