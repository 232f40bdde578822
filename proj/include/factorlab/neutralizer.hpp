#pragma once

// PnL-space factor neutralization: full-sample OLS of a strategy on factor
// PnLs, keeping intercept plus residual so the strategy's own premium
// survives the subtraction. Also inter-factor correlations at daily or
// weekly (non-overlapping 5-day block) frequency.

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "factorlab/core.hpp"
#include "factorlab/portfolio.hpp"

namespace factorlab {

struct CollinearityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Residualization {
    std::vector<std::string> regressor_labels;
    std::vector<double> coefficients;
    std::vector<double> coefficient_tstats;
    double intercept = 0.0;
    double intercept_tstat = 0.0;
    PnLSeries residual_plus_intercept;
};

namespace detail {

// Indices where the target and every regressor are defined.
inline std::vector<std::size_t> common_dates(const PnLSeries& target,
                                             const std::vector<PnLSeries>& regressors) {
    std::vector<std::size_t> idx;
    for (std::size_t t = 0; t < target.dates.size(); ++t) {
        if (is_missing(target.returns[t])) continue;
        bool ok = true;
        for (const auto& r : regressors) {
            if (r.dates != target.dates)
                throw ParameterError("residualize: regressor dates not aligned to target");
            if (is_missing(r.returns[t])) {
                ok = false;
                break;
            }
        }
        if (ok) idx.push_back(t);
    }
    return idx;
}

// Eigenvalue range of a small symmetric positive semidefinite matrix by
// cyclic Jacobi rotations.
inline std::pair<double, double> sym_eig_range(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double sgn = theta >= 0 ? 1.0 : -1.0;
                const double tt = sgn / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(tt * tt + 1.0), s = tt * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    double lo = a[0][0], hi = a[0][0];
    for (std::size_t k = 1; k < n; ++k) {
        lo = std::min(lo, a[k][k]);
        hi = std::max(hi, a[k][k]);
    }
    return {lo, hi};
}

// Cholesky solve of a small SPD system, long double throughout.
inline std::vector<long double> spd_solve(std::vector<std::vector<long double>> m,
                                          std::vector<long double> b) {
    const std::size_t n = m.size();
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) m[j][j] -= m[j][k] * m[j][k];
        if (m[j][j] <= 0)
            throw CollinearityError("residualize: singular normal equations");
        m[j][j] = std::sqrt((double)m[j][j]);
        for (std::size_t i = j + 1; i < n; ++i) {
            for (std::size_t k = 0; k < j; ++k) m[i][j] -= m[i][k] * m[j][k];
            m[i][j] /= m[j][j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= m[i][k] * b[k];
        b[i] /= m[i][i];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) b[i] -= m[k][i] * b[k];
        b[i] /= m[i][i];
    }
    return b;
}

}  // namespace detail

inline Residualization residualize(const PnLSeries& target,
                                   const std::vector<PnLSeries>& regressors,
                                   double condition_limit = 1e8) {
    const auto idx = detail::common_dates(target, regressors);
    if (idx.size() < 100)
        throw InsufficientDataError("residualize: fewer than 100 common dates");
    const std::size_t k = regressors.size(), T = idx.size();

    // Design matrix columns: intercept + regressors.
    std::vector<std::vector<long double>> xtx(k + 1, std::vector<long double>(k + 1, 0.0L));
    std::vector<long double> xty(k + 1, 0.0L);
    auto x_at = [&](std::size_t col, std::size_t t) -> long double {
        return col == 0 ? 1.0L : (long double)regressors[col - 1].returns[idx[t]];
    };
    for (std::size_t t = 0; t < T; ++t) {
        const long double y = target.returns[idx[t]];
        for (std::size_t a = 0; a <= k; ++a) {
            const long double xa = x_at(a, t);
            xty[a] += xa * y;
            for (std::size_t b = a; b <= k; ++b) xtx[a][b] += xa * x_at(b, t);
        }
    }
    for (std::size_t a = 0; a <= k; ++a)
        for (std::size_t b = 0; b < a; ++b) xtx[a][b] = xtx[b][a];

    // Collinearity gate on the scale-normalized regressor cross-moment matrix.
    if (k >= 1) {
        std::vector<std::vector<double>> cm(k, std::vector<double>(k));
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) {
                const double da = std::sqrt((double)xtx[a + 1][a + 1]);
                const double db = std::sqrt((double)xtx[b + 1][b + 1]);
                cm[a][b] = da > 0 && db > 0 ? (double)xtx[a + 1][b + 1] / (da * db) : 0.0;
            }
        const auto [lo, hi] = detail::sym_eig_range(cm);
        if (lo <= 0 || hi / lo > condition_limit) {
            // name the most correlated pair
            std::size_t pa = 0, pb = k > 1 ? 1 : 0;
            double worst = -1.0;
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = a + 1; b < k; ++b)
                    if (std::abs(cm[a][b]) > worst) {
                        worst = std::abs(cm[a][b]);
                        pa = a;
                        pb = b;
                    }
            throw CollinearityError("residualize: collinear regressors '" +
                                    regressors[pa].label + "' and '" +
                                    regressors[pb].label + "'");
        }
    }

    const auto coef = detail::spd_solve(xtx, xty);

    Residualization out;
    out.intercept = (double)coef[0];
    for (std::size_t a = 0; a < k; ++a) {
        out.regressor_labels.push_back(regressors[a].label);
        out.coefficients.push_back((double)coef[a + 1]);
    }
    out.residual_plus_intercept.label = target.label + "_neutralized";
    out.residual_plus_intercept.dates = target.dates;
    out.residual_plus_intercept.returns.assign(target.dates.size(), kNaN);
    long double rss = 0.0L;
    for (std::size_t t = 0; t < T; ++t) {
        long double fit = coef[0];
        for (std::size_t a = 0; a < k; ++a)
            fit += coef[a + 1] * (long double)regressors[a].returns[idx[t]];
        const long double resid = (long double)target.returns[idx[t]] - fit;
        rss += resid * resid;
        out.residual_plus_intercept.returns[idx[t]] = (double)(resid + coef[0]);
    }

    // Coefficient t-stats from the usual OLS covariance s^2 (X'X)^-1.
    const long double dof = (long double)T - (long double)(k + 1);
    if (dof > 0) {
        const long double s2 = rss / dof;
        for (std::size_t a = 0; a <= k; ++a) {
            std::vector<long double> e(k + 1, 0.0L);
            e[a] = 1.0L;
            const auto col = detail::spd_solve(xtx, e);
            const double se = std::sqrt((double)(s2 * col[a]));
            const double tval = se > 0 ? (double)coef[a] / se : 0.0;
            if (a == 0) out.intercept_tstat = tval;
            else out.coefficient_tstats.push_back(tval);
        }
    } else {
        out.coefficient_tstats.assign(k, 0.0);
    }
    return out;
}

enum class CorrFrequency { Daily, Weekly };

// Pearson correlation of two PnL series; weekly aggregates returns over
// non-overlapping 5-trading-day blocks anchored at the common-sample start.
inline double pnl_correlation(const PnLSeries& a, const PnLSeries& b,
                              CorrFrequency frequency) {
    if (a.dates != b.dates) throw ParameterError("pnl_correlation: series not aligned");
    std::vector<double> xs, ys;
    for (std::size_t t = 0; t < a.dates.size(); ++t) {
        if (is_missing(a.returns[t]) || is_missing(b.returns[t])) continue;
        xs.push_back(a.returns[t]);
        ys.push_back(b.returns[t]);
    }
    if (frequency == CorrFrequency::Weekly) {
        std::vector<double> wx, wy;
        for (std::size_t start = 0; start + 5 <= xs.size(); start += 5) {
            double sx = 0, sy = 0;
            for (std::size_t j = 0; j < 5; ++j) {
                sx += xs[start + j];
                sy += ys[start + j];
            }
            wx.push_back(sx);
            wy.push_back(sy);
        }
        xs = std::move(wx);
        ys = std::move(wy);
    }
    const std::size_t n = xs.size();
    if (n < 30) throw InsufficientDataError("pnl_correlation: fewer than 30 common periods");
    long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t t = 0; t < n; ++t) {
        sx += xs[t];
        sy += ys[t];
        sxx += (long double)xs[t] * xs[t];
        syy += (long double)ys[t] * ys[t];
        sxy += (long double)xs[t] * ys[t];
    }
    const long double vx = sxx - sx * sx / (long double)n;
    const long double vy = syy - sy * sy / (long double)n;
    if (vx <= 0 || vy <= 0)
        throw InsufficientDataError("pnl_correlation: zero variance series");
    return (double)((sxy - sx * sy / (long double)n) /
                    std::sqrt((double)vx * (double)vy));
}

inline void save_residualization(const Residualization& r, const std::string& path,
                                 char delimiter = ',') {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write residualization report: " + path);
    out << "term" << delimiter << "coefficient" << delimiter << "tstat\n";
    out << "intercept" << delimiter << format_value(r.intercept) << delimiter
        << format_value(r.intercept_tstat) << '\n';
    for (std::size_t a = 0; a < r.coefficients.size(); ++a)
        out << r.regressor_labels[a] << delimiter << format_value(r.coefficients[a])
            << delimiter << format_value(r.coefficient_tstats[a]) << '\n';
}

}  // namespace factorlab
