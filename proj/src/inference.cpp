#include "diffar/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "diffar/acf.hpp"
#include "diffar/errors.hpp"
#include "diffar/estimators.hpp"
#include "diffar/simulate.hpp"
#include "diffar/stats.hpp"
#include "parallel.hpp"

namespace diffar {

BMatrix build_B(double rho1, int k) {
    if (k < 1) throw InvalidInputError("B matrix needs k >= 1");
    if (!std::isfinite(rho1) || !(std::abs(rho1) < 1.0))
        throw NumericalDegeneracyError("1 - rho(1) has no usable scale: rho(1) = " + std::to_string(rho1));
    BMatrix B;
    B.k = k;
    B.rho1 = rho1;
    B.entries = Eigen::MatrixXd::Zero(k, k + 2);
    const double scale = 1.0 / (2.0 * (1.0 - rho1));
    for (int h = 1; h <= k; ++h) {
        B.entries(h - 1, h - 1) = -scale;
        B.entries(h - 1, h) = 2.0 * scale;
        B.entries(h - 1, h + 1) = -scale;
    }
    return B;
}

double changepoint_discrepancy(const Series& clean, const Series& shifted, int h) {
    const std::size_t n = clean.values.size();
    if (n != shifted.values.size()) throw InvalidInputError("series must have equal length");
    if (n < 2) throw InvalidInputError("need at least 2 observations");
    if (h < 0 || static_cast<std::size_t>(h) > n - 2)
        throw InvalidInputError("lag must lie in [0, N-2], got " + std::to_string(h));

    // Uncentered lag-h autocovariance of the differences with divisor N (the
    // original length); this is the scaling under which a bounded number of
    // bounded shifts contributes O(1/N).
    auto raw_gamma = [n, h](const std::vector<double>& d) {
        double s = 0.0;
        for (std::size_t k = 0; k + static_cast<std::size_t>(h) < d.size(); ++k)
            s += d[k] * d[k + static_cast<std::size_t>(h)];
        return s / static_cast<double>(n);
    };
    const double gc = raw_gamma(difference(clean).values);
    const double gs = raw_gamma(difference(shifted).values);
    return std::sqrt(static_cast<double>(n)) * std::abs(gs - gc);
}

CltCheckReport clt_scaling_check(const ARModel& model, const ConfigGenerator& make_config,
                                 const CltOptions& options) {
    validate_model(model);
    if (options.lengths.size() < 2) throw InvalidInputError("need at least 2 series lengths");
    if (options.reps < 2) throw InvalidInputError("need at least 2 replications");
    for (std::size_t n : options.lengths) {
        if (n < static_cast<std::size_t>(model.order) + 3)
            throw InvalidInputError("every length must allow a fit (N >= p + 3)");
    }
    const int p = model.order;
    const std::vector<double> rho_d_true = theoretical_diff_acf(model, p);

    CltCheckReport report;
    report.lengths = options.lengths;
    report.reps = options.reps;
    const std::size_t nN = options.lengths.size();
    report.coeff_scaled_sd.resize(nN);
    report.coeff_scaled_bias.resize(nN);
    report.rho_scaled_sd.resize(nN);
    report.rho_scaled_bias.resize(nN);

    // errors[iN][rep] holds p coefficient errors then p diff-ACF errors, all
    // scaled by sqrt(N); NaN marks a failed replication.
    for (std::size_t iN = 0; iN < nN; ++iN) {
        const std::size_t n = options.lengths[iN];
        const double root_n = std::sqrt(static_cast<double>(n));
        std::vector<std::vector<double>> slots(options.reps);
        detail::parallel_for(options.reps, options.threads, [&](std::size_t r) {
            const std::uint64_t rep_seed = derive_seed(options.seed, iN, r);
            Series x = simulate_ar(model, n, derive_seed(rep_seed, 0));
            if (make_config) {
                Rng cfg_rng = make_rng(derive_seed(rep_seed, 1));
                x = apply_mean_shifts(x, make_config(n, cfg_rng));
            }
            std::vector<double> row;
            try {
                const EstimationReport fit = diff_yule_walker(x, p);
                const AcfEstimate a = sample_diff_acf(difference(x), p);
                row.reserve(2 * static_cast<std::size_t>(p));
                for (int j = 0; j < p; ++j)
                    row.push_back(root_n * (fit.coeffs[static_cast<std::size_t>(j)] -
                                            model.coeffs[static_cast<std::size_t>(j)]));
                for (int h = 1; h <= p; ++h)
                    row.push_back(root_n *
                                  (a.acf[static_cast<std::size_t>(h)] - rho_d_true[static_cast<std::size_t>(h)]));
            } catch (const Error&) {
                row.clear();
            }
            slots[r] = std::move(row);
        });

        std::vector<std::vector<double>> cols(2 * static_cast<std::size_t>(p));
        for (const auto& row : slots) {
            if (row.empty()) {
                ++report.failed_reps;
                continue;
            }
            for (std::size_t j = 0; j < cols.size(); ++j) cols[j].push_back(row[j]);
        }
        if (cols[0].size() < 2) throw DegenerateSeriesError("too few successful replications to summarize");

        auto& csd = report.coeff_scaled_sd[iN];
        auto& cbias = report.coeff_scaled_bias[iN];
        auto& rsd = report.rho_scaled_sd[iN];
        auto& rbias = report.rho_scaled_bias[iN];
        for (int j = 0; j < p; ++j) {
            csd.push_back(stats::sd(cols[static_cast<std::size_t>(j)]));
            cbias.push_back(stats::mean(cols[static_cast<std::size_t>(j)]));
            rsd.push_back(stats::sd(cols[static_cast<std::size_t>(p + j)]));
            rbias.push_back(stats::mean(cols[static_cast<std::size_t>(p + j)]));
        }

        // Shape diagnostics at the largest N.
        if (n == *std::max_element(options.lengths.begin(), options.lengths.end()) && report.skew_z.empty()) {
            const auto m = static_cast<double>(cols[0].size());
            for (int j = 0; j < p; ++j) {
                const double g1 = stats::skewness(cols[static_cast<std::size_t>(j)]);
                const double g2 = stats::excess_kurtosis(cols[static_cast<std::size_t>(j)]);
                report.skew_z.push_back(g1 / std::sqrt(6.0 / m));
                report.kurt_z.push_back(g2 / std::sqrt(24.0 / m));
                report.skew_p.push_back(stats::normal_two_sided_p(report.skew_z.back()));
                report.kurt_p.push_back(stats::normal_two_sided_p(report.kurt_z.back()));
            }
        }
    }

    auto ratios = [nN](const std::vector<std::vector<double>>& sds, int count) {
        std::vector<double> out;
        for (int j = 0; j < count; ++j) {
            double lo = sds[0][static_cast<std::size_t>(j)];
            double hi = lo;
            for (std::size_t iN = 1; iN < nN; ++iN) {
                lo = std::min(lo, sds[iN][static_cast<std::size_t>(j)]);
                hi = std::max(hi, sds[iN][static_cast<std::size_t>(j)]);
            }
            out.push_back(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
        }
        return out;
    };
    report.coeff_sd_ratio = ratios(report.coeff_scaled_sd, p);
    report.rho_sd_ratio = ratios(report.rho_scaled_sd, p);

    report.sd_ratio_pass = true;
    for (double r : report.coeff_sd_ratio)
        if (!(r >= options.sd_ratio_lo && r <= options.sd_ratio_hi)) report.sd_ratio_pass = false;
    for (double r : report.rho_sd_ratio)
        if (!(r >= options.sd_ratio_lo && r <= options.sd_ratio_hi)) report.sd_ratio_pass = false;
    report.normality_pass = true;
    for (double z : report.skew_z)
        if (!(std::abs(z) < options.z_max)) report.normality_pass = false;
    for (double z : report.kurt_z)
        if (!(std::abs(z) < options.z_max)) report.normality_pass = false;
    return report;
}

}  // namespace diffar
