#include "diffar/estimators.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "diffar/ar_model.hpp"
#include "diffar/errors.hpp"
#include "diffar/rng.hpp"
#include "diffar/simulate.hpp"
#include "diffar/stats.hpp"
#include "parallel.hpp"

namespace diffar {

namespace {

constexpr double kMaxCondition = 1e12;

struct Solved {
    Eigen::VectorXd x;
    double condition;
};

// Solve with full pivoting plus one iterative-refinement pass; reject systems
// whose SVD condition number exceeds kMaxCondition.
Solved solve_checked(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const char* context) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    const double condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(condition < kMaxCondition))
        throw NumericalDegeneracyError(std::string(context) + ": moment system condition number " +
                                       std::to_string(condition) + " exceeds 1e12 (smallest singular value " +
                                       std::to_string(smin) + ")");
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd x = lu.solve(b);
    x += lu.solve(b - A * x);
    return {std::move(x), condition};
}

// Classical Yule-Walker core shared by the raw, segmented and rolling
// variants.
struct YwFit {
    std::vector<double> coeffs;
    double noise_var;
    double condition;
};

YwFit classical_core(std::span<const double> values, int p, const char* context) {
    const AcfEstimate a = sample_acf(values, p);
    Eigen::MatrixXd R(p, p);
    Eigen::VectorXd r(p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) R(i, j) = a.acf[static_cast<std::size_t>(std::abs(i - j))];
        r(i) = a.acf[static_cast<std::size_t>(i) + 1];
    }
    Solved sol = solve_checked(R, r, context);
    YwFit fit;
    fit.coeffs.assign(sol.x.data(), sol.x.data() + p);
    double acc = 0.0;
    for (int j = 1; j <= p; ++j) acc += fit.coeffs[static_cast<std::size_t>(j - 1)] * a.acf[static_cast<std::size_t>(j)];
    fit.noise_var = a.acvf[0] * (1.0 - acc);
    fit.condition = sol.condition;
    return fit;
}

void finish_report(EstimationReport& report) {
    report.causal_fit = check_causal(report.coeffs);
    report.noise_var_valid =
        report.noise_var.has_value() && std::isfinite(*report.noise_var) && *report.noise_var > 0.0;
}

void require_order(int p) {
    if (p < 1) throw InvalidInputError("AR order must be >= 1");
}

}  // namespace

std::string_view method_name(Method m) {
    switch (m) {
        case Method::DiffYW: return "diff";
        case Method::AR1seg: return "ar1seg";
        case Method::RollingWindow: return "rolling";
        case Method::ClassicalYW: return "classical";
        case Method::SegmentedYW: return "segmented";
    }
    return "unknown";
}

DiffYwSystem build_diff_yw_system(std::span<const double> rho_d, int p) {
    require_order(p);
    if (rho_d.size() < static_cast<std::size_t>(p) + 1)
        throw InvalidInputError("need rho_d at lags 0.." + std::to_string(p) + ", have " +
                                std::to_string(rho_d.size()) + " values");
    if (std::abs(rho_d[0] - 1.0) > 1e-9)
        throw InvalidInputError("rho_d(0) must be 1 (a correlation), got " + std::to_string(rho_d[0]));

    DiffYwSystem sys;
    sys.M = Eigen::MatrixXd::Zero(p, p);
    sys.rhs = Eigen::VectorXd::Zero(p);

    // Telescoped lag-1 equation (0-based column c is 1-based coefficient
    // index j = c + 1).
    sys.M(0, 0) = 0.5;
    if (p >= 2) sys.M(0, 1) = -0.5;
    double partial = 0.0;  // sum_{l=1}^{c-1} rho_d(l)
    for (int c = 2; c < p; ++c) {
        partial += rho_d[static_cast<std::size_t>(c) - 1];
        sys.M(0, c) = -(0.5 + partial);
    }
    sys.rhs(0) = rho_d[1] + 0.5;

    // Shifted recursions for lags 2..p.
    for (int r = 1; r < p; ++r) {
        sys.M(r, 0) = rho_d[static_cast<std::size_t>(r)];
        for (int c = 1; c < p; ++c) sys.M(r, c) = rho_d[static_cast<std::size_t>(std::abs(r - c))];
        sys.rhs(r) = rho_d[static_cast<std::size_t>(r) + 1];
    }
    return sys;
}

EstimationReport diff_yw_from_moments(std::span<const double> acvf_d, int p) {
    require_order(p);
    if (acvf_d.size() < static_cast<std::size_t>(p) + 1)
        throw InvalidInputError("need gamma_d at lags 0.." + std::to_string(p) + ", have " +
                                std::to_string(acvf_d.size()) + " values");
    for (double g : acvf_d) {
        if (!std::isfinite(g)) throw InvalidInputError("autocovariances must be finite");
    }
    if (!(acvf_d[0] > 0.0)) throw DegenerateSeriesError("gamma_d(0) must be > 0");

    std::vector<double> rho(static_cast<std::size_t>(p) + 1);
    for (std::size_t h = 0; h <= static_cast<std::size_t>(p); ++h) rho[h] = acvf_d[h] / acvf_d[0];
    const DiffYwSystem sys = build_diff_yw_system(rho, p);
    Solved sol = solve_checked(sys.M, sys.rhs, "diff");

    EstimationReport report;
    report.method = Method::DiffYW;
    report.order = p;
    report.coeffs.assign(sol.x.data(), sol.x.data() + p);
    report.condition_number = sol.condition;
    double acc = 0.0;
    for (int j = 1; j <= p; ++j)
        acc += report.coeffs[static_cast<std::size_t>(j - 1)] * acvf_d[static_cast<std::size_t>(j - 1)];
    report.noise_var = acc - acvf_d[1];
    finish_report(report);
    return report;
}

EstimationReport diff_yule_walker(const Series& s, int p) {
    require_order(p);
    if (s.values.size() < static_cast<std::size_t>(p) + 3)
        throw InvalidInputError("need at least p + 3 = " + std::to_string(p + 3) + " observations, have " +
                                std::to_string(s.values.size()));
    const DiffSeries d = difference(s);
    const AcfEstimate a = sample_diff_acf(d, p);
    return diff_yw_from_moments(a.acvf, p);
}

EstimationReport classical_yule_walker(const Series& s, int p) {
    require_order(p);
    if (s.values.size() < static_cast<std::size_t>(p) + 2)
        throw InvalidInputError("need at least p + 2 = " + std::to_string(p + 2) + " observations, have " +
                                std::to_string(s.values.size()));
    const YwFit fit = classical_core(s.values, p, "classical");
    EstimationReport report;
    report.method = Method::ClassicalYW;
    report.order = p;
    report.coeffs = fit.coeffs;
    report.noise_var = fit.noise_var;
    report.condition_number = fit.condition;
    finish_report(report);
    return report;
}

EstimationReport segmented_yule_walker(const Series& s, int p, const ChangepointConfig& config) {
    validate_config(config, s.values.size());
    return segmented_yule_walker(s, p, config.times);
}

EstimationReport segmented_yule_walker(const Series& s, int p, std::span<const int> times) {
    require_order(p);
    const std::size_t n = s.values.size();
    if (n < static_cast<std::size_t>(p) + 2)
        throw InvalidInputError("need at least p + 2 = " + std::to_string(p + 2) + " observations, have " +
                                std::to_string(n));
    int prev = 0;
    for (int t : times) {
        if (t <= prev || t < 2 || static_cast<std::size_t>(t) > n - 1)
            throw InvalidConfigError("segment boundaries must be strictly increasing in {2.." + std::to_string(n - 1) +
                                     "} so every segment is non-empty");
        prev = t;
    }

    // Subtract each segment's own mean; segment i covers 1-based times
    // (tau_{i-1}, tau_i].
    std::vector<double> centered(s.values.begin(), s.values.end());
    std::size_t start = 0;
    auto center = [&centered](std::size_t lo, std::size_t hi) {
        double m = 0.0;
        for (std::size_t i = lo; i < hi; ++i) m += centered[i];
        m /= static_cast<double>(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) centered[i] -= m;
    };
    for (int t : times) {
        center(start, static_cast<std::size_t>(t));
        start = static_cast<std::size_t>(t);
    }
    center(start, n);

    const YwFit fit = classical_core(centered, p, "segmented");
    EstimationReport report;
    report.method = Method::SegmentedYW;
    report.order = p;
    report.coeffs = fit.coeffs;
    report.noise_var = fit.noise_var;
    report.condition_number = fit.condition;
    finish_report(report);
    return report;
}

EstimationReport ar1seg_estimate(const Series& s) {
    const std::size_t n = s.values.size();
    if (n < 3) throw InvalidInputError("need at least 3 observations, have " + std::to_string(n));
    std::vector<double> lag1(n - 1);
    std::vector<double> lag2(n - 2);
    for (std::size_t t = 0; t + 1 < n; ++t) lag1[t] = std::abs(s.values[t + 1] - s.values[t]);
    for (std::size_t t = 0; t + 2 < n; ++t) lag2[t] = std::abs(s.values[t + 2] - s.values[t]);
    const double m1 = stats::median(lag1);
    const double m2 = stats::median(lag2);
    if (m1 <= 0.0) throw DegenerateSeriesError("median absolute lag-1 difference is zero");

    EstimationReport report;
    report.method = Method::AR1seg;
    report.order = 1;
    report.coeffs = {(m2 * m2) / (m1 * m1) - 1.0};
    finish_report(report);
    return report;
}

EstimationReport rolling_window_yw(const Series& s, int p, std::size_t window) {
    require_order(p);
    const std::size_t n = s.values.size();
    if (window < static_cast<std::size_t>(p) + 2 || window > n)
        throw InvalidInputError("window must lie in [p + 2, N] = [" + std::to_string(p + 2) + ", " +
                                std::to_string(n) + "], got " + std::to_string(window));

    const std::size_t total = n - window + 1;
    std::vector<std::vector<double>> coeff_samples(static_cast<std::size_t>(p));
    std::vector<double> var_samples;
    std::size_t skipped = 0;
    for (std::size_t start = 0; start < total; ++start) {
        try {
            const YwFit fit = classical_core(std::span<const double>(s.values).subspan(start, window), p, "rolling");
            for (int j = 0; j < p; ++j) coeff_samples[static_cast<std::size_t>(j)].push_back(fit.coeffs[static_cast<std::size_t>(j)]);
            var_samples.push_back(fit.noise_var);
        } catch (const Error&) {
            ++skipped;
        }
    }
    if (2 * skipped > total)
        throw DegenerateSeriesError("rolling fit failed on " + std::to_string(skipped) + " of " +
                                    std::to_string(total) + " windows");

    EstimationReport report;
    report.method = Method::RollingWindow;
    report.order = p;
    report.coeffs.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) report.coeffs[static_cast<std::size_t>(j)] = stats::median(coeff_samples[static_cast<std::size_t>(j)]);
    report.noise_var = stats::median(var_samples);
    report.window_length = window;
    report.windows_total = total;
    report.windows_skipped = skipped;
    finish_report(report);
    return report;
}

std::vector<double> bootstrap_se(const Series& s, int p, std::size_t reps, std::uint64_t seed, unsigned threads) {
    if (reps < 2) throw InvalidInputError("bootstrap needs reps >= 2");
    const EstimationReport fit = diff_yule_walker(s, p);
    if (!fit.causal_fit)
        throw CannotBootstrapError("fitted model is not causal; cannot simulate from it");
    if (!fit.noise_var_valid)
        throw CannotBootstrapError("fitted innovation variance is not positive; cannot simulate from it");

    const ARModel model{p, fit.coeffs, *fit.noise_var};
    const std::size_t n = s.values.size();
    std::vector<std::optional<std::vector<double>>> slots(reps);
    detail::parallel_for(reps, threads, [&](std::size_t r) {
        const Series sim = simulate_ar(model, n, derive_seed(seed, r));
        try {
            slots[r] = diff_yule_walker(sim, p).coeffs;
        } catch (const Error&) {
            slots[r] = std::nullopt;
        }
    });

    std::vector<std::vector<double>> per_coeff(static_cast<std::size_t>(p));
    for (const auto& slot : slots) {
        if (!slot) continue;
        for (int j = 0; j < p; ++j) per_coeff[static_cast<std::size_t>(j)].push_back((*slot)[static_cast<std::size_t>(j)]);
    }
    if (per_coeff[0].size() < 2)
        throw CannotBootstrapError("fewer than 2 bootstrap replications produced a fit");
    std::vector<double> se(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) se[static_cast<std::size_t>(j)] = stats::sd(per_coeff[static_cast<std::size_t>(j)]);
    return se;
}

}  // namespace diffar
