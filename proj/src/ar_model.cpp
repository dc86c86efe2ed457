#include "diffar/ar_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "diffar/errors.hpp"

namespace diffar {

namespace {

constexpr double kCausalMargin = 1e-10;

// Effective order after dropping trailing zero coefficients.
std::size_t effective_order(std::span<const double> coeffs) {
    std::size_t p = coeffs.size();
    while (p > 0 && coeffs[p - 1] == 0.0) --p;
    return p;
}

void require_finite(std::span<const double> coeffs) {
    if (coeffs.empty()) throw InvalidInputError("AR coefficient vector is empty");
    for (double c : coeffs) {
        if (!std::isfinite(c)) throw InvalidInputError("AR coefficients must be finite");
    }
}

// Eigenvalues of the companion matrix of z^p - phi_1 z^{p-1} - ... - phi_p,
// which are the reciprocals of the characteristic roots.
Eigen::VectorXcd companion_eigenvalues(std::span<const double> coeffs, std::size_t p) {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) comp(0, static_cast<Eigen::Index>(j)) = coeffs[j];
    for (std::size_t i = 1; i < p; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    return comp.eigenvalues();
}

}  // namespace

bool check_causal(std::span<const double> coeffs) {
    require_finite(coeffs);
    const std::size_t p = effective_order(coeffs);
    if (p == 0) return true;
    const Eigen::VectorXcd ev = companion_eigenvalues(coeffs, p);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) >= 1.0 - kCausalMargin) return false;
    }
    return true;
}

std::vector<double> char_root_moduli(std::span<const double> coeffs) {
    require_finite(coeffs);
    const std::size_t p = effective_order(coeffs);
    std::vector<double> moduli;
    if (p == 0) return moduli;
    const Eigen::VectorXcd ev = companion_eigenvalues(coeffs, p);
    moduli.reserve(p);
    for (Eigen::Index i = 0; i < ev.size(); ++i) moduli.push_back(1.0 / std::abs(ev(i)));
    std::sort(moduli.begin(), moduli.end());
    return moduli;
}

void validate_model(const ARModel& model) {
    if (model.order < 1) throw InvalidModelError("AR order must be >= 1");
    if (model.coeffs.size() != static_cast<std::size_t>(model.order))
        throw InvalidModelError("AR order " + std::to_string(model.order) + " does not match " +
                                std::to_string(model.coeffs.size()) + " coefficients");
    if (!std::isfinite(model.noise_var) || model.noise_var <= 0.0)
        throw InvalidModelError("innovation variance must be finite and > 0");
    try {
        if (!check_causal(model.coeffs)) {
            const auto moduli = char_root_moduli(model.coeffs);
            throw InvalidModelError("AR model is not causal: smallest root modulus " +
                                    std::to_string(moduli.empty() ? 0.0 : moduli.front()) +
                                    " is not > 1");
        }
    } catch (const InvalidInputError& e) {
        throw InvalidModelError(e.what());
    }
}

std::vector<double> ar_from_reflection(std::span<const double> reflection) {
    require_finite(reflection);
    for (double k : reflection) {
        if (!(std::abs(k) < 1.0)) throw InvalidInputError("reflection coefficients must lie in (-1, 1)");
    }
    std::vector<double> a(reflection.size(), 0.0);
    for (std::size_t m = 0; m < reflection.size(); ++m) {
        const double k = reflection[m];
        std::vector<double> prev(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(m));
        for (std::size_t j = 0; j < m; ++j) a[j] = prev[j] - k * prev[m - 1 - j];
        a[m] = k;
    }
    return a;
}

std::vector<double> coeffs_from_inverse_roots(std::span<const std::complex<double>> roots) {
    if (roots.empty()) throw InvalidInputError("need at least one inverse root");
    // poly holds the coefficients of prod (1 - r_j z), degree grows by one
    // per factor.
    std::vector<std::complex<double>> poly{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= r * poly[i];
        }
        poly = std::move(next);
    }
    std::vector<double> phi(roots.size());
    for (std::size_t k = 1; k < poly.size(); ++k) {
        if (std::abs(poly[k].imag()) > 1e-12)
            throw InvalidInputError("inverse roots must come in conjugate pairs (imaginary residue " +
                                    std::to_string(poly[k].imag()) + ")");
        phi[k - 1] = -poly[k].real();
    }
    return phi;
}

TheoreticalMoments theoretical_acvf(const ARModel& model, int maxlag) {
    validate_model(model);
    if (maxlag < 0) throw InvalidInputError("maxlag must be >= 0");
    const int p = model.order;

    // Unknowns gamma(0..p): equation k is gamma(k) - sum_j phi_j gamma(|k-j|)
    // = sigma2 * [k == 0].
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p + 1, p + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p + 1);
    for (int k = 0; k <= p; ++k) {
        A(k, k) += 1.0;
        for (int j = 1; j <= p; ++j) A(k, std::abs(k - j)) -= model.coeffs[static_cast<std::size_t>(j - 1)];
    }
    b(0) = model.noise_var;
    const Eigen::VectorXd head = Eigen::FullPivLU<Eigen::MatrixXd>(A).solve(b);

    TheoreticalMoments out;
    out.acvf.resize(static_cast<std::size_t>(maxlag) + 1);
    for (int h = 0; h <= std::min(maxlag, p); ++h) out.acvf[static_cast<std::size_t>(h)] = head(h);
    for (int h = p + 1; h <= maxlag; ++h) {
        double g = 0.0;
        for (int j = 1; j <= p; ++j)
            g += model.coeffs[static_cast<std::size_t>(j - 1)] * out.acvf[static_cast<std::size_t>(h - j)];
        out.acvf[static_cast<std::size_t>(h)] = g;
    }
    out.acf.resize(out.acvf.size());
    for (std::size_t h = 0; h < out.acvf.size(); ++h) out.acf[h] = out.acvf[h] / out.acvf[0];
    return out;
}

double theoretical_diff_acvf(const TheoreticalMoments& moments, int h) {
    if (h < 0) throw InvalidInputError("lag must be >= 0");
    if (moments.maxlag() < h + 1)
        throw InvalidInputError("need raw moments up to lag " + std::to_string(h + 1) + ", have up to " +
                                std::to_string(moments.maxlag()));
    const auto& g = moments.acvf;
    const double prev = g[static_cast<std::size_t>(std::abs(h - 1))];
    return 2.0 * g[static_cast<std::size_t>(h)] - g[static_cast<std::size_t>(h + 1)] - prev;
}

std::vector<double> theoretical_diff_acf(const ARModel& model, int maxlag) {
    if (maxlag < 0) throw InvalidInputError("maxlag must be >= 0");
    const TheoreticalMoments moments = theoretical_acvf(model, maxlag + 1);
    std::vector<double> rho(static_cast<std::size_t>(maxlag) + 1);
    const double g0 = theoretical_diff_acvf(moments, 0);
    for (int h = 0; h <= maxlag; ++h) rho[static_cast<std::size_t>(h)] = theoretical_diff_acvf(moments, h) / g0;
    return rho;
}

}  // namespace diffar
