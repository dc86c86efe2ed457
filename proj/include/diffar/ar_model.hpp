#pragma once

#include <complex>
#include <span>
#include <vector>

namespace diffar {

// Causal AR(p) model: X_t = sum_{j=1}^p coeffs[j-1] * X_{t-j} + e_t with
// innovation variance noise_var > 0.
struct ARModel {
    int order = 0;
    std::vector<double> coeffs;
    double noise_var = 1.0;
};

// True iff the AR polynomial 1 - phi_1 z - ... - phi_p z^p has all roots
// strictly outside the unit circle, with margin 1e-10 on the inverse-root
// moduli (companion-matrix eigenvalues). Throws InvalidInputError on empty or
// non-finite coefficients.
[[nodiscard]] bool check_causal(std::span<const double> coeffs);

// Moduli of the characteristic roots (reciprocals of the companion
// eigenvalues), sorted ascending; the smallest is the binding one for
// causality. Trailing zero coefficients are ignored; an all-zero vector has
// no roots.
[[nodiscard]] std::vector<double> char_root_moduli(std::span<const double> coeffs);

// Throws InvalidModelError unless order >= 1, coeffs.size() == order,
// noise_var is finite and > 0, and the model is causal (the message reports
// the offending root modulus).
void validate_model(const ARModel& model);

// Maps reflection coefficients k_1..k_p, each in (-1, 1), to AR coefficients
// via the Levinson-Durbin recursion. Every output is causal, and every causal
// AR(p) arises this way, so sampling k uniformly sweeps the causal region.
[[nodiscard]] std::vector<double> ar_from_reflection(std::span<const double> reflection);

// AR coefficients from the inverse characteristic roots r_1..r_p (the
// companion eigenvalues), by exact expansion of prod_j (1 - r_j z); the
// coefficient of z^k is negated to give phi_k. Roots must come in conjugate
// pairs: any imaginary residue above 1e-12 throws InvalidInputError.
[[nodiscard]] std::vector<double> coeffs_from_inverse_roots(std::span<const std::complex<double>> roots);

// Exact second-order structure of a causal AR model up to a maximum lag.
struct TheoreticalMoments {
    std::vector<double> acvf;  // gamma(0..maxlag)
    std::vector<double> acf;   // rho(0..maxlag)

    [[nodiscard]] int maxlag() const noexcept { return static_cast<int>(acvf.size()) - 1; }
};

// gamma(0..maxlag) by solving the (p+1)x(p+1) Yule-Walker system for
// gamma(0..p) and extending with gamma(h) = sum_j phi_j gamma(h-j).
[[nodiscard]] TheoreticalMoments theoretical_acvf(const ARModel& model, int maxlag);

// gamma_d(h) = 2*gamma(h) - gamma(h+1) - gamma(h-1) of the differenced
// process; requires moments up to lag h+1.
[[nodiscard]] double theoretical_diff_acvf(const TheoreticalMoments& moments, int h);

// rho_d(0..maxlag) of the differenced process, computed exactly.
[[nodiscard]] std::vector<double> theoretical_diff_acf(const ARModel& model, int maxlag);

}  // namespace diffar
