#include "diffar/acf.hpp"

#include <string>

#include "diffar/errors.hpp"

namespace diffar {

AcfEstimate sample_acf(std::span<const double> values, int maxlag) {
    if (maxlag < 0) throw InvalidInputError("maxlag must be >= 0");
    const std::size_t n = values.size();
    if (n < static_cast<std::size_t>(maxlag) + 2)
        throw InvalidInputError("need at least " + std::to_string(maxlag + 2) + " values for lag " +
                                std::to_string(maxlag) + ", have " + std::to_string(n));

    double sum = 0.0;
    for (double v : values) sum += v;
    const double m = sum / static_cast<double>(n);

    AcfEstimate est;
    est.n = n;
    est.acvf.resize(static_cast<std::size_t>(maxlag) + 1);
    for (int h = 0; h <= maxlag; ++h) {
        double s = 0.0;
        for (std::size_t t = 0; t + static_cast<std::size_t>(h) < n; ++t)
            s += (values[t] - m) * (values[t + static_cast<std::size_t>(h)] - m);
        est.acvf[static_cast<std::size_t>(h)] = s / static_cast<double>(n);
    }
    // Scale-aware zero test: a constant input leaves only rounding residue of
    // order (mean * eps)^2 in acvf[0].
    if (est.acvf[0] <= 1e-28 * (1.0 + m * m))
        throw DegenerateSeriesError("zero variance: series is constant at working precision");
    est.acf.resize(est.acvf.size());
    for (std::size_t h = 0; h < est.acvf.size(); ++h) est.acf[h] = est.acvf[h] / est.acvf[0];
    return est;
}

AcfEstimate sample_diff_acf(const DiffSeries& diffs, int maxlag) { return sample_acf(diffs.values, maxlag); }

}  // namespace diffar
