#include "qsr/reinsurance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsr/error.hpp"
#include "qsr/risk.hpp"

namespace qsr {

QuotaShare::QuotaShare(double quota) : quota_(quota) {
    if (!(quota > 0.0 && quota <= 1.0)) {
        throw ValidationError("quota must lie in (0, 1], got " + std::to_string(quota));
    }
}

namespace {

EmpiricalSample scaled(const EmpiricalSample& sample, double factor) {
    std::vector<double> out(sample.values().begin(), sample.values().end());
    for (auto& v : out) v *= factor;
    // Scaling by a non-negative factor keeps ascending order.
    return EmpiricalSample::from_sorted(std::move(out));
}

}  // namespace

EmpiricalSample retained_losses(const EmpiricalSample& sample, QuotaShare q) {
    return scaled(sample, q.quota());
}

EmpiricalSample ceded_losses(const EmpiricalSample& sample, QuotaShare q) {
    return scaled(sample, q.ceded_fraction());
}

Moments retained_moments(double mean, double variance, QuotaShare q) {
    if (!(variance >= 0.0)) throw ValidationError("variance must be >= 0");
    const double s = q.quota();
    return {s * mean, s * s * variance};
}

QuotaSweep quota_sweep(const EmpiricalSample& sample, std::span<const double> quotas) {
    if (quotas.empty()) throw ValidationError("quota_sweep needs at least one quota");
    if (sample.empty()) throw ValidationError("quota_sweep needs a non-empty sample");
    std::vector<QuotaShare> treaties;
    for (double q : quotas) treaties.emplace_back(q);
    std::sort(treaties.begin(), treaties.end(),
              [](QuotaShare a, QuotaShare b) { return a.quota() < b.quota(); });

    const Percentile p95(0.95);
    QuotaSweep sweep;
    for (auto q : treaties) {
        auto kept = retained_losses(sample, q);
        sweep.quotas.push_back(q.quota());
        sweep.summary.push_back({q.quota(), kept.mean(), kept.variance(), var_empirical(kept, p95),
                                 cte_empirical(kept, p95)});
        sweep.retained.push_back(std::move(kept));
    }
    return sweep;
}

}  // namespace qsr
