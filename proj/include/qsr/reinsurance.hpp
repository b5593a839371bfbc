#ifndef QSR_REINSURANCE_HPP
#define QSR_REINSURANCE_HPP

#include <span>
#include <vector>

#include "qsr/empirical_sample.hpp"

namespace qsr {

/// Quota-share treaty, expressed as the fraction of every loss the ceding
/// insurer RETAINS. A quota of 0.25 keeps 25% and cedes 75%; a quota of 1
/// is the book without reinsurance.
class QuotaShare {
public:
    /// Throws ValidationError unless 0 < quota <= 1.
    explicit QuotaShare(double quota);

    double quota() const noexcept { return quota_; }
    double ceded_fraction() const noexcept { return 1.0 - quota_; }

private:
    double quota_;
};

EmpiricalSample retained_losses(const EmpiricalSample& sample, QuotaShare q);
EmpiricalSample ceded_losses(const EmpiricalSample& sample, QuotaShare q);

struct Moments {
    double mean;
    double variance;
};

/// (q * mean, q^2 * variance). Throws ValidationError on negative variance.
Moments retained_moments(double mean, double variance, QuotaShare q);

struct QuotaSummary {
    double quota;
    double mean;
    double variance;
    double var95;
    double cte95;
};

struct QuotaSweep {
    std::vector<double> quotas;               // ascending
    std::vector<EmpiricalSample> retained;    // parallel to quotas
    std::vector<QuotaSummary> summary;        // parallel to quotas
};

/// Retained sample and summary for each quota, ordered by quota ascending.
/// Throws ValidationError for an empty list, a quota outside (0, 1], or an
/// empty sample.
QuotaSweep quota_sweep(const EmpiricalSample& sample, std::span<const double> quotas);

}  // namespace qsr

#endif  // QSR_REINSURANCE_HPP
