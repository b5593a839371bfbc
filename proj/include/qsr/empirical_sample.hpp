#ifndef QSR_EMPIRICAL_SAMPLE_HPP
#define QSR_EMPIRICAL_SAMPLE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace qsr {

/// Ascending multiset of finite, non-negative loss amounts.
///
/// All risk measures, severity fits and reinsurance transforms operate on
/// this type. The sort is established once at construction; instances are
/// immutable afterwards.
class EmpiricalSample {
public:
    EmpiricalSample() = default;

    /// Sorts `values`. Throws ValidationError on NaN, infinity or negatives.
    explicit EmpiricalSample(std::vector<double> values);

    /// Adopts `values` that the caller guarantees are already ascending.
    /// Still validated; throws ValidationError if the order is violated.
    static EmpiricalSample from_sorted(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double min() const { return values_.front(); }
    double max() const { return values_.back(); }

    /// Compensated (Neumaier) sum in ascending order.
    double total() const noexcept;
    double mean() const;
    /// Unbiased (n - 1) sample variance, two-pass. Zero for n < 2.
    double variance() const;
    /// Standardized third central moment (population form). Zero when the
    /// sample has no spread.
    double skewness() const;

    bool operator==(const EmpiricalSample&) const = default;

private:
    struct Sorted {};
    EmpiricalSample(Sorted, std::vector<double> values) : values_(std::move(values)) {}

    std::vector<double> values_;
};

/// Neumaier-compensated sum of `xs` in the given order.
double compensated_sum(std::span<const double> xs) noexcept;

}  // namespace qsr

#endif  // QSR_EMPIRICAL_SAMPLE_HPP
