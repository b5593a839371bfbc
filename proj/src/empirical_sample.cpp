#include "qsr/empirical_sample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsr/error.hpp"

namespace qsr {

namespace {

void check_values(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!std::isfinite(v) || v < 0.0) {
            throw ValidationError("sample value at index " + std::to_string(i) +
                                  " is not a finite non-negative number");
        }
    }
}

}  // namespace

EmpiricalSample::EmpiricalSample(std::vector<double> values) : values_(std::move(values)) {
    check_values(values_);
    std::sort(values_.begin(), values_.end());
}

EmpiricalSample EmpiricalSample::from_sorted(std::vector<double> values) {
    check_values(values);
    if (!std::is_sorted(values.begin(), values.end())) {
        throw ValidationError("from_sorted: values are not in ascending order");
    }
    return EmpiricalSample(Sorted{}, std::move(values));
}

double compensated_sum(std::span<const double> xs) noexcept {
    double sum = 0.0;
    double carry = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    return sum + carry;
}

double EmpiricalSample::total() const noexcept { return compensated_sum(values_); }

double EmpiricalSample::mean() const {
    if (values_.empty()) {
        throw ValidationError("mean of an empty sample");
    }
    return total() / static_cast<double>(values_.size());
}

double EmpiricalSample::variance() const {
    const std::size_t n = values_.size();
    if (n < 2) {
        return 0.0;
    }
    const double m = mean();
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = values_[i] - m;
        sq[i] = d * d;
    }
    return compensated_sum(sq) / static_cast<double>(n - 1);
}

double EmpiricalSample::skewness() const {
    const std::size_t n = values_.size();
    if (n < 2) {
        return 0.0;
    }
    const double m = mean();
    std::vector<double> d2(n);
    std::vector<double> d3(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = values_[i] - m;
        d2[i] = d * d;
        d3[i] = d2[i] * d;
    }
    const double m2 = compensated_sum(d2) / static_cast<double>(n);
    if (m2 == 0.0) {
        return 0.0;
    }
    const double m3 = compensated_sum(d3) / static_cast<double>(n);
    return m3 / std::pow(m2, 1.5);
}

}  // namespace qsr
