#ifndef QSR_BUNDLING_PRICING_HPP
#define QSR_BUNDLING_PRICING_HPP

#include <array>
#include <string>
#include <string_view>

namespace qsr {

/// A bundled offer set against its separately priced components (Rand).
struct OfferScenario {
    std::array<double, 3> component_prices{};  // indexed by LossType
    double bundle_price = 0.0;
    /// The bundle includes a component that is not sold separately.
    bool value_add_present = false;
    /// What customers expect to pay for that component; only read when
    /// value_add_present.
    double value_add_reference_price = 0.0;
};

/// Ordered from least to most favourable to the bundle.
enum class Recommendation {
    PreferUnbundledLikely = 0,
    BundleViableIfValueCommunicated = 1,
    BundleViable = 2,
};

std::string_view recommendation_name(Recommendation r) noexcept;

struct PricingGuidance {
    double max_recommended_bundle_price = 0.0;
    Recommendation recommendation = Recommendation::PreferUnbundledLikely;
    std::string rationale;
};

/// Throws ValidationError for negative or non-finite prices.
void validate(const OfferScenario& s);

/// Reference-price rule table.
///
/// Without a value-add the bundle may cost at most the sum of its parts.
/// With a value-add whose reference price is positive, the ceiling rises by
/// that reference price, and a bundle priced above the parts is viable only
/// if the new component's value is communicated. A zero reference price
/// leaves the ceiling at the sum of parts: anything above it loses to the
/// unbundled option.
PricingGuidance evaluate_offer(const OfferScenario& s);

}  // namespace qsr

#endif  // QSR_BUNDLING_PRICING_HPP
