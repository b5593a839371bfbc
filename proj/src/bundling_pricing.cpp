#include "qsr/bundling_pricing.hpp"

#include <cmath>

#include "qsr/csv.hpp"
#include "qsr/error.hpp"

namespace qsr {

std::string_view recommendation_name(Recommendation r) noexcept {
    switch (r) {
        case Recommendation::PreferUnbundledLikely: return "PreferUnbundledLikely";
        case Recommendation::BundleViableIfValueCommunicated:
            return "BundleViableIfValueCommunicated";
        case Recommendation::BundleViable: return "BundleViable";
    }
    return "?";
}

void validate(const OfferScenario& s) {
    auto check = [](double price, const char* what) {
        if (!std::isfinite(price) || price < 0.0) {
            throw ValidationError(std::string(what) + " must be a finite price >= 0");
        }
    };
    for (double p : s.component_prices) check(p, "component price");
    check(s.bundle_price, "bundle price");
    check(s.value_add_reference_price, "value-add reference price");
}

PricingGuidance evaluate_offer(const OfferScenario& s) {
    validate(s);
    const double parts = s.component_prices[0] + s.component_prices[1] + s.component_prices[2];
    const double value_ref = s.value_add_present ? s.value_add_reference_price : 0.0;
    const std::string parts_text = csv::format_number(parts);

    PricingGuidance g;
    if (s.bundle_price <= parts) {
        g.max_recommended_bundle_price = parts + value_ref;
        g.recommendation = Recommendation::BundleViable;
        g.rationale = "bundle price does not exceed the sum of component prices (" + parts_text + ")";
        return g;
    }
    if (!s.value_add_present) {
        g.max_recommended_bundle_price = parts;
        g.recommendation = Recommendation::PreferUnbundledLikely;
        g.rationale = "bundle adds nothing to its components but costs more than their sum (" +
                      parts_text + ")";
        return g;
    }
    if (value_ref == 0.0) {
        g.max_recommended_bundle_price = parts;
        g.recommendation = Recommendation::PreferUnbundledLikely;
        g.rationale =
            "the new component has a zero reference price, so a premium over the component sum (" +
            parts_text + ") is unlikely to be paid";
        return g;
    }
    g.max_recommended_bundle_price = parts + value_ref;
    if (s.bundle_price <= g.max_recommended_bundle_price) {
        g.recommendation = Recommendation::BundleViableIfValueCommunicated;
        g.rationale = "premium over the component sum is covered by the new component's reference "
                      "price, provided its value is communicated clearly";
    } else {
        g.recommendation = Recommendation::PreferUnbundledLikely;
        g.rationale = "bundle price exceeds the component sum plus the new component's reference "
                      "price (" + csv::format_number(g.max_recommended_bundle_price) + ")";
    }
    return g;
}

}  // namespace qsr
