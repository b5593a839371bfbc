#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qsr/bundling_pricing.hpp"
#include "qsr/error.hpp"

namespace qsr {
namespace {

OfferScenario offer(double bundle, std::optional<double> value_add_ref = std::nullopt) {
    OfferScenario s;
    s.component_prices = {300, 500, 200};
    s.bundle_price = bundle;
    s.value_add_present = value_add_ref.has_value();
    s.value_add_reference_price = value_add_ref.value_or(0.0);
    return s;
}

TEST(EvaluateOffer, SumOfPartsIsViable) {
    const auto g = evaluate_offer(offer(1000));
    EXPECT_EQ(g.max_recommended_bundle_price, 1000);
    EXPECT_EQ(g.recommendation, Recommendation::BundleViable);
    EXPECT_FALSE(g.rationale.empty());
}

TEST(EvaluateOffer, ZeroReferencePriceLosesToUnbundled) {
    for (double bundle : {1000.01, 1001.0, 5000.0}) {
        const auto g = evaluate_offer(offer(bundle, 0.0));
        EXPECT_EQ(g.recommendation, Recommendation::PreferUnbundledLikely) << bundle;
        EXPECT_EQ(g.max_recommended_bundle_price, 1000);
    }
}

TEST(EvaluateOffer, PositiveReferencePriceNeedsCommunication) {
    const auto g = evaluate_offer(offer(1100, 150.0));
    EXPECT_EQ(g.max_recommended_bundle_price, 1150);
    EXPECT_EQ(g.recommendation, Recommendation::BundleViableIfValueCommunicated);

    EXPECT_EQ(evaluate_offer(offer(1150, 150.0)).recommendation,
              Recommendation::BundleViableIfValueCommunicated);
    EXPECT_EQ(evaluate_offer(offer(1150.5, 150.0)).recommendation,
              Recommendation::PreferUnbundledLikely);
    EXPECT_EQ(evaluate_offer(offer(900, 150.0)).recommendation, Recommendation::BundleViable);
}

TEST(EvaluateOffer, ScenarioOneBoundary) {
    EXPECT_EQ(evaluate_offer(offer(1000)).recommendation, Recommendation::BundleViable);
    for (double eps : {1e-9, 1e-3, 1.0}) {
        EXPECT_EQ(evaluate_offer(offer(1000 + eps)).recommendation,
                  Recommendation::PreferUnbundledLikely);
    }
    EXPECT_EQ(evaluate_offer(offer(std::nextafter(1000.0, 2000.0))).recommendation,
              Recommendation::PreferUnbundledLikely);
}

TEST(EvaluateOffer, RejectsInvalidPrices) {
    auto s = offer(1000);
    s.component_prices[1] = -1;
    EXPECT_THROW(evaluate_offer(s), ValidationError);
    s = offer(NAN);
    EXPECT_THROW(evaluate_offer(s), ValidationError);
    s = offer(1000, -5.0);
    EXPECT_THROW(evaluate_offer(s), ValidationError);
}

TEST(EvaluateOffer, DeterministicAndTotal) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> price(0, 2000);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 2000; ++i) {
        OfferScenario s;
        s.component_prices = {price(rng), price(rng), price(rng)};
        s.bundle_price = price(rng) * 3;
        s.value_add_present = coin(rng);
        s.value_add_reference_price = coin(rng) ? 0.0 : price(rng);
        const auto a = evaluate_offer(s);
        const auto b = evaluate_offer(s);
        EXPECT_EQ(a.recommendation, b.recommendation);
        EXPECT_EQ(a.max_recommended_bundle_price, b.max_recommended_bundle_price);
        EXPECT_EQ(a.rationale, b.rationale);
        EXPECT_GE(a.max_recommended_bundle_price, 0.0);
    }
}

TEST(EvaluateOffer, RaisingReferencePriceNeverDowngrades) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> price(0, 1000);
    for (int i = 0; i < 500; ++i) {
        OfferScenario s;
        s.component_prices = {price(rng), price(rng), price(rng)};
        s.bundle_price = price(rng) * 4;
        s.value_add_present = true;
        auto last = Recommendation::PreferUnbundledLikely;
        double last_max = 0.0;
        for (double ref = 0.0; ref <= 3000.0; ref += 37.5) {
            s.value_add_reference_price = ref;
            const auto g = evaluate_offer(s);
            EXPECT_GE(g.recommendation, last) << i << ' ' << ref;
            EXPECT_GE(g.max_recommended_bundle_price, last_max);
            last = g.recommendation;
            last_max = g.max_recommended_bundle_price;
        }
    }
}

TEST(Recommendation, Names) {
    EXPECT_EQ(recommendation_name(Recommendation::BundleViable), "BundleViable");
    EXPECT_EQ(recommendation_name(Recommendation::PreferUnbundledLikely), "PreferUnbundledLikely");
    EXPECT_EQ(recommendation_name(Recommendation::BundleViableIfValueCommunicated),
              "BundleViableIfValueCommunicated");
}

}  // namespace
}  // namespace qsr
