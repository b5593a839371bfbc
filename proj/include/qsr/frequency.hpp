#ifndef QSR_FREQUENCY_HPP
#define QSR_FREQUENCY_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qsr/core_model.hpp"

namespace qsr {

/// Negative binomial in mean parameterization:
///   P(k) = C(k + r - 1, k) (r / (r + mu))^r (mu / (r + mu))^k.
struct NegBinParams {
    double r;
    double mu;
};

void validate(const NegBinParams& p);

double negbin_log_pmf(std::uint64_t k, const NegBinParams& p);
double negbin_pmf(std::uint64_t k, const NegBinParams& p);

/// Log-likelihood of i.i.d. counts, including the log(k!) terms.
double negbin_log_likelihood(std::span<const std::uint64_t> counts, const NegBinParams& p);

/// Analytic gradient {d/dr, d/dmu} of negbin_log_likelihood.
std::array<double, 2> negbin_gradient(std::span<const std::uint64_t> counts,
                                      const NegBinParams& p);

/// d/dr of the log-likelihood with mu profiled out at the sample mean.
double negbin_profile_score(std::span<const std::uint64_t> counts, double r);

/// Maximum-likelihood fit. mu is the sample mean; r solves the profile
/// score equation by Newton iteration in log r from the method-of-moments
/// start. Throws ValidationError for fewer than two counts, all-equal
/// counts, or a sample whose variance does not exceed its mean (no finite
/// r; the Poisson limit applies). Throws ConvergenceError after 100
/// iterations without |delta log r| < 1e-10.
NegBinParams fit_negbin(std::span<const std::uint64_t> counts);

/// The three response variables of the NCD table.
enum class ResponseKind { IndividualLoss = 0, SumByType = 1, SumByEvent = 2 };

inline constexpr std::array<ResponseKind, 3> kResponseKinds = {
    ResponseKind::IndividualLoss, ResponseKind::SumByType, ResponseKind::SumByEvent};

/// CLI token: indl, type, event.
std::string_view response_kind_code(ResponseKind k) noexcept;
std::optional<ResponseKind> parse_response_kind(std::string_view code) noexcept;
/// Table row label: "Indl. Loss", "Sum Losses-Type", "Sum Losses-Sp. Event".
std::string_view response_kind_label(ResponseKind k) noexcept;

/// One regression observation: an integer response at an NCD level.
struct NcdObservation {
    int ncd_level;
    std::uint64_t response;
};

/// Builds the regression observations for `kind`. Every policyholder
/// contributes, claim-free ones with a zero response:
///   IndividualLoss - mean of the policyholder's individual (event, type)
///                    amounts;
///   SumByType      - one observation per (policyholder, loss type): the
///                    total of that type over the policyholder's events;
///   SumByEvent     - mean of the policyholder's event totals.
/// Amounts are rounded to the nearest whole currency unit.
std::vector<NcdObservation> ncd_observations(const Portfolio& portfolio, ResponseKind kind);

/// Log-link negative binomial regression on NCD / 10.
struct NcdRegressionModel {
    double intercept = 0.0;
    double slope = 0.0;  // per NCD decade
    double r = 1.0;
    ResponseKind kind = ResponseKind::IndividualLoss;
    std::size_t n_obs = 0;
    int iterations = 0;
    double loglik = 0.0;

    double predicted_mean(int ncd_level) const;
};

/// Log-likelihood of the regression, and its gradient with respect to
/// (intercept, slope, log r).
double ncd_log_likelihood(std::span<const NcdObservation> obs, double intercept, double slope,
                          double r);
std::array<double, 3> ncd_gradient(std::span<const NcdObservation> obs, double intercept,
                                   double slope, double r);

/// Damped Newton ascent on (intercept, slope, log r), started from the
/// overall mean with zero slope and the moment estimate of r. Throws
/// ValidationError when fewer than two NCD levels are present or the
/// response is all zero; ConvergenceError after 100 iterations.
NcdRegressionModel fit_ncd_regression(std::span<const NcdObservation> obs, ResponseKind kind);
NcdRegressionModel fit_ncd_regression(const Portfolio& portfolio, ResponseKind kind);

/// Predicted means by kind (rows) and NCD level 0..50 (columns).
struct PredictedMeanGrid {
    std::array<std::array<double, 6>, 3> rows{};

    const std::array<double, 6>& row(ResponseKind k) const {
        return rows[static_cast<std::size_t>(k)];
    }
};

/// `models` must hold one model per response kind, in any order.
PredictedMeanGrid predicted_mean_grid(std::span<const NcdRegressionModel> models);

/// Per-level sample means of the observations, for side-by-side comparison
/// with the model grid. Levels with no observations are nullopt.
std::array<std::optional<double>, 6> ncd_sample_means(std::span<const NcdObservation> obs);

/// Successive differences mean(d + 10) - mean(d) for d = 0..40, per kind.
std::array<std::array<double, 5>, 3> mean_change_series(const PredictedMeanGrid& grid);

}  // namespace qsr

#endif  // QSR_FREQUENCY_HPP
