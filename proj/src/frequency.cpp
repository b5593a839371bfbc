#include "qsr/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "qsr/error.hpp"

namespace qsr {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kStepTolerance = 1e-10;
// Below this count the digamma difference is summed term by term.
constexpr std::uint64_t kDirectSumLimit = 64;

// psi(k + r) - psi(r)
double digamma_shift(std::uint64_t k, double r) {
    if (k <= kDirectSumLimit) {
        double s = 0.0;
        for (std::uint64_t j = 0; j < k; ++j) s += 1.0 / (r + static_cast<double>(j));
        return s;
    }
    return boost::math::digamma(static_cast<double>(k) + r) - boost::math::digamma(r);
}

// trigamma(k + r) - trigamma(r)
double trigamma_shift(std::uint64_t k, double r) {
    if (k <= kDirectSumLimit) {
        double s = 0.0;
        for (std::uint64_t j = 0; j < k; ++j) {
            const double d = r + static_cast<double>(j);
            s -= 1.0 / (d * d);
        }
        return s;
    }
    return boost::math::trigamma(static_cast<double>(k) + r) - boost::math::trigamma(r);
}

// log Gamma(k + r) - log Gamma(r) - log k!
double log_binom_coef(std::uint64_t k, double r) {
    const double kd = static_cast<double>(k);
    return std::lgamma(kd + r) - std::lgamma(r) - std::lgamma(kd + 1.0);
}

std::map<std::uint64_t, std::uint64_t> histogram(std::span<const std::uint64_t> counts) {
    std::map<std::uint64_t, std::uint64_t> h;
    for (auto k : counts) ++h[k];
    return h;
}

std::string fmt_iterate(std::initializer_list<std::pair<const char*, double>> kv) {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [k, v] : kv) {
        if (!first) os << ", ";
        os << k << "=" << v;
        first = false;
    }
    return os.str();
}

}  // namespace

void validate(const NegBinParams& p) {
    if (!(p.r > 0.0) || !std::isfinite(p.r) || !(p.mu > 0.0) || !std::isfinite(p.mu)) {
        throw ValidationError("negative binomial parameters must be finite and positive");
    }
}

double negbin_log_pmf(std::uint64_t k, const NegBinParams& p) {
    validate(p);
    const double kd = static_cast<double>(k);
    double lp = log_binom_coef(k, p.r) - p.r * std::log1p(p.mu / p.r);
    if (k > 0) lp -= kd * std::log1p(p.r / p.mu);
    return lp;
}

double negbin_pmf(std::uint64_t k, const NegBinParams& p) { return std::exp(negbin_log_pmf(k, p)); }

double negbin_log_likelihood(std::span<const std::uint64_t> counts, const NegBinParams& p) {
    double ll = 0.0;
    for (const auto& [k, c] : histogram(counts)) {
        ll += static_cast<double>(c) * negbin_log_pmf(k, p);
    }
    return ll;
}

std::array<double, 2> negbin_gradient(std::span<const std::uint64_t> counts,
                                      const NegBinParams& p) {
    const double n = static_cast<double>(counts.size());
    double sum_k = 0.0;
    double sum_shift = 0.0;
    for (const auto& [k, c] : histogram(counts)) {
        sum_k += static_cast<double>(c) * static_cast<double>(k);
        sum_shift += static_cast<double>(c) * digamma_shift(k, p.r);
    }
    const double rm = p.r + p.mu;
    const double d_r = sum_shift - n * std::log1p(p.mu / p.r) + (n * p.mu - sum_k) / rm;
    const double d_mu = sum_k / p.mu - (sum_k + n * p.r) / rm;
    return {d_r, d_mu};
}

double negbin_profile_score(std::span<const std::uint64_t> counts, double r) {
    const double n = static_cast<double>(counts.size());
    double sum_k = 0.0;
    double sum_shift = 0.0;
    for (const auto& [k, c] : histogram(counts)) {
        sum_k += static_cast<double>(c) * static_cast<double>(k);
        sum_shift += static_cast<double>(c) * digamma_shift(k, r);
    }
    return sum_shift - n * std::log1p((sum_k / n) / r);
}

NegBinParams fit_negbin(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2) throw ValidationError("fit_negbin needs at least two counts");
    const auto hist = histogram(counts);
    if (hist.size() == 1) {
        throw ValidationError("fit_negbin: degenerate sample, all counts equal (r unidentifiable)");
    }
    const double n = static_cast<double>(counts.size());
    double sum_k = 0.0;
    for (const auto& [k, c] : hist) sum_k += static_cast<double>(c) * static_cast<double>(k);
    const double mean = sum_k / n;
    double ss = 0.0;
    for (const auto& [k, c] : hist) {
        const double d = static_cast<double>(k) - mean;
        ss += static_cast<double>(c) * d * d;
    }
    const double var = ss / n;
    if (!(var > mean)) {
        throw ValidationError(
            "fit_negbin: sample is not overdispersed (variance <= mean); no finite r, "
            "use the Poisson limit");
    }

    auto score_and_slope = [&](double r) {
        double s = 0.0;
        double ds = 0.0;
        for (const auto& [k, c] : hist) {
            s += static_cast<double>(c) * digamma_shift(k, r);
            ds += static_cast<double>(c) * trigamma_shift(k, r);
        }
        s -= n * std::log1p(mean / r);
        ds += n * mean / (r * (r + mean));
        return std::pair{s, ds};
    };

    double log_r = std::log(mean * mean / (var - mean));
    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        const double r = std::exp(log_r);
        const auto [s, ds] = score_and_slope(r);
        // Newton on S(exp(theta)); dS/dtheta = r dS/dr.
        double step = -s / (r * ds);
        if (!std::isfinite(step) || ds >= 0.0) step = s > 0.0 ? 1.0 : -1.0;
        step = std::clamp(step, -2.0, 2.0);
        log_r += step;
        if (std::fabs(step) < kStepTolerance) {
            return NegBinParams{std::exp(log_r), mean};
        }
    }
    throw ConvergenceError("fit_negbin did not converge in 100 iterations",
                           fmt_iterate({{"r", std::exp(log_r)}, {"mu", mean}}));
}

std::string_view response_kind_code(ResponseKind k) noexcept {
    switch (k) {
        case ResponseKind::IndividualLoss: return "indl";
        case ResponseKind::SumByType: return "type";
        case ResponseKind::SumByEvent: return "event";
    }
    return "?";
}

std::optional<ResponseKind> parse_response_kind(std::string_view code) noexcept {
    for (auto k : kResponseKinds) {
        if (code == response_kind_code(k)) return k;
    }
    return std::nullopt;
}

std::string_view response_kind_label(ResponseKind k) noexcept {
    switch (k) {
        case ResponseKind::IndividualLoss: return "Indl. Loss";
        case ResponseKind::SumByType: return "Sum Losses-Type";
        case ResponseKind::SumByEvent: return "Sum Losses-Sp. Event";
    }
    return "?";
}

std::vector<NcdObservation> ncd_observations(const Portfolio& portfolio, ResponseKind kind) {
    auto to_units = [](double amount) { return static_cast<std::uint64_t>(std::llround(amount)); };
    const auto& holders = portfolio.policyholders();
    const auto& events = portfolio.events();
    const auto by_holder = portfolio.events_by_policyholder();

    std::vector<NcdObservation> out;
    out.reserve(kind == ResponseKind::SumByType ? 3 * holders.size() : holders.size());
    for (std::size_t i = 0; i < holders.size(); ++i) {
        const int ncd = holders[i].ncd_level;
        const auto& mine = by_holder[i];
        switch (kind) {
            case ResponseKind::IndividualLoss: {
                double sum = 0.0;
                std::size_t lines = 0;
                for (auto e : mine) {
                    for (const auto& l : events[e].losses) {
                        sum += l.amount;
                        ++lines;
                    }
                }
                out.push_back({ncd, lines ? to_units(sum / static_cast<double>(lines)) : 0});
                break;
            }
            case ResponseKind::SumByType: {
                for (LossType t : kLossTypes) {
                    double sum = 0.0;
                    for (auto e : mine) sum += events[e].amount(t).value_or(0.0);
                    out.push_back({ncd, to_units(sum)});
                }
                break;
            }
            case ResponseKind::SumByEvent: {
                double sum = 0.0;
                for (auto e : mine) sum += events[e].total();
                out.push_back(
                    {ncd, mine.empty() ? 0 : to_units(sum / static_cast<double>(mine.size()))});
                break;
            }
        }
    }
    return out;
}

double NcdRegressionModel::predicted_mean(int ncd_level) const {
    return std::exp(intercept + slope * (ncd_level / 10.0));
}

namespace {

struct Cell {
    double z;  // NCD / 10
    std::uint64_t y;
    double count;
};

std::vector<Cell> cells_of(std::span<const NcdObservation> obs) {
    std::map<std::pair<int, std::uint64_t>, std::uint64_t> h;
    for (const auto& o : obs) ++h[{o.ncd_level, o.response}];
    std::vector<Cell> cells;
    cells.reserve(h.size());
    for (const auto& [key, c] : h) {
        cells.push_back({key.first / 10.0, key.second, static_cast<double>(c)});
    }
    return cells;
}

double loglik_cells(const std::vector<Cell>& cells, double b0, double b1, double r) {
    const double log_r = std::log(r);
    double ll = 0.0;
    for (const auto& c : cells) {
        const double eta = b0 + b1 * c.z;
        const double mu = std::exp(eta);
        const double y = static_cast<double>(c.y);
        ll += c.count * (log_binom_coef(c.y, r) + r * log_r + y * eta - (y + r) * std::log(r + mu));
    }
    return ll;
}

struct Derivs {
    std::array<double, 3> g{};
    std::array<std::array<double, 3>, 3> h{};
};

// Gradient and Hessian in (b0, b1, theta = log r).
Derivs derivs_cells(const std::vector<Cell>& cells, double b0, double b1, double r) {
    Derivs d;
    double g_r = 0.0;
    double h_rr = 0.0;
    for (const auto& c : cells) {
        const double mu = std::exp(b0 + b1 * c.z);
        const double y = static_cast<double>(c.y);
        const double rm = r + mu;
        const double g_eta = c.count * r * (y - mu) / rm;
        const double h_ee = -c.count * r * mu * (y + r) / (rm * rm);
        const double h_er = c.count * mu * (y - mu) / (rm * rm);
        g_r += c.count * (digamma_shift(c.y, r) - std::log1p(mu / r) + (mu - y) / rm);
        h_rr += c.count * (trigamma_shift(c.y, r) + 1.0 / r - 1.0 / rm + (y - mu) / (rm * rm));

        d.g[0] += g_eta;
        d.g[1] += g_eta * c.z;
        d.h[0][0] += h_ee;
        d.h[0][1] += h_ee * c.z;
        d.h[1][1] += h_ee * c.z * c.z;
        d.h[0][2] += r * h_er;
        d.h[1][2] += r * h_er * c.z;
    }
    d.g[2] = r * g_r;
    d.h[2][2] = r * r * h_rr + r * g_r;
    d.h[1][0] = d.h[0][1];
    d.h[2][0] = d.h[0][2];
    d.h[2][1] = d.h[1][2];
    return d;
}

// Solves A x = b for symmetric positive definite A; false if not SPD.
bool cholesky_solve(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b,
                    std::array<double, 3>& x) {
    std::array<std::array<double, 3>, 3> l{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (!(s > 0.0)) return false;
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    std::array<double, 3> y{};
    for (int i = 0; i < 3; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l[i][k] * y[k];
        y[i] = s / l[i][i];
    }
    for (int i = 2; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < 3; ++k) s -= l[k][i] * x[k];
        x[i] = s / l[i][i];
    }
    return true;
}

}  // namespace

double ncd_log_likelihood(std::span<const NcdObservation> obs, double intercept, double slope,
                          double r) {
    return loglik_cells(cells_of(obs), intercept, slope, r);
}

std::array<double, 3> ncd_gradient(std::span<const NcdObservation> obs, double intercept,
                                   double slope, double r) {
    return derivs_cells(cells_of(obs), intercept, slope, r).g;
}

NcdRegressionModel fit_ncd_regression(std::span<const NcdObservation> obs, ResponseKind kind) {
    std::array<bool, 6> level_has_loss{};
    double sum_y = 0.0;
    for (const auto& o : obs) {
        if (!is_ncd_level(o.ncd_level)) {
            throw ValidationError("observation with invalid NCD level " +
                                  std::to_string(o.ncd_level));
        }
        if (o.response > 0) level_has_loss[ncd_index(o.ncd_level)] = true;
        sum_y += static_cast<double>(o.response);
    }
    if (std::count(level_has_loss.begin(), level_has_loss.end(), true) < 2) {
        throw ValidationError(
            "insufficient NCD diversity: losses must occur at two or more NCD levels");
    }

    const auto cells = cells_of(obs);
    const double n = static_cast<double>(obs.size());
    const double ybar = sum_y / n;
    double ss = 0.0;
    for (const auto& c : cells) {
        const double d = static_cast<double>(c.y) - ybar;
        ss += c.count * d * d;
    }
    const double var = ss / n;

    double b0 = std::log(ybar);
    double b1 = 0.0;
    double theta = std::log(var > ybar ? ybar * ybar / (var - ybar) : 1.0);
    double ll = loglik_cells(cells, b0, b1, std::exp(theta));

    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        const auto d = derivs_cells(cells, b0, b1, std::exp(theta));
        // Newton direction from -H; Levenberg damping when -H is not SPD.
        std::array<std::array<double, 3>, 3> neg_h{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) neg_h[i][j] = -d.h[i][j];
        std::array<double, 3> step{};
        double lambda = 0.0;
        while (!cholesky_solve(neg_h, d.g, step)) {
            const double scale = std::max({std::fabs(neg_h[0][0]), std::fabs(neg_h[1][1]),
                                           std::fabs(neg_h[2][2]), 1.0});
            const double next = lambda == 0.0 ? 1e-8 * scale : lambda * 10.0;
            for (int i = 0; i < 3; ++i) neg_h[i][i] += next - lambda;
            lambda = next;
        }
        // The NCD covariate spans five decades; cap the move per iteration.
        const double biggest = std::max({std::fabs(step[0]), std::fabs(step[1]), std::fabs(step[2])});
        if (biggest > 1.0) {
            for (auto& s : step) s /= biggest;
        }

        const double max_step = std::max({std::fabs(step[0]), std::fabs(step[1]), std::fabs(step[2])});
        if (max_step < kStepTolerance) {
            b0 += step[0];
            b1 += step[1];
            theta += step[2];
            NcdRegressionModel m;
            m.intercept = b0;
            m.slope = b1;
            m.r = std::exp(theta);
            m.kind = kind;
            m.n_obs = obs.size();
            m.iterations = iter;
            m.loglik = loglik_cells(cells, b0, b1, m.r);
            return m;
        }

        double t = 1.0;
        for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
            const double nb0 = b0 + t * step[0];
            const double nb1 = b1 + t * step[1];
            const double nth = theta + t * step[2];
            const double nll = loglik_cells(cells, nb0, nb1, std::exp(nth));
            // Near the optimum the likelihood change drowns in rounding.
            if ((std::isfinite(nll) && nll >= ll) || t * max_step < 1e-7) {
                b0 = nb0;
                b1 = nb1;
                theta = nth;
                ll = nll;
                break;
            }
        }
    }
    throw ConvergenceError(
        "NCD regression did not converge in 100 iterations",
        fmt_iterate({{"intercept", b0}, {"slope", b1}, {"r", std::exp(theta)}}));
}

NcdRegressionModel fit_ncd_regression(const Portfolio& portfolio, ResponseKind kind) {
    return fit_ncd_regression(ncd_observations(portfolio, kind), kind);
}

PredictedMeanGrid predicted_mean_grid(std::span<const NcdRegressionModel> models) {
    if (models.size() != 3) {
        throw ValidationError("predicted_mean_grid needs exactly one model per response kind");
    }
    PredictedMeanGrid grid;
    std::array<bool, 3> seen{};
    for (const auto& m : models) {
        const auto k = static_cast<std::size_t>(m.kind);
        if (seen[k]) throw ValidationError("predicted_mean_grid: duplicate response kind");
        seen[k] = true;
        for (std::size_t j = 0; j < kNcdLevels.size(); ++j) {
            grid.rows[k][j] = m.predicted_mean(kNcdLevels[j]);
        }
    }
    return grid;
}

std::array<std::optional<double>, 6> ncd_sample_means(std::span<const NcdObservation> obs) {
    std::array<double, 6> sum{};
    std::array<std::size_t, 6> n{};
    for (const auto& o : obs) {
        const auto j = ncd_index(o.ncd_level);
        sum[j] += static_cast<double>(o.response);
        ++n[j];
    }
    std::array<std::optional<double>, 6> out{};
    for (std::size_t j = 0; j < 6; ++j) {
        if (n[j]) out[j] = sum[j] / static_cast<double>(n[j]);
    }
    return out;
}

std::array<std::array<double, 5>, 3> mean_change_series(const PredictedMeanGrid& grid) {
    std::array<std::array<double, 5>, 3> out{};
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t j = 0; j < 5; ++j) out[k][j] = grid.rows[k][j + 1] - grid.rows[k][j];
    }
    return out;
}

}  // namespace qsr
