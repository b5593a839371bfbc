#include "qsr/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <unordered_set>

#include "qsr/csv.hpp"
#include "qsr/error.hpp"

namespace qsr {

std::string_view loss_type_code(LossType t) noexcept {
    switch (t) {
        case LossType::ThirdPartyInjury: return "TPI";
        case LossType::OwnDamage: return "OD";
        case LossType::ThirdPartyProperty: return "TPP";
    }
    return "?";
}

std::optional<LossType> parse_loss_type(std::string_view code) noexcept {
    for (LossType t : kLossTypes) {
        if (code == loss_type_code(t)) return t;
    }
    return std::nullopt;
}

std::string_view loss_type_label(LossType t) noexcept {
    switch (t) {
        case LossType::ThirdPartyInjury: return "Third party injury";
        case LossType::OwnDamage: return "Own damage";
        case LossType::ThirdPartyProperty: return "Third party property";
    }
    return "?";
}

std::string_view gender_code(Gender g) noexcept {
    switch (g) {
        case Gender::Male: return "M";
        case Gender::Female: return "F";
        case Gender::Unspecified: return "U";
    }
    return "U";
}

std::optional<Gender> parse_gender(std::string_view code) noexcept {
    if (code == "M") return Gender::Male;
    if (code == "F") return Gender::Female;
    if (code == "U" || code.empty()) return Gender::Unspecified;
    return std::nullopt;
}

bool is_ncd_level(int level) noexcept {
    return std::find(kNcdLevels.begin(), kNcdLevels.end(), level) != kNcdLevels.end();
}

std::size_t ncd_index(int level) noexcept {
    return static_cast<std::size_t>(
        std::find(kNcdLevels.begin(), kNcdLevels.end(), level) - kNcdLevels.begin());
}

std::optional<double> ClaimEvent::amount(LossType t) const noexcept {
    for (const auto& l : losses) {
        if (l.type == t) return l.amount;
    }
    return std::nullopt;
}

double ClaimEvent::total() const noexcept {
    double s = 0.0;
    for (const auto& l : losses) s += l.amount;
    return s;
}

namespace {

void validate_policyholder(const PolicyHolder& p) {
    auto fail = [&](const std::string& why) {
        throw ValidationError("policyholder '" + p.id + "': " + why);
    };
    if (p.id.empty()) fail("empty id");
    if (p.age < kMinDriverAge) fail("age below " + std::to_string(kMinDriverAge));
    if (p.vehicle_age < 0) fail("negative vehicle_age");
    if (p.prior_experience < 0) fail("negative prior_experience");
    if (p.prior_experience > p.age - kMinDriverAge) fail("prior_experience exceeds age - 16");
    if (!is_ncd_level(p.ncd_level)) {
        fail("ncd_level " + std::to_string(p.ncd_level) + " is not one of 0,10,20,30,40,50");
    }
}

// Sums repeated types and orders losses by type.
void canonicalize_losses(ClaimEvent& e) {
    std::array<std::optional<double>, 3> by_type{};
    for (const auto& l : e.losses) {
        if (!std::isfinite(l.amount) || l.amount < 0.0) {
            throw ValidationError("event '" + e.event_id + "': amount must be finite and >= 0");
        }
        auto& slot = by_type[static_cast<std::size_t>(l.type)];
        slot = slot.value_or(0.0) + l.amount;
    }
    e.losses.clear();
    for (LossType t : kLossTypes) {
        if (auto a = by_type[static_cast<std::size_t>(t)]) e.losses.push_back({t, *a});
    }
    if (e.losses.empty()) {
        throw ValidationError("event '" + e.event_id + "': no losses");
    }
}

}  // namespace

Portfolio::Portfolio(std::vector<PolicyHolder> policyholders, std::vector<ClaimEvent> events)
    : policyholders_(std::move(policyholders)), events_(std::move(events)) {
    index_.reserve(policyholders_.size());
    for (std::size_t i = 0; i < policyholders_.size(); ++i) {
        validate_policyholder(policyholders_[i]);
        if (!index_.emplace(policyholders_[i].id, i).second) {
            throw ValidationError("duplicate policyholder id '" + policyholders_[i].id + "'");
        }
    }
    std::unordered_set<std::string> seen;
    for (auto& e : events_) {
        if (e.event_id.empty()) throw ValidationError("event with empty id");
        if (!seen.insert(e.event_id).second) {
            throw ValidationError("duplicate event id '" + e.event_id + "'");
        }
        if (!index_.contains(e.policyholder_id)) {
            throw ValidationError("event '" + e.event_id + "' references unknown policyholder '" +
                                  e.policyholder_id + "'");
        }
        canonicalize_losses(e);
    }
    std::sort(events_.begin(), events_.end(),
              [](const ClaimEvent& a, const ClaimEvent& b) { return a.event_id < b.event_id; });
}

std::optional<std::size_t> Portfolio::find_policyholder(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::vector<std::size_t>> Portfolio::events_by_policyholder() const {
    std::vector<std::vector<std::size_t>> out(policyholders_.size());
    for (std::size_t i = 0; i < events_.size(); ++i) {
        out[index_.at(events_[i].policyholder_id)].push_back(i);
    }
    return out;
}

namespace {

struct LineReader {
    std::istream& in;
    std::string_view file;
    std::size_t line_no = 0;

    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw ValidationError(std::string(file) + " line " + std::to_string(line_no) + ": " + why);
    }

    std::vector<std::string> fields(const std::string& line, std::size_t expected) const {
        auto f = csv::split_line(line);
        if (!f) fail("unterminated quoted field");
        if (f->size() != expected) {
            fail("expected " + std::to_string(expected) + " fields, found " +
                 std::to_string(f->size()));
        }
        return *std::move(f);
    }

    int integer(const std::string& text, std::string_view name) const {
        auto v = csv::parse_int(text);
        if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
            fail("field '" + std::string(name) + "' is not an integer: '" + text + "'");
        }
        return static_cast<int>(*v);
    }

    void header(std::string_view expected) {
        std::string line;
        if (!next(line)) fail("missing header");
        if (line != expected) fail("header must be '" + std::string(expected) + "'");
    }
};

}  // namespace

Portfolio ingest_csv(std::istream& policies, std::istream& claims) {
    std::vector<PolicyHolder> holders;
    {
        LineReader r{policies, "policies.csv"};
        r.header(kPoliciesHeader);
        std::unordered_set<std::string> ids;
        std::string line;
        while (r.next(line)) {
            auto f = r.fields(line, 7);
            PolicyHolder p;
            p.id = f[0];
            p.age = r.integer(f[1], "age");
            auto g = parse_gender(f[2]);
            if (!g) r.fail("unknown gender code '" + f[2] + "'");
            p.gender = *g;
            p.vehicle_type = f[3];
            p.vehicle_age = r.integer(f[4], "vehicle_age");
            p.prior_experience = r.integer(f[5], "prior_experience");
            p.ncd_level = r.integer(f[6], "ncd_level");
            if (!ids.insert(p.id).second) r.fail("duplicate policyholder id '" + p.id + "'");
            try {
                validate_policyholder(p);
            } catch (const ValidationError& e) {
                r.fail(e.what());
            }
            holders.push_back(std::move(p));
        }
    }

    std::vector<ClaimEvent> events;
    {
        LineReader r{claims, "claims.csv"};
        r.header(kClaimsHeader);
        std::unordered_set<std::string> known;
        for (const auto& p : holders) known.insert(p.id);
        std::unordered_map<std::string, std::size_t> by_id;
        std::string line;
        while (r.next(line)) {
            auto f = r.fields(line, 4);
            if (f[0].empty()) r.fail("empty event_id");
            if (!known.contains(f[1])) r.fail("unknown policyholder '" + f[1] + "'");
            auto t = parse_loss_type(f[2]);
            if (!t) r.fail("unknown loss_type '" + f[2] + "' (expected TPI, OD or TPP)");
            auto amount = csv::parse_double(f[3]);
            if (!amount || !std::isfinite(*amount)) r.fail("amount is not a number: '" + f[3] + "'");
            if (*amount < 0.0) r.fail("negative amount " + f[3]);

            auto [it, inserted] = by_id.try_emplace(f[0], events.size());
            if (inserted) {
                events.push_back(ClaimEvent{f[0], f[1], {}});
            } else if (events[it->second].policyholder_id != f[1]) {
                r.fail("event '" + f[0] + "' is attributed to two policyholders");
            }
            events[it->second].losses.push_back({*t, *amount});
        }
    }
    return Portfolio(std::move(holders), std::move(events));
}

void emit_csv(const Portfolio& portfolio, std::ostream& policies, std::ostream& claims) {
    policies << kPoliciesHeader << '\n';
    for (const auto& p : portfolio.policyholders()) {
        const std::string fields[] = {p.id,
                                      std::to_string(p.age),
                                      std::string(gender_code(p.gender)),
                                      p.vehicle_type,
                                      std::to_string(p.vehicle_age),
                                      std::to_string(p.prior_experience),
                                      std::to_string(p.ncd_level)};
        policies << csv::join(fields) << '\n';
    }
    claims << kClaimsHeader << '\n';
    for (const auto& e : portfolio.events()) {
        for (const auto& l : e.losses) {
            const std::string fields[] = {e.event_id, e.policyholder_id,
                                          std::string(loss_type_code(l.type)),
                                          csv::format_number(l.amount)};
            claims << csv::join(fields) << '\n';
        }
    }
}

EmpiricalSample losses_by_type(const Portfolio& portfolio, LossType t) {
    std::vector<double> values;
    for (const auto& e : portfolio.events()) {
        if (auto a = e.amount(t)) values.push_back(*a);
    }
    return EmpiricalSample(std::move(values));
}

EmpiricalSample event_totals(const Portfolio& portfolio) {
    std::vector<double> values;
    values.reserve(portfolio.events().size());
    for (const auto& e : portfolio.events()) values.push_back(e.total());
    return EmpiricalSample(std::move(values));
}

std::vector<double> aligned_column(const Portfolio& portfolio, LossType t) {
    std::vector<double> values;
    values.reserve(portfolio.events().size());
    for (const auto& e : portfolio.events()) values.push_back(e.amount(t).value_or(0.0));
    return values;
}

}  // namespace qsr
