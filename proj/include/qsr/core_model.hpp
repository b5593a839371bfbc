#ifndef QSR_CORE_MODEL_HPP
#define QSR_CORE_MODEL_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qsr/empirical_sample.hpp"

namespace qsr {

/// The three coverages carried by a comprehensive motor policy. The
/// enumerator order is the canonical loss-type order used everywhere a
/// summation or listing order matters.
enum class LossType : std::uint8_t {
    ThirdPartyInjury = 0,
    OwnDamage = 1,
    ThirdPartyProperty = 2,
};

inline constexpr std::array<LossType, 3> kLossTypes = {
    LossType::ThirdPartyInjury, LossType::OwnDamage, LossType::ThirdPartyProperty};

/// CSV code: TPI, OD or TPP.
std::string_view loss_type_code(LossType t) noexcept;
std::optional<LossType> parse_loss_type(std::string_view code) noexcept;
/// Human-readable coverage label ("Third party injury", ...).
std::string_view loss_type_label(LossType t) noexcept;

enum class Gender : std::uint8_t { Male, Female, Unspecified };

std::string_view gender_code(Gender g) noexcept;
std::optional<Gender> parse_gender(std::string_view code) noexcept;

/// No-Claims-Discount levels recognised by the portfolio, in percent.
inline constexpr std::array<int, 6> kNcdLevels = {0, 10, 20, 30, 40, 50};
inline constexpr int kMinDriverAge = 16;

bool is_ncd_level(int level) noexcept;
/// Position of `level` in kNcdLevels. Precondition: is_ncd_level(level).
std::size_t ncd_index(int level) noexcept;

struct PolicyHolder {
    std::string id;
    int age = kMinDriverAge;
    Gender gender = Gender::Unspecified;
    std::string vehicle_type;
    int vehicle_age = 0;
    int prior_experience = 0;
    int ncd_level = 0;

    bool operator==(const PolicyHolder&) const = default;
};

struct TypedLoss {
    LossType type;
    double amount;

    bool operator==(const TypedLoss&) const = default;
};

/// One accident. Holds at most one entry per loss type, ordered by LossType.
struct ClaimEvent {
    std::string event_id;
    std::string policyholder_id;
    std::vector<TypedLoss> losses;

    std::optional<double> amount(LossType t) const noexcept;
    /// Sum of the typed amounts, in loss-type order.
    double total() const noexcept;

    bool operator==(const ClaimEvent&) const = default;
};

/// Validated collection of policyholders and their claim events.
///
/// Events are kept sorted by event id and each event's losses by loss type,
/// which fixes the summation order used by event_totals and losses_by_type.
class Portfolio {
public:
    Portfolio() = default;

    /// Validates every core invariant and canonicalizes order. Events that
    /// repeat a loss type have those amounts summed. Throws ValidationError.
    Portfolio(std::vector<PolicyHolder> policyholders, std::vector<ClaimEvent> events);

    const std::vector<PolicyHolder>& policyholders() const noexcept { return policyholders_; }
    const std::vector<ClaimEvent>& events() const noexcept { return events_; }

    /// Index into policyholders() for a policyholder id, if present.
    std::optional<std::size_t> find_policyholder(std::string_view id) const;

    /// Event indices per policyholder, parallel to policyholders().
    std::vector<std::vector<std::size_t>> events_by_policyholder() const;

    bool operator==(const Portfolio& other) const {
        return policyholders_ == other.policyholders_ && events_ == other.events_;
    }

private:
    std::vector<PolicyHolder> policyholders_;
    std::vector<ClaimEvent> events_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::string_view kPoliciesHeader =
    "id,age,gender,vehicle_type,vehicle_age,prior_experience,ncd_level";
inline constexpr std::string_view kClaimsHeader = "event_id,policyholder_id,loss_type,amount";

/// Parses policies.csv and claims.csv. Rows sharing (event_id, loss_type)
/// are summed. Errors carry the file name and 1-based line number.
Portfolio ingest_csv(std::istream& policies, std::istream& claims);

/// Writes the portfolio in the same formats ingest_csv reads. Amounts use
/// the shortest round-trip decimal form.
void emit_csv(const Portfolio& portfolio, std::ostream& policies, std::ostream& claims);

/// One value per event that carries a loss of type `t`.
EmpiricalSample losses_by_type(const Portfolio& portfolio, LossType t);

/// One value per event: the bundled (comprehensive) loss of the accident.
EmpiricalSample event_totals(const Portfolio& portfolio);

/// Per-event amounts of type `t` in event order, zero where absent. The
/// three columns together with event_totals are aligned by event.
std::vector<double> aligned_column(const Portfolio& portfolio, LossType t);

}  // namespace qsr

#endif  // QSR_CORE_MODEL_HPP
