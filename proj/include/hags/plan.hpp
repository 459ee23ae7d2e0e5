#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hags/core.hpp"
#include "hags/weather.hpp"

namespace hags::plan {

enum class NodeKind { leo, hags, gs };

std::string_view to_string(NodeKind kind);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::gs;
};

/// A directed transmission opportunity `tx -> rx` over [start, end).
///
/// `weather_site` names the ground site whose cloud cover gates the link;
/// it is set for LEO–GS and HAGS–GS links and absent for LEO–HAGS.
struct Contact {
  std::string contact_id;
  std::string tx;
  std::string rx;
  TimeMs start_ms = 0;
  TimeMs end_ms = 0;
  RateBps rate_bps = 0;
  std::optional<std::string> weather_site;

  TimeMs duration_ms() const { return end_ms - start_ms; }
  Bits capacity_bits() const { return bits_in(duration_ms(), rate_bps); }

  friend bool operator==(const Contact&, const Contact&) = default;
};

/// Orders contact ids component-wise on '.'; numeric components compare as
/// numbers, so "2" < "10" and "10" < "10.1" < "10.2".
bool contact_id_less(std::string_view a, std::string_view b);

struct ContactPlan {
  TimeMs horizon_ms = 0;
  std::vector<Contact> contacts;  ///< sorted by (start, contact_id)

  /// Throws InvariantError on a window outside [0, horizon], start >= end,
  /// non-positive rate, duplicate ids or unsorted contacts.
  void validate() const;
  /// Sorts by (start, contact_id).
  void sort();

  friend bool operator==(const ContactPlan&, const ContactPlan&) = default;
};

/// Sorts contacts by content (start, end, tx, rx, rate, weather_site) and
/// renumbers them "1".."n". Parsing always yields a canonical plan.
void canonicalize(ContactPlan& plan);

/// Removes each weather-dependent contact's blocked time. A contact whose
/// window is untouched keeps its id; a split or trimmed one becomes
/// sub-contacts "<id>.1", "<id>.2", ... Throws ConfigError "unresolved
/// weather site" when a contact names a site the weather plan lacks.
ContactPlan carve(const ContactPlan& plan, const weather::WeatherPlan& weather);

/// Text form, one contact per line:
///   contact <start_s> <end_s> <tx_id> <rx_id> <rate_bps> [weather_site=<site_id>]
/// `#` starts a comment. Ids are not stored; parsing assigns canonical ids.
/// When `horizon_ms` is absent the latest contact end is used.
ContactPlan parse_contact_plan(std::string_view text,
                               std::optional<TimeMs> horizon_ms = std::nullopt);
std::string serialize_contact_plan(const ContactPlan& plan);

/// Total time each directed (tx, rx) pair is in contact.
TimeMs availability_ms(const ContactPlan& plan, std::string_view tx, std::string_view rx);

}  // namespace hags::plan
