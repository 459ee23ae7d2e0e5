#include "hags/plan.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "text_util.hpp"

namespace hags::plan {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::leo: return "LEO";
    case NodeKind::hags: return "HAGS";
    case NodeKind::gs: return "GS";
  }
  return "?";
}

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

int compare_component(std::string_view a, std::string_view b) {
  if (all_digits(a) && all_digits(b)) {
    while (a.size() > 1 && a.front() == '0') a.remove_prefix(1);
    while (b.size() > 1 && b.front() == '0') b.remove_prefix(1);
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  }
  return a.compare(b) < 0 ? -1 : (a == b ? 0 : 1);
}

}  // namespace

bool contact_id_less(std::string_view a, std::string_view b) {
  while (true) {
    const auto pa = a.find('.');
    const auto pb = b.find('.');
    const int c = compare_component(a.substr(0, pa), b.substr(0, pb));
    if (c != 0) return c < 0;
    if (pa == std::string_view::npos || pb == std::string_view::npos)
      return pa == std::string_view::npos && pb != std::string_view::npos;
    a.remove_prefix(pa + 1);
    b.remove_prefix(pb + 1);
  }
}

namespace {

bool plan_order(const Contact& a, const Contact& b) {
  if (a.start_ms != b.start_ms) return a.start_ms < b.start_ms;
  return contact_id_less(a.contact_id, b.contact_id);
}

auto content_key(const Contact& c) {
  return std::tie(c.start_ms, c.end_ms, c.tx, c.rx, c.rate_bps, c.weather_site);
}

}  // namespace

void ContactPlan::validate() const {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    const auto& c = contacts[i];
    if (c.start_ms >= c.end_ms)
      throw InvariantError(fmt::format("contact {}: empty contact window", c.contact_id));
    if (c.start_ms < 0 || c.end_ms > horizon_ms)
      throw InvariantError(fmt::format("contact {}: outside plan horizon", c.contact_id));
    if (c.rate_bps <= 0) throw InvariantError(fmt::format("contact {}: bad rate", c.contact_id));
    if (!ids.insert(c.contact_id).second)
      throw InvariantError(fmt::format("duplicate contact id {}", c.contact_id));
    if (i > 0 && plan_order(c, contacts[i - 1])) throw InvariantError("contact plan not sorted");
  }
}

void ContactPlan::sort() { std::stable_sort(contacts.begin(), contacts.end(), plan_order); }

void canonicalize(ContactPlan& plan) {
  std::stable_sort(plan.contacts.begin(), plan.contacts.end(),
                   [](const Contact& a, const Contact& b) { return content_key(a) < content_key(b); });
  for (std::size_t i = 0; i < plan.contacts.size(); ++i)
    plan.contacts[i].contact_id = std::to_string(i + 1);
}

ContactPlan carve(const ContactPlan& plan, const weather::WeatherPlan& weather) {
  ContactPlan out;
  out.horizon_ms = plan.horizon_ms;
  out.contacts.reserve(plan.contacts.size());
  for (const auto& c : plan.contacts) {
    if (!c.weather_site) {
      out.contacts.push_back(c);
      continue;
    }
    if (!weather.has_site(*c.weather_site))
      throw ConfigError(fmt::format("contact {}: unresolved weather site '{}'", c.contact_id,
                                    *c.weather_site));
    std::vector<std::pair<TimeMs, TimeMs>> pieces;
    TimeMs cursor = c.start_ms;
    for (const auto& b : weather.site(*c.weather_site)) {
      if (b.end_ms <= cursor) continue;
      if (b.start_ms >= c.end_ms) break;
      if (b.start_ms > cursor) pieces.emplace_back(cursor, b.start_ms);
      cursor = std::max(cursor, b.end_ms);
      if (cursor >= c.end_ms) break;
    }
    if (cursor < c.end_ms) pieces.emplace_back(cursor, c.end_ms);

    if (pieces.size() == 1 && pieces[0].first == c.start_ms && pieces[0].second == c.end_ms) {
      out.contacts.push_back(c);
      continue;
    }
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      Contact sub = c;
      sub.contact_id = fmt::format("{}.{}", c.contact_id, k + 1);
      sub.start_ms = pieces[k].first;
      sub.end_ms = pieces[k].second;
      out.contacts.push_back(std::move(sub));
    }
  }
  out.sort();
  return out;
}

ContactPlan parse_contact_plan(std::string_view text, std::optional<TimeMs> horizon_ms) {
  ContactPlan plan;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto body = detail::strip_comment(lines[i]);
    if (body.empty()) continue;
    const auto tok = detail::split_ws(body);
    if (tok[0] != "contact" || tok.size() < 6 || tok.size() > 7)
      throw ParseError(i + 1, fmt::format("malformed contact line '{}'", body));
    Contact c;
    try {
      c.start_ms = parse_seconds(tok[1]);
      c.end_ms = parse_seconds(tok[2]);
      c.rate_bps = detail::parse_number<RateBps>(tok[5], "rate");
    } catch (const ConfigError& e) {
      throw ParseError(i + 1, e.what());
    }
    c.tx = std::string(tok[3]);
    c.rx = std::string(tok[4]);
    if (tok.size() == 7) {
      constexpr std::string_view key = "weather_site=";
      if (tok[6].substr(0, key.size()) != key || tok[6].size() == key.size())
        throw ParseError(i + 1, fmt::format("unexpected field '{}'", tok[6]));
      c.weather_site = std::string(tok[6].substr(key.size()));
    }
    if (c.start_ms >= c.end_ms) throw ParseError(i + 1, "empty contact window");
    if (c.start_ms < 0) throw ParseError(i + 1, "negative contact start");
    if (c.rate_bps <= 0) throw ParseError(i + 1, "rate must be positive");
    if (c.tx == c.rx) throw ParseError(i + 1, "contact from a node to itself");
    plan.contacts.push_back(std::move(c));
  }
  TimeMs latest = 0;
  for (const auto& c : plan.contacts) latest = std::max(latest, c.end_ms);
  plan.horizon_ms = horizon_ms.value_or(latest);
  if (latest > plan.horizon_ms) throw ConfigError("contact plan extends past the horizon");
  canonicalize(plan);
  return plan;
}

std::string serialize_contact_plan(const ContactPlan& plan) {
  ContactPlan canonical = plan;
  canonicalize(canonical);
  std::string out;
  for (const auto& c : canonical.contacts) {
    out += fmt::format("contact {} {} {} {} {}", format_seconds(c.start_ms),
                       format_seconds(c.end_ms), c.tx, c.rx, c.rate_bps);
    if (c.weather_site) out += " weather_site=" + *c.weather_site;
    out += '\n';
  }
  return out;
}

TimeMs availability_ms(const ContactPlan& plan, std::string_view tx, std::string_view rx) {
  TimeMs total = 0;
  for (const auto& c : plan.contacts)
    if (c.tx == tx && c.rx == rx) total += c.duration_ms();
  return total;
}

}  // namespace hags::plan
