#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hags/core.hpp"
#include "hags/plan.hpp"

namespace hags::routing {

using NodeIndex = int;
using ContactIndex = std::size_t;

/// Contact graph over an immutable plan. Contacts are vertices; contact A
/// leads to contact B whenever A.rx == B.tx. Node names are interned so the
/// search runs on integers.
class ContactGraph {
 public:
  /// `extra_nodes` registers nodes that may have no contacts.
  explicit ContactGraph(const plan::ContactPlan& plan,
                        std::span<const std::string> extra_nodes = {});

  const plan::ContactPlan& plan() const { return *plan_; }
  std::size_t size() const { return plan_->contacts.size(); }

  std::optional<NodeIndex> find_node(std::string_view id) const;
  /// Throws ConfigError "unknown node".
  NodeIndex node(std::string_view id) const;
  const std::string& node_name(NodeIndex n) const { return names_[static_cast<std::size_t>(n)]; }
  std::size_t node_count() const { return names_.size(); }

  NodeIndex tx(ContactIndex c) const { return tx_[c]; }
  NodeIndex rx(ContactIndex c) const { return rx_[c]; }
  /// Contacts leaving `n`, in plan order.
  const std::vector<ContactIndex>& outgoing(NodeIndex n) const {
    return out_[static_cast<std::size_t>(n)];
  }
  std::optional<ContactIndex> find_contact(std::string_view contact_id) const;

 private:
  NodeIndex intern(const std::string& id);

  const plan::ContactPlan* plan_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<NodeIndex> tx_, rx_;
  std::vector<std::vector<ContactIndex>> out_;
  std::unordered_map<std::string, ContactIndex> contact_index_;
};

/// Unbooked volume per contact, aligned with the plan's contact order.
class Residuals {
 public:
  Residuals() = default;
  explicit Residuals(const plan::ContactPlan& plan);

  Bits operator[](ContactIndex c) const { return bits_[c]; }
  Bits& operator[](ContactIndex c) { return bits_[c]; }
  std::size_t size() const { return bits_.size(); }

  friend bool operator==(const Residuals&, const Residuals&) = default;

 private:
  std::vector<Bits> bits_;
};

struct Route {
  std::vector<ContactIndex> hops;
  TimeMs best_delivery_ms = 0;
  Bits bottleneck_volume_bits = 0;
  /// Arrival time at the receiver of each hop.
  std::vector<TimeMs> arrivals_ms;
};

struct RouteQuery {
  NodeIndex src = 0;
  /// Delivering to any member counts (a ground network reached through
  /// whichever ground station is first).
  std::vector<NodeIndex> destinations;
  TimeMs t_now = 0;
  Bits size_bits = 0;
};

/// Earliest-delivery route.
///
/// A hop entered at time t on contact c starts at max(t, c.start), takes
/// ceil(size / rate) and must finish by c.end; contacts with less than
/// `size_bits` residual are skipped. Among routes with the earliest delivery
/// the one with fewest hops wins, then the lexicographically smallest
/// sequence of plan positions. Routes never pass through a destination.
/// Returns nullopt when nothing can deliver. A source that is itself a
/// destination yields an empty route delivered at t_now.
std::optional<Route> best_route(const ContactGraph& graph, const Residuals& residuals,
                                const RouteQuery& query);

/// Name-based convenience overload for a single destination.
std::optional<Route> best_route(const ContactGraph& graph, const Residuals& residuals,
                                std::string_view src, std::string_view dst, TimeMs t_now,
                                Bits size_bits);

/// Debits `size_bits` from every hop (a negative size releases). Throws
/// InvariantError "overbooked contact" if a hop would go negative; the
/// residuals are left untouched in that case.
void book(Residuals& residuals, const Route& route, Bits size_bits);
void book(Residuals& residuals, std::span<const ContactIndex> hops, Bits size_bits);

/// Ids of the route's contacts.
std::vector<std::string> hop_ids(const ContactGraph& graph, const Route& route);

}  // namespace hags::routing
