#include "hags/routing.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include <fmt/format.h>

namespace hags::routing {

namespace {

constexpr TimeMs kNever = std::numeric_limits<TimeMs>::max();
constexpr TimeMs kTooLate = std::numeric_limits<TimeMs>::min();

}  // namespace

ContactGraph::ContactGraph(const plan::ContactPlan& plan, std::span<const std::string> extra_nodes)
    : plan_(&plan) {
  const auto& contacts = plan.contacts;
  tx_.reserve(contacts.size());
  rx_.reserve(contacts.size());
  for (std::size_t i = 0; i < contacts.size(); ++i) {
    tx_.push_back(intern(contacts[i].tx));
    rx_.push_back(intern(contacts[i].rx));
    out_[static_cast<std::size_t>(tx_.back())].push_back(i);
    contact_index_.emplace(contacts[i].contact_id, i);
  }
  for (const auto& n : extra_nodes) intern(n);
}

NodeIndex ContactGraph::intern(const std::string& id) {
  auto [it, inserted] = index_.emplace(id, static_cast<NodeIndex>(names_.size()));
  if (inserted) {
    names_.push_back(id);
    out_.emplace_back();
  }
  return it->second;
}

std::optional<NodeIndex> ContactGraph::find_node(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex ContactGraph::node(std::string_view id) const {
  if (auto n = find_node(id)) return *n;
  throw ConfigError(fmt::format("unknown node '{}'", id));
}

std::optional<ContactIndex> ContactGraph::find_contact(std::string_view contact_id) const {
  auto it = contact_index_.find(std::string(contact_id));
  if (it == contact_index_.end()) return std::nullopt;
  return it->second;
}

Residuals::Residuals(const plan::ContactPlan& plan) {
  bits_.reserve(plan.contacts.size());
  for (const auto& c : plan.contacts) bits_.push_back(c.capacity_bits());
}

namespace {

/// Per-query view of hop timing: eligibility and the arrival map
/// t -> max(t, start) + transmission time, which is non-decreasing in t.
class HopModel {
 public:
  HopModel(const ContactGraph& g, const Residuals& r, const RouteQuery& q)
      : g_(g), is_dst_(g.node_count(), 0) {
    const auto& contacts = g.plan().contacts;
    duration_.resize(contacts.size());
    eligible_.resize(contacts.size());
    for (std::size_t c = 0; c < contacts.size(); ++c) {
      duration_[c] = transmission_ms(q.size_bits, contacts[c].rate_bps);
      eligible_[c] = r[c] >= q.size_bits && contacts[c].end_ms > q.t_now &&
                     contacts[c].start_ms + duration_[c] <= contacts[c].end_ms;
    }
    for (NodeIndex d : q.destinations) is_dst_[static_cast<std::size_t>(d)] = 1;
  }

  bool eligible(ContactIndex c) const { return eligible_[c]; }
  bool is_dst(NodeIndex n) const { return is_dst_[static_cast<std::size_t>(n)] != 0; }
  TimeMs duration(ContactIndex c) const { return duration_[c]; }
  TimeMs start(ContactIndex c) const { return g_.plan().contacts[c].start_ms; }
  TimeMs end(ContactIndex c) const { return g_.plan().contacts[c].end_ms; }

  /// Arrival at rx when ready at tx at `t`; kNever if the hop cannot finish.
  TimeMs arrive(ContactIndex c, TimeMs t) const {
    if (t == kNever) return kNever;
    const TimeMs done = std::max(t, start(c)) + duration_[c];
    return done <= end(c) ? done : kNever;
  }

 private:
  const ContactGraph& g_;
  std::vector<TimeMs> duration_;
  std::vector<char> eligible_;
  std::vector<char> is_dst_;
};

/// Earliest delivery time over all routes (label-setting over contacts).
TimeMs earliest_delivery(const ContactGraph& g, const HopModel& hm, const RouteQuery& q) {
  std::vector<TimeMs> best(g.size(), kNever);
  using Item = std::pair<TimeMs, ContactIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  for (ContactIndex c : g.outgoing(q.src)) {
    if (!hm.eligible(c)) continue;
    if (TimeMs t = hm.arrive(c, q.t_now); t < best[c]) {
      best[c] = t;
      open.emplace(t, c);
    }
  }
  while (!open.empty()) {
    auto [t, c] = open.top();
    open.pop();
    if (t != best[c]) continue;
    if (hm.is_dst(g.rx(c))) return t;
    for (ContactIndex next : g.outgoing(g.rx(c))) {
      if (!hm.eligible(next)) continue;
      if (TimeMs tn = hm.arrive(next, t); tn < best[next]) {
        best[next] = tn;
        open.emplace(tn, next);
      }
    }
  }
  return kNever;
}

/// Smallest hop count that still delivers by `deadline`.
std::size_t fewest_hops(const ContactGraph& g, const HopModel& hm, const RouteQuery& q,
                        TimeMs deadline) {
  std::vector<TimeMs> layer(g.size(), kNever), next(g.size(), kNever);
  std::vector<ContactIndex> frontier, touched;
  for (ContactIndex c : g.outgoing(q.src)) {
    if (!hm.eligible(c)) continue;
    if (TimeMs t = hm.arrive(c, q.t_now); t != kNever) {
      layer[c] = t;
      frontier.push_back(c);
    }
  }
  for (std::size_t hops = 1; !frontier.empty() && hops <= g.size(); ++hops) {
    for (ContactIndex c : frontier)
      if (hm.is_dst(g.rx(c)) && layer[c] <= deadline) return hops;
    touched.clear();
    for (ContactIndex c : frontier) {
      if (hm.is_dst(g.rx(c))) continue;
      for (ContactIndex n : g.outgoing(g.rx(c))) {
        if (!hm.eligible(n)) continue;
        const TimeMs t = hm.arrive(n, layer[c]);
        if (t == kNever || t > deadline) continue;
        if (next[n] == kNever) touched.push_back(n);
        next[n] = std::min(next[n], t);
      }
    }
    for (ContactIndex c : frontier) layer[c] = kNever;
    frontier.clear();
    for (ContactIndex n : touched) {
      layer[n] = next[n];
      next[n] = kNever;
      frontier.push_back(n);
    }
    std::sort(frontier.begin(), frontier.end());
  }
  throw InvariantError("routing: no hop count reaches the earliest delivery time");
}

}  // namespace

std::optional<Route> best_route(const ContactGraph& graph, const Residuals& residuals,
                                const RouteQuery& query) {
  if (query.size_bits <= 0) throw ConfigError("route query size must be positive");
  if (query.src < 0 || static_cast<std::size_t>(query.src) >= graph.node_count())
    throw ConfigError("unknown node");
  for (NodeIndex d : query.destinations)
    if (d < 0 || static_cast<std::size_t>(d) >= graph.node_count())
      throw ConfigError("unknown node");
  if (residuals.size() != graph.size()) throw InvariantError("residuals do not match the plan");

  if (std::find(query.destinations.begin(), query.destinations.end(), query.src) !=
      query.destinations.end())
    return Route{{}, query.t_now, std::numeric_limits<Bits>::max(), {}};

  const HopModel hm(graph, residuals, query);
  const TimeMs deadline = earliest_delivery(graph, hm, query);
  if (deadline == kNever) return std::nullopt;
  const std::size_t k = fewest_hops(graph, hm, query, deadline);

  // latest[j][c]: latest ready time at tx(c) such that c followed by exactly
  // j more hops still delivers by the deadline.
  const std::size_t m = graph.size();
  std::vector<std::vector<TimeMs>> latest(k, std::vector<TimeMs>(m, kTooLate));
  auto bound = [&](ContactIndex c, TimeMs must_arrive_by) {
    const TimeMs b = std::min(must_arrive_by, hm.end(c));
    return hm.start(c) + hm.duration(c) <= b ? b - hm.duration(c) : kTooLate;
  };
  for (ContactIndex c = 0; c < m; ++c)
    if (hm.eligible(c) && hm.is_dst(graph.rx(c))) latest[0][c] = bound(c, deadline);
  std::vector<TimeMs> node_latest(graph.node_count());
  for (std::size_t j = 1; j < k; ++j) {
    std::fill(node_latest.begin(), node_latest.end(), kTooLate);
    for (ContactIndex c = 0; c < m; ++c) {
      auto& slot = node_latest[static_cast<std::size_t>(graph.tx(c))];
      slot = std::max(slot, latest[j - 1][c]);
    }
    for (ContactIndex c = 0; c < m; ++c) {
      if (!hm.eligible(c) || hm.is_dst(graph.rx(c))) continue;
      const TimeMs after = node_latest[static_cast<std::size_t>(graph.rx(c))];
      if (after != kTooLate) latest[j][c] = bound(c, after);
    }
  }

  Route route;
  route.bottleneck_volume_bits = std::numeric_limits<Bits>::max();
  TimeMs ready = query.t_now;
  NodeIndex at = query.src;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& lat = latest[k - 1 - i];
    std::optional<ContactIndex> pick;
    for (ContactIndex c : graph.outgoing(at)) {
      if (lat[c] != kTooLate && lat[c] >= ready) {
        pick = c;
        break;
      }
    }
    if (!pick) throw InvariantError("routing: lexicographic reconstruction failed");
    ready = hm.arrive(*pick, ready);
    at = graph.rx(*pick);
    route.hops.push_back(*pick);
    route.arrivals_ms.push_back(ready);
    route.bottleneck_volume_bits = std::min(route.bottleneck_volume_bits, residuals[*pick]);
  }
  if (ready != deadline) throw InvariantError("routing: reconstructed route misses the deadline");
  route.best_delivery_ms = ready;
  return route;
}

std::optional<Route> best_route(const ContactGraph& graph, const Residuals& residuals,
                                std::string_view src, std::string_view dst, TimeMs t_now,
                                Bits size_bits) {
  RouteQuery q;
  q.src = graph.node(src);
  q.destinations = {graph.node(dst)};
  q.t_now = t_now;
  q.size_bits = size_bits;
  return best_route(graph, residuals, q);
}

void book(Residuals& residuals, std::span<const ContactIndex> hops, Bits size_bits) {
  for (ContactIndex c : hops)
    if (residuals[c] < size_bits) throw InvariantError("overbooked contact");
  for (ContactIndex c : hops) residuals[c] -= size_bits;
}

void book(Residuals& residuals, const Route& route, Bits size_bits) {
  book(residuals, route.hops, size_bits);
}

std::vector<std::string> hop_ids(const ContactGraph& graph, const Route& route) {
  std::vector<std::string> ids;
  ids.reserve(route.hops.size());
  for (ContactIndex c : route.hops) ids.push_back(graph.plan().contacts[c].contact_id);
  return ids;
}

}  // namespace hags::routing
