#include "hags/engine.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hags/routing.hpp"
#include "text_util.hpp"

namespace hags::engine {

void StepSeries::set(TimeMs t, Bits bits) {
  auto& last = points_.back();
  if (t < last.t_ms) throw InvariantError("buffer series went back in time");
  if (t == last.t_ms) {
    last.bits = bits;
    if (points_.size() >= 2 && points_[points_.size() - 2].bits == bits) points_.pop_back();
  } else if (bits != last.bits) {
    points_.push_back({t, bits});
  }
}

std::size_t SimResult::delivered() const {
  return static_cast<std::size_t>(std::count_if(
      bundles.begin(), bundles.end(), [](const auto& b) { return b.delivered_at_ms.has_value(); }));
}

namespace {

using routing::ContactIndex;
using routing::NodeIndex;
using FragId = std::size_t;

enum class EventKind : int {
  transmission_complete = 0,
  contact_end = 1,
  weather_block_end = 2,
  weather_block_start = 3,
  contact_start = 4,
  bundle_generated = 5,
};

struct Event {
  TimeMs t;
  EventKind kind;
  std::size_t key;  // contact, site or bundle index
  std::uint64_t token;

  bool operator>(const Event& o) const {
    if (t != o.t) return t > o.t;
    if (kind != o.kind) return static_cast<int>(kind) > static_cast<int>(o.kind);
    if (key != o.key) return key > o.key;
    return token > o.token;
  }
};

enum class FragState { buffered, queued, in_flight, delivered, dropped };

struct Fragment {
  std::size_t bundle;
  Bits bits;
  NodeIndex at;
  FragState state = FragState::buffered;
  std::vector<ContactIndex> route;  // booked hops, route[0] is the queued contact
  std::uint64_t failed_epoch = std::numeric_limits<std::uint64_t>::max();
};

struct ContactState {
  bool active = false;
  std::deque<FragId> queue;
  std::optional<FragId> in_flight;
  TimeMs tx_start = 0;
  std::uint64_t token = 0;
};

struct BundleState {
  BundleRecord record;
  Bits delivered_bits = 0;
  Bits dropped_bits = 0;
};

class Simulator {
 public:
  Simulator(const ScenarioConfig& s, const plan::ContactPlan& geometric,
            const weather::WeatherPlan& weather, std::uint64_t rep, const RunOptions& opt)
      : cfg_(s),
        opt_(opt),
        weather_(weather),
        plan_(prepare_plan(s, geometric, weather)),
        graph_(plan_, node_ids(s)),
        residuals_(plan_),
        contacts_(plan_.contacts.size()) {
    result_.replication = rep;
    result_.seed = s.seed;
    result_.duration_ms = s.duration_ms;
    result_.scenario = s.echo();

    const auto n = graph_.node_count();
    is_dst_.assign(n, 0);
    buffered_.assign(n, 0);
    pending_.resize(n);
    series_.resize(n);
    for (const auto& gs : s.destinations()) {
      const NodeIndex d = graph_.node(gs);
      destinations_.push_back(d);
      is_dst_[static_cast<std::size_t>(d)] = 1;
    }
    source_ = graph_.node(s.traffic.source);
    for (const auto& node : s.nodes())
      if (node.kind == plan::NodeKind::hags) result_.hags_nodes.push_back(node.id);
  }

  SimResult run() {
    log("run rep={} seed={} scheme={} mode={}", result_.replication, result_.seed,
        cfg_.scheme_name(), to_string(cfg_.mode));
    schedule_initial_events();
    while (!events_.empty()) {
      const Event ev = events_.top();
      events_.pop();
      now_ = ev.t;
      dispatch(ev);
      if (!retry_.empty() && now_ > retry_time_) retry_failed();
      if (residual_epoch_ != swept_epoch_) {
        swept_epoch_ = residual_epoch_;
        for (std::size_t n = 0; n < pending_.size(); ++n) reconsider(static_cast<NodeIndex>(n));
      }
      if (opt_.check_conservation) check_conservation();
    }
    for (std::size_t i = 0; i < series_.size(); ++i)
      result_.bo_series[graph_.node_name(static_cast<NodeIndex>(i))] = series_[i];
    for (auto& b : bundles_) result_.bundles.push_back(std::move(b.record));
    return std::move(result_);
  }

 private:
  static plan::ContactPlan prepare_plan(const ScenarioConfig& s, const plan::ContactPlan& geometric,
                                        const weather::WeatherPlan& weather) {
    if (geometric.horizon_ms < s.duration_ms)
      throw ConfigError("contact plan does not cover the scenario duration");
    if (weather.horizon_ms < s.duration_ms)
      throw ConfigError("weather plan does not cover the scenario duration");
    geometric.validate();
    weather.validate();
    std::set<std::string> known;
    for (const auto& n : s.nodes()) known.insert(n.id);
    for (const auto& c : geometric.contacts) {
      if (!known.count(c.tx) || !known.count(c.rx))
        throw ConfigError(fmt::format("contact {} names a node outside the scenario ({} -> {})",
                                      c.contact_id, c.tx, c.rx));
      if (c.weather_site && !weather.has_site(*c.weather_site))
        throw ConfigError(fmt::format("contact {}: unresolved weather site '{}'", c.contact_id,
                                      *c.weather_site));
    }
    for (const auto& site : s.weather_sites())
      if (!weather.has_site(site))
        throw ConfigError(fmt::format("weather plan lacks site '{}'", site));
    return s.mode == WeatherMode::oracle ? plan::carve(geometric, weather) : geometric;
  }

  static std::vector<std::string> node_ids(const ScenarioConfig& s) {
    std::vector<std::string> ids;
    for (const auto& n : s.nodes()) ids.push_back(n.id);
    return ids;
  }

  template <class... Args>
  void log(fmt::format_string<Args...> f, Args&&... args) {
    if (!opt_.record_log) return;
    result_.event_log += fmt::format("{} ", now_);
    result_.event_log += fmt::format(f, std::forward<Args>(args)...);
    result_.event_log += '\n';
  }

  const std::string& name(NodeIndex n) const { return graph_.node_name(n); }
  const plan::Contact& contact(ContactIndex c) const { return plan_.contacts[c]; }
  bool is_dst(NodeIndex n) const { return is_dst_[static_cast<std::size_t>(n)] != 0; }

  void push(TimeMs t, EventKind kind, std::size_t key, std::uint64_t token = 0) {
    if (t > cfg_.duration_ms) return;
    events_.push({t, kind, key, token});
  }

  void schedule_initial_events() {
    for (ContactIndex c = 0; c < plan_.contacts.size(); ++c) {
      push(contact(c).start_ms, EventKind::contact_start, c);
      push(contact(c).end_ms, EventKind::contact_end, c);
    }
    if (cfg_.mode == WeatherMode::reactive) {
      for (ContactIndex c = 0; c < plan_.contacts.size(); ++c)
        if (const auto& w = contact(c).weather_site) site_contacts_[*w].push_back(c);
      std::size_t k = 0;
      for (const auto& [site, list] : weather_.intervals) {
        site_names_.push_back(site);
        blocked_.push_back(0);
        for (const auto& b : list) {
          push(b.start_ms, EventKind::weather_block_start, k);
          push(b.end_ms, EventKind::weather_block_end, k);
        }
        ++k;
      }
    }
    for (int i = 0; i < cfg_.traffic.count; ++i) {
      BundleState b;
      b.record.bundle_id = fmt::format("b{}", i + 1);
      b.record.size_bits = cfg_.traffic.size_bits;
      b.record.t_gen_ms = cfg_.traffic.generation_time(i);
      bundles_.push_back(std::move(b));
      push(bundles_.back().record.t_gen_ms, EventKind::bundle_generated,
           static_cast<std::size_t>(i));
    }
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EventKind::transmission_complete: on_transmission_complete(ev.key, ev.token); break;
      case EventKind::contact_end: on_contact_end(ev.key); break;
      case EventKind::weather_block_end: on_block_end(ev.key); break;
      case EventKind::weather_block_start: on_block_start(ev.key); break;
      case EventKind::contact_start: on_contact_start(ev.key); break;
      case EventKind::bundle_generated: on_generated(ev.key); break;
    }
  }

  // --- buffers -------------------------------------------------------------

  void adjust(NodeIndex n, Bits delta) {
    auto& b = buffered_[static_cast<std::size_t>(n)];
    b += delta;
    if (b < 0) throw InvariantError(fmt::format("negative buffer at {}", name(n)));
    series_[static_cast<std::size_t>(n)].set(now_, b);
  }

  bool fits(NodeIndex n, Bits bits) const {
    return cfg_.buffer_capacity_bits == 0 ||
           buffered_[static_cast<std::size_t>(n)] + bits <= cfg_.buffer_capacity_bits;
  }

  void note_custody(std::size_t bundle, NodeIndex n) {
    auto& path = bundles_[bundle].record.custodian_path;
    if (std::find(path.begin(), path.end(), name(n)) == path.end()) path.push_back(name(n));
  }

  // --- routing -------------------------------------------------------------

  void release(FragId f, std::size_t from_hop) {
    auto& fr = frags_[f];
    if (fr.route.size() > from_hop) {
      routing::book(residuals_,
                    std::span<const ContactIndex>(fr.route).subspan(from_hop), -fr.bits);
      ++residual_epoch_;
    }
    fr.route.clear();
  }

  void route(FragId f) {
    auto& fr = frags_[f];
    routing::RouteQuery q{fr.at, destinations_, now_, fr.bits};
    auto r = routing::best_route(graph_, residuals_, q);
    if (!r) {
      fr.state = FragState::buffered;
      fr.failed_epoch = residual_epoch_;
      pending_[static_cast<std::size_t>(fr.at)].push_back(f);
      log("route frag={} node={} none", f, name(fr.at));
      return;
    }
    routing::book(residuals_, *r, fr.bits);
    fr.route = r->hops;
    if (opt_.record_log) {
      std::string hops;
      for (ContactIndex c : r->hops) hops += (hops.empty() ? "" : ",") + contact(c).contact_id;
      log("route frag={} node={} hops={} eta={}", f, name(fr.at), hops, r->best_delivery_ms);
    }
    fr.state = FragState::queued;
    contacts_[r->hops.front()].queue.push_back(f);
    try_start(r->hops.front());
  }

  /// Re-routes waiting fragments at `n`; a fragment that already failed
  /// stays put until some booking has been released, since with fixed
  /// residuals a later query can only see fewer options.
  void reconsider(NodeIndex n) {
    auto& list = pending_[static_cast<std::size_t>(n)];
    if (list.empty()) return;
    std::vector<FragId> waiting;
    waiting.swap(list);
    for (FragId f : waiting) {
      if (frags_[f].failed_epoch == residual_epoch_)
        list.push_back(f);
      else
        route(f);
    }
  }

  void retry_failed() {
    std::vector<FragId> again;
    again.swap(retry_);
    for (FragId f : again) route(f);
  }

  // --- transmission --------------------------------------------------------

  bool blocked(ContactIndex c) const {
    if (cfg_.mode != WeatherMode::reactive) return false;
    const auto& w = contact(c).weather_site;
    if (!w) return false;
    auto it = std::find(site_names_.begin(), site_names_.end(), *w);
    return blocked_[static_cast<std::size_t>(it - site_names_.begin())] != 0;
  }

  void fail_queue(ContactIndex c) {
    auto& cs = contacts_[c];
    for (FragId f : cs.queue) {
      release(f, 0);
      frags_[f].state = FragState::buffered;
      retry_.push_back(f);
      log("tx_fail frag={} c={}", f, contact(c).contact_id);
    }
    cs.queue.clear();
    retry_time_ = now_;
  }

  void try_start(ContactIndex c) {
    auto& cs = contacts_[c];
    if (!cs.active || cs.in_flight || cs.queue.empty()) return;
    if (blocked(c)) {
      fail_queue(c);
      return;
    }
    const FragId f = cs.queue.front();
    cs.queue.pop_front();
    cs.in_flight = f;
    cs.tx_start = now_;
    frags_[f].state = FragState::in_flight;
    const TimeMs finish = now_ + transmission_ms(frags_[f].bits, contact(c).rate_bps);
    log("tx_start frag={} c={}", f, contact(c).contact_id);
    if (finish <= contact(c).end_ms) push(finish, EventKind::transmission_complete, c, ++cs.token);
  }

  void record_transmission(ContactIndex c, Bits bits) {
    if (!opt_.record_transmissions) return;
    const auto& k = contact(c);
    result_.transmissions.push_back({k.contact_id, k.tx, k.rx, contacts_[c].tx_start, now_, bits});
  }

  /// Fragment `f` (already off the sender's books) lands at `n`.
  void arrive(FragId f, NodeIndex n) {
    auto& fr = frags_[f];
    fr.at = n;
    note_custody(fr.bundle, n);
    auto& b = bundles_[fr.bundle];
    if (is_dst(n)) {
      fr.state = FragState::delivered;
      b.delivered_bits += fr.bits;
      if (b.delivered_bits == b.record.size_bits && !b.record.dropped) {
        b.record.delivered_at_ms = now_;
        log("deliver b={}", b.record.bundle_id);
      }
      return;
    }
    if (!fits(n, fr.bits)) {
      drop(f, n);
      return;
    }
    adjust(n, fr.bits);
    route(f);
  }

  void drop(FragId f, NodeIndex n) {
    auto& fr = frags_[f];
    fr.state = FragState::dropped;
    bundles_[fr.bundle].dropped_bits += fr.bits;
    bundles_[fr.bundle].record.dropped = true;
    result_.dropped_bits += fr.bits;
    log("drop frag={} b={} node={} bits={}", f, bundles_[fr.bundle].record.bundle_id, name(n),
        fr.bits);
  }

  /// Cuts the in-flight transmission on `c` short at now_. The bits already
  /// sent become a new fragment at the receiver; the rest stays with the
  /// sender. Returns the remainder.
  FragId cut_transmission(ContactIndex c, bool free_unsent) {
    auto& cs = contacts_[c];
    const FragId f = *cs.in_flight;
    cs.in_flight.reset();
    ++cs.token;
    const Bits sent = std::min(bits_in(now_ - cs.tx_start, contact(c).rate_bps), frags_[f].bits - 1);
    if (free_unsent) {
      residuals_[c] += frags_[f].bits - sent;
      ++residual_epoch_;
    }
    release(f, 1);
    frags_[f].state = FragState::buffered;
    if (sent > 0) {
      record_transmission(c, sent);
      const FragId g = frags_.size();
      frags_.push_back(Fragment{frags_[f].bundle, sent, graph_.tx(c), FragState::buffered, {}});
      frags_[f].bits -= sent;
      adjust(graph_.tx(c), -sent);
      log("split frag={} new={} b={} c={} tx={} rx={} bits={}", f, g,
          bundles_[frags_[f].bundle].record.bundle_id, contact(c).contact_id, name(graph_.tx(c)),
          name(graph_.rx(c)), sent);
      arrive(g, graph_.rx(c));
    }
    return f;
  }

  // --- event handlers ------------------------------------------------------

  void on_generated(std::size_t i) {
    auto& b = bundles_[i];
    const FragId f = frags_.size();
    frags_.push_back(Fragment{i, b.record.size_bits, source_, FragState::buffered, {}});
    result_.generated_bits += b.record.size_bits;
    note_custody(i, source_);
    log("generate b={} frag={} node={} bits={}", b.record.bundle_id, f, name(source_),
        b.record.size_bits);
    if (is_dst(source_)) {
      arrive(f, source_);
      return;
    }
    if (!fits(source_, b.record.size_bits)) {
      drop(f, source_);
      return;
    }
    adjust(source_, b.record.size_bits);
    route(f);
  }

  void on_contact_start(ContactIndex c) {
    contacts_[c].active = true;
    log("contact_start c={} tx={} rx={}", contact(c).contact_id, contact(c).tx, contact(c).rx);
    reconsider(graph_.tx(c));
    reconsider(graph_.rx(c));
    try_start(c);
  }

  void on_contact_end(ContactIndex c) {
    auto& cs = contacts_[c];
    cs.active = false;
    log("contact_end c={}", contact(c).contact_id);
    std::vector<FragId> reroute;
    if (cs.in_flight) reroute.push_back(cut_transmission(c, false));
    for (FragId f : cs.queue) {
      release(f, 1);
      frags_[f].state = FragState::buffered;
      reroute.push_back(f);
    }
    cs.queue.clear();
    for (FragId f : reroute) route(f);
  }

  void on_transmission_complete(ContactIndex c, std::uint64_t token) {
    auto& cs = contacts_[c];
    if (!cs.in_flight || token != cs.token) return;
    const FragId f = *cs.in_flight;
    cs.in_flight.reset();
    record_transmission(c, frags_[f].bits);
    adjust(graph_.tx(c), -frags_[f].bits);
    log("tx_complete frag={} b={} c={} tx={} rx={} bits={}", f,
        bundles_[frags_[f].bundle].record.bundle_id, contact(c).contact_id, name(graph_.tx(c)),
        name(graph_.rx(c)), frags_[f].bits);
    release(f, 1);
    arrive(f, graph_.rx(c));
    try_start(c);
  }

  void on_block_start(std::size_t site) {
    blocked_[site] = 1;
    log("weather_block_start site={}", site_names_[site]);
    for (ContactIndex c : site_contacts_[site_names_[site]]) {
      auto& cs = contacts_[c];
      if (!cs.active) continue;
      if (cs.in_flight) {
        const FragId rest = cut_transmission(c, true);
        retry_.push_back(rest);
        retry_time_ = now_;
        log("tx_fail frag={} c={}", rest, contact(c).contact_id);
      }
      fail_queue(c);
    }
  }

  void on_block_end(std::size_t site) {
    blocked_[site] = 0;
    log("weather_block_end site={}", site_names_[site]);
    for (ContactIndex c : site_contacts_[site_names_[site]]) {
      if (!contacts_[c].active) continue;
      reconsider(graph_.tx(c));
      try_start(c);
    }
  }

  // --- invariants ----------------------------------------------------------

  void check_conservation() const {
    Bits buffered = 0;
    for (Bits b : buffered_) buffered += b;
    Bits delivered = 0;
    for (const auto& b : bundles_) delivered += b.delivered_bits;
    if (result_.generated_bits != delivered + buffered + result_.dropped_bits)
      throw InvariantError(fmt::format(
          "t={}: bits not conserved (generated {} != delivered {} + buffered {} + dropped {})",
          now_, result_.generated_bits, delivered, buffered, result_.dropped_bits));

    std::vector<Bits> live(bundles_.size(), 0);
    std::vector<Bits> per_node(buffered_.size(), 0);
    for (const auto& fr : frags_) {
      if (fr.state == FragState::delivered || fr.state == FragState::dropped) continue;
      live[fr.bundle] += fr.bits;
      per_node[static_cast<std::size_t>(fr.at)] += fr.bits;
    }
    if (per_node != buffered_)
      throw InvariantError(fmt::format("t={}: buffer totals disagree with fragment custody", now_));
    std::size_t n_delivered = 0, n_dropped = 0, n_buffered = 0, n_generated = 0;
    for (std::size_t i = 0; i < bundles_.size(); ++i) {
      const auto& b = bundles_[i];
      if (b.record.t_gen_ms > now_ || (b.record.t_gen_ms == now_ && b.record.custodian_path.empty()))
        continue;
      ++n_generated;
      if (b.delivered_bits + b.dropped_bits + live[i] != b.record.size_bits)
        throw InvariantError(fmt::format("t={}: bundle {} lost bits", now_, b.record.bundle_id));
      if (b.record.delivered_at_ms) ++n_delivered;
      else if (b.record.dropped) ++n_dropped;
      else if (live[i] > 0) ++n_buffered;
    }
    if (n_generated != n_delivered + n_buffered + n_dropped)
      throw InvariantError(fmt::format("t={}: bundles not conserved", now_));
  }

  const ScenarioConfig& cfg_;
  RunOptions opt_;
  const weather::WeatherPlan& weather_;
  plan::ContactPlan plan_;
  routing::ContactGraph graph_;
  routing::Residuals residuals_;
  std::vector<ContactState> contacts_;

  std::vector<NodeIndex> destinations_;
  std::vector<char> is_dst_;
  NodeIndex source_ = 0;
  std::vector<Bits> buffered_;
  std::vector<StepSeries> series_;
  std::vector<std::vector<FragId>> pending_;
  std::vector<FragId> retry_;
  TimeMs retry_time_ = 0;
  std::uint64_t residual_epoch_ = 0;
  std::uint64_t swept_epoch_ = 0;

  std::vector<std::string> site_names_;
  std::vector<char> blocked_;
  std::unordered_map<std::string, std::vector<ContactIndex>> site_contacts_;

  std::vector<Fragment> frags_;
  std::vector<BundleState> bundles_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  TimeMs now_ = 0;
  SimResult result_;
};

}  // namespace

SimResult run(const ScenarioConfig& scenario, const plan::ContactPlan& contacts,
              const weather::WeatherPlan& weather, std::uint64_t replication,
              const RunOptions& options) {
  scenario.validate();
  Simulator sim(scenario, contacts, weather, replication, options);
  return sim.run();
}

SimResult replay(const ScenarioConfig& scenario, std::string_view event_log) {
  SimResult out;
  out.duration_ms = scenario.duration_ms;
  out.seed = scenario.seed;
  out.scenario = scenario.echo();
  std::set<std::string> destinations(scenario.gs_sites.begin(), scenario.gs_sites.end());
  for (const auto& n : scenario.nodes()) {
    out.bo_series[n.id];
    if (n.kind == plan::NodeKind::hags) out.hags_nodes.push_back(n.id);
  }
  std::map<std::string, Bits> level;
  std::unordered_map<std::string, std::size_t> bundle_index;

  auto field = [](const std::vector<std::string_view>& tok, std::string_view key) {
    for (auto t : tok)
      if (t.size() > key.size() && t.substr(0, key.size()) == key && t[key.size()] == '=')
        return t.substr(key.size() + 1);
    throw ConfigError(fmt::format("event log line lacks '{}'", key));
  };
  auto bits_of = [&](const auto& tok) { return detail::parse_number<Bits>(field(tok, "bits"), "bits"); };
  auto change = [&](const std::string& node, TimeMs t, Bits delta) {
    out.bo_series[node].set(t, level[node] += delta);
  };
  auto custody = [&](std::string_view bundle, std::string_view node) {
    auto& path = out.bundles.at(bundle_index.at(std::string(bundle))).custodian_path;
    if (std::find(path.begin(), path.end(), node) == path.end()) path.emplace_back(node);
  };
  // A transfer into a relay is provisional until we know it was not dropped.
  auto land = [&](const std::string& node, TimeMs t, Bits bits) {
    if (!destinations.count(node)) change(node, t, bits);
  };

  for (auto line : detail::split_lines(event_log)) {
    if (detail::trim(line).empty()) continue;
    const auto tok = detail::split_ws(line);
    if (tok.size() < 2) throw ConfigError("malformed event log line");
    const TimeMs t = detail::parse_number<TimeMs>(tok[0], "time");
    const auto kind = tok[1];
    if (kind == "run") {
      out.replication = detail::parse_number<std::uint64_t>(field(tok, "rep"), "rep");
      out.seed = detail::parse_number<std::uint64_t>(field(tok, "seed"), "seed");
    } else if (kind == "generate") {
      BundleRecord b;
      b.bundle_id = std::string(field(tok, "b"));
      b.size_bits = bits_of(tok);
      b.t_gen_ms = t;
      bundle_index[b.bundle_id] = out.bundles.size();
      out.bundles.push_back(std::move(b));
      out.generated_bits += out.bundles.back().size_bits;
      const std::string node(field(tok, "node"));
      custody(field(tok, "b"), node);
      land(node, t, out.bundles.back().size_bits);
    } else if (kind == "tx_complete" || kind == "split") {
      const std::string tx(field(tok, "tx")), rx(field(tok, "rx"));
      const Bits bits = bits_of(tok);
      change(tx, t, -bits);
      custody(field(tok, "b"), rx);
      land(rx, t, bits);
    } else if (kind == "drop") {
      const std::string node(field(tok, "node"));
      change(node, t, -bits_of(tok));
      out.bundles.at(bundle_index.at(std::string(field(tok, "b")))).dropped = true;
      out.dropped_bits += bits_of(tok);
    } else if (kind == "deliver") {
      out.bundles.at(bundle_index.at(std::string(field(tok, "b")))).delivered_at_ms = t;
    }
  }
  return out;
}

std::string result_to_json(const SimResult& r) {
  nlohmann::ordered_json j;
  j["replication"] = r.replication;
  j["seed"] = r.seed;
  j["duration_s"] = ms_to_seconds(r.duration_ms);
  auto& scen = j["scenario"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.scenario) {
    if (k == "site") scen["site"].push_back(v);
    else scen[k] = v;
  }
  auto& bundles = j["bundles"] = nlohmann::ordered_json::array();
  for (const auto& b : r.bundles) {
    nlohmann::ordered_json rec;
    rec["bundle_id"] = b.bundle_id;
    rec["size_bits"] = b.size_bits;
    rec["t_gen_s"] = ms_to_seconds(b.t_gen_ms);
    rec["delivered_at_s"] =
        b.delivered_at_ms ? nlohmann::ordered_json(ms_to_seconds(*b.delivered_at_ms))
                          : nlohmann::ordered_json(nullptr);
    rec["custodian_path"] = b.custodian_path;
    rec["dropped"] = b.dropped;
    bundles.push_back(std::move(rec));
  }
  auto& bo = j["bo_series"] = nlohmann::ordered_json::object();
  for (const auto& [node, series] : r.bo_series) {
    auto& pts = bo[node] = nlohmann::ordered_json::array();
    for (const auto& p : series.points()) pts.push_back({ms_to_seconds(p.t_ms), p.bits});
  }
  j["generated_bits"] = r.generated_bits;
  j["dropped_bits"] = r.dropped_bits;
  return j.dump(1) + "\n";
}

}  // namespace hags::engine
