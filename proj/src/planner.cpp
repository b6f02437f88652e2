#include "medchain/planner.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <memory>

#include "medchain/errors.hpp"

namespace medchain {

void validate(const PlannerConfig& cfg) {
  if (cfg.iterations < 1) throw ValidationError("iterations", "must be >= 1");
  if (!(cfg.exploration_c > 0.0)) throw ValidationError("exploration_c", "must be > 0");
  if (cfg.max_rollout_depth < 0) throw ValidationError("max_rollout_depth", "must be >= 0");
  if (cfg.workers < 1) throw ValidationError("workers", "must be >= 1");
}

std::vector<TimelineEntry> timeline_of(const DispatchOption& opt) {
  std::vector<TimelineEntry> out;
  for (const auto& ev : opt.mission) {
    out.push_back({ev.kind, ev.time, ev.aircraft, ev.request, ev.watercraft, ev.facility});
  }
  std::sort(out.begin(), out.end(), [](const TimelineEntry& a, const TimelineEntry& b) {
    return std::tie(a.t, a.kind, a.aircraft) < std::tie(b.t, b.kind, b.aircraft);
  });
  return out;
}

namespace {

const EvacRequest* request_of(const WorldState& s, const std::string& id) { return s.find_pending(id); }

bool greedy_better(const DispatchOption& a, const DispatchOption& b) {
  return std::tie(a.predicted_delivery, a.action.aircraft_id, a.action.axp_watercraft_id,
                  a.action.receiving_aircraft_id) < std::tie(b.predicted_delivery, b.action.aircraft_id,
                                                             b.action.axp_watercraft_id,
                                                             b.action.receiving_aircraft_id);
}

DispatchAction greedy_unchecked(const WorldState& s) {
  std::vector<const EvacRequest*> order;
  for (const auto& r : s.pending) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const EvacRequest* a, const EvacRequest* b) {
    return std::tie(a->precedence, a->time_s, a->id) < std::tie(b->precedence, b->time_s, b->id);
  });
  for (const EvacRequest* r : order) {
    auto opts = dispatch_options(s, r->id);
    if (opts.empty()) continue;
    auto best = std::min_element(opts.begin(), opts.end(), greedy_better);
    return best->action;
  }
  return DispatchAction::hold();
}

struct Node {
  DispatchAction action;
  int visits = 0;
  double total = 0.0;
  std::vector<std::unique_ptr<Node>> children;

  double mean() const { return visits ? total / visits : 0.0; }
  Node* find(const DispatchAction& a) {
    for (auto& c : children) if (c->action == a) return c.get();
    return nullptr;
  }
  Node* add(const DispatchAction& a) {
    children.push_back(std::make_unique<Node>());
    children.back()->action = a;
    return children.back().get();
  }
};

class Search {
 public:
  Search(const WorldState& root, std::vector<DispatchAction> root_actions, const PlannerConfig& cfg,
         RandomStream rng)
      : root_state_(root), root_actions_(std::move(root_actions)), cfg_(cfg), rng_(std::move(rng)) {}

  void run(int iterations) {
    for (int i = 0; i < iterations; ++i) iterate();
  }

  const Node& root() const { return root_; }

 private:
  // Children of `node` that are legal now, with unvisited ones picked first in legal order.
  Node* select(Node& node, const std::vector<DispatchAction>& legal) {
    for (const auto& a : legal) {
      Node* c = node.find(a);
      if (!c) return node.add(a);
      if (c->visits == 0) return c;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    int parent_visits = 0;
    std::vector<Node*> kids;
    kids.reserve(legal.size());
    for (const auto& a : legal) {
      Node* c = node.find(a);
      kids.push_back(c);
      lo = std::min(lo, c->mean());
      hi = std::max(hi, c->mean());
      parent_visits += c->visits;
    }
    const double log_n = std::log(static_cast<double>(parent_visits));
    Node* best = nullptr;
    double best_score = -std::numeric_limits<double>::infinity();
    int ties = 0;
    for (Node* c : kids) {
      const double q = hi > lo ? (c->mean() - lo) / (hi - lo) : 0.5;
      const double score = q + cfg_.exploration_c * std::sqrt(log_n / c->visits);
      if (score > best_score) {
        best_score = score;
        best = c;
        ties = 1;
      } else if (score == best_score) {
        // Reservoir pick among exact ties.
        ++ties;
        if (rng_.next_u64() % static_cast<std::uint64_t>(ties) == 0) best = c;
      }
    }
    return best;
  }

  double rollout(WorldState state) {
    double ret = 0.0;
    for (int d = 0; d < cfg_.max_rollout_depth && !episode_over(state); ++d) {
      Transition tr = step(state, greedy_unchecked(state), rng_);
      ret += tr.reward;
      state = std::move(tr.next_state);
    }
    return ret;
  }

  void iterate() {
    WorldState state = root_state_;
    Node* node = &root_;
    std::vector<Node*> path;
    std::vector<double> rewards;
    double tail = 0.0;
    while (!episode_over(state)) {
      const bool at_root = node == &root_;
      std::vector<DispatchAction> legal = at_root ? root_actions_ : legal_actions(state);
      // Below the root, a hold with nothing left to wait for only stalls the
      // episode; its penalty would swamp the sibling means, so it is pruned.
      if (!at_root && legal.size() > 1 && !next_event_time(state)) legal.pop_back();
      const bool expanding = std::any_of(legal.begin(), legal.end(), [&](const DispatchAction& a) {
        const Node* c = node->find(a);
        return !c || c->visits == 0;
      });
      Node* child = select(*node, legal);
      Transition tr = step(state, child->action, rng_);
      path.push_back(child);
      rewards.push_back(tr.reward);
      state = std::move(tr.next_state);
      node = child;
      if (expanding) {
        tail = rollout(std::move(state));
        break;
      }
    }
    double g = tail;
    for (std::size_t i = path.size(); i-- > 0;) {
      g += rewards[i];
      path[i]->visits += 1;
      path[i]->total += g;
    }
    root_.visits += 1;
  }

  WorldState root_state_;
  std::vector<DispatchAction> root_actions_;
  PlannerConfig cfg_;
  RandomStream rng_;
  Node root_;
};

}  // namespace

DispatchAction greedy_policy(const WorldState& s) {
  if (is_terminal(s)) throw TerminalState("no decisions remain in a terminal state");
  return greedy_unchecked(s);
}

Recommendation plan(const WorldState& s_in, const PlannerConfig& cfg) {
  validate(cfg);
  if (is_terminal(s_in)) throw TerminalState("no decisions remain in a terminal state");
  WorldState s = s_in;
  s.config.stochastic = cfg.stochastic;

  std::vector<DispatchAction> actions = legal_actions(s);
  if (cfg.focus_request) {
    if (!request_of(s, *cfg.focus_request)) throw UnknownRequest("request not pending: " + *cfg.focus_request);
    std::erase_if(actions, [&](const DispatchAction& a) {
      return a.kind != ActionKind::hold && a.request_id != *cfg.focus_request;
    });
  }

  Recommendation rec;
  if (episode_over(s)) {
    // Stalled: nothing can ever be dispatched, only waiting is possible.
    rec.action = DispatchAction::hold();
    rec.visit_counts.push_back({rec.action, cfg.iterations, 0.0});
    return rec;
  }

  RandomStream base(cfg.seed);
  std::vector<std::unique_ptr<Search>> searches;
  for (int w = 0; w < cfg.workers; ++w) {
    searches.push_back(std::make_unique<Search>(s, actions, cfg, base.split(static_cast<std::uint64_t>(w))));
  }
  auto share = [&](int w) { return cfg.iterations / cfg.workers + (w < cfg.iterations % cfg.workers ? 1 : 0); };
  if (cfg.workers == 1) {
    searches[0]->run(share(0));
  } else {
    std::vector<std::future<void>> jobs;
    for (int w = 0; w < cfg.workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] { searches[w]->run(share(w)); }));
    }
    for (auto& j : jobs) j.get();
  }

  std::vector<double> totals(actions.size(), 0.0);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    VisitCount vc{actions[i], 0, 0.0};
    for (auto& search : searches) {
      for (const auto& c : search->root().children) {
        if (c->action == actions[i]) {
          vc.count += c->visits;
          totals[i] += c->total;
        }
      }
    }
    vc.mean_return = vc.count ? totals[i] / vc.count : 0.0;
    rec.visit_counts.push_back(vc);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < rec.visit_counts.size(); ++i) {
    const auto& a = rec.visit_counts[i];
    const auto& b = rec.visit_counts[best];
    if (a.count > b.count || (a.count == b.count && a.mean_return > b.mean_return)) best = i;
  }
  rec.action = rec.visit_counts[best].action;
  rec.estimated_return = rec.visit_counts[best].mean_return;
  if (auto opt = evaluate_action(s, rec.action)) rec.predicted_timeline = timeline_of(*opt);
  return rec;
}

}  // namespace medchain
