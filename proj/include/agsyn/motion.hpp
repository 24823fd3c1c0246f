#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "agsyn/lang_ops.hpp"
#include "agsyn/lstar.hpp"

namespace agsyn {

/// Regions, doors and the door map F_D. A pair with no doors is not connected.
struct Environment {
  std::vector<std::string> regions;
  std::vector<std::string> doors;
  std::vector<std::pair<std::string, std::string>> adjacency;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> door_map;
  std::map<std::string, std::string> initial;  // agent -> starting region

  [[nodiscard]] bool has_region(const std::string& v) const {
    return std::find(regions.begin(), regions.end(), v) != regions.end();
  }

  [[nodiscard]] const std::vector<std::string>& doors_between(const std::string& a, const std::string& b) const {
    static const std::vector<std::string> none;
    auto it = door_map.find({a, b});
    return it == door_map.end() ? none : it->second;
  }

  [[nodiscard]] bool connected(const std::string& a, const std::string& b) const { return !doors_between(a, b).empty(); }

  /// Same environment with `closed` doors removed from every F_D entry.
  [[nodiscard]] Environment without_doors(const std::set<std::string>& closed) const {
    Environment e = *this;
    for (auto& [pair, ds] : e.door_map)
      ds.erase(std::remove_if(ds.begin(), ds.end(), [&](const auto& d) { return closed.count(d) > 0; }), ds.end());
    return e;
  }

  void validate() const {
    std::set<std::string> v(regions.begin(), regions.end()), d(doors.begin(), doors.end());
    if (v.size() != regions.size()) throw InputError("environment: duplicate region");
    if (d.size() != doors.size()) throw InputError("environment: duplicate door");
    for (const auto& r : regions)
      if (d.count(r)) throw InputError("environment: '" + r + "' is both a region and a door");
    std::set<std::pair<std::string, std::string>> adj(adjacency.begin(), adjacency.end());
    for (const auto& [a, b] : adjacency)
      if (!v.count(a) || !v.count(b)) throw InputError("environment: adjacency uses unknown region");
    for (const auto& [pair, ds] : door_map) {
      if (!adj.count(pair)) throw InputError("environment: door map entry " + pair.first + "->" + pair.second + " is not adjacent");
      for (const auto& x : ds)
        if (!d.count(x)) throw InputError("environment: unknown door '" + x + "'");
    }
    for (const auto& [agent, r] : initial)
      if (!v.count(r)) throw InputError("environment: initial region of " + agent + " is unknown");
  }
};

/// Event -> regions where it may be performed.
using Labeling = std::map<std::string, std::vector<std::string>>;

/// G^m: states V, alphabet D, δ(v,d) = v' iff d ∈ F_D(v,v'), all marked, trimmed.
inline Dfa motion_dfa(const Environment& env, const std::string& initial) {
  if (!env.has_region(initial)) throw InputError("unknown initial region '" + initial + "'");
  DfaBuilder b{EventAlphabet(env.doors)};
  for (const auto& r : env.regions) b.state(r).mark(r);
  b.initial(initial);
  for (const auto& [a, c] : env.adjacency)
    for (const auto& d : env.doors_between(a, c)) b.edge(a, d, c);
  return accessible(b.build());
}

/// Run[L(G^m)] over V: the initial region, then stays and door moves.
inline Dfa run_language(const Dfa& motion, const std::vector<std::string>& regions) {
  DfaBuilder b{EventAlphabet(regions)};
  b.initial("start").mark("start");
  for (int q = 0; q < motion.num_states(); ++q) b.mark(motion.name(q)).edge(motion.name(q), motion.name(q), motion.name(q));
  b.edge("start", motion.name(motion.initial()), motion.name(motion.initial()));
  for (int q = 0; q < motion.num_states(); ++q)
    for (int e = 0; e < motion.num_events(); ++e) {
      int t = motion.next(q, e);
      if (t >= 0 && t != q) b.edge(motion.name(q), motion.name(t), motion.name(t));
    }
  return b.build();
}

namespace detail {

inline const std::vector<std::string>& regions_of(const Labeling& pi, const std::string& event) {
  auto it = pi.find(event);
  if (it == pi.end() || it->second.empty()) throw InputError("event '" + event + "' has no region in the labeling");
  return it->second;
}

inline bool contains(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

}  // namespace detail

/// Interleaves region announcements into a mission plan. A region symbol is
/// emitted whenever the next mission event needs a region other than the
/// current one; every (re)entry into the initial mission state announces the
/// home region first.
inline Dfa integrated_automaton(const Dfa& mission, const Labeling& pi, const std::string& home,
                                const std::vector<std::string>& regions) {
  for (const auto& e : mission.alphabet().events()) {
    for (const auto& r : detail::regions_of(pi, e))
      if (!detail::contains(regions, r)) throw InputError("labeling sends '" + e + "' to unknown region '" + r + "'");
    if (detail::contains(regions, e)) throw InputError("event '" + e + "' clashes with a region name");
  }
  if (!detail::contains(regions, home)) throw InputError("unknown initial region '" + home + "'");
  Dfa m = minimize(mark_all(trim(mission)));
  std::vector<std::string> sigma = regions;
  for (const auto& e : m.alphabet().events()) sigma.push_back(e);
  DfaBuilder b{EventAlphabet(sigma)};
  // (q, current region or "", fresh announcement)
  auto name = [&](int q, const std::string& cur, bool fresh) {
    return "(" + m.name(q) + "," + (cur.empty() ? "-" : cur) + (fresh ? ",*" : "") + ")";
  };
  b.initial(name(m.initial(), "", false));
  b.mark(name(m.initial(), "", false));
  if (is_empty(trim(mission))) return b.build();
  std::set<std::string> done;
  std::vector<std::tuple<int, std::string, bool>> work{{m.initial(), "", false}};
  auto visit = [&](int q, const std::string& cur, bool fresh) {
    auto n = name(q, cur, fresh);
    b.mark(n);
    if (!done.count(n)) {
      done.insert(n);
      work.emplace_back(q, cur, fresh);
    }
    return n;
  };
  done.insert(name(m.initial(), "", false));
  while (!work.empty()) {
    auto [q, cur, fresh] = work.back();
    work.pop_back();
    const auto src = name(q, cur, fresh);
    if (cur.empty()) {
      b.edge(src, home, visit(q, home, false));
      continue;
    }
    std::set<std::string> announce;
    for (int e = 0; e < m.num_events(); ++e) {
      int t = m.next(q, e);
      if (t < 0) continue;
      const auto& where = detail::regions_of(pi, m.alphabet()[e]);
      if (detail::contains(where, cur)) {
        b.edge(src, m.alphabet()[e], t == m.initial() ? visit(t, "", false) : visit(t, cur, false));
      } else if (!fresh) {
        for (const auto& r : where) announce.insert(r);
      }
    }
    for (const auto& r : regions)
      if (announce.count(r)) b.edge(src, r, visit(q, r, true));
  }
  return b.build();
}

/// π_i(L^mi): the region sequences of the integrated plan.
inline Dfa lift_mission_to_regions(const Dfa& mission, const Labeling& pi, const std::string& home,
                                   const std::vector<std::string>& regions) {
  return lift_to_alphabet(project(integrated_automaton(mission, pi, home, regions), regions), EventAlphabet(regions));
}

/// Membership: DFA(t) ⊨ π_i(L^mi_i).
inline bool mp_membership(const Word& t, const Dfa& lifted) {
  return satisfies(word_dfa(t, lifted.alphabet()), lifted);
}

namespace detail {

class MpTeacher : public Teacher {
 public:
  MpTeacher(const Dfa& lifted, const Dfa& run) : lifted_(lifted), run_(run) {}
  bool member(const IndexWord& t) override { return mp_membership(lifted_.alphabet().decode(t), lifted_); }
  std::optional<IndexWord> conjecture(const Dfa& h) override {
    const Dfa plan = trim(h);
    if (auto w = subset_counterexample(plan, run_)) return h.alphabet().encode(*w);
    if (auto w = difference_witness(h, lifted_)) return h.alphabet().encode(*w);
    return std::nullopt;
  }

 private:
  const Dfa& lifted_;
  const Dfa& run_;
};

}  // namespace detail

/// Adequacy: plan ⊨ lifted mission and plan ⊆ Run[L(G^m)].
inline bool is_adequate(const Dfa& plan, const Dfa& lifted, const Dfa& run) {
  return satisfies(plan, lifted) && language_subset(plan, run);
}

/// Learns an adequate motion plan for a mission plan.
inline Dfa synthesize_motion_plan(const Dfa& mission, const Labeling& pi, const Dfa& motion,
                                  const std::vector<std::string>& regions, const LearnOptions& opt = {}) {
  const std::string home = motion.name(motion.initial());
  Dfa lifted = lift_mission_to_regions(mission, pi, home, regions);
  Dfa run = run_language(motion, regions);
  if (auto w = subset_counterexample(lifted, run)) {
    std::string from = w->size() >= 2 ? (*w)[w->size() - 2] : home;
    throw InfeasibleError("mission needs the move " + from + " -> " + w->back() + ", which the motion model cannot make");
  }
  detail::MpTeacher teacher(lifted, run);
  Dfa plan = minimize(learn(teacher, EventAlphabet(regions), opt).dfa);
  if (!is_adequate(plan, lifted, run)) throw std::logic_error("learned motion plan is not adequate");
  return plan;
}

/// Door words whose region runs realise the plan (stays are free).
inline Dfa door_profile(const Dfa& plan, const Dfa& motion) {
  const std::string stay = "~";
  std::vector<std::string> sigma = motion.alphabet().events();
  sigma.push_back(stay);
  DfaBuilder b{EventAlphabet(sigma)};
  b.initial("start").mark("start");
  auto pe = [&](const std::string& v) { return plan.alphabet().find(v); };
  const std::string home = motion.name(motion.initial());
  auto first = pe(home);
  int p1 = first ? plan.next(plan.initial(), *first) : -1;
  if (p1 < 0) return project(b.build(), motion.alphabet());
  auto name = [&](int v, int p) { return motion.name(v) + "/" + plan.name(p); };
  std::set<std::pair<int, int>> seen{{motion.initial(), p1}};
  std::vector<std::pair<int, int>> work{{motion.initial(), p1}};
  b.edge("start", stay, name(motion.initial(), p1));
  while (!work.empty()) {
    auto [v, p] = work.back();
    work.pop_back();
    b.mark(name(v, p));
    auto go = [&](const std::string& ev, int v2, int p2) {
      b.edge(name(v, p), ev, name(v2, p2));
      if (seen.insert({v2, p2}).second) work.emplace_back(v2, p2);
    };
    if (auto s = pe(motion.name(v)); s && plan.next(p, *s) >= 0) go(stay, v, plan.next(p, *s));
    for (int d = 0; d < motion.num_events(); ++d) {
      int v2 = motion.next(v, d);
      if (v2 < 0) continue;
      auto r = pe(motion.name(v2));
      if (r && plan.next(p, *r) >= 0) go(motion.alphabet()[d], v2, plan.next(p, *r));
    }
  }
  return project(b.build(), motion.alphabet());
}

struct IntegratedPlan {
  std::string agent;
  std::string home;
  Dfa lp;        // over V ∪ Σ_i
  Dfa mission;   // P_Σ(lp)
  Dfa motion;    // P_V(lp)
  Dfa profile;   // over D
};

/// Checks the three integrated-plan clauses on every word up to `depth`.
inline std::optional<std::string> clause_violation(const Dfa& lp, const Labeling& pi, const std::string& home,
                                                   const Dfa& run, int depth) {
  const auto& run_sigma = run.alphabet();
  struct Frame {
    int q, rq;
    std::string cur, prev;
    Word w;
  };
  std::vector<Frame> stack{{lp.initial(), run.initial(), "", "", {}}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (static_cast<int>(f.w.size()) >= depth) continue;
    for (int e = 0; e < lp.num_events(); ++e) {
      int t = lp.next(f.q, e);
      if (t < 0) continue;
      const std::string& x = lp.alphabet()[e];
      Frame g{t, f.rq, f.cur, x, f.w};
      g.w.push_back(x);
      const bool region = run_sigma.contains(x);
      if (f.w.empty() && x != home) return "word " + to_string(g.w) + " does not start in " + home;
      if (region) {
        g.cur = x;
        g.rq = run.next(f.rq, *run_sigma.find(x));
        if (g.rq < 0) return "motion of " + to_string(g.w) + " is not a run of the motion model";
      } else {
        const auto& where = detail::regions_of(pi, x);
        if (!detail::contains(where, f.cur)) return "event " + x + " performed outside its region in " + to_string(g.w);
        if (!run_sigma.contains(f.prev) && !detail::contains(detail::regions_of(pi, f.prev), f.cur))
          return "consecutive events change region in " + to_string(g.w);
      }
      stack.push_back(std::move(g));
    }
  }
  return std::nullopt;
}

/// Builds LP_i and checks it against both components and the clauses.
inline IntegratedPlan integrate(const std::string& agent, const Dfa& mission, const Dfa& motion_plan, const Labeling& pi,
                                const Dfa& motion, const std::vector<std::string>& regions, int depth = 12) {
  const std::string home = motion.name(motion.initial());
  Dfa lp = minimize(integrated_automaton(mission, pi, home, regions));
  IntegratedPlan out{agent, home, lp, minimize(mark_all(trim(mission))), minimize(motion_plan), door_profile(motion_plan, motion)};
  std::vector<std::string> sigma = mission.alphabet().events();
  if (!language_equal(project(lp, regions), motion_plan)) throw std::logic_error(agent + ": integrated plan disagrees with the motion plan");
  if (!language_equal(project(lp, sigma), out.mission)) throw std::logic_error(agent + ": integrated plan disagrees with the mission plan");
  if (auto v = clause_violation(lp, pi, home, run_language(motion, regions), depth)) throw std::logic_error(agent + ": " + *v);
  return out;
}

struct ReplanResult {
  IntegratedPlan plan;
  std::vector<std::string> actions;
};

namespace detail {

// Shortest region path a -> b in env, neighbours tried in region-name order.
inline std::optional<std::vector<std::string>> shortest_route(const Environment& env, const std::string& a, const std::string& b) {
  std::map<std::string, std::string> parent{{a, ""}};
  std::vector<std::string> queue{a};
  std::vector<std::string> sorted = env.regions;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const auto v = queue[i];
    if (v == b) {
      std::vector<std::string> path;
      for (std::string x = b; x != a; x = parent[x]) path.push_back(x);
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (const auto& n : sorted)
      if (env.connected(v, n) && !parent.count(n)) {
        parent[n] = v;
        queue.push_back(n);
      }
  }
  return std::nullopt;
}

// Physical region at every state of an integrated plan.
inline std::vector<std::string> physical_regions(const Dfa& lp, const std::string& home, const EventAlphabet& regions) {
  std::vector<std::string> at(static_cast<std::size_t>(lp.num_states()));
  at[static_cast<std::size_t>(lp.initial())] = home;
  std::vector<int> queue{lp.initial()};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    int q = queue[i];
    for (int e = 0; e < lp.num_events(); ++e) {
      int t = lp.next(q, e);
      if (t < 0) continue;
      const auto& x = lp.alphabet()[e];
      std::string r = regions.contains(x) ? x : at[static_cast<std::size_t>(q)];
      auto& slot = at[static_cast<std::size_t>(t)];
      if (slot.empty()) {
        slot = r;
        queue.push_back(t);
      } else if (slot != r) {
        throw InputError("integrated plan leaves the agent's region ambiguous at state " + lp.name(t));
      }
    }
  }
  return at;
}

}  // namespace detail

/// Keeps the plan where alternative doors remain and splices the
/// shortest detour where a required pair of regions is cut off.
inline ReplanResult replan(const IntegratedPlan& plan, const Environment& real) {
  ReplanResult res{plan, {}};
  const EventAlphabet regions(real.regions);
  const Dfa& lp = plan.lp;
  auto at = detail::physical_regions(lp, plan.home, regions);
  Dfa real_motion = motion_dfa(real, plan.home);
  std::vector<std::string> names = lp.names();
  std::vector<std::vector<int>> delta = lp.delta();
  std::vector<bool> marked = lp.marked();
  std::set<std::pair<std::string, std::string>> reported;
  for (int q = 0; q < lp.num_states(); ++q)
    for (int e = 0; e < lp.num_events(); ++e) {
      int t = lp.next(q, e);
      const auto& to = lp.alphabet()[e];
      const auto& from = at[static_cast<std::size_t>(q)];
      if (t < 0 || !regions.contains(to) || to == from) continue;
      if (real.connected(from, to)) {
        if (reported.insert({from, to}).second)
          res.actions.push_back("keep " + from + "->" + to + " via " + real.doors_between(from, to).front());
        continue;
      }
      auto route = detail::shortest_route(real, from, to);
      if (!route) throw InfeasibleError(plan.agent + ": no route from " + from + " to " + to + " in the real environment");
      if (reported.insert({from, to}).second) {
        std::string via;
        for (std::size_t k = 0; k + 1 < route->size(); ++k) via += (k ? " " : "") + (*route)[k];
        res.actions.push_back("detour " + from + "->" + to + " through " + via);
      }
      // q -v1-> n1 -v2-> ... -to-> t
      int cur = q;
      for (std::size_t k = 0; k < route->size(); ++k) {
        int ev = *lp.alphabet().find((*route)[k]);
        int nxt = t;
        if (k + 1 < route->size()) {
          nxt = static_cast<int>(names.size());
          names.push_back(lp.name(q) + "~" + (*route)[k] + "~" + std::to_string(e));
          delta.emplace_back(static_cast<std::size_t>(lp.num_events()), -1);
          marked.push_back(true);
        }
        auto& slot = delta[static_cast<std::size_t>(cur)][static_cast<std::size_t>(ev)];
        if (k == 0 && ev != e && slot >= 0) throw InputError(plan.agent + ": detour through " + (*route)[k] + " collides with an existing move");
        slot = nxt;
        cur = nxt;
      }
      if ((*route)[0] != to) delta[static_cast<std::size_t>(q)][static_cast<std::size_t>(e)] = -1;
    }
  Dfa nlp = minimize(Dfa(lp.alphabet(), names, lp.initial(), delta, marked));
  std::vector<std::string> sigma;
  for (const auto& x : lp.alphabet().events())
    if (!regions.contains(x)) sigma.push_back(x);
  Dfa motion = lift_to_alphabet(project(nlp, real.regions), regions);
  res.plan = IntegratedPlan{plan.agent, plan.home, nlp, plan.mission, minimize(motion), door_profile(motion, real_motion)};
  if (!language_equal(project(nlp, sigma), project(lp, sigma))) throw std::logic_error(plan.agent + ": replanning changed the mission");
  Dfa run = run_language(real_motion, real.regions);
  if (!language_subset(motion, run)) throw std::logic_error(plan.agent + ": replanned motion is not a run of the real environment");
  return res;
}

struct DoorChange {
  int step = 0;
  std::string door;
  bool open = false;
};

struct TraceRecord {
  int step = 0;
  std::string agent;
  std::string symbol;
  std::string kind;  // region | door | mission | replan
};

inline std::string trace_to_text(const std::vector<TraceRecord>& trace) {
  std::ostringstream out;
  for (const auto& r : trace) out << r.step << ' ' << r.agent << ' ' << r.symbol << ' ' << r.kind << '\n';
  return out.str();
}

struct SimulationResult {
  std::vector<TraceRecord> trace;
  std::vector<IntegratedPlan> plans;  // after any replanning
  int replans = 0;
  std::vector<std::string> replan_actions;  // "agent: action"
};

/// Steps the joint plans once around the mission cycle. Each step fires the
/// first enabled symbol (agents in order, symbols in alphabet order). A move
/// through a closed door triggers replan() against the doors known closed.
inline SimulationResult simulate(std::vector<IntegratedPlan> plans, const Environment& nominal, const Environment& real,
                                 const std::vector<DoorChange>& schedule, int max_steps = 10000) {
  SimulationResult res;
  const std::size_t n = plans.size();
  if (n == 0) return res;
  const EventAlphabet regions(nominal.regions);
  std::vector<int> state(n);
  std::vector<std::string> at(n);
  std::vector<Environment> belief(n, nominal);
  std::vector<Word> history(n);
  for (std::size_t i = 0; i < n; ++i) {
    state[i] = plans[i].lp.initial();
    at[i] = plans[i].home;
  }
  std::set<std::string> closed;
  for (const auto& d : real.doors)
    if (std::none_of(real.door_map.begin(), real.door_map.end(), [&](const auto& kv) { return detail::contains(kv.second, d); }))
      closed.insert(d);
  for (const auto& [pair, ds] : nominal.door_map)
    for (const auto& d : ds)
      if (!detail::contains(real.doors_between(pair.first, pair.second), d)) closed.insert(d);
  bool moved = false;
  for (int step = 0; step < max_steps; ++step) {
    for (const auto& c : schedule)
      if (c.step == step) {
        if (c.open) closed.erase(c.door);
        else closed.insert(c.door);
      }
    const Environment now = nominal.without_doors(closed);
    bool fired = false;
    for (std::size_t i = 0; i < n && !fired; ++i) {
      const Dfa& lp = plans[i].lp;
      for (int e = 0; e < lp.num_events() && !fired; ++e) {
        if (lp.next(state[i], e) < 0) continue;
        const std::string& x = lp.alphabet()[e];
        if (regions.contains(x)) {
          if (x != at[i]) {
            const auto& ds = belief[i].doors_between(at[i], x);
            auto open = std::find_if(ds.begin(), ds.end(), [&](const auto& d) { return !closed.count(d); });
            if (ds.empty() || open != ds.begin()) {
              // The planned door is shut: replan against what is known now.
              const std::string blocked = ds.empty() ? at[i] + "->" + x : ds.front();
              belief[i] = now;
              auto r = replan(plans[i], now);
              plans[i] = r.plan;
              state[i] = plans[i].lp.run_from(plans[i].lp.initial(), plans[i].lp.alphabet().encode(history[i]));
              ++res.replans;
              for (const auto& a : r.actions) res.replan_actions.push_back(plans[i].agent + ": " + a);
              res.trace.push_back({step, plans[i].agent, blocked, "replan"});
              fired = true;
              break;
            }
            res.trace.push_back({step, plans[i].agent, *open, "door"});
          }
          res.trace.push_back({step, plans[i].agent, x, "region"});
          at[i] = x;
          state[i] = lp.next(state[i], e);
          history[i].push_back(x);
          fired = true;
          break;
        }
        // Shared mission event: every owner must be ready.
        std::vector<std::size_t> owners;
        bool ready = true;
        for (std::size_t j = 0; j < n; ++j) {
          auto ej = plans[j].lp.alphabet().find(x);
          if (!ej) continue;
          owners.push_back(j);
          ready = ready && plans[j].lp.next(state[j], *ej) >= 0;
        }
        if (!ready) continue;
        std::string who;
        for (std::size_t j : owners) {
          who += (who.empty() ? "" : ",") + plans[j].agent;
          state[j] = plans[j].lp.next(state[j], *plans[j].lp.alphabet().find(x));
          history[j].push_back(x);
        }
        res.trace.push_back({step, who, x, "mission"});
        moved = true;
        fired = true;
      }
    }
    bool home = true;
    for (std::size_t i = 0; i < n; ++i) home = home && state[i] == plans[i].lp.initial();
    if (moved && home) {
      res.plans = plans;
      return res;
    }
    if (!fired) {
      std::string where;
      for (std::size_t i = 0; i < n; ++i) where += " " + plans[i].agent + "@" + plans[i].lp.name(state[i]);
      throw InfeasibleError("deadlock at step " + std::to_string(step) + ":" + where);
    }
  }
  throw InfeasibleError("mission cycle not completed within " + std::to_string(max_steps) + " steps");
}

/// Region symbols of each plan prefixed with its agent, so that only mission
/// events synchronize in the joint composition.
inline Dfa rename_regions(const IntegratedPlan& p, const std::vector<std::string>& regions) {
  std::map<std::string, std::string> ren;
  for (const auto& r : regions) ren[r] = p.agent + "." + r;
  return rename_events(p.lp, ren);
}

}  // namespace agsyn
