#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "agsyn/lang_ops.hpp"
#include "agsyn/ls_synthesis.hpp"
#include "agsyn/lstar.hpp"

namespace agsyn {

namespace detail {

// complete(P) with only q_e marked: L_m is the set of runs that leave L(P).
inline Dfa error_watcher(const Dfa& p) {
  auto c = complete(p);
  std::vector<bool> marked(static_cast<std::size_t>(c.dfa.num_states()), false);
  marked[static_cast<std::size_t>(c.error_state)] = true;
  return Dfa(c.dfa.alphabet(), c.dfa.names(), c.dfa.initial(), c.dfa.delta(), std::move(marked));
}

inline std::optional<Word> shortest_accepted(const Dfa& d) {
  return subset_counterexample(d, empty_dfa(d.alphabet()));
}

// Shortest (then lex-least) v with δ(q, v) marked.
inline std::optional<IndexWord> shortest_extension(const Dfa& d, int q) {
  std::vector<int> parent(static_cast<std::size_t>(d.num_states()), -2), via(static_cast<std::size_t>(d.num_states()), -1);
  std::vector<int> queue{q};
  parent[static_cast<std::size_t>(q)] = -1;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    int s = queue[i];
    if (d.is_marked(s)) {
      IndexWord w;
      for (int x = s; parent[static_cast<std::size_t>(x)] >= 0; x = parent[static_cast<std::size_t>(x)])
        w.push_back(via[static_cast<std::size_t>(x)]);
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (int e = 0; e < d.num_events(); ++e) {
      int t = d.next(s, e);
      if (t >= 0 && parent[static_cast<std::size_t>(t)] == -2) {
        parent[static_cast<std::size_t>(t)] = s;
        via[static_cast<std::size_t>(t)] = e;
        queue.push_back(t);
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

namespace detail {

// Shortest-lex word of A || M that leaves L(P); A and M already trimmed.
// Searches the triple product directly, q_e being the first undefined P move.
inline std::optional<Word> triple_search(const Dfa& a, const Dfa& m, const Dfa& p) {
  if (is_empty(a) || is_empty(m)) return std::nullopt;
  EventAlphabet u = a.alphabet().united(m.alphabet());
  if (!p.alphabet().is_subset_of(u))
    throw InputError("property alphabet must lie within the assumption and module alphabets");
  const auto ea = event_map(u, a.alphabet()), em = event_map(u, m.alphabet()), ep = event_map(u, p.alphabet());
  const auto nm = static_cast<long long>(m.num_states()), np = static_cast<long long>(p.num_states());
  auto key = [&](int x, int y, int z) { return (static_cast<long long>(x) * nm + y) * np + z; };
  struct Node {
    int a, m, p, parent, event;
  };
  std::vector<Node> nodes{{a.initial(), m.initial(), p.initial(), -1, -1}};
  std::unordered_map<long long, int> seen{{key(a.initial(), m.initial(), p.initial()), 0}};
  auto path = [&](int n, int last) {
    IndexWord w{last};
    for (; nodes[static_cast<std::size_t>(n)].parent >= 0; n = nodes[static_cast<std::size_t>(n)].parent)
      w.push_back(nodes[static_cast<std::size_t>(n)].event);
    std::reverse(w.begin(), w.end());
    return u.decode(w);
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node cur = nodes[i];
    for (int e = 0; e < static_cast<int>(u.size()); ++e) {
      const int ia = ea[static_cast<std::size_t>(e)], im = em[static_cast<std::size_t>(e)], ip = ep[static_cast<std::size_t>(e)];
      int na = ia < 0 ? cur.a : a.next(cur.a, ia);
      int nm2 = im < 0 ? cur.m : m.next(cur.m, im);
      if (na < 0 || nm2 < 0) continue;
      int npp = ip < 0 ? cur.p : p.next(cur.p, ip);
      if (npp < 0) return path(static_cast<int>(i), e);
      auto [it, fresh] = seen.emplace(key(na, nm2, npp), static_cast<int>(nodes.size()));
      if (fresh) nodes.push_back({na, nm2, npp, static_cast<int>(i), e});
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// ⟨A⟩M⟨P⟩ on generated languages: q_e of complete(P) must be unreachable in
/// A || M || complete(P). A and M are read through their trimmed (accepted)
/// behaviour. Returns the shortest word reaching q_e.
inline std::optional<Word> check_triple(const Dfa& a, const Dfa& m, const Dfa& p) {
  return detail::triple_search(trim(a), trim(m), p);
}

/// Membership of t in the weakest assumption: ⟨DFA(t)⟩M⟨P⟩.
inline bool cv_membership(const Word& t, const Dfa& m, const Dfa& p, const EventAlphabet& sigma_a) {
  return !check_triple(word_dfa(t, sigma_a), m, p);
}

/// Default interface alphabet: events shared by all agents plus the
/// property's events, in the order of `global`.
inline EventAlphabet default_assumption_alphabet(const std::vector<EventAlphabet>& agents, const Dfa& p,
                                                 const EventAlphabet& global) {
  std::vector<std::string> keep;
  for (const auto& e : global.events()) {
    bool shared = std::all_of(agents.begin(), agents.end(), [&](const auto& a) { return a.contains(e); });
    if (shared || p.alphabet().contains(e)) keep.push_back(e);
  }
  return global.restricted_to(keep);
}

/// The weakest assumption over Σ_A built directly: words none of whose
/// prefixes is the Σ_A-shadow of a run of M that leaves L(P).
inline Dfa weakest_assumption(const Dfa& m, const Dfa& p, const EventAlphabet& sigma_a) {
  EventAlphabet u = sigma_a.united(m.alphabet()).united(p.alphabet());
  Dfa viol = parallel_compose(lift_to_alphabet(mark_all(trim(m)), u), lift_to_alphabet(detail::error_watcher(p), u));
  Dfa shadow = project(viol, sigma_a.events());
  Dfa w = prefix_close_largest(complement(shadow));
  return lift_to_alphabet(w, sigma_a);
}

struct AssumptionResult {
  Dfa assumption;  // minimal, accepted language
  LearnResult learning;
};

namespace detail {

class CvTeacher : public Teacher {
 public:
  CvTeacher(const Dfa& m, const Dfa& p, EventAlphabet sigma_a)
      : m_(trim(m)), p_(p), sigma_a_(std::move(sigma_a)), weakest_(weakest_assumption(m, p, sigma_a_)) {}

  bool member(const IndexWord& t) override {
    return !triple_search(word_dfa(sigma_a_.decode(t), sigma_a_), m_, p_);
  }

  std::optional<IndexWord> conjecture(const Dfa& a) override {
    // The conjecture must discharge the triple on its own.
    if (auto c = triple_search(trim(a), m_, p_)) {
      Word w = project_word(*c, sigma_a_);
      IndexWord iw = sigma_a_.encode(w);
      int q = a.run_from(a.initial(), iw);
      if (q >= 0 && !a.is_marked(q)) {
        auto ext = shortest_extension(a, q);
        if (ext) iw.insert(iw.end(), ext->begin(), ext->end());
      }
      return iw;
    }
    // And it must not be stronger than necessary.
    if (auto w = difference_witness(a, weakest_)) return sigma_a_.encode(*w);
    return std::nullopt;
  }

 private:
  Dfa m_;
  const Dfa& p_;
  EventAlphabet sigma_a_;
  Dfa weakest_;
};

}  // namespace detail

/// L* session for the weakest assumption of M w.r.t. P over Σ_A.
inline AssumptionResult learn_assumption(const Dfa& m, const Dfa& p, const EventAlphabet& sigma_a,
                                         const LearnOptions& opt = {}) {
  detail::CvTeacher teacher(m, p, sigma_a);
  AssumptionResult r;
  r.learning = learn(teacher, sigma_a, opt);
  r.assumption = minimize(r.learning.dfa);
  return r;
}

/// SYM-N premise n+1: L_m(coA_1 || ... || coA_n) ⊆ L_m(P).
inline std::optional<Word> sym_n_check(const std::vector<Dfa>& assumptions, const Dfa& p) {
  if (assumptions.empty()) throw InputError("at least one assumption is required");
  EventAlphabet u = assumptions.front().alphabet();
  for (const auto& a : assumptions) u = u.united(a.alphabet());
  u = u.united(p.alphabet());
  std::vector<Dfa> co;
  for (const auto& a : assumptions) co.push_back(complement(a));
  return subset_counterexample(inverse_project_intersect(co, u), lift_to_alphabet(p, u));
}

struct Verdict {
  enum class Kind { holds, violated, refine };
  Kind kind = Kind::holds;
  int agent = -1;  // refine target, 0-based
  Word counterexample;
};

inline std::string to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::holds: return "holds";
    case Verdict::Kind::violated: return "violated";
    default: return "refine";
  }
}

/// Simulates t on every M_i || coL: a common accepting word is a genuine
/// violation, otherwise the least rejecting agent is asked to refine.
inline Verdict analyze_counterexample(const Word& t, const std::vector<Dfa>& agents, const Dfa& p) {
  Dfa co = complement(p);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    Dfa mi = parallel_compose(mark_all(trim(agents[i])), co);
    if (!mi.accepts(project_word(t, mi.alphabet()))) return {Verdict::Kind::refine, static_cast<int>(i), t};
  }
  return {Verdict::Kind::violated, -1, t};
}

struct VerifyStats {
  std::vector<int> assumption_states;
  std::vector<int> equivalence_queries;
  std::vector<std::size_t> membership_queries;
};

/// Learned assumptions keyed by (agent, canonical module); the learner is
/// deterministic, so an unchanged module gets the same assumption back.
class AssumptionCache {
 public:
  const AssumptionResult* find(std::size_t agent, const Dfa& module) const {
    for (const auto& [i, m, r] : entries_)
      if (i == agent && structurally_equal(m, module)) return &r;
    return nullptr;
  }
  const AssumptionResult& put(std::size_t agent, Dfa module, AssumptionResult r) {
    entries_.emplace_back(agent, std::move(module), std::move(r));
    return std::get<2>(entries_.back());
  }

 private:
  std::vector<std::tuple<std::size_t, Dfa, AssumptionResult>> entries_;
};

/// One pass of compositional verification of ||_i agents against P.
inline Verdict verify_composition(const std::vector<Dfa>& agents, const Dfa& p,
                                  const std::vector<EventAlphabet>& assumption_alphabets,
                                  VerifyStats* stats = nullptr, const LearnOptions& opt = {},
                                  AssumptionCache* cache = nullptr) {
  if (agents.size() != assumption_alphabets.size()) throw InputError("one assumption alphabet per agent is required");
  std::vector<Dfa> assumptions;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    Dfa key = minimize(agents[i]);
    const AssumptionResult* r = cache ? cache->find(i, key) : nullptr;
    AssumptionResult fresh;
    if (!r) {
      fresh = learn_assumption(agents[i], p, assumption_alphabets[i], opt);
      r = cache ? &cache->put(i, std::move(key), fresh) : &fresh;
    }
    if (stats) {
      stats->assumption_states.push_back(r->assumption.num_states());
      stats->equivalence_queries.push_back(r->learning.equivalence_queries);
      stats->membership_queries.push_back(r->learning.membership_queries);
    }
    assumptions.push_back(r->assumption);
  }
  auto ce = sym_n_check(assumptions, p);
  if (!ce) return {};
  Verdict v = analyze_counterexample(*ce, agents, p);
  if (v.kind == Verdict::Kind::refine) {
    // Learned assumptions are already the weakest ones over their alphabet:
    // a learner can only absorb t if it still disagrees with membership.
    const auto i = static_cast<std::size_t>(v.agent);
    Word ti = project_word(*ce, assumption_alphabets[i]);
    if (assumptions[i].accepts(ti) != cv_membership(ti, agents[i], p, assumption_alphabets[i]))
      throw std::logic_error("assumption learner stopped short of the weakest assumption");
  }
  return v;
}

/// Literal per-word re-synthesis: L_i − {P_i(t)}, then the largest
/// prefix-closed sublanguage.
inline std::vector<Dfa> resynthesize_specs(const Word& t, const std::vector<Dfa>& plans) {
  std::vector<Dfa> out;
  for (const auto& plan : plans) {
    Word ti = project_word(t, plan.alphabet());
    Dfa exact = word_dfa(ti, plan.alphabet());
    std::vector<bool> last(static_cast<std::size_t>(exact.num_states()), false);
    last.back() = true;
    exact = Dfa(exact.alphabet(), exact.names(), exact.initial(), exact.delta(), std::move(last));
    Dfa temp = parallel_compose(plan, complement(exact));
    temp = Dfa(plan.alphabet(), temp.names(), temp.initial(), temp.delta(), temp.marked());
    out.push_back(prefix_close_largest(temp));
  }
  return out;
}

/// Removes the transition that P_i(t)'s last event takes in the minimal
/// automaton of a prefix-closed plan; every word sharing that move goes too.
inline Dfa cut_class(const Dfa& plan, const Word& projected) {
  Dfa m = minimize(plan);
  if (projected.empty() || !m.accepts(projected)) return m;
  IndexWord w = m.alphabet().encode(projected);
  int q = m.run_from(m.initial(), IndexWord(w.begin(), w.end() - 1));
  auto delta = m.delta();
  delta[static_cast<std::size_t>(q)][static_cast<std::size_t>(w.back())] = -1;
  return prefix_close_largest(Dfa(m.alphabet(), m.names(), m.initial(), std::move(delta), m.marked()));
}

/// Reachable states without any outgoing move.
inline int deadlock_count(const Dfa& d) {
  Dfa a = accessible(d);
  int n = 0;
  for (int q = 0; q < a.num_states(); ++q) {
    bool any = false;
    for (int e = 0; e < a.num_events() && !any; ++e) any = a.next(q, e) >= 0;
    n += !any;
  }
  return n;
}

struct CutChoice {
  int agent = -1;
  Dfa spec;
};

/// Picks the one agent whose spec absorbs the violation: participants ordered
/// by their most recent own event in t, first one whose cut creates no new
/// deadlock, else the most recent.
inline std::optional<CutChoice> choose_cut(const Word& t, const std::vector<Dfa>& specs) {
  std::vector<std::pair<int, int>> order;  // (-last position, agent)
  for (std::size_t i = 0; i < specs.size(); ++i) {
    Word ti = project_word(t, specs[i].alphabet());
    if (ti.empty() || !minimize(specs[i]).accepts(ti)) continue;
    int last = -1;
    for (std::size_t k = 0; k < t.size(); ++k)
      if (specs[i].alphabet().contains(t[k])) last = static_cast<int>(k);
    order.emplace_back(-last, static_cast<int>(i));
  }
  if (order.empty()) return std::nullopt;
  std::sort(order.begin(), order.end());
  std::optional<CutChoice> fallback;
  for (auto [neg, i] : order) {
    const Dfa& s = specs[static_cast<std::size_t>(i)];
    Dfa cut = cut_class(s, project_word(t, s.alphabet()));
    if (!fallback) fallback = CutChoice{i, cut};
    if (deadlock_count(cut) <= deadlock_count(minimize(s))) return CutChoice{i, cut};
  }
  return fallback;
}

/// Agent description for the refinement loop.
struct AgentModel {
  std::string name;
  EventAlphabet alphabet;        // Σ_i with Σ_i,c
  std::optional<Dfa> plant;      // absent: plant behaviour unrestricted over Σ_i
};

struct RefineOptions {
  int max_rounds = 100;
  std::vector<std::optional<EventAlphabet>> assumption_alphabets;  // per agent, optional
  LearnOptions learn;
};

struct CutRecord {
  int round = 0;
  int agent = -1;
  Word counterexample;
  Word projected;
};

struct RefineResult {
  std::vector<Dfa> initial_specs;   // P_i(L)
  std::vector<Dfa> specs;           // final L^mi_i
  std::vector<Dfa> supervisors;     // S_i
  std::vector<Dfa> plans;           // L(S_i || G_i)
  int rounds = 0;                   // re-synthesis passes
  std::vector<CutRecord> cuts;
  std::vector<EventAlphabet> assumption_alphabets;
  std::vector<VerifyStats> verify_stats;
  std::vector<std::string> warnings;
};

namespace detail {

inline Dfa plant_of(const AgentModel& a) {
  return a.plant ? lift_to_alphabet(*a.plant, a.alphabet) : universal_dfa(a.alphabet);
}

inline Dfa supervised_plan(const Dfa& supervisor, const Dfa& plant) {
  if (is_empty(supervisor)) return supervisor;
  Dfa sg = mark_all(trim(parallel_compose(supervisor, mark_all(plant))));
  return minimize(lift_to_alphabet(sg, supervisor.alphabet()));
}

// Independence: two events are independent when no agent owns both.
inline std::optional<std::string> transitivity_warning(const std::vector<EventAlphabet>& agents, const EventAlphabet& global) {
  auto dep = [&](const std::string& a, const std::string& b) {
    return std::any_of(agents.begin(), agents.end(), [&](const auto& s) { return s.contains(a) && s.contains(b); });
  };
  const auto& ev = global.events();
  for (const auto& a : ev)
    for (const auto& b : ev)
      for (const auto& c : ev)
        if (a != b && b != c && a != c && !dep(a, b) && !dep(b, c) && dep(a, c))
          return "independence relation is not transitive: (" + a + "," + b + "), (" + b + "," + c + ") independent but (" +
                 a + "," + c + ") dependent";
  return std::nullopt;
}

}  // namespace detail

/// Uncontrollable iff no agent controls the event.
inline std::vector<std::string> global_uncontrollable(const std::vector<EventAlphabet>& agents, const EventAlphabet& global) {
  std::vector<std::string> out;
  for (const auto& e : global.events()) {
    bool ctrl = std::any_of(agents.begin(), agents.end(), [&](const auto& a) { return a.contains(e) && a.is_controllable(e); });
    if (!ctrl) out.push_back(e);
  }
  return out;
}

/// Synthesize local supervisors from P_i(L), verify their composition against
/// L compositionally, and fold each genuine violation back into one agent's
/// mission specification until the composition satisfies L.
inline RefineResult verify_and_refine(const std::vector<AgentModel>& agents, const Dfa& property,
                                      const RefineOptions& opt = {}) {
  if (agents.empty()) throw InputError("no agents");
  RefineResult res;
  std::vector<EventAlphabet> sigmas;
  for (const auto& a : agents) sigmas.push_back(a.alphabet);
  EventAlphabet global = property.alphabet();
  for (const auto& s : sigmas) global = global.united(s);
  for (const auto& e : property.alphabet().events())
    if (std::none_of(sigmas.begin(), sigmas.end(), [&](const auto& s) { return s.contains(e); }))
      throw InputError("mission event '" + e + "' belongs to no agent");
  if (auto w = detail::transitivity_warning(sigmas, global)) res.warnings.push_back(*w);

  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (i < opt.assumption_alphabets.size() && opt.assumption_alphabets[i])
      res.assumption_alphabets.push_back(*opt.assumption_alphabets[i]);
    else
      res.assumption_alphabets.push_back(default_assumption_alphabet(sigmas, property, global));
  }

  std::vector<Dfa> plants;
  for (const auto& a : agents) plants.push_back(detail::plant_of(a));
  Dfa lg = lift_to_alphabet(property, global);
  for (std::size_t i = 0; i < agents.size(); ++i)
    res.specs.push_back(lift_to_alphabet(project(lg, sigmas[i].events()), sigmas[i]));
  res.initial_specs = res.specs;

  auto synthesize_all = [&] {
    res.supervisors.clear();
    res.plans.clear();
    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (is_empty(trim(res.specs[i])))
        throw InfeasibleError("mission specification of " + agents[i].name + " is empty");
      SynthesisProblem p{res.specs[i], plant_oracle(plants[i]), plants[i], 12};
      auto s = synthesize_supervisor(p, opt.learn);
      for (const auto& w : s.warnings) res.warnings.push_back(agents[i].name + ": " + w);
      res.supervisors.push_back(s.supervisor);
      res.plans.push_back(detail::supervised_plan(s.supervisor, plants[i]));
      if (is_empty(res.plans.back()))
        throw InfeasibleError("no controllable plan for " + agents[i].name + " within its mission specification");
    }
  };
  AssumptionCache cache;
  auto verify = [&](const std::vector<Dfa>& modules) {
    VerifyStats st;
    Verdict v = verify_composition(modules, property, res.assumption_alphabets, &st, opt.learn, &cache);
    res.verify_stats.push_back(st);
    if (v.kind == Verdict::Kind::refine)
      throw InputError("assumption alphabet too coarse: spurious counterexample " + to_string(v.counterexample) +
                       " for " + agents[static_cast<std::size_t>(v.agent)].name);
    return v;
  };

  synthesize_all();
  Verdict v = verify(res.plans);
  while (v.kind == Verdict::Kind::violated) {
    if (res.rounds >= opt.max_rounds)
      throw InfeasibleError("no convergence within " + std::to_string(opt.max_rounds) + " rounds; last counterexample " +
                            to_string(v.counterexample));
    ++res.rounds;
    // Fold counterexamples into the per-agent specs until they pass.
    for (;;) {
      auto choice = choose_cut(v.counterexample, res.specs);
      if (!choice)
        throw InfeasibleError("no agent can absorb counterexample " + to_string(v.counterexample));
      auto& spec = res.specs[static_cast<std::size_t>(choice->agent)];
      if (!language_subset(choice->spec, spec)) throw std::logic_error("re-synthesis enlarged a specification");
      res.cuts.push_back({res.rounds, choice->agent, v.counterexample, project_word(v.counterexample, spec.alphabet())});
      spec = choice->spec;
      if (is_empty(trim(spec)))
        throw InfeasibleError("mission specification of " + agents[static_cast<std::size_t>(choice->agent)].name +
                              " collapsed; last counterexample " + to_string(v.counterexample));
      v = verify(res.specs);
      if (v.kind == Verdict::Kind::holds) break;
    }
    synthesize_all();
    v = verify(res.plans);
  }
  return res;
}

}  // namespace agsyn
