#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agsyn/ops.hpp"

namespace agsyn {

/// P_target(L_m(d)): erase events outside `target`, determinize, minimize.
/// Result alphabet lists the kept events in d's order with d's controllability.
inline Dfa project(const Dfa& d, const std::vector<std::string>& target) {
  for (const auto& e : target)
    if (!d.alphabet().contains(e)) throw InputError("projection target event '" + e + "' is not in the source alphabet");
  EventAlphabet sigma = d.alphabet().restricted_to(target);
  auto keep = detail::event_map(sigma, d.alphabet());
  std::vector<bool> erased(d.alphabet().size(), true);
  for (int e : keep) erased[static_cast<std::size_t>(e)] = false;

  auto closure = [&](std::vector<int> set) {
    std::vector<bool> in(static_cast<std::size_t>(d.num_states()), false);
    for (int q : set) in[static_cast<std::size_t>(q)] = true;
    for (std::size_t i = 0; i < set.size(); ++i)
      for (int e = 0; e < d.num_events(); ++e) {
        if (!erased[static_cast<std::size_t>(e)]) continue;
        int t = d.next(set[i], e);
        if (t >= 0 && !in[static_cast<std::size_t>(t)]) {
          in[static_cast<std::size_t>(t)] = true;
          set.push_back(t);
        }
      }
    std::sort(set.begin(), set.end());
    return set;
  };

  std::map<std::vector<int>, int> id;
  std::vector<std::vector<int>> subsets{closure({d.initial()})};
  id.emplace(subsets[0], 0);
  std::vector<std::vector<int>> delta;
  std::vector<bool> marked;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    std::vector<int> row(sigma.size(), -1);
    for (std::size_t e = 0; e < sigma.size(); ++e) {
      std::vector<int> succ;
      for (int q : subsets[i]) {
        int t = d.next(q, keep[e]);
        if (t >= 0) succ.push_back(t);
      }
      if (succ.empty()) continue;
      std::sort(succ.begin(), succ.end());
      succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
      auto c = closure(std::move(succ));
      auto [it, fresh] = id.emplace(c, static_cast<int>(subsets.size()));
      if (fresh) subsets.push_back(c);
      row[e] = it->second;
    }
    delta.push_back(std::move(row));
    bool m = std::any_of(subsets[i].begin(), subsets[i].end(), [&](int q) { return d.is_marked(q); });
    marked.push_back(m);
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < subsets.size(); ++i) names.push_back("p" + std::to_string(i));
  return minimize(Dfa(sigma, std::move(names), 0, std::move(delta), std::move(marked)));
}

inline Dfa project(const Dfa& d, const EventAlphabet& target) { return project(d, target.events()); }

/// ||_i L_i = ∩_i P_i^{-1}(L_i) as one automaton over `global` (in its order,
/// with its controllability).
inline Dfa inverse_project_intersect(const std::vector<Dfa>& locals, const EventAlphabet& global) {
  if (locals.empty()) return universal_dfa(global);
  Dfa out = lift_to_alphabet(locals.front(), global);
  for (std::size_t i = 1; i < locals.size(); ++i) out = parallel_compose(out, lift_to_alphabet(locals[i], global));
  return Dfa(global, out.names(), out.initial(), out.delta(), out.marked());
}

/// Decides L = ||_i P_i(L). Returns a word of the symmetric difference
/// (necessarily in ||_i P_i(L) − L) when L is not separable.
inline std::optional<Word> separability_counterexample(const Dfa& l, const std::vector<EventAlphabet>& alphabets) {
  EventAlphabet global = l.alphabet();
  for (const auto& a : alphabets) global = global.united(a);
  for (const auto& e : l.alphabet().events()) {
    bool covered = std::any_of(alphabets.begin(), alphabets.end(), [&](const auto& a) { return a.contains(e); });
    if (!covered) throw InputError("event '" + e + "' belongs to no component alphabet");
  }
  Dfa lg = lift_to_alphabet(l, global);
  std::vector<Dfa> parts;
  for (const auto& a : alphabets) parts.push_back(project(lg, a.events()));
  return difference_witness(lift_to_alphabet(l, global), inverse_project_intersect(parts, global));
}

inline bool is_separable(const Dfa& l, const std::vector<EventAlphabet>& alphabets) {
  return !separability_counterexample(l, alphabets);
}

/// L_m(l1)/L_m(l2) = { s | ∃t ∈ L_m(l2): st ∈ L_m(l1) }: l1's structure with
/// a state marked iff some word of l2 leads from it into a marked state.
inline Dfa quotient(const Dfa& l1, const Dfa& l2) {
  if (!l2.alphabet().is_subset_of(l1.alphabet())) throw InputError("quotient operands need a common alphabet");
  auto m2 = detail::event_map(l2.alphabet(), l1.alphabet());
  const int n1 = l1.num_states(), n2 = l2.num_states();
  auto idx = [&](int p, int q) { return static_cast<std::size_t>(p * n2 + q); };
  std::vector<std::vector<int>> pred(static_cast<std::size_t>(n1 * n2));
  for (int p = 0; p < n1; ++p)
    for (int q = 0; q < n2; ++q)
      for (int e = 0; e < l2.num_events(); ++e) {
        int tq = l2.next(q, e);
        int tp = l1.next(p, m2[static_cast<std::size_t>(e)]);
        if (tq >= 0 && tp >= 0) pred[idx(tp, tq)].push_back(p * n2 + q);
      }
  std::vector<bool> good(static_cast<std::size_t>(n1 * n2), false);
  std::vector<int> stack;
  for (int p = 0; p < n1; ++p)
    for (int q = 0; q < n2; ++q)
      if (l1.is_marked(p) && l2.is_marked(q)) {
        good[idx(p, q)] = true;
        stack.push_back(p * n2 + q);
      }
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int r : pred[static_cast<std::size_t>(s)])
      if (!good[static_cast<std::size_t>(r)]) {
        good[static_cast<std::size_t>(r)] = true;
        stack.push_back(r);
      }
  }
  std::vector<bool> marked(static_cast<std::size_t>(n1));
  for (int p = 0; p < n1; ++p) marked[static_cast<std::size_t>(p)] = good[idx(p, l2.initial())];
  return Dfa(l1.alphabet(), l1.names(), l1.initial(), l1.delta(), std::move(marked));
}

/// Largest prefix-closed sublanguage: words whose prefixes all lie in L_m(l).
inline Dfa prefix_close_largest(const Dfa& l) {
  if (!l.is_marked(l.initial())) return empty_dfa(l.alphabet());
  std::vector<bool> keep(l.marked().begin(), l.marked().end());
  return minimize(detail::restrict_states(l, keep));
}

/// True iff L_m(l) is prefix-closed.
inline bool is_prefix_closed(const Dfa& l) {
  Dfa t = trim(l);
  if (is_empty(t)) return true;
  return std::all_of(t.marked().begin(), t.marked().end(), [](bool m) { return m; });
}

namespace detail {

// Generated language of the (trimmed) spec as an all-marked automaton.
inline Dfa closure_of(const Dfa& spec) {
  Dfa t = trim(spec);
  return is_empty(t) ? t : mark_all(t);
}

inline void require_same_events(const Dfa& a, const Dfa& b, const char* what) {
  if (!a.alphabet().is_subset_of(b.alphabet()) || !b.alphabet().is_subset_of(a.alphabet()))
    throw InputError(std::string(what) + ": specification and plant alphabets differ");
}

inline void require_inside_plant(const Dfa& k, const Dfa& plant, const char* what) {
  if (auto w = subset_counterexample(k, mark_all(plant)))
    throw InputError(std::string(what) + ": specification word " + to_string(*w) + " is not generated by the plant");
}

// Product of plant and spec closure restricted to pairs reachable inside the
// spec; `bad` pairs and everything after them are cut. Result over the plant's
// alphabet, all states marked.
template <class Bad>
Dfa cut_product(const Dfa& k, const Dfa& plant, Bad bad) {
  auto mk = event_map(plant.alphabet(), k.alphabet());
  std::unordered_map<std::uint64_t, int> id;
  std::vector<std::pair<int, int>> states;
  auto bad0 = bad(k.initial(), plant.initial());
  if (bad0) return empty_dfa(plant.alphabet());
  states.emplace_back(k.initial(), plant.initial());
  id.emplace(pair_key(k.initial(), plant.initial()), 0);
  std::vector<std::vector<int>> delta;
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto [p, g] = states[i];
    std::vector<int> row(plant.alphabet().size(), -1);
    for (std::size_t e = 0; e < plant.alphabet().size(); ++e) {
      int np = k.next(p, mk[e]);
      int ng = plant.next(g, static_cast<int>(e));
      if (np < 0 || ng < 0 || bad(np, ng)) continue;
      auto [it, fresh] = id.emplace(pair_key(np, ng), static_cast<int>(states.size()));
      if (fresh) states.emplace_back(np, ng);
      row[e] = it->second;
    }
    delta.push_back(std::move(row));
  }
  std::vector<std::string> names;
  for (auto [p, g] : states) names.push_back("<" + k.name(p) + "," + plant.name(g) + ">");
  std::vector<bool> marked(states.size(), true);
  return minimize(Dfa(plant.alphabet(), std::move(names), 0, std::move(delta), std::move(marked)));
}

// Uncontrollable events of the plant, as (plant index, spec index) pairs.
inline std::vector<std::pair<int, int>> uc_events(const Dfa& k, const Dfa& plant) {
  std::vector<std::pair<int, int>> out;
  for (int e = 0; e < plant.num_events(); ++e)
    if (!plant.alphabet().is_controllable(e)) out.emplace_back(e, k.alphabet().index_of(plant.alphabet()[e]));
  return out;
}

}  // namespace detail

/// Controllability of the prefix closure of L_m(spec) w.r.t. the plant.
/// Returns the shortest-lex sσ with s in the closure, σ uncontrollable,
/// sσ ∈ L(plant) but outside the closure.
inline std::optional<Word> controllability_counterexample(const Dfa& spec, const Dfa& plant) {
  detail::require_same_events(spec, plant, "controllability");
  Dfa k = detail::closure_of(spec);
  detail::require_inside_plant(k, plant, "controllability");
  if (is_empty(k)) return std::nullopt;
  auto mk = detail::event_map(plant.alphabet(), k.alphabet());
  struct Node {
    int p, g, parent, event;
  };
  std::vector<Node> nodes{{k.initial(), plant.initial(), -1, -1}};
  std::unordered_map<std::uint64_t, int> seen{{detail::pair_key(k.initial(), plant.initial()), 0}};
  auto word_to = [&](int i, int last) {
    IndexWord w{last};
    for (int j = i; nodes[static_cast<std::size_t>(j)].parent >= 0; j = nodes[static_cast<std::size_t>(j)].parent)
      w.push_back(nodes[static_cast<std::size_t>(j)].event);
    std::reverse(w.begin(), w.end());
    return plant.alphabet().decode(w);
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node cur = nodes[i];
    for (int e = 0; e < plant.num_events(); ++e) {
      if (plant.alphabet().is_controllable(e)) continue;
      if (plant.next(cur.g, e) >= 0 && k.next(cur.p, mk[static_cast<std::size_t>(e)]) < 0)
        return word_to(static_cast<int>(i), e);
    }
    for (int e = 0; e < plant.num_events(); ++e) {
      int np = k.next(cur.p, mk[static_cast<std::size_t>(e)]);
      int ng = plant.next(cur.g, e);
      if (np < 0 || ng < 0) continue;
      auto [it, fresh] = seen.emplace(detail::pair_key(np, ng), static_cast<int>(nodes.size()));
      if (fresh) nodes.push_back({np, ng, static_cast<int>(i), e});
    }
  }
  return std::nullopt;
}

inline bool is_controllable(const Dfa& spec, const Dfa& plant) { return !controllability_counterexample(spec, plant); }

/// Closed form L − [(L(G) − L)/Σ_uc*]Σ*.
inline Dfa sup_c_closed_form(const Dfa& spec, const Dfa& plant) {
  Dfa k = complete(detail::closure_of(spec)).dfa;
  int qe = k.num_states() - 1;
  auto uc = detail::uc_events(k, plant);
  // Pairs from which an uncontrollable string leaves K inside the plant.
  const int nk = k.num_states(), ng = plant.num_states();
  std::vector<std::vector<int>> pred(static_cast<std::size_t>(nk * ng));
  for (int p = 0; p < nk; ++p)
    for (int g = 0; g < ng; ++g)
      for (auto [eg, ek] : uc) {
        int tg = plant.next(g, eg);
        if (tg >= 0) pred[static_cast<std::size_t>(k.next(p, ek) * ng + tg)].push_back(p * ng + g);
      }
  std::vector<bool> bad(static_cast<std::size_t>(nk * ng), false);
  std::vector<int> stack;
  for (int g = 0; g < ng; ++g) {
    bad[static_cast<std::size_t>(qe * ng + g)] = true;
    stack.push_back(qe * ng + g);
  }
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    for (int r : pred[static_cast<std::size_t>(s)])
      if (!bad[static_cast<std::size_t>(r)]) {
        bad[static_cast<std::size_t>(r)] = true;
        stack.push_back(r);
      }
  }
  return detail::cut_product(k, plant, [&](int p, int g) { return bad[static_cast<std::size_t>(p * ng + g)]; });
}

/// Fixed point K_{j+1} = K_j − [(L(G) − K_j)/Σ_uc]Σ*, iterated until stable.
inline Dfa sup_c_fixed_point(const Dfa& spec, const Dfa& plant) {
  Dfa kj = minimize(detail::closure_of(spec));
  const int bound = spec.num_states() * plant.num_states() + 2;
  for (int iter = 0; iter <= bound; ++iter) {
    auto uc = detail::uc_events(kj, plant);
    Dfa next = detail::cut_product(kj, plant, [&](int p, int g) {
      for (auto [eg, ek] : uc)
        if (plant.next(g, eg) >= 0 && kj.next(p, ek) < 0) return true;
      return false;
    });
    if (language_equal(next, kj)) return next;
    kj = next;
  }
  throw std::logic_error("supremal controllable iteration exceeded its state bound");
}

/// Supremal controllable prefix-closed sublanguage of the prefix-closed
/// L_m(spec) w.r.t. the plant. Both constructions run and must agree.
inline Dfa sup_c(const Dfa& spec, const Dfa& plant) {
  detail::require_same_events(spec, plant, "sup_c");
  if (!is_prefix_closed(spec)) throw InputError("sup_c: specification is not prefix-closed");
  detail::require_inside_plant(detail::closure_of(spec), plant, "sup_c");
  Dfa a = sup_c_closed_form(spec, plant);
  Dfa b = sup_c_fixed_point(spec, plant);
  if (!language_equal(a, b)) throw std::logic_error("sup_c: closed form and fixed point disagree");
  return a;
}

/// M ⊨ P: every t ∈ L_m(M) has P_P(t) ∈ L_m(P). Returns the shortest-lex
/// violating t otherwise.
inline std::optional<Word> satisfaction_counterexample(const Dfa& m, const Dfa& p) {
  if (!p.alphabet().is_subset_of(m.alphabet()))
    throw InputError("property alphabet is not contained in the model alphabet");
  return subset_counterexample(m, lift_to_alphabet(p, m.alphabet()));
}

inline bool satisfies(const Dfa& m, const Dfa& p) { return !satisfaction_counterexample(m, p); }

}  // namespace agsyn
