#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "agsyn/alphabet.hpp"
#include "agsyn/dfa.hpp"

namespace agsyn {

namespace detail {

inline std::uint64_t pair_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a + 1)) << 32) |
         static_cast<std::uint32_t>(b + 1);
}

// Column of `from` events inside `to`, -1 where absent.
inline std::vector<int> event_map(const EventAlphabet& from, const EventAlphabet& to) {
  std::vector<int> m(from.size(), -1);
  for (std::size_t i = 0; i < from.size(); ++i) {
    auto j = to.find(from[static_cast<int>(i)]);
    if (j) m[i] = *j;
  }
  return m;
}

inline std::vector<bool> reachable(const Dfa& d) {
  std::vector<bool> seen(static_cast<std::size_t>(d.num_states()), false);
  std::vector<int> stack{d.initial()};
  seen[static_cast<std::size_t>(d.initial())] = true;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int e = 0; e < d.num_events(); ++e) {
      int t = d.next(q, e);
      if (t >= 0 && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        stack.push_back(t);
      }
    }
  }
  return seen;
}

inline std::vector<bool> coreachable(const Dfa& d) {
  const auto n = static_cast<std::size_t>(d.num_states());
  std::vector<std::vector<int>> pred(n);
  for (int q = 0; q < d.num_states(); ++q)
    for (int e = 0; e < d.num_events(); ++e) {
      int t = d.next(q, e);
      if (t >= 0) pred[static_cast<std::size_t>(t)].push_back(q);
    }
  std::vector<bool> seen(n, false);
  std::vector<int> stack;
  for (int q = 0; q < d.num_states(); ++q)
    if (d.is_marked(q)) {
      seen[static_cast<std::size_t>(q)] = true;
      stack.push_back(q);
    }
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int p : pred[static_cast<std::size_t>(q)])
      if (!seen[static_cast<std::size_t>(p)]) {
        seen[static_cast<std::size_t>(p)] = true;
        stack.push_back(p);
      }
  }
  return seen;
}

// Keep the states flagged in `keep` (initial must be kept), renumbered in BFS order.
inline Dfa restrict_states(const Dfa& d, const std::vector<bool>& keep) {
  std::vector<int> id(static_cast<std::size_t>(d.num_states()), -1);
  std::vector<int> order{d.initial()};
  id[static_cast<std::size_t>(d.initial())] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int e = 0; e < d.num_events(); ++e) {
      int t = d.next(order[i], e);
      if (t >= 0 && keep[static_cast<std::size_t>(t)] && id[static_cast<std::size_t>(t)] < 0) {
        id[static_cast<std::size_t>(t)] = static_cast<int>(order.size());
        order.push_back(t);
      }
    }
  std::vector<std::string> names;
  std::vector<std::vector<int>> delta;
  std::vector<bool> marked;
  for (int q : order) {
    names.push_back(d.name(q));
    marked.push_back(d.is_marked(q));
    std::vector<int> row(static_cast<std::size_t>(d.num_events()), -1);
    for (int e = 0; e < d.num_events(); ++e) {
      int t = d.next(q, e);
      if (t >= 0 && keep[static_cast<std::size_t>(t)]) row[static_cast<std::size_t>(e)] = id[static_cast<std::size_t>(t)];
    }
    delta.push_back(std::move(row));
  }
  return Dfa(d.alphabet(), std::move(names), 0, std::move(delta), std::move(marked));
}

}  // namespace detail

/// The automaton with one unmarked state and no transitions.
inline Dfa empty_dfa(const EventAlphabet& alphabet) {
  return Dfa(alphabet, {"q0"}, 0, {std::vector<int>(alphabet.size(), -1)}, {false});
}

/// One marked state with a self-loop on every event: L = L_m = Σ*.
inline Dfa universal_dfa(const EventAlphabet& alphabet) {
  return Dfa(alphabet, {"q0"}, 0, {std::vector<int>(alphabet.size(), 0)}, {true});
}

/// DFA(t): the chain generating the prefixes of t, every state marked.
inline Dfa word_dfa(const Word& t, const EventAlphabet& alphabet) {
  IndexWord w = alphabet.encode(t);
  std::vector<std::string> names;
  std::vector<std::vector<int>> delta;
  for (std::size_t i = 0; i <= w.size(); ++i) {
    names.push_back("t" + std::to_string(i));
    std::vector<int> row(alphabet.size(), -1);
    if (i < w.size()) row[static_cast<std::size_t>(w[i])] = static_cast<int>(i + 1);
    delta.push_back(std::move(row));
  }
  return Dfa(alphabet, std::move(names), 0, std::move(delta), std::vector<bool>(w.size() + 1, true));
}

inline Dfa accessible(const Dfa& d) { return detail::restrict_states(d, detail::reachable(d)); }

/// Accessible and coaccessible part. An initial state that cannot reach a
/// marked state yields the empty automaton.
inline Dfa trim(const Dfa& d) {
  auto acc = detail::reachable(d);
  auto co = detail::coreachable(d);
  if (!co[static_cast<std::size_t>(d.initial())]) return empty_dfa(d.alphabet());
  std::vector<bool> keep(acc.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = acc[i] && co[i];
  return detail::restrict_states(d, keep);
}

/// Same transition structure with every state marked, so L_m equals L.
inline Dfa mark_all(const Dfa& d) {
  return Dfa(d.alphabet(), d.names(), d.initial(), d.delta(),
             std::vector<bool>(static_cast<std::size_t>(d.num_states()), true));
}

inline Dfa with_alphabet_controllable(const Dfa& d, const std::vector<std::string>& ctrl) {
  return Dfa(d.alphabet().with_controllable(ctrl), d.names(), d.initial(), d.delta(), d.marked());
}

/// Re-express over a superset alphabet (in that alphabet's order). Events the
/// automaton did not know become self-loops everywhere, i.e. the inverse
/// projection of its languages.
inline Dfa lift_to_alphabet(const Dfa& d, const EventAlphabet& target) {
  if (!d.alphabet().is_subset_of(target)) throw InputError("target alphabet must contain the automaton's alphabet");
  auto back = detail::event_map(target, d.alphabet());
  std::vector<std::vector<int>> delta;
  for (int q = 0; q < d.num_states(); ++q) {
    std::vector<int> row(target.size(), -1);
    for (std::size_t e = 0; e < target.size(); ++e) row[e] = back[e] < 0 ? q : d.next(q, back[e]);
    delta.push_back(std::move(row));
  }
  return Dfa(target, d.names(), d.initial(), std::move(delta), d.marked());
}

/// Permute the alphabet to follow `order`; languages are unchanged.
inline Dfa reorder_alphabet(const Dfa& d, const std::vector<std::string>& order) {
  EventAlphabet target = d.alphabet().reordered(order);
  return lift_to_alphabet(d, target);
}

/// Rename events through `m` (symbols absent from `m` keep their name).
inline Dfa rename_events(const Dfa& d, const std::map<std::string, std::string>& m) {
  std::vector<std::string> events;
  std::vector<std::string> ctrl;
  for (const auto& e : d.alphabet().events()) {
    auto it = m.find(e);
    events.push_back(it == m.end() ? e : it->second);
    if (d.alphabet().is_controllable(e)) ctrl.push_back(events.back());
  }
  return Dfa(EventAlphabet(events, ctrl), d.names(), d.initial(), d.delta(), d.marked());
}

/// Synchronous composition: shared events move both sides, private events
/// move one side. Result alphabet is a's events followed by b's new ones.
inline Dfa parallel_compose(const Dfa& a, const Dfa& b) {
  EventAlphabet sigma = a.alphabet().united(b.alphabet());
  auto ma = detail::event_map(sigma, a.alphabet());
  auto mb = detail::event_map(sigma, b.alphabet());
  std::unordered_map<std::uint64_t, int> id;
  std::vector<std::pair<int, int>> states{{a.initial(), b.initial()}};
  id.emplace(detail::pair_key(a.initial(), b.initial()), 0);
  std::vector<std::vector<int>> delta;
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto [p, q] = states[i];
    std::vector<int> row(sigma.size(), -1);
    for (std::size_t e = 0; e < sigma.size(); ++e) {
      int np = p, nq = q;
      if (ma[e] >= 0) {
        np = a.next(p, ma[e]);
        if (np < 0) continue;
      }
      if (mb[e] >= 0) {
        nq = b.next(q, mb[e]);
        if (nq < 0) continue;
      }
      auto [it, fresh] = id.emplace(detail::pair_key(np, nq), static_cast<int>(states.size()));
      if (fresh) states.emplace_back(np, nq);
      row[e] = it->second;
    }
    delta.push_back(std::move(row));
  }
  std::vector<std::string> names;
  std::vector<bool> marked;
  for (auto [p, q] : states) {
    names.push_back("<" + a.name(p) + "," + b.name(q) + ">");
    marked.push_back(a.is_marked(p) && b.is_marked(q));
  }
  return Dfa(std::move(sigma), std::move(names), 0, std::move(delta), std::move(marked));
}

inline Dfa parallel_compose(const std::vector<Dfa>& parts) {
  if (parts.empty()) throw InputError("nothing to compose");
  Dfa out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = parallel_compose(out, parts[i]);
  return out;
}

struct Completion {
  Dfa dfa;
  int error_state = -1;
};

/// Adds the error state q_e; every undefined move goes there and q_e loops on
/// every event. Original marking is kept; q_e is marked iff `mark_error`.
inline Completion complete(const Dfa& d, bool mark_error = false) {
  std::string qe = "q_e";
  while (d.state_index(qe)) qe += "'";
  auto names = d.names();
  auto delta = d.delta();
  auto marked = d.marked();
  const int e_id = d.num_states();
  for (auto& row : delta)
    for (int& t : row)
      if (t < 0) t = e_id;
  names.push_back(qe);
  delta.emplace_back(d.alphabet().size(), e_id);
  marked.push_back(mark_error);
  return {Dfa(d.alphabet(), std::move(names), d.initial(), std::move(delta), std::move(marked)), e_id};
}

/// coG: completion with the marking inverted, so L_m(coG) = Σ* − L_m(G).
inline Dfa complement(const Dfa& d) {
  auto c = complete(d).dfa;
  std::vector<bool> marked(c.marked().size());
  for (std::size_t i = 0; i < marked.size(); ++i) marked[i] = !c.marked()[i];
  return Dfa(c.alphabet(), c.names(), c.initial(), c.delta(), std::move(marked));
}

inline bool is_empty(const Dfa& d) { return !detail::coreachable(d)[static_cast<std::size_t>(d.initial())]; }

/// Canonical minimal DFA for L_m: trimmed, partial, states named q0.. in BFS
/// order exploring events in declared alphabet order.
inline Dfa minimize(const Dfa& input) {
  Dfa d = trim(input);
  const int n = d.num_states();
  const int k = d.num_events();
  if (is_empty(d)) return empty_dfa(d.alphabet());
  // Index n is an implicit dead sink standing for undefined moves.
  std::vector<int> cls(static_cast<std::size_t>(n + 1));
  for (int q = 0; q < n; ++q) cls[static_cast<std::size_t>(q)] = d.is_marked(q) ? 1 : 0;
  cls[static_cast<std::size_t>(n)] = 2;
  int count = 0;
  for (;;) {
    std::map<std::vector<int>, int> sig_id;
    std::vector<int> next_cls(cls.size());
    for (int q = 0; q <= n; ++q) {
      std::vector<int> sig;
      sig.reserve(static_cast<std::size_t>(k + 1));
      sig.push_back(cls[static_cast<std::size_t>(q)]);
      for (int e = 0; e < k; ++e) {
        int t = q == n ? n : d.next(q, e);
        sig.push_back(cls[static_cast<std::size_t>(t < 0 ? n : t)]);
      }
      auto [it, fresh] = sig_id.emplace(std::move(sig), static_cast<int>(sig_id.size()));
      next_cls[static_cast<std::size_t>(q)] = it->second;
    }
    int new_count = static_cast<int>(sig_id.size());
    cls.swap(next_cls);
    if (new_count == count) break;
    count = new_count;
  }
  const int sink = cls[static_cast<std::size_t>(n)];
  std::vector<int> rep(static_cast<std::size_t>(count), -1);
  for (int q = n; q >= 0; --q) rep[static_cast<std::size_t>(cls[static_cast<std::size_t>(q)])] = q;
  std::vector<int> id(static_cast<std::size_t>(count), -1);
  std::vector<int> order{cls[static_cast<std::size_t>(d.initial())]};
  id[static_cast<std::size_t>(order[0])] = 0;
  std::vector<std::vector<int>> delta;
  std::vector<bool> marked;
  for (std::size_t i = 0; i < order.size(); ++i) {
    int q = rep[static_cast<std::size_t>(order[i])];
    std::vector<int> row(static_cast<std::size_t>(k), -1);
    for (int e = 0; e < k; ++e) {
      int t = d.next(q, e);
      if (t < 0) continue;
      int c = cls[static_cast<std::size_t>(t)];
      if (c == sink) continue;
      if (id[static_cast<std::size_t>(c)] < 0) {
        id[static_cast<std::size_t>(c)] = static_cast<int>(order.size());
        order.push_back(c);
      }
      row[static_cast<std::size_t>(e)] = id[static_cast<std::size_t>(c)];
    }
    delta.push_back(std::move(row));
    marked.push_back(d.is_marked(q));
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < order.size(); ++i) names.push_back("q" + std::to_string(i));
  return Dfa(d.alphabet(), std::move(names), 0, std::move(delta), std::move(marked));
}

/// Same alphabet (order and controllability), same initial, same table, same
/// marking. State names are ignored.
inline bool structurally_equal(const Dfa& a, const Dfa& b) {
  return a.alphabet() == b.alphabet() && a.initial() == b.initial() && a.delta() == b.delta() &&
         a.marked() == b.marked();
}

/// Number of states of the minimal total DFA for L_m(d).
inline int minimal_complete_size(const Dfa& d) {
  Dfa m = minimize(d);
  if (is_empty(m)) return 1;
  return m.num_states() + (m.is_total() ? 0 : 1);
}

namespace detail {

// Shortest, then lexicographically least, word w over `sigma` such that
// want(acc_a(w), acc_b(w)) holds. -1 encodes the dead state.
template <class Pred>
std::optional<Word> product_search(const Dfa& a, const Dfa& b, const EventAlphabet& sigma, Pred want) {
  auto ma = event_map(sigma, a.alphabet());
  auto mb = event_map(sigma, b.alphabet());
  struct Node {
    int p, q, parent, event;
  };
  std::vector<Node> nodes{{a.initial(), b.initial(), -1, -1}};
  std::unordered_map<std::uint64_t, int> seen{{pair_key(a.initial(), b.initial()), 0}};
  auto acc = [](const Dfa& d, int s) { return s >= 0 && d.is_marked(s); };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node cur = nodes[i];
    if (want(acc(a, cur.p), acc(b, cur.q))) {
      IndexWord w;
      for (int j = static_cast<int>(i); nodes[static_cast<std::size_t>(j)].parent >= 0;
           j = nodes[static_cast<std::size_t>(j)].parent)
        w.push_back(nodes[static_cast<std::size_t>(j)].event);
      std::reverse(w.begin(), w.end());
      return sigma.decode(w);
    }
    if (cur.p < 0 && cur.q < 0) continue;
    for (std::size_t e = 0; e < sigma.size(); ++e) {
      int np = cur.p < 0 || ma[e] < 0 ? -1 : a.next(cur.p, ma[e]);
      int nq = cur.q < 0 || mb[e] < 0 ? -1 : b.next(cur.q, mb[e]);
      if (np < 0 && nq < 0) continue;
      auto [it, fresh] = seen.emplace(pair_key(np, nq), static_cast<int>(nodes.size()));
      if (fresh) nodes.push_back({np, nq, static_cast<int>(i), static_cast<int>(e)});
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// L_m(a) ⊆ L_m(b). On failure, the shortest-lex witness in L_m(a) − L_m(b),
/// ordered by a's alphabet.
inline std::optional<Word> subset_counterexample(const Dfa& a, const Dfa& b) {
  return detail::product_search(trim(a), b, a.alphabet(),
                                [](bool in_a, bool in_b) { return in_a && !in_b; });
}

inline bool language_subset(const Dfa& a, const Dfa& b) { return !subset_counterexample(a, b); }

/// Shortest-lex word in the symmetric difference of the marked languages,
/// ordered by a's alphabet followed by b's extra events.
inline std::optional<Word> difference_witness(const Dfa& a, const Dfa& b) {
  return detail::product_search(trim(a), trim(b), a.alphabet().united(b.alphabet()),
                                [](bool in_a, bool in_b) { return in_a != in_b; });
}

inline bool language_equal(const Dfa& a, const Dfa& b) { return !difference_witness(a, b); }

/// Generated-language variants.
inline std::optional<Word> generated_subset_counterexample(const Dfa& a, const Dfa& b) {
  return subset_counterexample(mark_all(a), mark_all(b));
}
inline bool generated_equal(const Dfa& a, const Dfa& b) { return language_equal(mark_all(a), mark_all(b)); }

}  // namespace agsyn
