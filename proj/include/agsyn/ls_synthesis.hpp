#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "agsyn/lang_ops.hpp"
#include "agsyn/lstar.hpp"

namespace agsyn {

/// Membership source for the plant's generated language.
using PlantOracle = std::function<bool(const Word&)>;

inline PlantOracle plant_oracle(const Dfa& plant) {
  return [plant](const Word& w) { return plant.generates(w); };
}

/// Words s ∈ L(G) such that st ∈ C for some uncontrollable string t.
inline std::set<Word> d_ui(const std::vector<Word>& c, const EventAlphabet& alphabet, const PlantOracle& plant) {
  std::set<Word> out;
  for (const auto& w : c) {
    // Walk back over the uncontrollable tail of w.
    std::size_t k = w.size();
    for (;;) {
      Word s(w.begin(), w.begin() + static_cast<long>(k));
      if (plant(s)) out.insert(s);
      if (k == 0 || alphabet.is_controllable(w[k - 1])) break;
      --k;
    }
  }
  return out;
}

/// Words of L_m(d) none of whose prefixes lies in `cut`.
inline Dfa remove_extensions(const Dfa& d, const std::set<Word>& cut) {
  if (cut.empty()) return d;
  Dfa trie = [&] {
    DfaBuilder b(d.alphabet());
    b.initial("");
    for (const auto& w : cut) {
      std::string cur;
      for (const auto& s : w) {
        std::string nxt = cur + "\x1f" + s;
        b.edge(cur, s, nxt);
        cur = nxt;
      }
      b.mark(cur);
    }
    return b.build();
  }();
  // Product with the trie; leaving the trie means no cut prefix can follow.
  const int out_of_trie = -1;
  std::unordered_map<std::uint64_t, int> id;
  std::vector<std::pair<int, int>> states;
  std::vector<std::vector<int>> delta;
  auto bad = [&](int t) { return t >= 0 && trie.is_marked(t); };
  if (bad(trie.initial())) return empty_dfa(d.alphabet());
  states.emplace_back(d.initial(), trie.initial());
  id.emplace(detail::pair_key(d.initial(), trie.initial()), 0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto [p, t] = states[i];
    std::vector<int> row(d.alphabet().size(), -1);
    for (int e = 0; e < d.num_events(); ++e) {
      int np = d.next(p, e);
      if (np < 0) continue;
      int nt = t == out_of_trie ? out_of_trie : trie.next(t, e);
      if (bad(nt)) continue;
      auto [it, fresh] = id.emplace(detail::pair_key(np, nt), static_cast<int>(states.size()));
      if (fresh) states.emplace_back(np, nt);
      row[static_cast<std::size_t>(e)] = it->second;
    }
    delta.push_back(std::move(row));
  }
  std::vector<std::string> names;
  std::vector<bool> marked;
  for (auto [p, t] : states) {
    names.push_back(d.name(p) + "/" + std::to_string(t));
    marked.push_back(d.is_marked(p));
  }
  return minimize(Dfa(d.alphabet(), std::move(names), 0, std::move(delta), std::move(marked)));
}

/// Membership answer of round j: round 1 is plain membership in L_i; later
/// rounds also reject anything extending a word of D_ui(C).
inline bool ls_membership(const Word& t, int round, const Dfa& spec, const std::vector<Word>& c, const PlantOracle& plant) {
  if (!spec.accepts(t)) return false;
  if (round <= 1) return true;
  auto d = d_ui(c, spec.alphabet(), plant);
  for (std::size_t k = 0; k <= t.size(); ++k)
    if (d.count(Word(t.begin(), t.begin() + static_cast<long>(k)))) return false;
  return true;
}

/// Shortest-lex word of L(M_j) Δ K_j.
inline std::optional<Word> ls_counterexample(const Dfa& conjecture, const Dfa& k) {
  return difference_witness(conjecture, k);
}

struct SynthesisProblem {
  Dfa spec;                       // prefix-closed L_i; its alphabet carries Σ_c
  PlantOracle plant;              // membership in L(G_i)
  std::optional<Dfa> plant_dfa;   // when known: exact discovery and cross-check
  int search_depth = 12;          // discovery bound without a plant automaton
};

struct SynthesisResult {
  Dfa supervisor;                 // all states marked; empty automaton if supC is empty
  std::vector<Word> illegal;      // C in discovery order
  int rounds = 1;                 // final round index j
  LearnResult learning;
  std::vector<Dfa> k_sequence;    // K_1 = L_i, K_2, ...
  std::vector<std::string> warnings;
};

namespace detail {

// K_j is kept as a base automaton (K × plant when the plant automaton is
// known, K alone otherwise) minus a growing set of dead states. An
// uncontrollably illegal word s·t kills the states reached by s and by every
// s·t' with t' a prefix of t, which removes D_ui({s·t})Σ* together with every
// word sharing those states and hence the same illegal continuation.
class LsTeacher : public Teacher {
 public:
  explicit LsTeacher(const SynthesisProblem& p) : p_(p), spec_(trim(p.spec)) {
    if (p.plant_dfa) {
      base_ = accessible(parallel_compose(spec_, mark_all(*p.plant_dfa)));
      base_ = Dfa(spec_.alphabet(), base_.names(), base_.initial(), base_.delta(), base_.marked());
    } else {
      base_ = spec_;
    }
    dead_.assign(static_cast<std::size_t>(base_.num_states()), false);
    rebuild();
  }

  bool member(const IndexWord& iw) override {
    bool in_spec = spec_.accepts(iw);
    if (in_spec && !p_.plant(spec_.alphabet().decode(iw)))
      throw InputError("specification word " + to_string(spec_.alphabet().decode(iw)) + " is not generated by the plant");
    if (!in_spec) intercept(iw);
    return in_k(iw);
  }

  std::optional<IndexWord> conjecture(const Dfa& m) override {
    if (!absorb_pending()) {
      if (auto w = discover()) add_illegal(*w);
    }
    auto ce = ls_counterexample(m, k_);
    if (!ce) return std::nullopt;
    return spec_.alphabet().encode(*ce);
  }

  [[nodiscard]] int generation() const override { return generation_; }
  [[nodiscard]] const std::vector<Word>& illegal() const { return c_; }
  [[nodiscard]] const Dfa& k() const { return k_; }
  [[nodiscard]] const std::vector<Dfa>& history() const { return history_; }

 private:
  bool in_k(const IndexWord& w) const {
    int q = base_.initial();
    if (dead_[static_cast<std::size_t>(q)]) return false;
    for (int e : w) {
      q = base_.next(q, e);
      if (q < 0 || dead_[static_cast<std::size_t>(q)]) return false;
    }
    return base_.is_marked(q);
  }

  void rebuild() {
    if (dead_[static_cast<std::size_t>(base_.initial())]) {
      k_ = empty_dfa(spec_.alphabet());
    } else {
      std::vector<bool> keep(dead_.size());
      for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = !dead_[i];
      k_ = minimize(restrict_states(base_, keep));
    }
    history_.push_back(k_);
  }

  // A rejected query w = s·t with s its longest legal prefix and t a non-empty
  // uncontrollable string inside the plant is an uncontrollably illegal word.
  void intercept(const IndexWord& w) {
    std::size_t k = 0;
    while (k < w.size() && spec_.accepts(IndexWord(w.begin(), w.begin() + static_cast<long>(k + 1)))) ++k;
    if (k == w.size()) return;
    for (std::size_t i = k; i < w.size(); ++i)
      if (spec_.alphabet().is_controllable(w[i])) return;
    Word word = spec_.alphabet().decode(w);
    if (!p_.plant(word)) return;
    if (std::find(c_.begin(), c_.end(), word) == c_.end() &&
        std::find(pending_.begin(), pending_.end(), word) == pending_.end())
      pending_.push_back(word);
  }

  bool absorb_pending() {
    bool grew = false;
    for (const auto& w : pending_) grew = add_illegal(w) || grew;
    pending_.clear();
    return grew;
  }

  // Records w in C and kills the base states of D_ui({w}). True if K_j shrank.
  bool add_illegal(const Word& w) {
    if (std::find(c_.begin(), c_.end(), w) != c_.end()) return false;
    c_.push_back(w);
    IndexWord iw = spec_.alphabet().encode(w);
    std::size_t k = iw.size();
    while (k > 0 && !spec_.alphabet().is_controllable(iw[k - 1])) --k;
    bool grew = false;
    int q = base_.initial();
    for (std::size_t i = 0; i <= iw.size() && q >= 0; ++i) {
      if (i >= k && !dead_[static_cast<std::size_t>(q)]) {
        dead_[static_cast<std::size_t>(q)] = true;
        grew = true;
      }
      if (i < iw.size()) q = base_.next(q, iw[i]);
    }
    if (!grew) return false;
    ++generation_;
    rebuild();
    return true;
  }

  // Shortest-lex s·t with s ∈ K_j, t uncontrollable, s·t ∈ L(G) − L_i.
  std::optional<Word> discover() const {
    if (p_.plant_dfa) return discover_with_plant(*p_.plant_dfa);
    return discover_bounded();
  }

  std::optional<Word> discover_with_plant(const Dfa& g) const {
    const auto& sigma = spec_.alphabet();
    auto mg = event_map(sigma, g.alphabet());
    struct Node {
      bool tail;
      int k, l, g, parent, event;
    };
    if (!in_k({})) return std::nullopt;
    std::vector<Node> nodes{{false, base_.initial(), spec_.initial(), g.initial(), -1, -1}};
    std::set<std::tuple<bool, int, int, int>> seen{{false, base_.initial(), spec_.initial(), g.initial()}};
    auto word_of = [&](int i, int last) {
      IndexWord w{last};
      for (int j = i; nodes[static_cast<std::size_t>(j)].parent >= 0; j = nodes[static_cast<std::size_t>(j)].parent)
        w.push_back(nodes[static_cast<std::size_t>(j)].event);
      std::reverse(w.begin(), w.end());
      return sigma.decode(w);
    };
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Node cur = nodes[i];
      for (int e = 0; e < static_cast<int>(sigma.size()); ++e) {
        int ng = g.next(cur.g, mg[static_cast<std::size_t>(e)]);
        if (ng < 0) continue;
        bool uc = !sigma.is_controllable(e);
        int nl = spec_.next(cur.l, e);
        if (uc && nl < 0) return word_of(static_cast<int>(i), e);
        if (nl < 0) continue;
        Node nxt{true, -1, nl, ng, static_cast<int>(i), e};
        if (!cur.tail) {
          int nk = base_.next(cur.k, e);
          if (nk >= 0 && !dead_[static_cast<std::size_t>(nk)]) nxt = {false, nk, nl, ng, static_cast<int>(i), e};
          else if (!uc) continue;
        } else if (!uc) {
          continue;
        }
        if (seen.insert({nxt.tail, nxt.k, nxt.l, nxt.g}).second) nodes.push_back(nxt);
      }
    }
    return std::nullopt;
  }

  // Without a plant automaton: one access word per live base state, each
  // followed by uncontrollable tails up to the depth bound.
  std::optional<Word> discover_bounded() const {
    const auto& sigma = spec_.alphabet();
    if (!in_k({})) return std::nullopt;
    std::set<int> seen{base_.initial()};
    std::vector<std::pair<Word, int>> access{{{}, base_.initial()}};
    for (std::size_t i = 0; i < access.size(); ++i) {
      auto [w, k] = access[i];
      if (static_cast<int>(w.size()) >= p_.search_depth) continue;
      for (int e = 0; e < static_cast<int>(sigma.size()); ++e) {
        int nk = base_.next(k, e);
        if (nk < 0 || dead_[static_cast<std::size_t>(nk)]) continue;
        Word we = w;
        we.push_back(sigma[e]);
        if (seen.insert(nk).second) access.emplace_back(we, nk);
      }
    }
    std::optional<Word> best;
    auto better = [&](const Word& w) {
      return !best || w.size() < best->size() || (w.size() == best->size() && sigma.encode(w) < sigma.encode(*best));
    };
    for (const auto& [s, k] : access) {
      // Here the base automaton is K itself.
      std::vector<std::pair<Word, int>> frontier{{s, k}};
      std::set<int> tail_seen{k};
      for (int depth = 0; depth < p_.search_depth && !frontier.empty(); ++depth) {
        std::vector<std::pair<Word, int>> next;
        for (const auto& [w, q] : frontier)
          for (int e = 0; e < static_cast<int>(sigma.size()); ++e) {
            if (sigma.is_controllable(e)) continue;
            Word we = w;
            we.push_back(sigma[e]);
            if (!p_.plant(we)) continue;
            int nq = spec_.next(q, e);
            if (nq < 0) {
              if (better(we)) best = we;
              continue;
            }
            if (tail_seen.insert(nq).second) next.emplace_back(we, nq);
          }
        frontier.swap(next);
      }
    }
    return best;
  }

  const SynthesisProblem& p_;
  Dfa spec_;
  Dfa base_;
  std::vector<bool> dead_;
  Dfa k_;
  std::vector<Word> c_;
  std::vector<Word> pending_;
  std::vector<Dfa> history_;
  int generation_ = 0;
};

}  // namespace detail

/// Learns the supremal controllable sublanguage of K and returns it as
/// a supervisor (every state marked).
inline SynthesisResult synthesize_supervisor(const SynthesisProblem& p, const LearnOptions& opt = {}) {
  if (!is_prefix_closed(p.spec)) throw InputError("supervisor synthesis needs a prefix-closed specification");
  if (is_empty(trim(p.spec))) throw InputError("supervisor synthesis needs a non-empty specification");
  if (p.plant_dfa) detail::require_same_events(p.spec, *p.plant_dfa, "synthesis");
  detail::LsTeacher teacher(p);
  SynthesisResult res;
  res.learning = learn(teacher, p.spec.alphabet(), opt);
  res.illegal = teacher.illegal();
  res.rounds = teacher.generation() + 1;
  res.k_sequence = teacher.history();
  Dfa t = trim(res.learning.dfa);
  res.supervisor = is_empty(t) ? empty_dfa(p.spec.alphabet()) : minimize(mark_all(t));
  if (is_empty(t)) res.warnings.push_back("supremal controllable sublanguage is empty; supervisor disables everything");
  if (p.plant_dfa) {
    Dfa expected = sup_c(p.spec, with_alphabet_controllable(*p.plant_dfa, p.spec.alphabet().controllable()));
    Dfa got = res.supervisor;
    if (!is_empty(got)) got = minimize(mark_all(trim(parallel_compose(got, mark_all(*p.plant_dfa)))));
    if (!language_equal(got, expected))
      throw std::logic_error("learned supervisor differs from the supremal controllable sublanguage");
  }
  return res;
}

}  // namespace agsyn
