#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "agsyn/dfa.hpp"
#include "agsyn/error.hpp"
#include "agsyn/ops.hpp"

namespace agsyn {

struct IndexWordHash {
  std::size_t operator()(const IndexWord& w) const noexcept {
    std::size_t h = w.size();
    for (int x : w) h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

/// Minimally adequate teacher over a fixed alphabet.
///
/// `generation()` lets a teacher change its answer function between learning
/// rounds; the learner drops cached answers whenever it moves.
class Teacher {
 public:
  virtual ~Teacher() = default;
  virtual bool member(const IndexWord& w) = 0;
  /// Absent if `hypothesis` is accepted, otherwise a counterexample.
  virtual std::optional<IndexWord> conjecture(const Dfa& hypothesis) = 0;
  [[nodiscard]] virtual int generation() const { return 0; }
};

/// Teacher backed by a known target automaton (marked language).
class DfaTeacher : public Teacher {
 public:
  explicit DfaTeacher(Dfa target) : target_(std::move(target)) {}
  bool member(const IndexWord& w) override { return target_.accepts(w); }
  std::optional<IndexWord> conjecture(const Dfa& h) override {
    auto w = difference_witness(h, target_);
    if (!w) return std::nullopt;
    return h.alphabet().encode(*w);
  }

 private:
  Dfa target_;
};

/// The (S, E, T) table. T is a cache filled through the teacher on demand.
class ObservationTable {
 public:
  ObservationTable(EventAlphabet alphabet, Teacher& teacher)
      : alphabet_(std::move(alphabet)), teacher_(&teacher), generation_(teacher.generation()) {
    S_.push_back({});
    E_.push_back({});
  }

  [[nodiscard]] const std::vector<IndexWord>& S() const { return S_; }
  [[nodiscard]] const std::vector<IndexWord>& E() const { return E_; }
  [[nodiscard]] const EventAlphabet& alphabet() const { return alphabet_; }
  [[nodiscard]] std::size_t queries() const { return queries_; }

  void set_trace(std::vector<std::string>* trace) { trace_ = trace; }

  bool T(const IndexWord& w) {
    sync_generation();
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
    bool v = teacher_->member(w);
    ++queries_;
    if (trace_) trace_->push_back("MQ " + to_string(alphabet_.decode(w)) + " " + (v ? "1" : "0"));
    // The teacher may have moved to a new generation while answering.
    if (teacher_->generation() != generation_) {
      sync_generation();
      return T(w);
    }
    cache_.emplace(w, v);
    return v;
  }

  /// row(s) as a bit-vector over E in declared order.
  std::vector<bool> row(const IndexWord& s) {
    sync_generation();
    auto& r = rows_[s];
    while (r.size() < E_.size()) {
      const int gen = generation_;
      bool v = T(concat(s, E_[r.size()]));
      if (gen != generation_) return row(s);  // memo was dropped underneath
      r.push_back(v);
    }
    return r;
  }

  bool contains_S(const IndexWord& s) const {
    for (const auto& x : S_)
      if (x == s) return true;
    return false;
  }

  /// Add s and its prefixes to S (keeps S prefix-closed).
  void add_to_S(const IndexWord& s) {
    for (std::size_t k = 0; k <= s.size(); ++k) {
      IndexWord p(s.begin(), s.begin() + static_cast<long>(k));
      if (!contains_S(p)) S_.push_back(std::move(p));
    }
  }

  /// Add σe for e ∈ E (keeps E suffix-closed as long as e ∈ E).
  void add_to_E(const IndexWord& e) {
    for (const auto& x : E_)
      if (x == e) return;
    E_.push_back(e);
  }

  /// First (s, σ) with row(sσ) not among the rows of S, if any.
  std::optional<IndexWord> closedness_witness() {
    auto rows = S_rows();
    std::set<std::vector<bool>> known(rows.begin(), rows.end());
    for (const auto& s : S_)
      for (int a = 0; a < static_cast<int>(alphabet_.size()); ++a) {
        auto sa = concat(s, {a});
        if (!known.count(row(sa))) return sa;
      }
    return std::nullopt;
  }

  /// First σe separating two S-words with equal rows, if any.
  std::optional<IndexWord> consistency_witness() {
    auto rows = S_rows();
    for (std::size_t i = 0; i < S_.size(); ++i)
      for (std::size_t j = i + 1; j < S_.size(); ++j) {
        if (rows[i] != rows[j]) continue;
        for (int a = 0; a < static_cast<int>(alphabet_.size()); ++a) {
          auto ri = row(concat(S_[i], {a})), rj = row(concat(S_[j], {a}));
          for (std::size_t k = 0; k < E_.size(); ++k)
            if (ri[k] != rj[k]) return concat({a}, E_[k]);
        }
      }
    return std::nullopt;
  }

  [[nodiscard]] bool is_closed() { return !closedness_witness(); }
  [[nodiscard]] bool is_consistent() { return !consistency_witness(); }

  static IndexWord concat(const IndexWord& a, const IndexWord& b) {
    IndexWord out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }

 private:
  std::vector<std::vector<bool>> S_rows() {
    std::vector<std::vector<bool>> rows;
    rows.reserve(S_.size());
    for (const auto& s : S_) rows.push_back(row(s));
    return rows;
  }

  void sync_generation() {
    if (teacher_->generation() == generation_) return;
    generation_ = teacher_->generation();
    cache_.clear();
    rows_.clear();
    if (trace_) trace_->push_back("GEN " + std::to_string(generation_));
  }

  EventAlphabet alphabet_;
  Teacher* teacher_;
  int generation_;
  std::vector<IndexWord> S_;
  std::vector<IndexWord> E_;
  std::unordered_map<IndexWord, bool, IndexWordHash> cache_;
  std::unordered_map<IndexWord, std::vector<bool>, IndexWordHash> rows_;
  std::size_t queries_ = 0;
  std::vector<std::string>* trace_ = nullptr;
};

/// Extend S and E until the table is closed and consistent.
inline void close_and_make_consistent(ObservationTable& t) {
  for (;;) {
    if (auto sa = t.closedness_witness()) {
      t.add_to_S(*sa);
      continue;
    }
    if (auto ae = t.consistency_witness()) {
      t.add_to_E(*ae);
      continue;
    }
    return;
  }
}

/// M(S, E, T) of a closed, consistent table: one state per distinct row.
inline Dfa conjecture_dfa(ObservationTable& t) {
  if (!t.is_closed() || !t.is_consistent()) throw std::logic_error("conjecture requested from an open or inconsistent table");
  const auto& S = t.S();
  const int k = static_cast<int>(t.alphabet().size());
  std::vector<std::vector<bool>> rows;
  std::vector<int> state_of(S.size());
  std::vector<std::size_t> rep;
  for (std::size_t i = 0; i < S.size(); ++i) {
    auto r = t.row(S[i]);
    int id = -1;
    for (std::size_t j = 0; j < rows.size(); ++j)
      if (rows[j] == r) id = static_cast<int>(j);
    if (id < 0) {
      id = static_cast<int>(rows.size());
      rows.push_back(r);
      rep.push_back(i);
    }
    state_of[i] = id;
  }
  auto find_row = [&](const std::vector<bool>& r) {
    for (std::size_t j = 0; j < rows.size(); ++j)
      if (rows[j] == r) return static_cast<int>(j);
    throw std::logic_error("closed table is missing a row");
  };
  std::vector<std::string> names;
  std::vector<std::vector<int>> delta;
  std::vector<bool> marked;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& s = S[rep[j]];
    names.push_back("q" + std::to_string(j));
    marked.push_back(rows[j][0]);
    std::vector<int> row(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) row[static_cast<std::size_t>(a)] = find_row(t.row(ObservationTable::concat(s, {a})));
    delta.push_back(std::move(row));
  }
  Dfa m(t.alphabet(), std::move(names), state_of[0], std::move(delta), std::move(marked));
  // δ(q0, se) ∈ Q_m iff T(se) = 1 on the whole table domain.
  for (const auto& s : S)
    for (int a = -1; a < k; ++a) {
      IndexWord base = a < 0 ? s : ObservationTable::concat(s, {a});
      for (const auto& e : t.E()) {
        auto w = ObservationTable::concat(base, e);
        if (m.accepts(w) != t.T(w))
          throw LearnerFault("conjecture disagrees with the table on " + to_string(t.alphabet().decode(w)));
      }
    }
  return m;
}

struct LearnOptions {
  int max_equivalence_queries = 10000;
  bool record_trace = false;
};

struct LearnResult {
  Dfa dfa;
  int equivalence_queries = 0;
  std::size_t membership_queries = 0;
  std::vector<int> conjecture_sizes;
  std::vector<std::string> trace;
};

/// Angluin's L*. Counterexamples are processed by adding all their prefixes to S.
///
/// Trace lines: "MQ <word> <0|1>" per fresh membership answer, "GEN <j>" when
/// the teacher changes generation, "EQ <n> states=<k> S=<|S|> E=<|E|>" per
/// conjecture, "CE <word>" per counterexample, "OK" on acceptance. Words are
/// space separated symbols, ε for the empty word.
inline LearnResult learn(Teacher& teacher, const EventAlphabet& alphabet, const LearnOptions& opt = {}) {
  LearnResult res;
  ObservationTable t(alphabet, teacher);
  if (opt.record_trace) t.set_trace(&res.trace);
  int last_size = 0;
  int last_generation = teacher.generation();
  for (;;) {
    close_and_make_consistent(t);
    Dfa m = conjecture_dfa(t);
    ++res.equivalence_queries;
    res.conjecture_sizes.push_back(m.num_states());
    if (opt.record_trace)
      res.trace.push_back("EQ " + std::to_string(res.equivalence_queries) + " states=" + std::to_string(m.num_states()) +
                          " S=" + std::to_string(t.S().size()) + " E=" + std::to_string(t.E().size()));
    if (teacher.generation() == last_generation && m.num_states() <= last_size && res.equivalence_queries > 1)
      throw LearnerFault("conjecture did not grow after a counterexample");
    last_size = m.num_states();
    last_generation = teacher.generation();
    auto ce = teacher.conjecture(m);
    if (!ce) {
      if (opt.record_trace) res.trace.push_back("OK");
      res.dfa = std::move(m);
      res.membership_queries = t.queries();
      return res;
    }
    if (opt.record_trace) res.trace.push_back("CE " + to_string(alphabet.decode(*ce)));
    if (teacher.generation() != last_generation) {
      // New answer function: the counterexample is judged against it.
      last_size = 0;
      last_generation = teacher.generation();
    }
    const bool answer = t.T(*ce);
    if (teacher.generation() == last_generation && m.accepts(*ce) == answer)
      throw LearnerFault("counterexample " + to_string(alphabet.decode(*ce)) + " does not distinguish the conjecture");
    if (res.equivalence_queries >= opt.max_equivalence_queries)
      throw LearnerFault("equivalence query budget exhausted");
    t.add_to_S(*ce);
  }
}

}  // namespace agsyn
