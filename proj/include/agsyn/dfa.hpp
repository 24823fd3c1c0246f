#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "agsyn/alphabet.hpp"
#include "agsyn/error.hpp"

namespace agsyn {

/// Deterministic automaton with a partial transition function.
///
/// States are dense indices 0..n-1 carrying opaque string names. A missing
/// transition is stored as -1. Instances are immutable once built.
class Dfa {
 public:
  Dfa() = default;

  Dfa(EventAlphabet alphabet, std::vector<std::string> names, int initial,
      std::vector<std::vector<int>> delta, std::vector<bool> marked)
      : alphabet_(std::move(alphabet)),
        names_(std::move(names)),
        initial_(initial),
        delta_(std::move(delta)),
        marked_(std::move(marked)) {
    validate();
  }

  [[nodiscard]] const EventAlphabet& alphabet() const { return alphabet_; }
  [[nodiscard]] int num_states() const { return static_cast<int>(names_.size()); }
  [[nodiscard]] int num_events() const { return static_cast<int>(alphabet_.size()); }
  [[nodiscard]] int initial() const { return initial_; }
  [[nodiscard]] const std::string& name(int q) const { return names_[static_cast<std::size_t>(q)]; }
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
  [[nodiscard]] bool is_marked(int q) const { return marked_[static_cast<std::size_t>(q)]; }
  [[nodiscard]] const std::vector<bool>& marked() const { return marked_; }
  [[nodiscard]] int next(int q, int e) const {
    return delta_[static_cast<std::size_t>(q)][static_cast<std::size_t>(e)];
  }
  [[nodiscard]] const std::vector<std::vector<int>>& delta() const { return delta_; }

  [[nodiscard]] std::optional<int> state_index(const std::string& n) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == n) return static_cast<int>(i);
    return std::nullopt;
  }

  [[nodiscard]] std::size_t num_transitions() const {
    std::size_t n = 0;
    for (const auto& row : delta_)
      for (int t : row) n += t >= 0;
    return n;
  }

  [[nodiscard]] bool is_total() const {
    for (const auto& row : delta_)
      for (int t : row)
        if (t < 0) return false;
    return true;
  }

  /// δ(q, w) over index words; -1 if undefined somewhere along the way.
  [[nodiscard]] int run_from(int q, const IndexWord& w) const {
    for (int e : w) {
      if (q < 0) return -1;
      q = next(q, e);
    }
    return q;
  }

  /// δ(q0, w); absent if some step is undefined. Throws on foreign symbols.
  [[nodiscard]] std::optional<std::string> run(const Word& w) const {
    int q = run_from(initial_, alphabet_.encode(w));
    if (q < 0) return std::nullopt;
    return names_[static_cast<std::size_t>(q)];
  }

  /// w ∈ L(G): the run is defined.
  [[nodiscard]] bool generates(const Word& w) const { return run_from(initial_, alphabet_.encode(w)) >= 0; }
  [[nodiscard]] bool generates(const IndexWord& w) const { return run_from(initial_, w) >= 0; }

  /// w ∈ L_m(G): the run is defined and ends in a marked state.
  [[nodiscard]] bool accepts(const Word& w) const { return accepts(alphabet_.encode(w)); }
  [[nodiscard]] bool accepts(const IndexWord& w) const {
    int q = run_from(initial_, w);
    return q >= 0 && is_marked(q);
  }

 private:
  void validate() const {
    const int n = num_states();
    if (n == 0) throw InputError("automaton must have at least one state");
    if (initial_ < 0 || initial_ >= n) throw InputError("initial state out of range");
    if (delta_.size() != names_.size() || marked_.size() != names_.size())
      throw InputError("automaton tables disagree on the number of states");
    for (const auto& row : delta_) {
      if (row.size() != alphabet_.size()) throw InputError("transition row width differs from alphabet size");
      for (int t : row)
        if (t < -1 || t >= n) throw InputError("transition target out of range");
    }
  }

  EventAlphabet alphabet_;
  std::vector<std::string> names_;
  int initial_ = 0;
  std::vector<std::vector<int>> delta_;
  std::vector<bool> marked_;
};

/// Incremental construction by state and event names. Rejects a second,
/// different successor for the same (state, event).
class DfaBuilder {
 public:
  explicit DfaBuilder(EventAlphabet alphabet) : alphabet_(std::move(alphabet)) {}

  int add_state(const std::string& name, bool marked = false) {
    auto it = index_.find(name);
    if (it != index_.end()) {
      if (marked) marked_[static_cast<std::size_t>(it->second)] = true;
      return it->second;
    }
    int id = static_cast<int>(names_.size());
    index_.emplace(name, id);
    names_.push_back(name);
    marked_.push_back(marked);
    delta_.emplace_back(alphabet_.size(), -1);
    return id;
  }

  DfaBuilder& state(const std::string& name, bool marked = false) {
    add_state(name, marked);
    return *this;
  }

  DfaBuilder& mark(const std::string& name) {
    add_state(name, true);
    return *this;
  }

  DfaBuilder& initial(const std::string& name) {
    initial_ = add_state(name);
    return *this;
  }

  DfaBuilder& edge(const std::string& src, const std::string& event, const std::string& dst) {
    int s = add_state(src);
    int d = add_state(dst);
    int e = alphabet_.index_of(event);
    int& slot = delta_[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)];
    if (slot >= 0 && slot != d)
      throw InputError("nondeterministic transition from '" + src + "' on '" + event + "'");
    slot = d;
    return *this;
  }

  [[nodiscard]] Dfa build() const {
    if (names_.empty()) throw InputError("automaton must have at least one state");
    return Dfa(alphabet_, names_, initial_ < 0 ? 0 : initial_, delta_, marked_);
  }

 private:
  EventAlphabet alphabet_;
  std::vector<std::string> names_;
  std::vector<std::vector<int>> delta_;
  std::vector<bool> marked_;
  std::unordered_map<std::string, int> index_;
  int initial_ = -1;
};

}  // namespace agsyn
