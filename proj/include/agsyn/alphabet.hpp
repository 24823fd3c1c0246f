#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "agsyn/error.hpp"

namespace agsyn {

/// A word over event symbols. The empty vector is the empty word.
using Word = std::vector<std::string>;

/// A word over event indices of a particular alphabet.
using IndexWord = std::vector<int>;

/// Ordered set of event symbols with a controllable subset.
///
/// The declared order is significant: every shortest-counterexample search
/// breaks ties lexicographically by this order.
class EventAlphabet {
 public:
  EventAlphabet() = default;

  EventAlphabet(std::vector<std::string> events, const std::vector<std::string>& controllable = {})
      : events_(std::move(events)), controllable_(events_.size(), false) {
    for (std::size_t i = 0; i < events_.size(); ++i) {
      if (events_[i].empty()) throw InputError("event symbols must be non-empty");
      if (!index_.emplace(events_[i], static_cast<int>(i)).second)
        throw InputError("duplicate event symbol '" + events_[i] + "'");
    }
    for (const auto& c : controllable) {
      auto idx = find(c);
      if (!idx) throw InputError("controllable event '" + c + "' is not in the alphabet");
      controllable_[static_cast<std::size_t>(*idx)] = true;
    }
  }

  EventAlphabet(std::initializer_list<std::string> events) : EventAlphabet(std::vector<std::string>(events)) {}

  [[nodiscard]] std::size_t size() const { return events_.size(); }
  [[nodiscard]] bool empty() const { return events_.empty(); }
  [[nodiscard]] const std::vector<std::string>& events() const { return events_; }
  [[nodiscard]] const std::string& operator[](int i) const { return events_[static_cast<std::size_t>(i)]; }

  [[nodiscard]] std::optional<int> find(const std::string& e) const {
    auto it = index_.find(e);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] bool contains(const std::string& e) const { return index_.count(e) != 0; }

  [[nodiscard]] int index_of(const std::string& e) const {
    auto idx = find(e);
    if (!idx) throw InputError("event '" + e + "' is not in the alphabet");
    return *idx;
  }

  [[nodiscard]] bool is_controllable(int i) const { return controllable_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] bool is_controllable(const std::string& e) const { return is_controllable(index_of(e)); }

  [[nodiscard]] std::vector<std::string> controllable() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < events_.size(); ++i)
      if (controllable_[i]) out.push_back(events_[i]);
    return out;
  }
  [[nodiscard]] std::vector<std::string> uncontrollable() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < events_.size(); ++i)
      if (!controllable_[i]) out.push_back(events_[i]);
    return out;
  }

  [[nodiscard]] bool is_subset_of(const EventAlphabet& other) const {
    return std::all_of(events_.begin(), events_.end(), [&](const auto& e) { return other.contains(e); });
  }

  /// Union in declared order: this alphabet's events first, then the new ones
  /// of `other`. An event is controllable if either side controls it.
  [[nodiscard]] EventAlphabet united(const EventAlphabet& other) const {
    std::vector<std::string> events = events_;
    std::vector<std::string> ctrl = controllable();
    for (std::size_t i = 0; i < other.events_.size(); ++i) {
      const auto& e = other.events_[i];
      if (!contains(e)) events.push_back(e);
      if (other.controllable_[i] && !(contains(e) && is_controllable(e))) ctrl.push_back(e);
    }
    return EventAlphabet(std::move(events), ctrl);
  }

  /// Events of this alphabet that also occur in `keep`, in this alphabet's order.
  [[nodiscard]] EventAlphabet restricted_to(const std::vector<std::string>& keep) const {
    std::vector<std::string> events;
    std::vector<std::string> ctrl;
    for (std::size_t i = 0; i < events_.size(); ++i) {
      if (std::find(keep.begin(), keep.end(), events_[i]) == keep.end()) continue;
      events.push_back(events_[i]);
      if (controllable_[i]) ctrl.push_back(events_[i]);
    }
    return EventAlphabet(std::move(events), ctrl);
  }

  [[nodiscard]] EventAlphabet with_controllable(const std::vector<std::string>& ctrl) const {
    return EventAlphabet(events_, ctrl);
  }

  /// Same events and controllability, reordered to follow `order`. Events not
  /// mentioned in `order` keep their relative order after the mentioned ones.
  [[nodiscard]] EventAlphabet reordered(const std::vector<std::string>& order) const {
    std::vector<std::string> events;
    for (const auto& e : order)
      if (contains(e) && std::find(events.begin(), events.end(), e) == events.end()) events.push_back(e);
    for (const auto& e : events_)
      if (std::find(events.begin(), events.end(), e) == events.end()) events.push_back(e);
    return EventAlphabet(std::move(events), controllable());
  }

  [[nodiscard]] IndexWord encode(const Word& w) const {
    IndexWord out;
    out.reserve(w.size());
    for (const auto& s : w) {
      auto idx = find(s);
      if (!idx) throw InputError("symbol '" + s + "' is outside the alphabet");
      out.push_back(*idx);
    }
    return out;
  }

  [[nodiscard]] Word decode(const IndexWord& w) const {
    Word out;
    out.reserve(w.size());
    for (int i : w) out.push_back(events_[static_cast<std::size_t>(i)]);
    return out;
  }

  friend bool operator==(const EventAlphabet& a, const EventAlphabet& b) {
    return a.events_ == b.events_ && a.controllable_ == b.controllable_;
  }

 private:
  std::vector<std::string> events_;
  std::vector<bool> controllable_;
  std::unordered_map<std::string, int> index_;
};

/// Natural projection of a word onto a set of events.
inline Word project_word(const Word& w, const EventAlphabet& target) {
  Word out;
  for (const auto& s : w)
    if (target.contains(s)) out.push_back(s);
  return out;
}

inline std::string to_string(const Word& w) {
  if (w.empty()) return "ε";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += w[i];
  }
  return out;
}

}  // namespace agsyn
