#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "agsyn/dfa.hpp"
#include "agsyn/error.hpp"

namespace agsyn {

using json = nlohmann::json;

namespace detail {

inline std::string quote(const std::string& s) { return json(s).dump(); }

inline std::string quoted_list(const std::vector<std::string>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += quote(xs[i]);
  }
  return out + "]";
}

inline int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

}  // namespace detail

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parse JSON text; syntax errors become InputError carrying origin:line.
inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ":" + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
  }
}

inline json load_json_file(const std::string& path) { return parse_json_text(read_text_file(path), path); }

/// Build an automaton from its JSON object form.
inline Dfa dfa_from_json(const json& j, const std::string& origin = "<automaton>") {
  auto fail = [&](const std::string& msg) -> InputError { return InputError(origin + ": " + msg); };
  try {
    if (!j.is_object()) throw fail("automaton must be a JSON object");
    for (const char* key : {"states", "alphabet", "initial", "transitions"})
      if (!j.contains(key)) throw fail(std::string("missing field '") + key + "'");
    std::vector<std::string> ctrl;
    if (j.contains("controllable")) ctrl = j.at("controllable").get<std::vector<std::string>>();
    EventAlphabet sigma(j.at("alphabet").get<std::vector<std::string>>(), ctrl);
    DfaBuilder b(sigma);
    auto states = j.at("states").get<std::vector<std::string>>();
    if (states.empty()) throw fail("no states");
    for (const auto& s : states) b.state(s);
    auto init = j.at("initial").get<std::string>();
    if (std::find(states.begin(), states.end(), init) == states.end())
      throw fail("initial state '" + init + "' is not declared");
    b.initial(init);
    if (j.contains("marked"))
      for (const auto& m : j.at("marked").get<std::vector<std::string>>()) {
        if (std::find(states.begin(), states.end(), m) == states.end())
          throw fail("marked state '" + m + "' is not declared");
        b.mark(m);
      }
    for (const auto& t : j.at("transitions")) {
      if (!t.is_array() || t.size() != 3) throw fail("transition must be [src, event, dst]");
      auto src = t[0].get<std::string>();
      auto ev = t[1].get<std::string>();
      auto dst = t[2].get<std::string>();
      for (const auto& s : {src, dst})
        if (std::find(states.begin(), states.end(), s) == states.end())
          throw fail("transition uses undeclared state '" + s + "'");
      if (!sigma.contains(ev)) throw fail("transition uses event '" + ev + "' outside the alphabet");
      b.edge(src, ev, dst);
    }
    return b.build();
  } catch (const json::exception& e) {
    throw fail(e.what());
  } catch (const InputError& e) {
    std::string msg = e.what();
    if (msg.rfind(origin, 0) == 0) throw;
    throw fail(msg);
  }
}

inline Dfa load_dfa(const std::string& path) { return dfa_from_json(load_json_file(path), path); }

/// Canonical text: states in BFS order from the initial state (events in
/// alphabet order), unreachable states after in their stored order,
/// transitions sorted by (source position, event position).
inline std::string dfa_to_text(const Dfa& d) {
  const int n = d.num_states();
  std::vector<int> order{d.initial()};
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  pos[static_cast<std::size_t>(d.initial())] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int e = 0; e < d.num_events(); ++e) {
      int t = d.next(order[i], e);
      if (t >= 0 && pos[static_cast<std::size_t>(t)] < 0) {
        pos[static_cast<std::size_t>(t)] = static_cast<int>(order.size());
        order.push_back(t);
      }
    }
  for (int q = 0; q < n; ++q)
    if (pos[static_cast<std::size_t>(q)] < 0) {
      pos[static_cast<std::size_t>(q)] = static_cast<int>(order.size());
      order.push_back(q);
    }
  std::vector<std::string> states, marked;
  for (int q : order) {
    states.push_back(d.name(q));
    if (d.is_marked(q)) marked.push_back(d.name(q));
  }
  std::ostringstream out;
  out << "{\n";
  out << "  \"states\": " << detail::quoted_list(states) << ",\n";
  out << "  \"alphabet\": " << detail::quoted_list(d.alphabet().events()) << ",\n";
  out << "  \"controllable\": " << detail::quoted_list(d.alphabet().controllable()) << ",\n";
  out << "  \"initial\": " << detail::quote(d.name(d.initial())) << ",\n";
  out << "  \"marked\": " << detail::quoted_list(marked) << ",\n";
  out << "  \"transitions\": [";
  bool first = true;
  for (int q : order)
    for (int e = 0; e < d.num_events(); ++e) {
      int t = d.next(q, e);
      if (t < 0) continue;
      out << (first ? "\n" : ",\n") << "    [" << detail::quote(d.name(q)) << ", "
          << detail::quote(d.alphabet()[e]) << ", " << detail::quote(d.name(t)) << "]";
      first = false;
    }
  out << (first ? "]\n" : "\n  ]\n") << "}\n";
  return out.str();
}

inline void save_dfa(const Dfa& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path + ": cannot write file");
  out << dfa_to_text(d);
}

}  // namespace agsyn
