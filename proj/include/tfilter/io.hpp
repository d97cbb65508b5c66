#pragma once

// Text formats.
//
// Automaton files, one directive per line, `#` starts a comment:
//
//   kind ta
//   alphabet g1 g2
//   states idle g1 g2
//   initial idle
//   accepting g2
//   clocks x
//   edge idle g1 g1 reset x
//   edge g1 g2 g2 guard x < 2
//
// `guard` takes a conjunction `clock REL int && ...` (REL in <, <=, >, >=) or
// `true`; `reset` takes clock names. NFA files use `kind nfa` and no clocks.
//
// Word files hold one event per line, `label<TAB>timestamp` for timed words or
// just `label` for untimed ones. ⊥ is written `_`.

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "tfilter/core.hpp"
#include "tfilter/errors.hpp"

namespace tfilter {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string_view strip_comment(std::string_view line) {
  if (auto p = line.find('#'); p != std::string_view::npos) line = line.substr(0, p);
  return trim(line);
}

inline std::string at_line(std::size_t n) { return "line " + std::to_string(n) + ": "; }

inline std::map<std::string, std::uint32_t> index_names(const std::vector<std::string>& names,
                                                        const char* what) {
  std::map<std::string, std::uint32_t> idx;
  for (std::uint32_t i = 0; i < names.size(); ++i)
    if (!idx.emplace(names[i], i).second) throw InputError(std::string("duplicate ") + what + " '" + names[i] + "'");
  return idx;
}

inline std::uint32_t lookup(const std::map<std::string, std::uint32_t>& idx, const std::string& name,
                            const char* what, std::size_t line) {
  auto it = idx.find(name);
  if (it == idx.end()) throw InputError(at_line(line) + "undeclared " + what + " '" + name + "'");
  return it->second;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

inline ClockAtom parse_atom(std::string_view text, const std::map<std::string, std::uint32_t>& clocks,
                            std::size_t line) {
  text = trim(text);
  const auto op_pos = text.find_first_of("<>");
  if (op_pos == std::string_view::npos) throw ParseError(at_line(line) + "expected a comparison in guard");
  const std::string name(trim(text.substr(0, op_pos)));
  std::size_t rest = op_pos + 1;
  const bool eq = rest < text.size() && text[rest] == '=';
  if (eq) ++rest;
  Relation rel = text[op_pos] == '<' ? (eq ? Relation::LessEq : Relation::Less)
                                     : (eq ? Relation::GreaterEq : Relation::Greater);
  const auto num = trim(text.substr(rest));
  std::int64_t c = 0;
  auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), c);
  if (!is_identifier(name) || ec != std::errc{} || p != num.data() + num.size() || num.empty())
    throw ParseError(at_line(line) + "malformed guard atom '" + std::string(text) + "'");
  if (c < 0) throw InputError(at_line(line) + "guard constants must be nonnegative");
  return {lookup(clocks, name, "clock", line), rel, c};
}

inline ClockConstraint parse_guard(std::string_view text, const std::map<std::string, std::uint32_t>& clocks,
                                   std::size_t line) {
  ClockConstraint g;
  text = trim(text);
  if (text == "true") return g;
  std::size_t start = 0;
  while (true) {
    const auto amp = text.find("&&", start);
    g.atoms.push_back(parse_atom(text.substr(start, amp == std::string_view::npos ? amp : amp - start), clocks, line));
    if (amp == std::string_view::npos) break;
    start = amp + 2;
  }
  return g;
}

struct RawAutomaton {
  std::string kind;
  std::vector<std::string> alphabet, states, accepting, clocks;
  std::optional<std::string> initial;
  struct Edge {
    std::string source, label, target, guard;
    std::vector<std::string> resets;
    std::size_t line;
  };
  std::vector<Edge> edges;
};

inline RawAutomaton parse_raw(std::string_view text) {
  RawAutomaton raw;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto seen = std::map<std::string, bool>{};
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = strip_comment(text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    auto tok = split_ws(line);
    const std::string key = tok[0];
    tok.erase(tok.begin());
    if (key != "edge") {
      if (seen[key]) throw ParseError(at_line(line_no) + "duplicate directive '" + key + "'");
      seen[key] = true;
    }
    if (key == "kind") {
      if (tok.size() != 1 || (tok[0] != "nfa" && tok[0] != "ta"))
        throw ParseError(at_line(line_no) + "kind must be 'nfa' or 'ta'");
      raw.kind = tok[0];
    } else if (key == "alphabet") {
      raw.alphabet = tok;
    } else if (key == "states") {
      raw.states = tok;
    } else if (key == "initial") {
      if (tok.size() != 1) throw ParseError(at_line(line_no) + "exactly one initial state expected");
      raw.initial = tok[0];
    } else if (key == "accepting") {
      raw.accepting = tok;
    } else if (key == "clocks") {
      raw.clocks = tok;
    } else if (key == "edge") {
      if (tok.size() < 3) throw ParseError(at_line(line_no) + "edge needs SOURCE LABEL TARGET");
      RawAutomaton::Edge e{tok[0], tok[1], tok[2], {}, {}, line_no};
      std::size_t i = 3;
      bool have_guard = false, have_reset = false;
      while (i < tok.size()) {
        if (tok[i] == "guard" && !have_guard) {
          have_guard = true;
          ++i;
          std::string g;
          while (i < tok.size() && tok[i] != "reset") g += tok[i++] + " ";
          if (trim(g).empty()) throw ParseError(at_line(line_no) + "empty guard");
          e.guard = g;
        } else if (tok[i] == "reset" && !have_reset) {
          have_reset = true;
          ++i;
          while (i < tok.size() && tok[i] != "guard") e.resets.push_back(tok[i++]);
        } else {
          throw ParseError(at_line(line_no) + "unexpected token '" + tok[i] + "'");
        }
      }
      raw.edges.push_back(std::move(e));
    } else {
      throw ParseError(at_line(line_no) + "unknown directive '" + key + "'");
    }
  }
  if (raw.kind.empty()) throw ParseError("missing 'kind' directive");
  if (raw.states.empty()) throw ParseError("missing 'states' directive");
  if (!raw.initial) throw ParseError("missing 'initial' directive");
  return raw;
}

}  // namespace detail

using Automaton = std::variant<Nfa, TimedAutomaton>;

inline Automaton parse_automaton(std::string_view text) {
  using namespace detail;
  RawAutomaton raw = parse_raw(text);
  Alphabet alphabet(raw.alphabet);
  const auto states = index_names(raw.states, "state");
  const StateId initial = lookup(states, *raw.initial, "state", 0);
  std::vector<StateId> accepting;
  for (const auto& s : raw.accepting) accepting.push_back(lookup(states, s, "state", 0));

  auto label_of = [&](const RawAutomaton::Edge& e) {
    if (e.label == kBottomToken) throw InputError(at_line(e.line) + "edges cannot carry the ⊥ label");
    auto s = alphabet.find(e.label);
    if (!s) throw InputError(at_line(e.line) + "label '" + e.label + "' not in alphabet");
    return *s;
  };

  if (raw.kind == "nfa") {
    if (!raw.clocks.empty()) throw ParseError("an NFA cannot declare clocks");
    std::vector<NfaTransition> edges;
    for (const auto& e : raw.edges) {
      if (!e.guard.empty() || !e.resets.empty()) throw ParseError(at_line(e.line) + "NFA edges take no guard or reset");
      edges.push_back({lookup(states, e.source, "state", e.line), label_of(e), lookup(states, e.target, "state", e.line)});
    }
    return Nfa(std::move(alphabet), raw.states, initial, std::move(accepting), std::move(edges));
  }

  const auto clocks = index_names(raw.clocks, "clock");
  for (const auto& c : raw.clocks)
    if (!is_identifier(c)) throw ParseError("invalid clock name '" + c + "'");
  std::vector<TaTransition> edges;
  for (const auto& e : raw.edges) {
    TaTransition t{lookup(states, e.source, "state", e.line), lookup(states, e.target, "state", e.line),
                   label_of(e), {}, {}};
    for (const auto& r : e.resets) t.resets.push_back(lookup(clocks, r, "clock", e.line));
    if (!e.guard.empty()) t.guard = parse_guard(e.guard, clocks, e.line);
    edges.push_back(std::move(t));
  }
  return TimedAutomaton(std::move(alphabet), raw.states, initial, std::move(accepting), raw.clocks, std::move(edges));
}

inline Nfa parse_nfa(std::string_view text) {
  auto a = parse_automaton(text);
  if (auto* n = std::get_if<Nfa>(&a)) return std::move(*n);
  throw InputError("expected an NFA (kind nfa)");
}

inline TimedAutomaton parse_ta(std::string_view text) {
  auto a = parse_automaton(text);
  if (auto* t = std::get_if<TimedAutomaton>(&a)) return std::move(*t);
  throw InputError("expected a timed automaton (kind ta)");
}

namespace detail {
inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += " " + x;
  return s;
}

template <class A>
std::string format_header(const A& a, const char* kind) {
  std::string s = std::string("kind ") + kind + "\n";
  s += "alphabet" + join(a.alphabet().labels()) + "\n";
  s += "states" + join(a.state_names()) + "\n";
  s += "initial " + a.state_name(a.initial()) + "\n";
  std::vector<std::string> acc;
  for (StateId q : a.accepting_states()) acc.push_back(a.state_name(q));
  s += "accepting" + join(acc) + "\n";
  return s;
}
}  // namespace detail

inline std::string format_nfa(const Nfa& nfa) {
  std::string s = detail::format_header(nfa, "nfa");
  for (const auto& t : nfa.transitions())
    s += "edge " + nfa.state_name(t.source) + " " + std::string(nfa.alphabet().label(t.label)) + " " +
         nfa.state_name(t.target) + "\n";
  return s;
}

inline std::string format_ta(const TimedAutomaton& ta) {
  std::string s = detail::format_header(ta, "ta");
  s += "clocks" + detail::join(ta.clock_names()) + "\n";
  for (const auto& t : ta.transitions()) {
    s += "edge " + ta.state_name(t.source) + " " + std::string(ta.alphabet().label(t.label)) + " " +
         ta.state_name(t.target);
    if (!t.guard.is_true()) {
      s += " guard";
      for (std::size_t i = 0; i < t.guard.atoms.size(); ++i) {
        const auto& a = t.guard.atoms[i];
        s += (i ? " && " : " ") + ta.clock_names()[a.clock] + " " + std::string(to_string(a.relation)) + " " +
             std::to_string(a.constant);
      }
    }
    if (!t.resets.empty()) {
      s += " reset";
      for (ClockId c : t.resets) s += " " + ta.clock_names()[c];
    }
    s += "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Words
// ---------------------------------------------------------------------------

// Shortest decimal form that parses back to the same double.
inline std::string format_time(double t) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, t);
  return std::string(buf, p);
}

struct WordLine {
  std::string label;
  std::optional<double> time;
  std::size_t line = 0;
};

// Reads the next event line, skipping blanks and comments.
inline std::optional<WordLine> read_word_line(std::istream& in, std::size_t& line_no) {
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto tok = detail::split_ws(line);
    if (tok.size() > 2) throw ParseError(detail::at_line(line_no) + "expected 'label' or 'label<TAB>timestamp'");
    WordLine out{tok[0], std::nullopt, line_no};
    if (tok.size() == 2) {
      double t = 0;
      const auto& s = tok[1];
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), t);
      if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError(detail::at_line(line_no) + "malformed timestamp '" + s + "'");
      out.time = t;
    }
    return out;
  }
  return std::nullopt;
}

// Untimed words; `_` is accepted as ⊥, any timestamps are ignored.
inline Word parse_untimed_word(std::string_view text, const Alphabet& alphabet) {
  std::istringstream in{std::string(text)};
  std::size_t line = 0;
  Word w;
  while (auto l = read_word_line(in, line)) w.push_back(alphabet.symbol(l->label));
  return w;
}

inline TimedWord parse_timed_word(std::string_view text, const Alphabet& alphabet) {
  std::istringstream in{std::string(text)};
  std::size_t line = 0;
  std::vector<TimedEvent> events;
  while (auto l = read_word_line(in, line)) {
    if (!l->time) throw ParseError(detail::at_line(l->line) + "missing timestamp");
    if (!events.empty() && !(*l->time > events.back().time))
      throw InputError(detail::at_line(l->line) + "timestamps must be strictly increasing");
    events.push_back({alphabet.symbol(l->label), *l->time});
  }
  return TimedWord(std::move(events));
}

inline std::string format_untimed_word(std::span<const Symbol> w, const Alphabet& alphabet) {
  std::string s;
  for (Symbol a : w) (s += alphabet.label(a)) += '\n';
  return s;
}

inline std::string format_timed_word(const TimedWord& w, const Alphabet& alphabet) {
  std::string s;
  for (const auto& e : w) ((s += alphabet.label(e.label)) += '\t') += format_time(e.time) + '\n';
  return s;
}

}  // namespace tfilter
