#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tfilter/tfilter.hpp"

namespace tfilter::testing {

inline std::string pattern_path(std::string_view name) { return std::string(TFILTER_PATTERN_DIR) + "/" + std::string(name); }

inline std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

inline Nfa load_nfa(std::string_view name) { return parse_nfa(slurp(pattern_path(name))); }
inline TimedAutomaton load_ta(std::string_view name) { return parse_ta(slurp(pattern_path(name))); }

// aa*b: s0 -a-> s1, s1 -a-> s1, s1 -b-> s2.
inline Nfa pattern_aab() {
  return Nfa(Alphabet({"a", "b"}), {"s0", "s1", "s2"}, 0, {2}, {{0, 0, 1}, {1, 0, 1}, {1, 1, 2}});
}

// One character per symbol; '_' is ⊥.
inline Word word(std::string_view text, const Alphabet& alphabet) {
  Word w;
  for (char c : text) w.push_back(alphabet.symbol(std::string(1, c)));
  return w;
}

inline std::string text(std::span<const Symbol> w, const Alphabet& alphabet) {
  std::string s;
  for (Symbol a : w) s += alphabet.label(a);
  return s;
}

// a, then b strictly less than 2 time units later.
inline TimedAutomaton pattern_two_second() {
  ClockConstraint lt2{{{0, Relation::Less, 2}}};
  return TimedAutomaton(Alphabet({"a", "b"}), {"s0", "s1", "s2"}, 0, {2}, {"x"},
                        {{0, 1, 0, {0}, {}}, {1, 2, 1, {}, lt2}});
}

// (a,0.1)(b,2.5)(a,3.5)(b,4.8)
inline TimedWord word_w2() { return TimedWord({{0, 0.1}, {1, 2.5}, {0, 3.5}, {1, 4.8}}); }

inline TimedWord timed(std::vector<TimedEvent> events) { return TimedWord(std::move(events)); }

}  // namespace tfilter::testing
