#pragma once

// Words, NFAs, timed words and timed automata, together with their concrete
// run semantics. Everything here is an immutable value once constructed.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tfilter/errors.hpp"

namespace tfilter {

using Symbol = std::uint32_t;
using StateId = std::uint32_t;
using ClockId = std::uint32_t;

// Reserved symbols. Neither can be declared as an alphabet label.
inline constexpr Symbol kBottom = std::numeric_limits<Symbol>::max() - 1;
inline constexpr Symbol kTerminal = std::numeric_limits<Symbol>::max();
inline constexpr std::string_view kBottomToken = "_";
inline constexpr std::string_view kTerminalToken = "$";

using Word = std::vector<Symbol>;

// ---------------------------------------------------------------------------
// Alphabet
// ---------------------------------------------------------------------------

class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      const std::string& l = labels_[i];
      if (!valid_label(l)) throw InputError("invalid alphabet label '" + l + "'");
      if (!index_.emplace(l, static_cast<Symbol>(i)).second)
        throw InputError("duplicate alphabet label '" + l + "'");
    }
  }

  static bool valid_label(std::string_view l) {
    if (l.empty() || l == kBottomToken || l == kTerminalToken || l.front() == '#') return false;
    return std::none_of(l.begin(), l.end(),
                        [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  // True for declared labels only; ⊥ and $ are not members.
  bool contains(Symbol s) const { return s < labels_.size(); }

  std::optional<Symbol> find(std::string_view label) const {
    if (label == kBottomToken) return kBottom;
    if (auto it = index_.find(std::string(label)); it != index_.end()) return it->second;
    return std::nullopt;
  }

  Symbol symbol(std::string_view label) const {
    if (auto s = find(label)) return *s;
    throw InputError("unknown label '" + std::string(label) + "'");
  }

  std::string_view label(Symbol s) const {
    if (s == kBottom) return kBottomToken;
    if (s == kTerminal) return kTerminalToken;
    if (!contains(s)) throw InputError("symbol id out of range");
    return labels_[s];
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Symbol> index_;
};

// Throws unless every symbol is a label of `alphabet` or ⊥.
inline void validate_word(const Alphabet& alphabet, std::span<const Symbol> w) {
  for (Symbol s : w)
    if (!alphabet.contains(s) && s != kBottom) throw InputError("word contains an unknown label");
}

// ---------------------------------------------------------------------------
// NFA
// ---------------------------------------------------------------------------

struct NfaTransition {
  StateId source;
  Symbol label;
  StateId target;
  friend auto operator<=>(const NfaTransition&, const NfaTransition&) = default;
};

class Nfa {
 public:
  Nfa(Alphabet alphabet, std::vector<std::string> state_names, StateId initial,
      std::vector<StateId> accepting, std::vector<NfaTransition> transitions)
      : alphabet_(std::move(alphabet)),
        names_(std::move(state_names)),
        initial_(initial),
        accepting_(names_.size(), false),
        transitions_(std::move(transitions)) {
    const auto n = names_.size();
    if (n == 0) throw InputError("an NFA needs at least one state");
    if (initial_ >= n) throw InputError("initial state out of range");
    for (StateId s : accepting) {
      if (s >= n) throw InputError("accepting state out of range");
      accepting_[s] = true;
    }
    std::sort(transitions_.begin(), transitions_.end());
    transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());
    successors_.assign(n * alphabet_.size(), {});
    for (const auto& t : transitions_) {
      if (t.source >= n || t.target >= n) throw InputError("transition endpoint out of range");
      if (!alphabet_.contains(t.label)) throw InputError("transition label not in alphabet");
      successors_[t.source * alphabet_.size() + t.label].push_back(t.target);
    }
  }

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t state_count() const { return names_.size(); }
  const std::string& state_name(StateId s) const { return names_.at(s); }
  const std::vector<std::string>& state_names() const { return names_; }
  StateId initial() const { return initial_; }
  bool is_accepting(StateId s) const { return accepting_.at(s); }
  const std::vector<NfaTransition>& transitions() const { return transitions_; }

  std::vector<StateId> accepting_states() const {
    std::vector<StateId> out;
    for (StateId s = 0; s < accepting_.size(); ++s)
      if (accepting_[s]) out.push_back(s);
    return out;
  }

  // Targets of `s` under `a`; empty for ⊥.
  std::span<const StateId> successors(StateId s, Symbol a) const {
    if (!alphabet_.contains(a)) return {};
    return successors_[s * alphabet_.size() + a];
  }

  friend bool operator==(const Nfa& a, const Nfa& b) {
    return a.alphabet_ == b.alphabet_ && a.names_ == b.names_ && a.initial_ == b.initial_ &&
           a.accepting_ == b.accepting_ && a.transitions_ == b.transitions_;
  }

 private:
  Alphabet alphabet_;
  std::vector<std::string> names_;
  StateId initial_;
  std::vector<bool> accepting_;
  std::vector<NfaTransition> transitions_;
  std::vector<std::vector<StateId>> successors_;
};

// Exact set of states reachable from `from` by reading `w`.
inline std::set<StateId> nfa_run_exists(const Nfa& nfa, std::span<const Symbol> w, StateId from) {
  validate_word(nfa.alphabet(), w);
  if (from >= nfa.state_count()) throw InputError("start state out of range");
  std::vector<bool> current(nfa.state_count(), false), next(nfa.state_count(), false);
  current[from] = true;
  for (Symbol a : w) {
    std::fill(next.begin(), next.end(), false);
    for (StateId s = 0; s < current.size(); ++s)
      if (current[s])
        for (StateId t : nfa.successors(s, a)) next[t] = true;
    current.swap(next);
  }
  std::set<StateId> out;
  for (StateId s = 0; s < current.size(); ++s)
    if (current[s]) out.insert(s);
  return out;
}

// Reading `w` from the initial state leaves no active state.
inline bool is_stuck(const Nfa& nfa, std::span<const Symbol> w) {
  return nfa_run_exists(nfa, w, nfa.initial()).empty();
}

inline bool nfa_accepts(const Nfa& nfa, std::span<const Symbol> w) {
  auto reached = nfa_run_exists(nfa, w, nfa.initial());
  return std::any_of(reached.begin(), reached.end(), [&](StateId s) { return nfa.is_accepting(s); });
}

// ---------------------------------------------------------------------------
// Timed words
// ---------------------------------------------------------------------------

struct TimedEvent {
  Symbol label;
  double time;
  friend bool operator==(const TimedEvent&, const TimedEvent&) = default;
};

// Timestamps are strictly increasing and positive.
class TimedWord {
 public:
  TimedWord() = default;

  explicit TimedWord(std::vector<TimedEvent> events) : events_(std::move(events)) {
    double prev = 0.0;
    for (std::size_t i = 0; i < events_.size(); ++i) {
      const double t = events_[i].time;
      if (!(t > 0.0)) throw InputError("timestamps must be positive");
      if (i > 0 && !(t > prev)) throw InputError("timestamps must be strictly increasing");
      prev = t;
    }
  }

  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const TimedEvent& operator[](std::size_t i) const { return events_[i]; }
  const std::vector<TimedEvent>& events() const { return events_; }
  auto begin() const { return events_.begin(); }
  auto end() const { return events_.end(); }

  Word labels() const {
    Word w;
    w.reserve(events_.size());
    for (const auto& e : events_) w.push_back(e.label);
    return w;
  }

  friend bool operator==(const TimedWord&, const TimedWord&) = default;

 private:
  std::vector<TimedEvent> events_;
};

// w(i, j) shifted so that τ_{i−1} becomes the origin (τ_0 = 0). Indices are 1-based.
inline TimedWord timed_subsequence_shift(const TimedWord& w, std::size_t i, std::size_t j) {
  if (i < 1 || i > j || j > w.size()) throw InputError("subsequence indices out of range");
  const double origin = i == 1 ? 0.0 : w[i - 2].time;
  std::vector<TimedEvent> out;
  out.reserve(j - i + 1);
  for (std::size_t k = i; k <= j; ++k) out.push_back({w[k - 1].label, w[k - 1].time - origin});
  return TimedWord(std::move(out));
}

// The segment w|_(t,t'): events strictly inside (t, t'), shifted by −t, followed
// by the terminal character at t' − t.
inline TimedWord timed_segment(const TimedWord& w, double t, double t_end) {
  if (!(t >= 0.0) || !(t < t_end)) throw InputError("segment requires 0 <= t < t'");
  std::vector<TimedEvent> out;
  for (const auto& e : w)
    if (e.time > t && e.time < t_end) out.push_back({e.label, e.time - t});
  out.push_back({kTerminal, t_end - t});
  return TimedWord(std::move(out));
}

// ---------------------------------------------------------------------------
// Timed automata
// ---------------------------------------------------------------------------

enum class Relation : std::uint8_t { Less, LessEq, Greater, GreaterEq };

inline std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Less: return "<";
    case Relation::LessEq: return "<=";
    case Relation::Greater: return ">";
    case Relation::GreaterEq: return ">=";
  }
  return "?";
}

struct ClockAtom {
  ClockId clock;
  Relation relation;
  std::int64_t constant;
  friend bool operator==(const ClockAtom&, const ClockAtom&) = default;
};

inline bool holds(const ClockAtom& atom, double value) {
  const auto c = static_cast<double>(atom.constant);
  switch (atom.relation) {
    case Relation::Less: return value < c;
    case Relation::LessEq: return value <= c;
    case Relation::Greater: return value > c;
    case Relation::GreaterEq: return value >= c;
  }
  return false;
}

// Conjunction of atoms; the empty conjunction is `true`.
struct ClockConstraint {
  std::vector<ClockAtom> atoms;

  bool is_true() const { return atoms.empty(); }

  bool satisfied_by(std::span<const double> valuation) const {
    return std::all_of(atoms.begin(), atoms.end(),
                       [&](const ClockAtom& a) { return holds(a, valuation[a.clock]); });
  }

  friend bool operator==(const ClockConstraint&, const ClockConstraint&) = default;
};

struct TaTransition {
  StateId source;
  StateId target;
  Symbol label;  // may be ⊥ in internally built automata
  std::vector<ClockId> resets;
  ClockConstraint guard;
  friend bool operator==(const TaTransition&, const TaTransition&) = default;
};

class TimedAutomaton {
 public:
  TimedAutomaton(Alphabet alphabet, std::vector<std::string> state_names, StateId initial,
                 std::vector<StateId> accepting, std::vector<std::string> clock_names,
                 std::vector<TaTransition> transitions)
      : alphabet_(std::move(alphabet)),
        names_(std::move(state_names)),
        initial_(initial),
        accepting_(names_.size(), false),
        clocks_(std::move(clock_names)),
        transitions_(std::move(transitions)),
        outgoing_(names_.size()) {
    const auto n = names_.size();
    if (n == 0) throw InputError("a timed automaton needs at least one state");
    if (initial_ >= n) throw InputError("initial state out of range");
    for (StateId s : accepting) {
      if (s >= n) throw InputError("accepting state out of range");
      accepting_[s] = true;
    }
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
      auto& t = transitions_[i];
      if (t.source >= n || t.target >= n) throw InputError("transition endpoint out of range");
      if (!alphabet_.contains(t.label) && t.label != kBottom)
        throw InputError("transition label not in alphabet");
      for (ClockId c : t.resets)
        if (c >= clocks_.size()) throw InputError("reset clock out of range");
      std::sort(t.resets.begin(), t.resets.end());
      t.resets.erase(std::unique(t.resets.begin(), t.resets.end()), t.resets.end());
      for (const auto& a : t.guard.atoms) {
        if (a.clock >= clocks_.size()) throw InputError("guard clock out of range");
        if (a.constant < 0) throw InputError("guard constants must be nonnegative");
      }
      outgoing_[t.source].push_back(i);
    }
  }

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t state_count() const { return names_.size(); }
  const std::string& state_name(StateId s) const { return names_.at(s); }
  const std::vector<std::string>& state_names() const { return names_; }
  StateId initial() const { return initial_; }
  bool is_accepting(StateId s) const { return accepting_.at(s); }
  std::size_t clock_count() const { return clocks_.size(); }
  const std::vector<std::string>& clock_names() const { return clocks_; }
  const std::vector<TaTransition>& transitions() const { return transitions_; }
  const TaTransition& transition(std::size_t i) const { return transitions_[i]; }
  // Indices into transitions() leaving `s`.
  std::span<const std::size_t> outgoing(StateId s) const { return outgoing_[s]; }

  std::vector<StateId> accepting_states() const {
    std::vector<StateId> out;
    for (StateId s = 0; s < accepting_.size(); ++s)
      if (accepting_[s]) out.push_back(s);
    return out;
  }

  // Largest constant compared against each clock (0 when unconstrained).
  std::vector<std::int64_t> max_constants() const {
    std::vector<std::int64_t> k(clocks_.size(), 0);
    for (const auto& t : transitions_)
      for (const auto& a : t.guard.atoms) k[a.clock] = std::max(k[a.clock], a.constant);
    return k;
  }

  friend bool operator==(const TimedAutomaton& a, const TimedAutomaton& b) {
    return a.alphabet_ == b.alphabet_ && a.names_ == b.names_ && a.initial_ == b.initial_ &&
           a.accepting_ == b.accepting_ && a.clocks_ == b.clocks_ &&
           a.transitions_ == b.transitions_;
  }

 private:
  Alphabet alphabet_;
  std::vector<std::string> names_;
  StateId initial_;
  std::vector<bool> accepting_;
  std::vector<std::string> clocks_;
  std::vector<TaTransition> transitions_;
  std::vector<std::vector<std::size_t>> outgoing_;
};

// Forward simulation over the concrete (state, valuation) pairs reachable on `w`.
// The set is finite because a concrete word admits finitely many reset histories.
inline bool ta_accepts(const TimedAutomaton& ta, const TimedWord& w) {
  for (const auto& e : w)
    if (!ta.alphabet().contains(e.label) && e.label != kBottom)
      throw InputError("timed word contains an unknown label");
  using Config = std::pair<StateId, std::vector<double>>;
  std::set<Config> current{{ta.initial(), std::vector<double>(ta.clock_count(), 0.0)}};
  double prev = 0.0;
  std::vector<double> shifted;
  for (const auto& e : w) {
    const double dwell = e.time - prev;
    prev = e.time;
    std::set<Config> next;
    for (const auto& [s, nu] : current) {
      shifted = nu;
      for (double& v : shifted) v += dwell;
      for (std::size_t ti : ta.outgoing(s)) {
        const auto& t = ta.transition(ti);
        if (t.label != e.label || !t.guard.satisfied_by(shifted)) continue;
        auto after = shifted;
        for (ClockId c : t.resets) after[c] = 0.0;
        next.emplace(t.target, std::move(after));
      }
    }
    current.swap(next);
    if (current.empty()) return false;
  }
  return std::any_of(current.begin(), current.end(),
                     [&](const Config& c) { return ta.is_accepting(c.first); });
}

}  // namespace tfilter
