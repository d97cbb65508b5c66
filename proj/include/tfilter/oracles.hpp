#pragma once

// Brute-force references and randomized drivers that the filters are checked
// against. Everything here is deliberately naive: quadratic segment
// enumeration, concrete-valuation simulation, explicit quantifier loops.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tfilter/core.hpp"
#include "tfilter/errors.hpp"
#include "tfilter/io.hpp"
#include "tfilter/timed_filter.hpp"
#include "tfilter/untimed_filter.hpp"

namespace tfilter {

// 1-based (i, j) pairs, i ≤ j.
using MatchSet = std::set<std::pair<std::size_t, std::size_t>>;

inline MatchSet untimed_match_set(std::span<const Symbol> w, const Nfa& nfa) {
  MatchSet out;
  for (std::size_t i = 1; i <= w.size(); ++i)
    for (std::size_t j = i; j <= w.size(); ++j)
      if (nfa_accepts(nfa, w.subspan(i - 1, j - i + 1))) out.emplace(i, j);
  return out;
}

inline MatchSet timed_index_match(const TimedWord& w, const TimedAutomaton& ta) {
  MatchSet out;
  for (std::size_t i = 1; i <= w.size(); ++i)
    for (std::size_t j = i; j <= w.size(); ++j)
      if (ta_accepts(ta, timed_subsequence_shift(w, i, j))) out.emplace(i, j);
  return out;
}

// Positions covered by some match.
inline std::vector<bool> covered_positions(const MatchSet& m, std::size_t n) {
  std::vector<bool> cover(n, false);
  for (const auto& [i, j] : m)
    for (std::size_t k = i; k <= j; ++k) cover[k - 1] = true;
  return cover;
}

// Characterization of a masked output position, evaluated literally over the
// padded word w⊥^N. Segments that would start before position 1 impose no
// condition.
inline bool lemma1_mask_oracle(std::span<const Symbol> w, const Nfa& nfa, std::size_t n, std::size_t k) {
  if (n == 0) throw InputError("buffer size N must be positive");
  if (k < 1 || k > w.size()) throw InputError("position out of range");
  Word padded(w.begin(), w.end());
  padded.insert(padded.end(), n, kBottom);
  auto segment = [&](std::size_t i, std::size_t j) {
    return std::span<const Symbol>(padded).subspan(i - 1, j - i + 1);
  };
  for (std::size_t i = 1; i <= k; ++i)
    for (std::size_t kp = k; kp <= k + n - 1; ++kp)
      if (!((kp - i) % n < kp - k) && nfa_accepts(nfa, segment(i, kp))) return false;
  for (std::size_t kp = k; kp <= k + n - 1; ++kp)
    for (std::size_t m = 1; m * n <= kp; ++m)
      if (!is_stuck(nfa, segment(kp - m * n + 1, kp))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

namespace detail {
inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}
inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline Alphabet letters(std::size_t n) {
  std::vector<std::string> l;
  for (std::size_t i = 0; i < n; ++i) l.push_back(std::string(1, static_cast<char>('a' + i)));
  return Alphabet(std::move(l));
}

inline std::vector<std::string> numbered(const char* prefix, std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
  return v;
}
}  // namespace detail

inline Nfa random_nfa(Rng& rng, std::size_t max_states = 5, std::size_t max_letters = 3, double density = 0.3) {
  const std::size_t n = detail::uniform(rng, 1, max_states);
  const std::size_t sigma = detail::uniform(rng, 1, max_letters);
  std::vector<StateId> accepting;
  for (StateId s = 0; s < n; ++s)
    if (detail::coin(rng, 0.3)) accepting.push_back(s);
  std::vector<NfaTransition> edges;
  for (StateId s = 0; s < n; ++s)
    for (Symbol a = 0; a < sigma; ++a)
      for (StateId t = 0; t < n; ++t)
        if (detail::coin(rng, density)) edges.push_back({s, a, t});
  return Nfa(detail::letters(sigma), detail::numbered("s", n), 0, std::move(accepting), std::move(edges));
}

inline Word random_word(Rng& rng, const Alphabet& alphabet, std::size_t max_length) {
  Word w(detail::uniform(rng, 0, max_length));
  for (auto& a : w) a = static_cast<Symbol>(detail::uniform(rng, 0, alphabet.size() - 1));
  return w;
}

// Small TAs: guard constants in 0..max_constant, each clock reset with
// probability 0.3 on every edge.
inline TimedAutomaton random_ta(Rng& rng, std::size_t max_states = 4, std::size_t max_clocks = 2,
                                std::int64_t max_constant = 3, std::size_t max_letters = 2) {
  const std::size_t n = detail::uniform(rng, 1, max_states);
  const std::size_t clocks = detail::uniform(rng, 1, max_clocks);
  const std::size_t sigma = detail::uniform(rng, 1, max_letters);
  std::vector<StateId> accepting;
  for (StateId s = 0; s < n; ++s)
    if (detail::coin(rng, 0.35)) accepting.push_back(s);
  std::vector<TaTransition> edges;
  const Relation rels[] = {Relation::Less, Relation::LessEq, Relation::Greater, Relation::GreaterEq};
  for (StateId s = 0; s < n; ++s)
    for (Symbol a = 0; a < sigma; ++a) {
      const std::size_t count = detail::uniform(rng, 0, 2);
      for (std::size_t e = 0; e < count; ++e) {
        TaTransition t{s, static_cast<StateId>(detail::uniform(rng, 0, n - 1)), a, {}, {}};
        const std::size_t atoms = detail::uniform(rng, 0, 2);
        for (std::size_t g = 0; g < atoms; ++g)
          t.guard.atoms.push_back({static_cast<ClockId>(detail::uniform(rng, 0, clocks - 1)),
                                   rels[detail::uniform(rng, 0, 3)],
                                   static_cast<std::int64_t>(detail::uniform(rng, 0, max_constant))});
        for (ClockId c = 0; c < clocks; ++c)
          if (detail::coin(rng, 0.3)) t.resets.push_back(c);
        edges.push_back(std::move(t));
      }
    }
  return TimedAutomaton(detail::letters(sigma), detail::numbered("s", n), 0, std::move(accepting),
                        detail::numbered("x", clocks), std::move(edges));
}

// Inter-arrival times are multiples of 0.25 so that every comparison against
// an integer constant is exact in binary floating point.
inline TimedWord random_timed_word(Rng& rng, const Alphabet& alphabet, std::size_t max_length,
                                   std::size_t max_quarters = 12) {
  const std::size_t len = detail::uniform(rng, 0, max_length);
  std::vector<TimedEvent> events;
  double t = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    t += 0.25 * static_cast<double>(detail::uniform(rng, 1, max_quarters));
    events.push_back({static_cast<Symbol>(detail::uniform(rng, 0, alphabet.size() - 1)), t});
  }
  return TimedWord(std::move(events));
}

// Length of the longest accepted word of an acyclic NFA, or 0 if none.
inline std::size_t longest_accepted(const Nfa& nfa) {
  const std::size_t n = nfa.state_count();
  std::vector<std::vector<StateId>> succ(n);
  for (const auto& t : nfa.transitions()) succ[t.source].push_back(t.target);
  // longest[s] = longest path from s to an accepting state, -1 if none.
  std::vector<long> memo(n, -2);
  std::vector<bool> on_stack(n, false);
  std::function<long(StateId)> go = [&](StateId s) -> long {
    if (memo[s] != -2) return memo[s];
    if (on_stack[s]) throw InputError("language is infinite");
    on_stack[s] = true;
    long best = nfa.is_accepting(s) ? 0 : -1;
    for (StateId t : succ[s])
      if (long r = go(t); r >= 0) best = std::max(best, r + 1);
    on_stack[s] = false;
    return memo[s] = best;
  };
  return static_cast<std::size_t>(std::max(0L, go(nfa.initial())));
}

// Rewrites an NFA so that accepting states have no outgoing edges and the
// initial state does not accept, then drops states that cannot reach an
// accepting state (the initial state is kept). The language is unchanged
// except for the empty word.
inline Nfa make_completeness_ready(const Nfa& nfa) {
  const std::size_t n = nfa.state_count();
  // State s keeps its id; its accepting copy (if needed) is n + s.
  std::vector<NfaTransition> edges;
  std::vector<bool> accepting_copy(n, false);
  for (const auto& t : nfa.transitions()) {
    edges.push_back(t);
    if (nfa.is_accepting(t.target)) {
      edges.push_back({t.source, t.label, static_cast<StateId>(n + t.target)});
      accepting_copy[t.target] = true;
    }
  }
  const std::size_t total = 2 * n;
  std::vector<bool> accepting(total, false);
  for (StateId s = 0; s < n; ++s) accepting[n + s] = accepting_copy[s];

  std::vector<bool> live(accepting);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : edges)
      if (live[t.target] && !live[t.source]) live[t.source] = changed = true;
  }
  live[nfa.initial()] = true;
  std::vector<StateId> remap(total, 0);
  std::vector<std::string> names;
  std::vector<StateId> acc;
  for (StateId s = 0; s < total; ++s) {
    if (!live[s]) continue;
    remap[s] = static_cast<StateId>(names.size());
    names.push_back(s < n ? nfa.state_name(s) : nfa.state_name(s - n) + "_f");
    if (accepting[s]) acc.push_back(remap[s]);
  }
  std::vector<NfaTransition> kept;
  for (const auto& t : edges)
    if (live[t.source] && live[t.target]) kept.push_back({remap[t.source], t.label, remap[t.target]});
  return Nfa(nfa.alphabet(), std::move(names), remap[nfa.initial()], std::move(acc), std::move(kept));
}

// Random acyclic NFA (edges only go to higher-numbered states), made ready
// for the completeness property.
inline Nfa random_finite_language_nfa(Rng& rng, std::size_t max_states = 5, std::size_t max_letters = 3) {
  const std::size_t n = detail::uniform(rng, 2, max_states);
  const std::size_t sigma = detail::uniform(rng, 1, max_letters);
  std::vector<StateId> accepting;
  for (StateId s = 1; s < n; ++s)
    if (detail::coin(rng, 0.4)) accepting.push_back(s);
  std::vector<NfaTransition> edges;
  for (StateId s = 0; s < n; ++s)
    for (Symbol a = 0; a < sigma; ++a)
      for (StateId t = s + 1; t < n; ++t)
        if (detail::coin(rng, 0.35)) edges.push_back({s, a, t});
  return make_completeness_ready(
      Nfa(detail::letters(sigma), detail::numbered("s", n), 0, std::move(accepting), std::move(edges)));
}

// Random walk along TA transitions, keeping a concrete valuation. Dwell times
// are picked among interval midpoints and points 0.25 either side of each
// guard boundary. Returns a word accepted by `ta`, or nothing if the walk
// never reached an accepting state.
inline std::optional<TimedWord> sample_accepted_word(Rng& rng, const TimedAutomaton& ta, std::size_t max_length = 8) {
  std::vector<double> nu(ta.clock_count(), 0.0);
  StateId s = ta.initial();
  double now = 0.0;
  std::vector<TimedEvent> events;
  std::optional<TimedWord> best;
  const std::size_t target_len = detail::uniform(rng, 1, max_length);
  for (std::size_t step = 0; step < target_len; ++step) {
    struct Option {
      std::size_t transition;
      double dwell;
    };
    std::vector<Option> options;
    for (std::size_t ti : ta.outgoing(s)) {
      const auto& t = ta.transition(ti);
      std::vector<double> marks{0.0};
      for (const auto& a : t.guard.atoms) marks.push_back(static_cast<double>(a.constant) - nu[a.clock]);
      std::sort(marks.begin(), marks.end());
      std::vector<double> candidates;
      for (std::size_t i = 0; i < marks.size(); ++i) {
        candidates.push_back(marks[i] - 0.25);
        candidates.push_back(marks[i]);
        candidates.push_back(marks[i] + 0.25);
        if (i + 1 < marks.size()) candidates.push_back((marks[i] + marks[i + 1]) / 2);
      }
      candidates.push_back(marks.back() + 1.0);
      std::vector<double> shifted(nu.size());
      for (double d : candidates) {
        if (!(d > 0.0)) continue;
        for (std::size_t c = 0; c < nu.size(); ++c) shifted[c] = nu[c] + d;
        if (t.guard.satisfied_by(shifted)) options.push_back({ti, d});
      }
    }
    if (options.empty()) break;
    const auto pick = options[detail::uniform(rng, 0, options.size() - 1)];
    const auto& t = ta.transition(pick.transition);
    for (double& v : nu) v += pick.dwell;
    for (ClockId c : t.resets) nu[c] = 0.0;
    now += pick.dwell;
    events.push_back({t.label, now});
    s = t.target;
    if (ta.is_accepting(s)) best = TimedWord(events);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

struct SuiteReport {
  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::string counterexample;  // first violating instance, verbatim
  bool ok() const { return violations == 0; }
  std::string summary() const {
    return name + "\ttrials=" + std::to_string(trials) + "\tviolations=" + std::to_string(violations);
  }
};

namespace detail {
inline std::string dump_word(std::span<const Symbol> w, const Alphabet& alphabet) {
  std::string s;
  for (Symbol a : w) s += std::string(alphabet.label(a)) + " ";
  return s;
}

inline std::string dump_untimed(const Nfa& nfa, std::size_t n, std::span<const Symbol> w, std::string_view extra) {
  std::ostringstream o;
  o << format_nfa(nfa) << "buffer " << n << "\nword " << dump_word(w, nfa.alphabet()) << "\n" << extra << "\n";
  return o.str();
}

inline void record(SuiteReport& r, std::string dump) {
  if (r.violations++ == 0) r.counterexample = std::move(dump);
}
}  // namespace detail

// No event inside a match is masked.
inline SuiteReport soundness_suite(std::uint64_t seed, std::size_t trials) {
  SuiteReport r{"soundness", 0, 0, {}};
  Rng rng(seed);
  for (; r.trials < trials; ++r.trials) {
    const Nfa nfa = random_nfa(rng);
    const std::size_t n = detail::uniform(rng, 1, 6);
    const Word w = random_word(rng, nfa.alphabet(), 50);
    const auto out = filter_word(UntimedFilter(nfa, n), w);
    const auto cover = covered_positions(untimed_match_set(w, nfa), w.size());
    for (std::size_t k = 0; k < w.size(); ++k)
      if (cover[k] && out[k] != w[k]) {
        detail::record(r, detail::dump_untimed(nfa, n, w, "masked position " + std::to_string(k + 1)));
        break;
      }
  }
  return r;
}

// For nonempty finite languages with N at least the longest accepted word: an
// event passes exactly when it lies inside a match.
inline SuiteReport completeness_suite(std::uint64_t seed, std::size_t trials) {
  SuiteReport r{"completeness", 0, 0, {}};
  Rng rng(seed);
  for (; r.trials < trials; ++r.trials) {
    Nfa nfa = random_finite_language_nfa(rng);
    while (longest_accepted(nfa) == 0) nfa = random_finite_language_nfa(rng);
    const std::size_t n = longest_accepted(nfa) + detail::uniform(rng, 0, 2);
    const Word w = random_word(rng, nfa.alphabet(), 30);
    const auto out = filter_word(UntimedFilter(nfa, n), w);
    const auto cover = covered_positions(untimed_match_set(w, nfa), w.size());
    for (std::size_t k = 0; k < w.size(); ++k)
      if (cover[k] != (out[k] != kBottom)) {
        detail::record(r, detail::dump_untimed(nfa, n, w, "position " + std::to_string(k + 1)));
        break;
      }
  }
  return r;
}

// Masked under buffer N' implies masked under n·N'.
inline SuiteReport monotonicity_suite(std::uint64_t seed, std::size_t trials) {
  SuiteReport r{"monotonicity", 0, 0, {}};
  Rng rng(seed);
  for (; r.trials < trials; ++r.trials) {
    const Nfa nfa = random_nfa(rng);
    const std::size_t base = detail::uniform(rng, 1, 3);
    const std::size_t mult = detail::uniform(rng, 2, 3);
    const Word w = random_word(rng, nfa.alphabet(), 40);
    const auto small = filter_word(UntimedFilter(nfa, base), w);
    const auto large = filter_word(UntimedFilter(nfa, base * mult), w);
    for (std::size_t k = 0; k < w.size(); ++k)
      if (small[k] == kBottom && large[k] != kBottom) {
        detail::record(r, detail::dump_untimed(nfa, base, w,
                                               "multiplier " + std::to_string(mult) + " position " +
                                                   std::to_string(k + 1)));
        break;
      }
  }
  return r;
}

// Filter output agrees with the characterization at every position, over all
// words up to `max_length` for each given NFA and N ∈ {1, 2, 3}.
inline SuiteReport lemma1_suite(std::span<const Nfa> patterns, std::size_t max_length = 7) {
  SuiteReport r{"lemma1", 0, 0, {}};
  for (const auto& nfa : patterns)
    for (std::size_t n = 1; n <= 3; ++n) {
      const UntimedFilter f(nfa, n);
      const std::size_t sigma = nfa.alphabet().size();
      for (std::size_t len = 0; len <= max_length; ++len) {
        Word w(len, 0);
        while (true) {
          ++r.trials;
          const auto out = filter_word(f, w);
          for (std::size_t k = 1; k <= len; ++k)
            if ((out[k - 1] == kBottom) != lemma1_mask_oracle(w, nfa, n, k)) {
              detail::record(r, detail::dump_untimed(nfa, n, w, "position " + std::to_string(k)));
              break;
            }
          std::size_t i = 0;
          while (i < len && ++w[i] == sigma) w[i++] = 0;
          if (i == len) break;
        }
      }
    }
  return r;
}

// The three patterns used by the exhaustive characterization check.
inline std::vector<Nfa> lemma1_patterns() {
  // aa*b
  Nfa a0(detail::letters(2), {"s0", "s1", "s2"}, 0, {2}, {{0, 0, 1}, {1, 0, 1}, {1, 1, 2}});
  // (ab)+ with an accepting state that keeps running
  Nfa ab(detail::letters(2), {"s0", "s1", "s2"}, 0, {2}, {{0, 0, 1}, {1, 1, 2}, {2, 0, 1}});
  // a followed by anything, then c: a(a|b|c)*c
  Nfa ac(detail::letters(3), {"s0", "s1", "s2"}, 0, {2}, {{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {1, 2, 1}, {1, 2, 2}});
  return {std::move(a0), std::move(ab), std::move(ac)};
}

inline SuiteReport lemma1_suite() {
  const auto p = lemma1_patterns();
  return lemma1_suite(p);
}

// No masked event lies inside an index match of the timed pattern.
inline SuiteReport timed_soundness_suite(std::uint64_t seed, std::size_t trials) {
  SuiteReport r{"timed-soundness", 0, 0, {}};
  Rng rng(seed);
  for (; r.trials < trials; ++r.trials) {
    const TimedAutomaton ta = random_ta(rng);
    const std::size_t n = detail::coin(rng, 0.5) ? 2 : 5;
    const TimedWord w = random_timed_word(rng, ta.alphabet(), 30);
    const auto mask = filter_timed_word(TimedFilter(ta, n, Expansion::OnDemand), w);
    const auto cover = covered_positions(timed_index_match(w, ta), w.size());
    for (std::size_t k = 0; k < w.size(); ++k)
      if (cover[k] && mask[k] == Verdict::Mask) {
        detail::record(r, format_ta(ta) + "buffer " + std::to_string(n) + "\n" +
                              format_timed_word(w, ta.alphabet()) + "masked position " + std::to_string(k + 1) +
                              "\n");
        break;
      }
  }
  return r;
}

// The one-clock determinization accepts every sampled accepted word. Each
// trial is one automaton with an accepting path; `words` samples are drawn
// from it.
inline SuiteReport inclusion_suite(std::uint64_t seed, std::size_t automata, std::size_t words = 200) {
  SuiteReport r{"inclusion", 0, 0, {}};
  Rng rng(seed);
  while (r.trials < automata) {
    const TimedAutomaton ta = random_ta(rng);
    std::vector<TimedWord> samples;
    for (std::size_t attempt = 0; samples.size() < words && attempt < 20 * words; ++attempt)
      if (auto w = sample_accepted_word(rng, ta)) samples.push_back(std::move(*w));
    if (samples.empty()) continue;
    ++r.trials;
    const DetOneClockTa det(std::make_shared<const Rta>(ta_to_rta(ta)));
    for (const auto& w : samples) {
      if (!ta_accepts(ta, w)) throw ContractError("path sampler produced a rejected word");
      if (!det.accepts(w)) {
        detail::record(r, format_ta(ta) + format_timed_word(w, ta.alphabet()));
        break;
      }
    }
  }
  return r;
}

}  // namespace tfilter
