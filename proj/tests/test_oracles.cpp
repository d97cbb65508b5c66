#include <gtest/gtest.h>

#include <functional>

#include "helpers.hpp"

using namespace tfilter;
using namespace tfilter::testing;

namespace {

// Recursive-descent acceptance: try each outgoing edge in turn, backtracking.
bool accepts_recursive(const Nfa& nfa, std::span<const Symbol> w, StateId s) {
  if (w.empty()) return nfa.is_accepting(s);
  for (const auto& t : nfa.transitions())
    if (t.source == s && t.label == w[0] && accepts_recursive(nfa, w.subspan(1), t.target)) return true;
  return false;
}

MatchSet match_set_recursive(std::span<const Symbol> w, const Nfa& nfa) {
  MatchSet m;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i; j < w.size(); ++j)
      if (accepts_recursive(nfa, w.subspan(i, j - i + 1), nfa.initial())) m.emplace(i + 1, j + 1);
  return m;
}

// Depth-first enumeration of timed runs carrying a single valuation.
bool ta_accepts_dfs(const TimedAutomaton& ta, const TimedWord& w, std::size_t k, StateId s, std::vector<double> nu,
                    double prev) {
  if (k == w.size()) return ta.is_accepting(s);
  for (double& x : nu) x += w[k].time - prev;
  for (const auto& t : ta.transitions()) {
    if (t.source != s || t.label != w[k].label) continue;
    bool ok = true;
    for (const auto& a : t.guard.atoms) {
      const double v = nu[a.clock], c = static_cast<double>(a.constant);
      switch (a.relation) {
        case Relation::Less: ok = ok && v < c; break;
        case Relation::LessEq: ok = ok && v <= c; break;
        case Relation::Greater: ok = ok && v > c; break;
        case Relation::GreaterEq: ok = ok && v >= c; break;
      }
    }
    if (!ok) continue;
    auto after = nu;
    for (ClockId c : t.resets) after[c] = 0;
    if (ta_accepts_dfs(ta, w, k + 1, t.target, after, w[k].time)) return true;
  }
  return false;
}

MatchSet timed_match_dfs(const TimedWord& w, const TimedAutomaton& ta) {
  MatchSet m;
  for (std::size_t i = 1; i <= w.size(); ++i)
    for (std::size_t j = i; j <= w.size(); ++j) {
      const double origin = i == 1 ? 0.0 : w[i - 2].time;
      std::vector<TimedEvent> seg;
      for (std::size_t k = i; k <= j; ++k) seg.push_back({w[k - 1].label, w[k - 1].time - origin});
      if (ta_accepts_dfs(ta, TimedWord(seg), 0, ta.initial(), std::vector<double>(ta.clock_count(), 0.0), 0.0))
        m.emplace(i, j);
    }
  return m;
}

// Weakens every guard: upper bounds grow by one, lower bounds shrink by one.
TimedAutomaton relax(const TimedAutomaton& ta) {
  auto edges = ta.transitions();
  for (auto& t : edges)
    for (auto& a : t.guard.atoms) {
      if (a.relation == Relation::Less || a.relation == Relation::LessEq) a.constant += 1;
      else a.constant = std::max<std::int64_t>(0, a.constant - 1);
    }
  std::vector<StateId> acc = ta.accepting_states();
  return TimedAutomaton(ta.alphabet(), ta.state_names(), ta.initial(), acc, ta.clock_names(), std::move(edges));
}

}  // namespace

TEST(UntimedMatchSet, Examples) {
  const Nfa a = pattern_aab();
  EXPECT_EQ(untimed_match_set(word("abbbbbaab", a.alphabet()), a), (MatchSet{{1, 2}, {7, 9}, {8, 9}}));
  const Nfa none(Alphabet({"a", "b"}), {"s0", "s1"}, 0, {}, {{0, 0, 1}});
  EXPECT_TRUE(untimed_match_set(word("abab", none.alphabet()), none).empty());
  const Nfa ab(Alphabet({"a", "b"}), {"s0", "s1", "s2"}, 0, {2}, {{0, 0, 1}, {1, 1, 2}});
  EXPECT_EQ(untimed_match_set(word("ab", ab.alphabet()), ab), (MatchSet{{1, 2}}));
}

TEST(UntimedMatchSet, AgreesWithRecursiveMatcher) {
  Rng rng(61);
  for (int t = 0; t < 400; ++t) {
    const Nfa nfa = random_nfa(rng);
    const Word w = random_word(rng, nfa.alphabet(), 10);
    ASSERT_EQ(untimed_match_set(w, nfa), match_set_recursive(w, nfa));
  }
}

TEST(UntimedMatchSet, EmptyWordIsNeverAMatch) {
  const Nfa eps(Alphabet({"a"}), {"s0"}, 0, {0}, {});
  EXPECT_TRUE(untimed_match_set(word("aa", eps.alphabet()), eps).empty());
}

TEST(TimedIndexMatch, Examples) {
  EXPECT_EQ(timed_index_match(word_w2(), pattern_two_second()), (MatchSet{{3, 4}}));
  const TimedAutomaton none(Alphabet({"a", "b"}), {"s0", "s1"}, 0, {}, {"x"}, {{0, 1, 0, {}, {}}});
  EXPECT_TRUE(timed_index_match(word_w2(), none).empty());
}

TEST(TimedIndexMatch, AgreesWithDepthFirstRuns) {
  Rng rng(62);
  for (int t = 0; t < 300; ++t) {
    const auto ta = random_ta(rng);
    const auto w = random_timed_word(rng, ta.alphabet(), 10);
    ASSERT_EQ(timed_index_match(w, ta), timed_match_dfs(w, ta)) << format_ta(ta);
  }
}

TEST(TimedIndexMatch, MonotoneUnderGuardRelaxation) {
  Rng rng(63);
  for (int t = 0; t < 300; ++t) {
    const auto ta = random_ta(rng);
    const auto w = random_timed_word(rng, ta.alphabet(), 12);
    const auto tight = timed_index_match(w, ta);
    const auto loose = timed_index_match(w, relax(ta));
    for (const auto& p : tight) ASSERT_TRUE(loose.count(p)) << format_ta(ta);
  }
}

TEST(MaskOracle, Examples) {
  const Nfa a = pattern_aab();
  const Word w = word("abbbaab", a.alphabet());
  EXPECT_TRUE(lemma1_mask_oracle(w, a, 2, 3));
  EXPECT_FALSE(lemma1_mask_oracle(w, a, 2, 1));
  std::string expect;
  for (std::size_t k = 1; k <= w.size(); ++k) expect += lemma1_mask_oracle(w, a, 2, k) ? '_' : 'x';
  EXPECT_EQ(expect, "xx__xxx");
}

TEST(MaskOracle, RangeErrors) {
  const Nfa a = pattern_aab();
  const Word w = word("ab", a.alphabet());
  EXPECT_THROW(lemma1_mask_oracle(w, a, 2, 0), InputError);
  EXPECT_THROW(lemma1_mask_oracle(w, a, 2, 3), InputError);
  EXPECT_THROW(lemma1_mask_oracle(w, a, 0, 1), InputError);
}

// Starting the stuck segments at position 1 instead of treating them as
// vacuous would mask a position the filter passes.
TEST(MaskOracle, OutOfRangeSegmentsImposeNoCondition) {
  const Nfa loop(Alphabet({"a"}), {"s0", "s1"}, 0, {}, {{0, 0, 1}, {1, 0, 1}});
  const Word w = word("a", loop.alphabet());
  EXPECT_EQ(filter_word(UntimedFilter(loop, 2), w), (Word{kBottom}));
  EXPECT_TRUE(lemma1_mask_oracle(w, loop, 2, 1));
  const Word w3 = word("aaa", loop.alphabet());
  const auto out = filter_word(UntimedFilter(loop, 2), w3);
  for (std::size_t k = 1; k <= 3; ++k) EXPECT_EQ(out[k - 1] == kBottom, lemma1_mask_oracle(w3, loop, 2, k));
}

TEST(MaskCharacterizationSuite, ExhaustiveShortWords) {
  const auto r = lemma1_suite();
  EXPECT_TRUE(r.ok()) << r.counterexample;
  EXPECT_GT(r.trials, 3000u);
}

TEST(Suites, DeterministicForASeed) {
  const auto a = soundness_suite(99, 50), b = soundness_suite(99, 50);
  EXPECT_EQ(a.summary(), b.summary());
  Rng r1(5), r2(5);
  EXPECT_EQ(format_ta(random_ta(r1)), format_ta(random_ta(r2)));
  EXPECT_EQ(format_nfa(random_finite_language_nfa(r1)), format_nfa(random_finite_language_nfa(r2)));
}

TEST(Suites, ZeroTrials) {
  for (const auto& r : {soundness_suite(1, 0), completeness_suite(1, 0), monotonicity_suite(1, 0),
                        timed_soundness_suite(1, 0), inclusion_suite(1, 0)}) {
    EXPECT_EQ(r.trials, 0u);
    EXPECT_TRUE(r.ok());
  }
}

TEST(Generators, RandomTaWithinLimits) {
  Rng rng(64);
  for (int t = 0; t < 300; ++t) {
    const auto ta = random_ta(rng);
    EXPECT_LE(ta.state_count(), 4u);
    EXPECT_LE(ta.clock_count(), 2u);
    for (auto k : ta.max_constants()) EXPECT_LE(k, 3);
  }
}

TEST(Generators, TimedWordsUseQuarterGrid) {
  Rng rng(65);
  for (int t = 0; t < 100; ++t)
    for (const auto& e : random_timed_word(rng, Alphabet({"a"}), 30)) EXPECT_EQ(e.time * 4, std::floor(e.time * 4));
}

TEST(Generators, SampledWordsAreAccepted) {
  Rng rng(66);
  std::size_t got = 0;
  for (int t = 0; t < 100; ++t) {
    const auto ta = random_ta(rng);
    for (int s = 0; s < 20; ++s)
      if (auto w = sample_accepted_word(rng, ta)) {
        ++got;
        ASSERT_LE(w->size(), 8u);
        ASSERT_TRUE(ta_accepts(ta, *w));
      }
  }
  EXPECT_GT(got, 100u);
}

TEST(Generators, CompletenessRewritePreservesNonemptyLanguage) {
  Rng rng(67);
  for (int t = 0; t < 200; ++t) {
    const Nfa nfa = random_finite_language_nfa(rng);
    for (const auto& tr : nfa.transitions()) EXPECT_FALSE(nfa.is_accepting(tr.source));
    EXPECT_FALSE(nfa.is_accepting(nfa.initial()));
  }
  // Language equality on random words against an unrewritten NFA.
  for (int t = 0; t < 200; ++t) {
    const Nfa nfa = random_nfa(rng, 5, 2);
    const Nfa ready = make_completeness_ready(nfa);
    for (int s = 0; s < 30; ++s) {
      const Word w = random_word(rng, nfa.alphabet(), 8);
      if (w.empty()) continue;
      ASSERT_EQ(nfa_accepts(nfa, w), nfa_accepts(ready, w));
    }
  }
}

TEST(Generators, LongestAcceptedWord) {
  const Nfa ab(Alphabet({"a", "b"}), {"s0", "s1", "s2"}, 0, {1, 2}, {{0, 0, 1}, {1, 1, 2}});
  EXPECT_EQ(longest_accepted(ab), 2u);
  EXPECT_THROW(longest_accepted(pattern_aab()), InputError);
}

TEST(Pipeline, MaskedWordKeepsEveryMatch) {
  Rng rng(68);
  for (int t = 0; t < 300; ++t) {
    const Nfa nfa = random_nfa(rng);
    const std::size_t n = 1 + t % 5;
    const Word w = random_word(rng, nfa.alphabet(), 30);
    const auto masked = filter_word(UntimedFilter(nfa, n), w);
    const auto before = untimed_match_set(w, nfa);
    const auto after = untimed_match_set(masked, nfa);
    for (const auto& p : before) ASSERT_TRUE(after.count(p));
  }
}
