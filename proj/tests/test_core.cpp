#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "helpers.hpp"

using namespace tfilter;
using namespace tfilter::testing;

TEST(Alphabet, RejectsReservedAndDuplicateLabels) {
  EXPECT_THROW(Alphabet({"a", "a"}), InputError);
  EXPECT_THROW(Alphabet({"_"}), InputError);
  EXPECT_THROW(Alphabet({"$"}), InputError);
  EXPECT_THROW(Alphabet({""}), InputError);
  EXPECT_THROW(Alphabet({"a b"}), InputError);
}

TEST(Alphabet, BottomIsOutsideTheLabels) {
  Alphabet s({"a", "b"});
  EXPECT_EQ(s.find("_"), kBottom);
  EXPECT_FALSE(s.contains(kBottom));
  EXPECT_EQ(s.label(kBottom), "_");
  EXPECT_THROW(s.symbol("c"), InputError);
}

TEST(Nfa, RejectsDanglingReferences) {
  EXPECT_THROW(Nfa(Alphabet({"a"}), {"s0"}, 1, {}, {}), InputError);
  EXPECT_THROW(Nfa(Alphabet({"a"}), {"s0"}, 0, {3}, {}), InputError);
  EXPECT_THROW(Nfa(Alphabet({"a"}), {"s0"}, 0, {}, {{0, 0, 2}}), InputError);
  EXPECT_THROW(Nfa(Alphabet({"a"}), {"s0"}, 0, {}, {{0, 5, 0}}), InputError);
}

TEST(NfaRunExists, Examples) {
  const Nfa a = pattern_aab();
  EXPECT_EQ(nfa_run_exists(a, word("ab", a.alphabet()), 0), (std::set<StateId>{2}));
  EXPECT_EQ(nfa_run_exists(a, Word{}, 0), (std::set<StateId>{0}));
  EXPECT_TRUE(nfa_run_exists(a, word("bb", a.alphabet()), 0).empty());
}

TEST(NfaRunExists, UnknownLabelIsAnInputError) {
  const Nfa a = pattern_aab();
  EXPECT_THROW(nfa_run_exists(a, Word{7}, 0), InputError);
}

TEST(IsStuck, Examples) {
  const Nfa a = pattern_aab();
  EXPECT_TRUE(is_stuck(a, word("bb", a.alphabet())));
  EXPECT_FALSE(is_stuck(a, word("a", a.alphabet())));
  const Nfa bare(Alphabet({"a"}), {"s0"}, 0, {}, {});
  EXPECT_FALSE(is_stuck(bare, Word{}));
}

// Enumerates every run explicitly, one path at a time.
static std::set<StateId> reachable_by_paths(const Nfa& nfa, const Word& w, StateId from) {
  std::set<StateId> out;
  std::function<void(StateId, std::size_t)> walk = [&](StateId s, std::size_t i) {
    if (i == w.size()) {
      out.insert(s);
      return;
    }
    for (const auto& t : nfa.transitions())
      if (t.source == s && t.label == w[i]) walk(t.target, i + 1);
  };
  walk(from, 0);
  return out;
}

TEST(NfaRunExists, AgreesWithPathEnumerationExhaustively) {
  Rng rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const Nfa nfa = random_nfa(rng, 5, 2, 0.35);
    const std::size_t sigma = nfa.alphabet().size();
    for (std::size_t len = 0; len <= 8; ++len) {
      Word w(len, 0);
      while (true) {
        for (StateId from = 0; from < nfa.state_count(); ++from)
          ASSERT_EQ(nfa_run_exists(nfa, w, from), reachable_by_paths(nfa, w, from));
        std::size_t i = 0;
        while (i < len && ++w[i] == sigma) w[i++] = 0;
        if (i == len) break;
      }
    }
  }
}

TEST(TimedWord, RejectsNonIncreasingOrNonPositiveTimes) {
  EXPECT_THROW(timed({{0, 1.0}, {0, 1.0}}), InputError);
  EXPECT_THROW(timed({{0, 2.0}, {0, 1.0}}), InputError);
  EXPECT_THROW(timed({{0, 0.0}}), InputError);
  EXPECT_NO_THROW(timed({}));
}

TEST(TaAccepts, Examples) {
  const auto ta = pattern_two_second();
  EXPECT_TRUE(ta_accepts(ta, timed({{0, 0.5}, {1, 1.8}})));
  EXPECT_FALSE(ta_accepts(ta, timed({{0, 0.5}, {1, 3.0}})));
  const TimedAutomaton none(Alphabet({"a", "b"}), {"s0", "s1"}, 0, {}, {"x"}, {{0, 1, 0, {}, {}}});
  EXPECT_FALSE(ta_accepts(none, timed({{0, 1.0}})));
}

TEST(TaAccepts, BoundaryStrictness) {
  const auto ta = pattern_two_second();
  EXPECT_FALSE(ta_accepts(ta, timed({{0, 1.0}, {1, 3.0}})));  // x = 2 is not < 2
  EXPECT_TRUE(ta_accepts(ta, timed({{0, 1.0}, {1, 2.75}})));
}

TEST(TaAccepts, RejectsUnknownLabel) {
  EXPECT_THROW(ta_accepts(pattern_two_second(), timed({{9, 1.0}})), InputError);
}

TEST(TaAccepts, IdentityShiftInvariant) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto ta = random_ta(rng);
    const auto w = random_timed_word(rng, ta.alphabet(), 8);
    if (w.empty()) continue;
    ASSERT_EQ(ta_accepts(ta, w), ta_accepts(ta, timed_subsequence_shift(w, 1, w.size())));
  }
}

TEST(TimedSubsequenceShift, Examples) {
  const auto w2 = word_w2();
  const auto s34 = timed_subsequence_shift(w2, 3, 4);
  ASSERT_EQ(s34.size(), 2u);
  EXPECT_EQ(s34[0].label, 0u);
  EXPECT_NEAR(s34[0].time, 1.0, 1e-12);
  EXPECT_EQ(s34[1].label, 1u);
  EXPECT_NEAR(s34[1].time, 2.3, 1e-12);
  EXPECT_EQ(timed_subsequence_shift(w2, 1, 4), w2);
  const auto s22 = timed_subsequence_shift(w2, 2, 2);
  ASSERT_EQ(s22.size(), 1u);
  EXPECT_NEAR(s22[0].time, 2.4, 1e-12);
}

TEST(TimedSubsequenceShift, IndexErrors) {
  const auto w2 = word_w2();
  EXPECT_THROW(timed_subsequence_shift(w2, 0, 1), InputError);
  EXPECT_THROW(timed_subsequence_shift(w2, 3, 2), InputError);
  EXPECT_THROW(timed_subsequence_shift(w2, 1, 5), InputError);
}

TEST(TimedSegment, Examples) {
  const auto w2 = word_w2();
  const auto s = timed_segment(w2, 3.0, 5.0);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].label, 0u);
  EXPECT_DOUBLE_EQ(s[0].time, 0.5);
  EXPECT_EQ(s[1].label, 1u);
  EXPECT_NEAR(s[1].time, 1.8, 1e-12);
  EXPECT_EQ(s[2].label, kTerminal);
  EXPECT_DOUBLE_EQ(s[2].time, 2.0);

  const auto e = timed_segment(w2, 0.0, 0.05);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0].label, kTerminal);
  EXPECT_DOUBLE_EQ(e[0].time, 0.05);

  const auto m = timed_segment(w2, 2.6, 4.9);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_NEAR(m[0].time, 0.9, 1e-12);
  EXPECT_NEAR(m[1].time, 2.2, 1e-12);
  EXPECT_NEAR(m[2].time, 2.3, 1e-12);
  EXPECT_EQ(m[2].label, kTerminal);
}

TEST(TimedSegment, RejectsEmptyInterval) {
  EXPECT_THROW(timed_segment(word_w2(), 2.0, 2.0), InputError);
  EXPECT_THROW(timed_segment(word_w2(), 3.0, 1.0), InputError);
}

TEST(TimedSegment, EndsWithOneTerminalAndIncreases) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int i = 0; i < 300; ++i) {
    const auto w = random_timed_word(rng, Alphabet({"a", "b"}), 12);
    double t = u(rng), t2 = u(rng);
    if (t > t2) std::swap(t, t2);
    if (!(t < t2)) continue;
    const auto s = timed_segment(w, t, t2);
    ASSERT_FALSE(s.empty());
    EXPECT_EQ(s[s.size() - 1].label, kTerminal);
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      EXPECT_NE(s[k].label, kTerminal);
      EXPECT_LT(s[k].time, s[k + 1].time);
    }
  }
}
