#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace tfilter;
using namespace tfilter::testing;

namespace {

// idle -g1/x:=0-> g1 -g2, x<2-> g2 over {g1, g2}.
TimedAutomaton gear() {
  return TimedAutomaton(Alphabet({"g1", "g2"}), {"idle", "g1", "g2"}, 0, {2}, {"x"},
                        {{0, 1, 0, {0}, {}}, {1, 2, 1, {}, ClockConstraint{{{0, Relation::Less, 2}}}}});
}

// Original-automaton transitions enabled from the members of q on `a` after
// dwelling u, identified by RTA transition index.
std::vector<std::size_t> enabled(const DetOneClockTa& det, std::uint32_t q, Symbol a, double u) {
  std::vector<std::size_t> out;
  for (std::uint32_t r : det.members(q))
    for (std::size_t ti : det.rta().outgoing(r)) {
      const auto& t = det.rta().transitions()[ti];
      if (t.label == a && t.guard.contains(u)) out.push_back(ti);
    }
  return out;
}

std::vector<Symbol> columns(const Alphabet& al) {
  std::vector<Symbol> c;
  for (Symbol a = 0; a < al.size(); ++a) c.push_back(a);
  c.push_back(kBottom);
  return c;
}

}  // namespace

TEST(TaToRta, GearGuardIsHalfOpenInterval) {
  const Rta rta = ta_to_rta(gear());
  EXPECT_EQ(rta.state_count(), 3u);
  std::size_t g2_edges = 0;
  for (const auto& t : rta.transitions())
    if (t.label == 1) {
      ++g2_edges;
      EXPECT_EQ(t.guard.lower, Bound::le(0));
      EXPECT_EQ(t.guard.upper, Bound::lt(2));
    }
  EXPECT_EQ(g2_edges, 1u);
}

TEST(TaToRta, ClockFreeGuardsBecomeTheWholeLine) {
  const TimedAutomaton ta(Alphabet({"a", "b"}), {"s0", "s1", "s2"}, 0, {2}, {"x"},
                          {{0, 1, 0, {}, {}}, {1, 2, 1, {0}, {}}, {2, 0, 0, {}, {}}, {1, 1, 0, {}, {}}});
  const Rta rta = ta_to_rta(ta);
  // The reset on s1 -b-> s2 brings s0 back with zone x <= y, a second RTA state.
  EXPECT_EQ(rta.state_count(), 4u);
  for (const auto& t : rta.transitions()) EXPECT_EQ(t.guard, Interval::all());
}

TEST(TaToRta, AcceptsSampledAcceptedWords) {
  Rng rng(41);
  for (int t = 0; t < 60; ++t) {
    const auto ta = random_ta(rng);
    const auto rta = std::make_shared<const Rta>(ta_to_rta(ta));
    const DetOneClockTa det(rta);
    for (int s = 0; s < 50; ++s)
      if (auto w = sample_accepted_word(rng, ta)) {
        ASSERT_TRUE(det.accepts(*w)) << format_ta(ta);
      }
  }
}

TEST(TaToRta, ExplorationTerminatesAndIsDeterministic) {
  Rng rng(42);
  for (int t = 0; t < 100; ++t) {
    const auto ta = random_ta(rng);
    const Rta a = ta_to_rta(ta), b = ta_to_rta(ta);
    ASSERT_EQ(a.state_count(), b.state_count());
    ASSERT_EQ(a.transitions().size(), b.transitions().size());
    for (std::uint32_t q = 0; q < a.state_count(); ++q) {
      ASSERT_EQ(a.state(q).ta_state, b.state(q).ta_state);
      ASSERT_EQ(a.state(q).zone, b.state(q).zone);
    }
  }
}

TEST(ExtrapolationConstants, PerClockAndGlobalForY) {
  const TimedAutomaton ta(Alphabet({"a"}), {"s"}, 0, {}, {"x", "z"},
                          {{0, 0, 0, {}, ClockConstraint{{{0, Relation::Less, 2}, {1, Relation::GreaterEq, 5}}}}});
  EXPECT_EQ(extrapolation_constants(ta), (std::vector<std::int64_t>{0, 2, 5, 5}));
}

TEST(ElementaryIntervals, TwoOverlappingGuards) {
  const Interval g[] = {{Bound::le(0), Bound::lt(2)}, {Bound::le(1), Bound::lt(3)}};
  const auto cells = elementary_intervals(g);
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[0].first, (Interval{Bound::le(0), Bound::lt(1)}));
  EXPECT_EQ(cells[0].second, (std::vector<std::size_t>{0}));
  EXPECT_EQ(cells[1].first, (Interval{Bound::le(1), Bound::lt(2)}));
  EXPECT_EQ(cells[1].second, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(cells[2].first, (Interval{Bound::le(2), Bound::lt(3)}));
  EXPECT_EQ(cells[2].second, (std::vector<std::size_t>{1}));
  // [3, ∞) has no successor and therefore no transition.
  for (const auto& [c, sig] : cells) EXPECT_FALSE(c.contains(3.0));
}

TEST(ElementaryIntervals, PartitionPropertyOnRandomGuards) {
  Rng rng(43);
  std::uniform_int_distribution<std::int64_t> c(0, 5);
  std::bernoulli_distribution coin(0.5);
  for (int t = 0; t < 500; ++t) {
    std::vector<Interval> guards;
    for (int k = 0; k < 3; ++k) {
      std::int64_t lo = c(rng), hi = c(rng);
      if (lo > hi) std::swap(lo, hi);
      Interval g{Bound{lo, coin(rng)}, coin(rng) ? Bound::infinity() : Bound{hi, coin(rng)}};
      if (!g.empty()) guards.push_back(g);
    }
    const auto cells = elementary_intervals(guards);
    for (int q = 0; q <= 32; ++q) {
      const double u = 0.25 * q;
      std::vector<std::size_t> sig;
      for (std::size_t g = 0; g < guards.size(); ++g)
        if (guards[g].contains(u)) sig.push_back(g);
      std::size_t hits = 0;
      for (const auto& [cell, s] : cells)
        if (cell.contains(u)) {
          ++hits;
          EXPECT_EQ(s, sig);
        }
      EXPECT_EQ(hits, sig.empty() ? 0u : 1u);
    }
  }
}

TEST(DeterminizeRta, DeterministicInputKeepsItsSkeleton) {
  const Rta rta = ta_to_rta(gear());
  const DetOneClockTa det = determinize_rta(rta);
  EXPECT_EQ(det.state_count(), rta.state_count());
  for (std::uint32_t q = 0; q < det.state_count(); ++q) EXPECT_EQ(det.members(q).size(), 1u);
}

TEST(DeterminizeRta, GearAcceptsSampledWords) {
  const auto ta = gear();
  const DetOneClockTa det = one_clock_determinize(ta);
  Rng rng(44);
  std::size_t sampled = 0;
  for (int s = 0; s < 200; ++s)
    if (auto w = sample_accepted_word(rng, ta)) {
      ++sampled;
      EXPECT_TRUE(check_simulation(ta, det, *w));
      EXPECT_TRUE(det.accepts(*w));
    }
  EXPECT_GT(sampled, 0u);
}

TEST(CheckSimulation, Examples) {
  const auto ta = gear();
  const auto det = one_clock_determinize(ta);
  const auto w = timed({{0, 1.0}, {1, 2.5}});
  EXPECT_TRUE(ta_accepts(ta, w));
  EXPECT_TRUE(det.accepts(w));
  EXPECT_TRUE(check_simulation(ta, det, w));
  EXPECT_TRUE(check_simulation(ta, det, timed({{1, 1.0}})));  // rejected by ta: vacuous
}

TEST(DetOneClockTa, DeterministicAndGuardHomogeneous) {
  Rng rng(45);
  for (int t = 0; t < 80; ++t) {
    const auto ta = random_ta(rng);
    const DetOneClockTa det(std::make_shared<const Rta>(ta_to_rta(ta)));
    // Explore a bounded number of states so the check stays cheap.
    for (std::uint32_t q = 0; q < det.state_count() && q < 200; ++q)
      for (Symbol a : columns(ta.alphabet())) {
        const auto row = det.transitions(q, a);
        for (int k = 0; k <= 28; ++k) {
          const double u = 0.25 * k;
          std::size_t hits = 0;
          for (const auto& tr : row) hits += tr.guard.contains(u);
          ASSERT_LE(hits, 1u);
          ASSERT_EQ(hits == 1, !enabled(det, q, a, u).empty());
        }
        for (const auto& tr : row) {
          std::optional<std::vector<std::size_t>> first;
          for (int k = 0; k <= 28; ++k) {
            const double u = 0.25 * k;
            if (!tr.guard.contains(u)) continue;
            const auto e = enabled(det, q, a, u);
            if (!first) first = e;
            ASSERT_EQ(e, *first);
          }
        }
      }
  }
}

TEST(DetOneClockTa, OnDemandMatchesFullExpansion) {
  Rng rng(46);
  for (int t = 0; t < 60; ++t) {
    const auto ta = random_ta(rng, 3, 1);
    const auto rta = std::make_shared<const Rta>(ta_to_rta(ta));
    const DetOneClockTa lazy(rta), full(rta);
    try {
      full.expand_all(5000);
    } catch (const InputError&) {
      continue;
    }
    EXPECT_TRUE(full.fully_expanded());
    for (int s = 0; s < 30; ++s) {
      const auto w = random_timed_word(rng, ta.alphabet(), 10);
      ASSERT_EQ(lazy.accepts(w), full.accepts(w));
    }
  }
}

TEST(DetOneClockTa, AcceptanceFollowsMembers) {
  const auto det = one_clock_determinize(gear());
  for (std::uint32_t q = 0; q < det.state_count(); ++q) {
    bool any = false;
    for (auto r : det.members(q)) any = any || det.rta().is_accepting(r);
    EXPECT_EQ(det.is_accepting(q), any);
  }
}
