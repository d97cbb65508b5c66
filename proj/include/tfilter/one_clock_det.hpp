#pragma once

// One-clock determinization of a timed automaton in two stages:
//  1. over-approximate the TA by a real-time automaton (RTA) whose states are
//     (TA state, zone over C ⊎ {y}) pairs and whose guards are intervals of
//     the dwell-time clock y;
//  2. determinize the RTA by a subset construction over the coarsest interval
//     partition of each (state set, label) pair.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tfilter/core.hpp"
#include "tfilter/dbm.hpp"
#include "tfilter/errors.hpp"

namespace tfilter {

struct RtaState {
  StateId ta_state;
  Dbm zone;  // over x_1..x_|C| and y = x_{|C|+1}
};

struct RtaTransition {
  std::uint32_t source;
  Symbol label;
  Interval guard;  // on y; every RTA transition resets y
  std::uint32_t target;
  std::size_t ta_transition;  // index of the originating TA transition
};

class Rta {
 public:
  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t state_count() const { return states_.size(); }
  const RtaState& state(std::uint32_t q) const { return states_.at(q); }
  static constexpr std::uint32_t initial() { return 0; }
  bool is_accepting(std::uint32_t q) const { return accepting_.at(q); }
  const std::vector<RtaTransition>& transitions() const { return transitions_; }
  std::span<const std::size_t> outgoing(std::uint32_t q) const { return outgoing_.at(q); }

 private:
  friend Rta ta_to_rta(const TimedAutomaton& ta);
  Alphabet alphabet_;
  std::vector<RtaState> states_;
  std::vector<bool> accepting_;
  std::vector<RtaTransition> transitions_;
  std::vector<std::vector<std::size_t>> outgoing_;
};

// Normalization maxima per DBM index: k[0] unused, k[c + 1] is the largest
// constant compared against clock c, and y gets the global maximum.
inline std::vector<std::int64_t> extrapolation_constants(const TimedAutomaton& ta) {
  const auto per_clock = ta.max_constants();
  std::vector<std::int64_t> k(ta.clock_count() + 2, 0);
  std::int64_t global = 0;
  for (std::size_t c = 0; c < per_clock.size(); ++c) {
    k[c + 1] = per_clock[c];
    global = std::max(global, per_clock[c]);
  }
  k.back() = global;
  return k;
}

// Worklist exploration of (state, normalized zone) pairs. Guard intervals are
// exact projections of Z ∩ δ onto y, so L(ta) ⊆ L(result).
inline Rta ta_to_rta(const TimedAutomaton& ta) {
  struct Key {
    StateId s;
    Dbm z;
    bool operator==(const Key& o) const { return s == o.s && z == o.z; }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return k.z.hash() * 31 + k.s; }
  };

  Rta rta;
  rta.alphabet_ = ta.alphabet();
  const std::size_t clocks = ta.clock_count() + 1;
  const std::size_t y = clocks;
  const auto k = extrapolation_constants(ta);

  std::unordered_map<Key, std::uint32_t, KeyHash> index;
  auto intern = [&](StateId s, Dbm z) {
    auto [it, fresh] = index.emplace(Key{s, z}, static_cast<std::uint32_t>(rta.states_.size()));
    if (fresh) {
      rta.states_.push_back({s, std::move(z)});
      rta.accepting_.push_back(ta.is_accepting(s));
      rta.outgoing_.emplace_back();
    }
    return it->second;
  };

  intern(ta.initial(), normalize_k(Dbm::zero_elapsed(clocks), k));
  std::vector<std::size_t> resets;
  for (std::uint32_t q = 0; q < rta.states_.size(); ++q) {
    const StateId s = rta.states_[q].ta_state;
    for (std::size_t ti : ta.outgoing(s)) {
      const auto& t = ta.transition(ti);
      Dbm guarded = intersect_guard(rta.states_[q].zone, t.guard);
      if (guarded.is_empty()) continue;
      const Interval guard = project_to_y(guarded);
      resets.clear();
      for (ClockId c : t.resets) resets.push_back(c + 1);
      resets.push_back(y);
      guarded.reset_and_elapse(resets).normalize_k(k);
      const std::uint32_t target = intern(t.target, std::move(guarded));
      rta.outgoing_[q].push_back(rta.transitions_.size());
      rta.transitions_.push_back({q, t.label, guard, target, ti});
    }
  }
  return rta;
}

// Coarsest partition of [0, ∞) into maximal intervals on which membership in
// every input interval is constant. Each cell is returned with the indices of
// the input intervals that contain it; cells contained in none are dropped.
inline std::vector<std::pair<Interval, std::vector<std::size_t>>> elementary_intervals(
    std::span<const Interval> guards) {
  std::vector<std::int64_t> points{0};
  for (const auto& g : guards) {
    points.push_back(g.lower.value);
    if (!g.upper.is_infinite()) points.push_back(g.upper.value);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  // Atoms alternate: {p0}, (p0,p1), {p1}, ..., {pr}, (pr, ∞).
  struct Atom {
    Interval cell;
    double witness;
  };
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    atoms.push_back({Interval::point(p), static_cast<double>(p)});
    if (i + 1 < points.size())
      atoms.push_back({{Bound::lt(p), Bound::lt(points[i + 1])},
                       (static_cast<double>(p) + static_cast<double>(points[i + 1])) / 2.0});
    else
      atoms.push_back({{Bound::lt(p), Bound::infinity()}, static_cast<double>(p) + 1.0});
  }

  std::vector<std::pair<Interval, std::vector<std::size_t>>> cells;
  std::vector<std::size_t> prev_sig;
  bool have_prev = false;
  for (const auto& atom : atoms) {
    std::vector<std::size_t> sig;
    for (std::size_t g = 0; g < guards.size(); ++g)
      if (guards[g].contains(atom.witness)) sig.push_back(g);
    if (have_prev && sig == prev_sig) {
      if (!sig.empty()) cells.back().first.upper = atom.cell.upper;
      continue;
    }
    if (!sig.empty()) cells.push_back({atom.cell, sig});
    prev_sig = std::move(sig);
    have_prev = true;
  }
  return cells;
}

struct DetTransition {
  Interval guard;
  std::uint32_t target;
};

// Deterministic one-clock TA whose states are sets of RTA states. Labels are
// columns 0..|Σ|−1 plus a final column for ⊥. Transitions are partial.
//
// Rows are built on first use, so a run only pays for the subsets it visits;
// expand_all() builds every reachable subset. The cache makes const lookups
// mutate internal state, so an instance must not be shared across threads.
class DetOneClockTa {
 public:
  explicit DetOneClockTa(std::shared_ptr<const Rta> rta) : rta_(std::move(rta)) {
    if (!rta_) throw ContractError("null RTA");
    intern({Rta::initial()});
  }

  const Alphabet& alphabet() const { return rta_->alphabet(); }
  const Rta& rta() const { return *rta_; }
  // Subsets discovered so far; after expand_all() this is every reachable one.
  std::size_t state_count() const { return states_.size(); }
  // Sorted RTA state ids making up state q.
  const std::vector<std::uint32_t>& members(std::uint32_t q) const { return states_.at(q); }
  static constexpr std::uint32_t initial() { return 0; }
  bool is_accepting(std::uint32_t q) const { return accepting_.at(q); }

  std::size_t column(Symbol a) const {
    if (a == kBottom) return alphabet().size();
    if (!alphabet().contains(a)) throw InputError("unknown label");
    return a;
  }

  std::span<const DetTransition> transitions(std::uint32_t q, Symbol a) const {
    expand(q);
    return table_[q * (alphabet().size() + 1) + column(a)];
  }

  // Unique successor after dwelling `dwell` and reading `a`, if any.
  std::optional<std::uint32_t> step(std::uint32_t q, Symbol a, double dwell) const {
    for (const auto& t : transitions(q, a))
      if (t.guard.contains(dwell)) return t.target;
    return std::nullopt;
  }

  bool accepts(const TimedWord& w) const {
    std::uint32_t q = initial();
    double prev = 0.0;
    for (const auto& e : w) {
      auto next = step(q, e.label, e.time - prev);
      if (!next) return false;
      q = *next;
      prev = e.time;
    }
    return is_accepting(q);
  }

  // Builds rows breadth-first until no new subset appears. `limit` bounds the
  // number of subsets; exceeding it throws InputError.
  void expand_all(std::size_t limit = std::numeric_limits<std::size_t>::max()) const {
    for (std::uint32_t q = 0; q < states_.size(); ++q) {
      expand(q);
      if (states_.size() > limit) throw InputError("determinization exceeds " + std::to_string(limit) + " states");
    }
  }

  bool fully_expanded() const { return std::find(expanded_.begin(), expanded_.end(), false) == expanded_.end(); }

 private:
  struct VecHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const {
      std::size_t h = v.size();
      for (auto x : v) h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return h;
    }
  };

  std::uint32_t intern(std::vector<std::uint32_t> set) const {
    auto [it, fresh] = index_.emplace(set, static_cast<std::uint32_t>(states_.size()));
    if (fresh) {
      const bool acc = std::any_of(set.begin(), set.end(), [&](auto r) { return rta_->is_accepting(r); });
      states_.push_back(std::move(set));
      accepting_.push_back(acc);
      expanded_.push_back(false);
      table_.resize(states_.size() * (alphabet().size() + 1));
    }
    return it->second;
  }

  void expand(std::uint32_t q) const {
    if (expanded_.at(q)) return;
    expanded_[q] = true;
    const std::size_t columns = alphabet().size() + 1;
    std::vector<Interval> guards;
    std::vector<std::uint32_t> targets;
    for (std::size_t c = 0; c < columns; ++c) {
      const Symbol a = c + 1 == columns ? kBottom : static_cast<Symbol>(c);
      guards.clear();
      targets.clear();
      for (std::uint32_t r : states_[q])
        for (std::size_t ti : rta_->outgoing(r)) {
          const auto& t = rta_->transitions()[ti];
          if (t.label != a) continue;
          guards.push_back(t.guard);
          targets.push_back(t.target);
        }
      if (guards.empty()) continue;
      std::vector<DetTransition> row;
      for (auto& [cell, sig] : elementary_intervals(guards)) {
        std::vector<std::uint32_t> succ;
        for (std::size_t g : sig) succ.push_back(targets[g]);
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        row.push_back({cell, intern(std::move(succ))});
      }
      table_[q * columns + c] = std::move(row);  // intern() may have grown table_
    }
  }

  std::shared_ptr<const Rta> rta_;
  mutable std::vector<std::vector<std::uint32_t>> states_;
  mutable std::vector<bool> accepting_;
  mutable std::vector<bool> expanded_;
  mutable std::vector<std::vector<DetTransition>> table_;
  mutable std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, VecHash> index_;
};

// Eager subset construction over the coarsest interval partitions.
inline DetOneClockTa determinize_rta(const Rta& rta) {
  DetOneClockTa det(std::make_shared<const Rta>(rta));
  det.expand_all();
  return det;
}

inline DetOneClockTa one_clock_determinize(const TimedAutomaton& ta) { return determinize_rta(ta_to_rta(ta)); }

// ta accepts w ⇒ det accepts w.
inline bool check_simulation(const TimedAutomaton& ta, const DetOneClockTa& det, const TimedWord& w) {
  return !ta_accepts(ta, w) || det.accepts(w);
}

}  // namespace tfilter
