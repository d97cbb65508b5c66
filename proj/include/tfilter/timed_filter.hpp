#pragma once

// Filter Moore machine for timed pattern matching: the pattern TA is augmented
// with step counters, one-clock determinized, and the resulting finite
// automaton drives an N-cell pass/mask buffer. The machine emits verdicts
// only; apply_mask() copies them onto the original timed word.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfilter/core.hpp"
#include "tfilter/errors.hpp"
#include "tfilter/mask_buffer.hpp"
#include "tfilter/one_clock_det.hpp"

namespace tfilter {

using MaskStream = std::vector<Verdict>;

// State (s, n) of the counter automaton is numbered s * (N + 1) + n.
struct CounterTa {
  TimedAutomaton automaton;
  std::uint32_t buffer_size;

  StateId state_of(StateId s, std::uint32_t n) const { return s * (buffer_size + 1) + n; }
  StateId base_state(StateId q) const { return q / (buffer_size + 1); }
  std::uint32_t counter(StateId q) const { return q % (buffer_size + 1); }
};

// Three transition families: the (s0,0) self-loop on Σ_⊥ that resets every
// clock, the counter-incrementing copies of E for n < N, and the wraparound
// copies from counter N back to 1.
inline CounterTa build_counter_ta(const TimedAutomaton& ta, std::size_t n) {
  if (n == 0) throw InputError("buffer size N must be positive");
  const auto big_n = static_cast<std::uint32_t>(n);
  const auto width = big_n + 1;
  std::vector<std::string> names;
  names.reserve(ta.state_count() * width);
  for (StateId s = 0; s < ta.state_count(); ++s)
    for (std::uint32_t c = 0; c <= big_n; ++c)
      names.push_back("(" + ta.state_name(s) + "," + std::to_string(c) + ")");

  std::vector<StateId> accepting;
  for (StateId s : ta.accepting_states())
    for (std::uint32_t c = 0; c <= big_n; ++c) accepting.push_back(s * width + c);

  std::vector<ClockId> all_clocks(ta.clock_count());
  for (ClockId c = 0; c < all_clocks.size(); ++c) all_clocks[c] = c;

  std::vector<TaTransition> edges;
  const StateId seed = ta.initial() * width;
  for (Symbol a = 0; a < ta.alphabet().size(); ++a) edges.push_back({seed, seed, a, all_clocks, {}});
  edges.push_back({seed, seed, kBottom, all_clocks, {}});
  for (const auto& t : ta.transitions()) {
    for (std::uint32_t c = 0; c < big_n; ++c)
      edges.push_back({t.source * width + c, t.target * width + c + 1, t.label, t.resets, t.guard});
    edges.push_back({t.source * width + big_n, t.target * width + 1, t.label, t.resets, t.guard});
  }
  return {TimedAutomaton(ta.alphabet(), std::move(names), seed, std::move(accepting), ta.clock_names(),
                         std::move(edges)),
          big_n};
}

// Full builds every reachable determinized state up front; OnDemand builds
// them as a run reaches them. Both yield the same outputs.
enum class Expansion { Full, OnDemand };

class TimedFilter {
 public:
  TimedFilter(const TimedAutomaton& ta, std::size_t n, Expansion expansion = Expansion::Full)
      : base_accepting_(ta.state_count()),
        counter_(build_counter_ta(ta, n)),
        rta_(std::make_shared<const Rta>(ta_to_rta(counter_.automaton))),
        det_(rta_) {
    for (StateId s = 0; s < ta.state_count(); ++s) base_accepting_[s] = ta.is_accepting(s);
    if (expansion == Expansion::Full) det_.expand_all();
    auto collapse = det_.step(DetOneClockTa::initial(), kBottom, 0.0);
    if (!collapse) throw ContractError("determinized counter automaton lacks the ⊥ self-loop");
    collapse_ = *collapse;
  }

  std::uint32_t buffer_size() const { return counter_.buffer_size; }
  const CounterTa& counter_ta() const { return counter_; }
  const Rta& rta() const { return *rta_; }
  const DetOneClockTa& det() const { return det_; }
  // Determinized non-buffer states built so far (all reachable ones under Full).
  std::size_t state_count() const { return det_.state_count(); }
  const Alphabet& alphabet() const { return det_.alphabet(); }

  bool has_counter_n(std::uint32_t q) const { return update(q).action == LabelAction::PassAll; }
  // Largest counter among accepting members; 0 when there is none.
  std::uint32_t psi(std::uint32_t q) const {
    std::uint32_t psi = 0;
    for (std::uint32_t r : det_.members(q)) {
      const StateId cs = rta_->state(r).ta_state;
      const auto c = counter_.counter(cs);
      if (c >= 1 && base_accepting_[counter_.base_state(cs)]) psi = std::max(psi, c);
    }
    return psi;
  }

  // Label update selected by the post-transition state q.
  const LabelUpdate& update(std::uint32_t q) const {
    while (updates_.size() <= q) updates_.push_back(compute_update(static_cast<std::uint32_t>(updates_.size())));
    return updates_[q];
  }

  std::uint32_t next(std::uint32_t q, Symbol a, double dwell) const {
    if (auto t = det_.step(q, a, dwell)) return *t;
    return collapse_;
  }

 private:
  LabelUpdate compute_update(std::uint32_t q) const {
    for (std::uint32_t r : det_.members(q))
      if (counter_.counter(rta_->state(r).ta_state) == counter_.buffer_size)
        return {LabelAction::PassAll, counter_.buffer_size};
    if (const auto p = psi(q); p > 0) return {LabelAction::PassSuffix, p};
    return {LabelAction::ShiftMask, 0};
  }

  std::vector<bool> base_accepting_;
  CounterTa counter_;
  std::shared_ptr<const Rta> rta_;
  DetOneClockTa det_;
  mutable std::vector<LabelUpdate> updates_;
  std::uint32_t collapse_ = 0;
};

inline TimedFilter build_timed_filter(const TimedAutomaton& ta, std::size_t n, Expansion e = Expansion::Full) {
  return TimedFilter(ta, n, e);
}

// One streaming run. push() consumes (a_i, τ_i) and returns the verdict for
// event i − N once i > N; finish() feeds (⊥, τ_n)^N with dwell 0.
class TimedFilterRun {
 public:
  explicit TimedFilterRun(const TimedFilter& f) : f_(&f), labels_(f.buffer_size(), Verdict::Mask) {}

  std::optional<Verdict> push(Symbol a, double time) {
    if (!f_->alphabet().contains(a)) throw InputError("unknown label");
    if (!(time > last_time_)) throw InputError("timestamps must be positive and strictly increasing");
    const double dwell = time - last_time_;
    last_time_ = time;
    return step(a, dwell);
  }

  template <class Sink>
  void finish(Sink&& sink) {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (auto v = step(kBottom, 0.0)) sink(*v);
  }

  std::uint32_t state() const { return q_; }
  const MaskBuffer<Verdict>& labels() const { return labels_; }
  std::size_t footprint_bytes() const { return sizeof(*this) + labels_.footprint_bytes() - sizeof(labels_); }

 private:
  // The output of step t is Λ of the pre-step state, i.e. b_{t−N}.
  std::optional<Verdict> step(Symbol a, double dwell) {
    q_ = f_->next(q_, a, dwell);
    const auto out = labels_.shift(Verdict::Mask, f_->update(q_));
    if (++steps_ <= labels_.size()) return std::nullopt;
    return out.label;
  }

  const TimedFilter* f_;
  MaskBuffer<Verdict> labels_;
  std::uint32_t q_ = DetOneClockTa::initial();
  double last_time_ = 0.0;
  std::size_t steps_ = 0;
};

inline MaskStream filter_timed_word(const TimedFilter& f, const TimedWord& w) {
  TimedFilterRun run(f);
  MaskStream out;
  out.reserve(w.size());
  for (const auto& e : w)
    if (auto v = run.push(e.label, e.time)) out.push_back(*v);
  run.finish([&](Verdict v) { out.push_back(v); });
  return out;
}

// Event i becomes (⊥, τ_i) when its verdict is mask.
inline TimedWord apply_mask(const TimedWord& w, const MaskStream& m) {
  if (m.size() != w.size()) throw InputError("mask stream length differs from word length");
  std::vector<TimedEvent> out(w.begin(), w.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (m[i] == Verdict::Mask) out[i].label = kBottom;
  return TimedWord(std::move(out));
}

// Streaming run suppression: every maximal run of three or more ⊥ events is
// reduced to its first and last element. Holds at most one pending event.
template <class Event, class IsBottom>
class RunSuppressor {
 public:
  explicit RunSuppressor(IsBottom is_bottom = {}) : is_bottom_(std::move(is_bottom)) {}

  template <class Sink>
  void push(const Event& e, Sink&& sink) {
    if (!is_bottom_(e)) {
      flush(sink);
      sink(e);
      return;
    }
    if (run_ == 0) sink(e);       // first ⊥ of a run goes out immediately
    else pending_ = e;            // the latest ⊥ may turn out to be the last
    ++run_;
  }

  template <class Sink>
  void flush(Sink&& sink) {
    if (run_ >= 2 && pending_) sink(*pending_);
    pending_.reset();
    run_ = 0;
  }

  // Length of the ⊥ run currently open (0 if none).
  std::size_t open_run() const { return run_; }

 private:
  IsBottom is_bottom_;
  std::optional<Event> pending_;
  std::size_t run_ = 0;
};

struct TimedEventIsBottom {
  bool operator()(const TimedEvent& e) const { return e.label == kBottom; }
};

inline TimedWord suppress_runs(const TimedWord& masked) {
  std::vector<TimedEvent> out;
  RunSuppressor<TimedEvent, TimedEventIsBottom> sup;
  auto sink = [&](const TimedEvent& e) { out.push_back(e); };
  for (const auto& e : masked) sup.push(e, sink);
  sup.flush(sink);
  return TimedWord(std::move(out));
}

}  // namespace tfilter
