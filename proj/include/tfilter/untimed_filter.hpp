#pragma once

// Filter Moore machine for untimed pattern matching. The non-buffer part
// (sets of (NFA state, counter) pairs) is determinized up front into a table;
// the buffer part is a ring of N cells driven by the table's label updates.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tfilter/core.hpp"
#include "tfilter/errors.hpp"
#include "tfilter/mask_buffer.hpp"

namespace tfilter {

struct CounterPair {
  StateId state;
  std::uint32_t counter;  // 0 only for the perpetual (s0, 0) seed
  friend auto operator<=>(const CounterPair&, const CounterPair&) = default;
};

// Sorted by (state, counter); always contains (s0, 0).
using NonBufferState = std::vector<CounterPair>;

struct NonBufferStateHash {
  std::size_t operator()(const NonBufferState& s) const {
    std::size_t h = s.size();
    for (const auto& p : s)
      h ^= (std::size_t{p.state} * 0x9E3779B1u + p.counter) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

inline NonBufferState initial_non_buffer_state(const Nfa& nfa) { return {{nfa.initial(), 0}}; }

// Counters advance as (n mod N) + 1; (s0, 0) is re-seeded on every step. ⊥ has
// no transitions, so it collapses the set to {(s0, 0)}.
inline NonBufferState successor_pairs(const Nfa& nfa, std::uint32_t n_buffer,
                                      const NonBufferState& current, Symbol a) {
  NonBufferState next{{nfa.initial(), 0}};
  for (const auto& [s, n] : current)
    for (StateId t : nfa.successors(s, a)) next.push_back({t, (n % n_buffer) + 1});
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());
  return next;
}

// Label update selected by the post-transition set. Case order: counter N,
// then accepting (ψ = largest counter among accepting pairs), then default.
inline LabelUpdate label_update(const Nfa& nfa, std::uint32_t n_buffer, const NonBufferState& next) {
  std::uint32_t psi = 0;
  for (const auto& [s, n] : next) {
    if (n == n_buffer) return {LabelAction::PassAll, n_buffer};
    if (n >= 1 && nfa.is_accepting(s)) psi = std::max(psi, n);
  }
  if (psi > 0) return {LabelAction::PassSuffix, psi};
  return {LabelAction::ShiftMask, 0};
}

class UntimedFilter {
 public:
  struct Edge {
    std::uint32_t target;
    LabelUpdate update;
  };

  UntimedFilter(Nfa nfa, std::size_t buffer_size) : nfa_(std::move(nfa)), n_(check_n(buffer_size)) {
    const std::size_t columns = nfa_.alphabet().size() + 1;
    std::unordered_map<NonBufferState, std::uint32_t, NonBufferStateHash> index;
    auto intern = [&](NonBufferState s) {
      auto [it, fresh] = index.emplace(s, static_cast<std::uint32_t>(states_.size()));
      if (fresh) states_.push_back(std::move(s));
      return it->second;
    };
    intern(initial_non_buffer_state(nfa_));
    for (std::size_t q = 0; q < states_.size(); ++q) {
      table_.resize((q + 1) * columns);
      for (std::size_t c = 0; c < columns; ++c) {
        const Symbol a = c + 1 == columns ? kBottom : static_cast<Symbol>(c);
        NonBufferState next = successor_pairs(nfa_, n_, states_[q], a);
        const LabelUpdate u = label_update(nfa_, n_, next);
        const std::uint32_t target = intern(std::move(next));
        table_[q * columns + c] = Edge{target, u};
      }
    }
  }

  const Nfa& nfa() const { return nfa_; }
  std::uint32_t buffer_size() const { return n_; }
  std::size_t state_count() const { return states_.size(); }
  const NonBufferState& state(std::uint32_t q) const { return states_.at(q); }
  static constexpr std::uint32_t initial_state() { return 0; }

  const Edge& edge(std::uint32_t q, Symbol a) const { return table_[q * (nfa_.alphabet().size() + 1) + column(a)]; }

  std::size_t column(Symbol a) const {
    if (a == kBottom) return nfa_.alphabet().size();
    if (!nfa_.alphabet().contains(a)) throw InputError("unknown label");
    return a;
  }

 private:
  static std::uint32_t check_n(std::size_t n) {
    if (n == 0) throw InputError("buffer size N must be positive");
    if (n > std::numeric_limits<std::uint32_t>::max() / 2) throw InputError("buffer size N too large");
    return static_cast<std::uint32_t>(n);
  }

  Nfa nfa_;
  std::uint32_t n_;
  std::vector<NonBufferState> states_;
  std::vector<Edge> table_;
};

inline UntimedFilter build_untimed_filter(const Nfa& nfa, std::size_t n) { return UntimedFilter(nfa, n); }

// Full Moore-machine state: the non-buffer DFA state plus the N buffer cells.
struct FilterRunState {
  std::uint32_t state;
  MaskBuffer<Symbol> buffer;
};

inline FilterRunState initial_run_state(const UntimedFilter& f) {
  return {UntimedFilter::initial_state(), MaskBuffer<Symbol>(f.buffer_size(), kBottom)};
}

// One Moore step: the output is Λ of the state before the transition.
inline std::pair<FilterRunState, Symbol> filter_step(const UntimedFilter& f, FilterRunState rs, Symbol a) {
  const auto& e = f.edge(rs.state, a);
  const auto out = rs.buffer.shift(a, e.update);
  rs.state = e.target;
  return {std::move(rs), out.label == Verdict::Pass ? out.payload : kBottom};
}

// Steppers: the table-driven one reads the precomputed DFA, the on-the-fly
// one recomputes successor sets from the NFA at each step.

class TableStepper {
 public:
  explicit TableStepper(const UntimedFilter& f) : f_(&f) {}
  std::uint32_t buffer_size() const { return f_->buffer_size(); }
  LabelUpdate step(Symbol a) {
    const auto& e = f_->edge(q_, a);
    q_ = e.target;
    return e.update;
  }
  std::uint32_t state() const { return q_; }

 private:
  const UntimedFilter* f_;
  std::uint32_t q_ = UntimedFilter::initial_state();
};

class OnTheFlyStepper {
 public:
  OnTheFlyStepper(const Nfa& nfa, std::size_t n) : nfa_(&nfa), n_(static_cast<std::uint32_t>(n)), current_(initial_non_buffer_state(nfa)) {
    if (n == 0) throw InputError("buffer size N must be positive");
  }
  std::uint32_t buffer_size() const { return n_; }
  LabelUpdate step(Symbol a) {
    if (!nfa_->alphabet().contains(a) && a != kBottom) throw InputError("unknown label");
    current_ = successor_pairs(*nfa_, n_, current_, a);
    return label_update(*nfa_, n_, current_);
  }
  const NonBufferState& state() const { return current_; }

 private:
  const Nfa* nfa_;
  std::uint32_t n_;
  NonBufferState current_;
};

// Streaming driver: push() returns b_{i−N} once the i-th input has been read;
// finish() feeds the ⊥^N padding and returns the remaining outputs.
template <class Stepper>
class UntimedStream {
 public:
  explicit UntimedStream(Stepper stepper)
      : stepper_(std::move(stepper)), buffer_(stepper_.buffer_size(), kBottom) {}

  std::optional<Symbol> push(Symbol a) {
    const auto u = stepper_.step(a);
    const auto out = buffer_.shift(a, u);
    ++steps_;
    if (steps_ <= buffer_.size()) return std::nullopt;
    return out.label == Verdict::Pass ? out.payload : kBottom;
  }

  template <class Sink>
  void finish(Sink&& sink) {
    const std::size_t real = steps_;
    for (std::size_t i = 0; i < buffer_.size(); ++i) {
      const auto out = buffer_.shift(kBottom, stepper_.step(kBottom));
      ++steps_;
      // output of step t is b_{t−N}; keep only indices that exist in the input
      if (steps_ > buffer_.size() && steps_ - buffer_.size() <= real)
        sink(out.label == Verdict::Pass ? out.payload : kBottom);
    }
  }

  const Stepper& stepper() const { return stepper_; }
  const MaskBuffer<Symbol>& buffer() const { return buffer_; }
  std::size_t footprint_bytes() const { return sizeof(*this) + buffer_.footprint_bytes() - sizeof(buffer_); }

 private:
  Stepper stepper_;
  MaskBuffer<Symbol> buffer_;
  std::size_t steps_ = 0;
};

namespace detail {
template <class Stepper>
Word run_stream(Stepper stepper, std::span<const Symbol> w) {
  UntimedStream<Stepper> stream(std::move(stepper));
  Word out;
  out.reserve(w.size());
  for (Symbol a : w) {
    if (a == kBottom) throw InputError("input words may not contain ⊥");
    if (auto b = stream.push(a)) out.push_back(*b);
  }
  stream.finish([&](Symbol b) { out.push_back(b); });
  return out;
}
}  // namespace detail

// Runs the filter over w⊥^N and strips the leading ⊥^N.
inline Word filter_word(const UntimedFilter& f, std::span<const Symbol> w) {
  validate_word(f.nfa().alphabet(), w);
  return detail::run_stream(TableStepper(f), w);
}

inline Word filter_word_otf(const Nfa& nfa, std::size_t n, std::span<const Symbol> w) {
  validate_word(nfa.alphabet(), w);
  return detail::run_stream(OnTheFlyStepper(nfa, n), w);
}

}  // namespace tfilter
