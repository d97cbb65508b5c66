#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace tfilter {

enum class Verdict : std::uint8_t { Mask, Pass };

// How the label part of the buffer changes on one step.
enum class LabelAction : std::uint8_t {
  PassAll,     // some active run has counter N
  PassSuffix,  // an accepting run was detected; pass its last `suffix` cells
  ShiftMask,   // default: the new cell starts masked
};

struct LabelUpdate {
  LabelAction action = LabelAction::ShiftMask;
  std::uint32_t suffix = 0;
  friend bool operator==(const LabelUpdate&, const LabelUpdate&) = default;
};

// Fixed-size FIFO of N (payload, verdict) cells realised as a ring. The
// footprint never depends on how many elements have streamed through it.
template <class Payload>
class MaskBuffer {
 public:
  struct Cell {
    Payload payload;
    Verdict label;
  };

  MaskBuffer(std::size_t n, Payload fill) : cells_(n, Cell{fill, Verdict::Mask}) {}

  std::size_t size() const { return cells_.size(); }

  // i = 0 is the leftmost (next to be dequeued) cell.
  const Cell& operator[](std::size_t i) const { return cells_[(head_ + i) % cells_.size()]; }
  const Cell& front() const { return cells_[head_]; }

  // Dequeues the leftmost cell, enqueues `p` as masked, then applies `u`.
  // Returns the dequeued cell.
  Cell shift(Payload p, LabelUpdate u) {
    Cell out = cells_[head_];
    cells_[head_] = Cell{p, Verdict::Mask};
    head_ = (head_ + 1) % cells_.size();
    switch (u.action) {
      case LabelAction::PassAll:
        for (auto& c : cells_) c.label = Verdict::Pass;
        break;
      case LabelAction::PassSuffix:
        for (std::size_t i = cells_.size() - std::min<std::size_t>(u.suffix, cells_.size());
             i < cells_.size(); ++i)
          cells_[(head_ + i) % cells_.size()].label = Verdict::Pass;
        break;
      case LabelAction::ShiftMask:
        break;
    }
    return out;
  }

  std::size_t footprint_bytes() const { return sizeof(*this) + cells_.capacity() * sizeof(Cell); }

 private:
  std::vector<Cell> cells_;
  std::size_t head_ = 0;
};

}  // namespace tfilter
