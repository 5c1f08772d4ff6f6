#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pursuit/trace.hpp"

namespace pursuit {

inline constexpr int kDefaultBlinkPad = 2;

struct ValidityMask {
  std::vector<bool> flags;
  // Half-open [start, end) sample ranges, sorted and non-overlapping.
  std::vector<std::pair<std::size_t, std::size_t>> blink_segments;
};

// Invalid runs become blink segments widened by pad_samples on each side;
// segments that touch or overlap after padding are merged.
ValidityMask mask_blinks(const GazeRun& run, int pad_samples = kDefaultBlinkPad);

double blink_loss_percent(const ValidityMask& mask);

}  // namespace pursuit
