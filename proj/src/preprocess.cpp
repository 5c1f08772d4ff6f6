#include "pursuit/preprocess.hpp"

#include <algorithm>

namespace pursuit {

ValidityMask mask_blinks(const GazeRun& run, int pad_samples) {
  if (pad_samples < 0) throw Error(ErrorKind::InvalidParams, "pad_samples must be >= 0");
  const std::size_t n = run.samples.size();
  if (n == 0) throw Error(ErrorKind::EmptyRun);
  const auto pad = static_cast<std::size_t>(pad_samples);

  ValidityMask mask;
  mask.flags.resize(n);
  for (std::size_t i = 0; i < n; ++i) mask.flags[i] = run.samples[i].valid;

  std::size_t i = 0;
  while (i < n) {
    if (run.samples[i].valid) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < n && !run.samples[end].valid) ++end;
    const std::size_t lo = i > pad ? i - pad : 0;
    const std::size_t hi = std::min(n, end + pad);
    if (!mask.blink_segments.empty() && lo <= mask.blink_segments.back().second) {
      mask.blink_segments.back().second = std::max(mask.blink_segments.back().second, hi);
    } else {
      mask.blink_segments.emplace_back(lo, hi);
    }
    i = end;
  }
  for (const auto& [lo, hi] : mask.blink_segments)
    std::fill(mask.flags.begin() + static_cast<std::ptrdiff_t>(lo),
              mask.flags.begin() + static_cast<std::ptrdiff_t>(hi), false);
  return mask;
}

double blink_loss_percent(const ValidityMask& mask) {
  if (mask.flags.empty()) throw Error(ErrorKind::EmptyMask);
  const auto lost = std::count(mask.flags.begin(), mask.flags.end(), false);
  return 100.0 * static_cast<double>(lost) / static_cast<double>(mask.flags.size());
}

}  // namespace pursuit
