#pragma once

#include <string>
#include <vector>

#include "stmos/geometry.hpp"

namespace stmos {

/// A recorded scan stream in acquisition order (index 0 = oldest) with the
/// absolute sensor pose of every scan (sensor frame -> odometry frame).
struct ScanSequence {
  std::string name;
  std::vector<Scan> scans;
  std::vector<Pose> poses;

  std::size_t size() const { return scans.size(); }
  void validate() const {
    if (scans.size() != poses.size())
      throw ArgumentError("scan sequence: one pose per scan required");
  }
};

/// One model input window cut from a stream: scans current-first with
/// rel_poses[k] = T_{k+1}^{k}, plus the stream index of each slot.
struct Window {
  std::vector<Scan> scans;
  std::vector<Pose> rel_poses;
  std::vector<int> stream_indices;

  std::size_t size() const { return scans.size(); }
};

/// Cuts the window ending at stream index `end` (the current scan), going
/// `window_size` scans into the past or to the stream start, whichever
/// comes first.
inline Window make_window(const ScanSequence& seq, int end, int window_size) {
  seq.validate();
  if (end < 0 || end >= static_cast<int>(seq.size()))
    throw RangeError("make_window: end index out of range");
  if (window_size < 1) throw ArgumentError("make_window: window_size must be >= 1");
  Window w;
  const int count = std::min(window_size, end + 1);
  w.scans.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const int s = end - k;
    w.scans.push_back(seq.scans[static_cast<std::size_t>(s)]);
    w.scans.back().seq_index = k;
    w.stream_indices.push_back(s);
    if (k > 0)
      w.rel_poses.push_back(seq.poses[static_cast<std::size_t>(s + 1)].inverse() *
                            seq.poses[static_cast<std::size_t>(s)]);
  }
  return w;
}

}  // namespace stmos
