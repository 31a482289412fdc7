#pragma once

#include <string>
#include <vector>

namespace spsim {

struct Segment {
  std::string label;
  double duration_us = 0.0;
  bool drive_on = false;
  bool reset = false;
};

// One repetition period of the pulsed experiment.
struct PulseSequence {
  std::vector<Segment> segments;

  double period_us() const;
  // Index of the segment labelled "drive"; throws if absent or duplicated.
  int drive_segment() const;
  double segment_start_us(int index) const;

  // Throws std::invalid_argument on non-positive durations or a missing /
  // duplicated drive segment.
  void validate() const;
};

// drive 120 us -> wait 250 us -> reset 44.5 us (recycle + optical pumping,
// modelled as an idealized state reset), 414.5 us total.
PulseSequence default_sequence();

// Same sequence with the drive segment shortened.
PulseSequence with_drive_duration(PulseSequence seq, double drive_us);

}  // namespace spsim
