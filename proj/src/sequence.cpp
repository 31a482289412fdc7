#include "spsim/sequence.hpp"

#include <stdexcept>

namespace spsim {

double PulseSequence::period_us() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration_us;
  return t;
}

int PulseSequence::drive_segment() const {
  int found = -1;
  for (size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].label == "drive") {
      if (found >= 0) throw std::invalid_argument("sequence has two drive segments");
      found = static_cast<int>(i);
    }
  }
  if (found < 0) throw std::invalid_argument("sequence has no drive segment");
  return found;
}

double PulseSequence::segment_start_us(int index) const {
  double t = 0.0;
  for (int i = 0; i < index; ++i) t += segments.at(i).duration_us;
  return t;
}

void PulseSequence::validate() const {
  if (segments.empty()) throw std::invalid_argument("sequence is empty");
  for (const auto& s : segments)
    if (!(s.duration_us > 0.0))
      throw std::invalid_argument("segment '" + s.label + "' has non-positive duration");
  (void)drive_segment();
}

PulseSequence default_sequence() {
  PulseSequence seq;
  seq.segments = {
      {"drive", 120.0, true, false},
      {"wait", 250.0, false, false},
      {"reset", 44.5, false, true},
  };
  return seq;
}

PulseSequence with_drive_duration(PulseSequence seq, double drive_us) {
  seq.segments.at(seq.drive_segment()).duration_us = drive_us;
  return seq;
}

}  // namespace spsim
