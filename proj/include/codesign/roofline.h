/* Copyright 2026 The Codesign Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
// Roofline quantities: operational intensity, machine balance, the
// compute/memory-bound split and the sub-model intensity requirements.

#ifndef CODESIGN_ROOFLINE_H_
#define CODESIGN_ROOFLINE_H_

#include <string_view>

#include "codesign/profiles.h"

namespace codesign {

enum class Bound { kComputeConstrained, kMemoryConstrained };

// "CC" / "MC".
std::string_view BoundTag(Bound b);

struct IntensityReport {
  double intensity = 0.0;   // FLOP/byte
  Bound bound = Bound::kMemoryConstrained;
  double attainable = 0.0;  // FLOP/s, min(peak, bandwidth * intensity)
};

// peak_compute / mem_bandwidth, the ridge point of the roofline.
double MachineBalance(const DeviceProfile& d);

double ModelIntensity(double flops, double bytes);

// Compute-constrained iff intensity > balance. A tie counts as
// memory-constrained.
Bound Classify(double intensity, const DeviceProfile& d);

IntensityReport Analyze(double intensity, const DeviceProfile& d);

struct SubIntensities {
  double first = 0.0;
  double second = 0.0;
};

// Splits a model of intensity `whole` at a point holding `flop_fraction` of
// its FLOPs and `byte_fraction` of its bytes. Both fractions must lie strictly
// inside (0, 1), otherwise Error(kDegenerateSplit).
SubIntensities SplitIntensities(double flop_fraction, double byte_fraction,
                                double whole);

struct Feasibility {
  bool first = false;
  bool second = false;

  bool both() const { return first && second; }
  bool operator==(const Feasibility&) const = default;
};

// first <=> intensity_1 >= balance(d1), second likewise. Reaching the balance
// exactly is enough.
Feasibility CheckFeasibility(double intensity_1, double intensity_2,
                             const DeviceProfile& d1, const DeviceProfile& d2);

// utilization * min(peak, intensity * bandwidth). The flat compute roof caps
// the bandwidth term so a compute-bound segment runs at (derated) peak.
double EffectiveRate(const DeviceProfile& d, double intensity);

}  // namespace codesign

#endif  // CODESIGN_ROOFLINE_H_
