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
#include "codesign/roofline.h"

#include <algorithm>
#include <string>

#include "codesign/error.h"

namespace codesign {

std::string_view BoundTag(Bound b) {
  return b == Bound::kComputeConstrained ? "CC" : "MC";
}

double MachineBalance(const DeviceProfile& d) {
  return d.peak_compute / d.mem_bandwidth;
}

double ModelIntensity(double flops, double bytes) { return flops / bytes; }

Bound Classify(double intensity, const DeviceProfile& d) {
  return intensity > MachineBalance(d) ? Bound::kComputeConstrained
                                       : Bound::kMemoryConstrained;
}

IntensityReport Analyze(double intensity, const DeviceProfile& d) {
  return IntensityReport{
      .intensity = intensity,
      .bound = Classify(intensity, d),
      .attainable = std::min(d.peak_compute, d.mem_bandwidth * intensity)};
}

SubIntensities SplitIntensities(double flop_fraction, double byte_fraction,
                                double whole) {
  auto interior = [](double f) { return f > 0.0 && f < 1.0; };
  if (!interior(flop_fraction) || !interior(byte_fraction)) {
    throw Error(ErrorCode::kDegenerateSplit,
                "fractions must lie in (0, 1), got flop=" +
                    std::to_string(flop_fraction) +
                    " byte=" + std::to_string(byte_fraction));
  }
  return SubIntensities{
      .first = flop_fraction / byte_fraction * whole,
      .second = (1.0 - flop_fraction) / (1.0 - byte_fraction) * whole};
}

Feasibility CheckFeasibility(double intensity_1, double intensity_2,
                             const DeviceProfile& d1, const DeviceProfile& d2) {
  return Feasibility{.first = intensity_1 >= MachineBalance(d1),
                     .second = intensity_2 >= MachineBalance(d2)};
}

double EffectiveRate(const DeviceProfile& d, double intensity) {
  return d.utilization * std::min(d.peak_compute, intensity * d.mem_bandwidth);
}

}  // namespace codesign
