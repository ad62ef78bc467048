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

// Device, link, model and accuracy-penalty descriptions. Everything
// downstream consumes these types; they are immutable once loaded.
//
// Units are fixed: FLOPs, bytes, seconds, FLOP/s and bytes/s. Config files
// carry raw SI doubles, there is no suffix parsing.

#ifndef CODESIGN_PROFILES_H_
#define CODESIGN_PROFILES_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace codesign {

// Which RepBlock branches stay active at inference. The 3x3 convolution is
// always kept; the shortcut (Ss) and the 1x1 convolution (S1) are optional.
enum class FusionStrategy { kS3 = 0, kS3Ss = 1, kS3S1 = 2, kS3SsS1 = 3 };

inline constexpr std::array<FusionStrategy, 4> kAllStrategies = {
    FusionStrategy::kS3, FusionStrategy::kS3Ss, FusionStrategy::kS3S1,
    FusionStrategy::kS3SsS1};

std::string_view StrategyName(FusionStrategy s);
// Throws Error(kUnknownStrategyName).
FusionStrategy ParseStrategy(std::string_view name);

constexpr bool HasShortcut(FusionStrategy s) {
  return s == FusionStrategy::kS3Ss || s == FusionStrategy::kS3SsS1;
}
constexpr bool HasConv1x1(FusionStrategy s) {
  return s == FusionStrategy::kS3S1 || s == FusionStrategy::kS3SsS1;
}
constexpr int BranchCount(FusionStrategy s) {
  return 1 + (HasShortcut(s) ? 1 : 0) + (HasConv1x1(s) ? 1 : 0);
}
// True when every branch active in `a` is also active in `b`.
constexpr bool IsBranchSubset(FusionStrategy a, FusionStrategy b) {
  return (!HasShortcut(a) || HasShortcut(b)) &&
         (!HasConv1x1(a) || HasConv1x1(b));
}

// Value indexed by FusionStrategy.
using PerStrategy = std::array<double, 4>;

constexpr double& At(PerStrategy& v, FusionStrategy s) {
  return v[static_cast<std::size_t>(s)];
}
constexpr double At(const PerStrategy& v, FusionStrategy s) {
  return v[static_cast<std::size_t>(s)];
}

struct DeviceProfile {
  std::string name;
  double peak_compute = 0.0;   // FLOP/s
  double mem_bandwidth = 0.0;  // bytes/s
  double utilization = 1.0;    // fraction of the roofline actually reached

  bool operator==(const DeviceProfile&) const = default;
};

struct LinkProfile {
  double bandwidth = 0.0;      // bytes/s
  double fixed_latency = 0.0;  // seconds added to every transfer

  bool operator==(const LinkProfile&) const = default;
};

struct LayerProfile {
  std::size_t index = 0;
  std::string name;
  PerStrategy flops{};
  // Weights plus one read of the input activation and one write of the
  // output activation, per inference.
  PerStrategy bytes{};
  // Bytes shipped over the link when the model is cut right after this layer.
  double output_activation_bytes = 0.0;
  bool fusible = false;

  double Flops(FusionStrategy s) const { return At(flops, s); }
  double Bytes(FusionStrategy s) const { return At(bytes, s); }

  bool operator==(const LayerProfile&) const = default;
};

struct ModelProfile {
  std::string name;
  std::vector<LayerProfile> layers;

  std::size_t num_layers() const { return layers.size(); }
  // Interior cut points are 1..num_layers()-1; cut k places layers [0, k) on
  // the terminal device.
  std::size_t num_cuts() const {
    return layers.empty() ? 0 : layers.size() - 1;
  }

  bool operator==(const ModelProfile&) const = default;
};

// Accuracy-point penalty of each strategy, per sub-model (1 = terminal side,
// 2 = edge side). A calibration input, not something computed here.
struct AccuracyPenaltyTable {
  std::array<PerStrategy, 2> penalties{};

  double Penalty(int sub_model, FusionStrategy s) const {
    return At(penalties[static_cast<std::size_t>(sub_model - 1)], s);
  }

  bool operator==(const AccuracyPenaltyTable&) const = default;
};

struct Config {
  std::vector<DeviceProfile> devices;
  LinkProfile link;
  ModelProfile model;
  // Extra models, only consulted by the roofline matrix.
  std::vector<ModelProfile> extra_models;
  AccuracyPenaltyTable penalties;
  double lambda1 = 0.0;
  // Names of the devices hosting sub-model 1 and sub-model 2. Empty means
  // devices[0] and devices[1].
  std::string terminal_device;
  std::string edge_device;

  bool operator==(const Config&) const = default;
};

struct Load {
  double flops = 0.0;
  double bytes = 0.0;
};

// Sum over all layers under strategy `s`.
Load TotalLoad(const ModelProfile& model, FusionStrategy s);
// Sum over layers [begin, end), accumulated in layer order.
Load SegmentLoad(const ModelProfile& model, std::size_t begin, std::size_t end,
                 FusionStrategy s);

void Validate(const DeviceProfile& device, std::string_view key);
void Validate(const LinkProfile& link, std::string_view key);
void Validate(const LayerProfile& layer, std::string_view key);
void Validate(const ModelProfile& model, std::string_view key);
void Validate(const AccuracyPenaltyTable& table, std::string_view key);
void Validate(const Config& config);

// Parsing throws Error with the offending key path in the detail, e.g.
// "NonPositiveQuantity: link.bandwidth".
Config ParseConfig(const nlohmann::json& doc);
Config LoadConfig(const std::filesystem::path& path);
DeviceProfile ParseDevice(const nlohmann::json& doc, std::string_view key);
DeviceProfile LoadDeviceFile(const std::filesystem::path& path);
ModelProfile ParseModel(const nlohmann::json& doc, std::string_view key);

nlohmann::json ToJson(const DeviceProfile& device);
nlohmann::json ToJson(const ModelProfile& model);
nlohmann::json ToJson(const Config& config);

const DeviceProfile& TerminalDevice(const Config& config);
const DeviceProfile& EdgeDevice(const Config& config);
const DeviceProfile& FindDevice(const Config& config, std::string_view name);

}  // namespace codesign

#endif  // CODESIGN_PROFILES_H_
