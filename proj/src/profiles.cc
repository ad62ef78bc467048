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

#include "codesign/profiles.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "codesign/error.h"

namespace codesign {
namespace {

using nlohmann::json;

std::string Join(std::string_view parent, std::string_view child) {
  if (parent.empty()) return std::string(child);
  return std::string(parent) + "." + std::string(child);
}

std::string Indexed(std::string_view parent, std::size_t i) {
  return std::string(parent) + "[" + std::to_string(i) + "]";
}

const json& Require(const json& obj, std::string_view field,
                    std::string_view parent) {
  if (!obj.is_object() || !obj.contains(field)) {
    throw Error(ErrorCode::kMissingField, Join(parent, field));
  }
  return obj.at(field);
}

double RequireNumber(const json& obj, std::string_view field,
                     std::string_view parent) {
  const json& v = Require(obj, field, parent);
  if (!v.is_number()) {
    throw Error(ErrorCode::kParseError,
                Join(parent, field) + " is not a number");
  }
  return v.get<double>();
}

double OptionalNumber(const json& obj, std::string_view field,
                      std::string_view parent, double fallback) {
  if (!obj.is_object() || !obj.contains(field)) return fallback;
  return RequireNumber(obj, field, parent);
}

std::string OptionalString(const json& obj, std::string_view field,
                           std::string fallback) {
  if (!obj.is_object() || !obj.contains(field)) return fallback;
  const json& v = obj.at(field);
  if (!v.is_string()) {
    throw Error(ErrorCode::kParseError, std::string(field) + " is not a string");
  }
  return v.get<std::string>();
}

void RequirePositive(double v, const std::string& key) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kNonPositiveQuantity, key);
  }
}

void RequireNonNegative(double v, const std::string& key) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::kNegativeQuantity, key);
  }
}

// A per-strategy quantity is either one number (same under every strategy)
// or an object keyed by strategy name.
PerStrategy ParsePerStrategy(const json& v, const std::string& key) {
  PerStrategy out{};
  if (v.is_number()) {
    out.fill(v.get<double>());
    return out;
  }
  if (!v.is_object()) {
    throw Error(ErrorCode::kParseError, key + " must be a number or an object");
  }
  for (const auto& [name, value] : v.items()) {
    const FusionStrategy s = ParseStrategy(name);
    if (!value.is_number()) {
      throw Error(ErrorCode::kParseError, key + "." + name + " is not a number");
    }
    At(out, s) = value.get<double>();
  }
  for (FusionStrategy s : kAllStrategies) {
    if (!v.contains(StrategyName(s))) {
      throw Error(ErrorCode::kMissingField,
                  key + "." + std::string(StrategyName(s)));
    }
  }
  return out;
}

json PerStrategyJson(const PerStrategy& v) {
  json out = json::object();
  for (FusionStrategy s : kAllStrategies) {
    out[std::string(StrategyName(s))] = At(v, s);
  }
  return out;
}

LayerProfile ParseLayer(const json& doc, std::size_t index,
                        const std::string& key) {
  LayerProfile layer;
  layer.index = index;
  layer.name = OptionalString(doc, "name", "layer" + std::to_string(index));
  layer.fusible = false;
  if (doc.is_object() && doc.contains("fusible")) {
    if (!doc.at("fusible").is_boolean()) {
      throw Error(ErrorCode::kParseError, key + ".fusible is not a boolean");
    }
    layer.fusible = doc.at("fusible").get<bool>();
  }
  layer.flops = ParsePerStrategy(Require(doc, "flops", key), key + ".flops");
  layer.bytes = ParsePerStrategy(Require(doc, "bytes", key), key + ".bytes");
  layer.output_activation_bytes =
      RequireNumber(doc, "output_activation_bytes", key);
  Validate(layer, key);
  return layer;
}

PerStrategy ParsePenaltyRow(const json& doc, const std::string& key) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParseError, key + " must be an object");
  }
  return ParsePerStrategy(doc, key);
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

}  // namespace

std::string_view StrategyName(FusionStrategy s) {
  switch (s) {
    case FusionStrategy::kS3: return "S3";
    case FusionStrategy::kS3Ss: return "S3_Ss";
    case FusionStrategy::kS3S1: return "S3_S1";
    case FusionStrategy::kS3SsS1: return "S3_Ss_S1";
  }
  return "?";
}

FusionStrategy ParseStrategy(std::string_view name) {
  for (FusionStrategy s : kAllStrategies) {
    if (StrategyName(s) == name) return s;
  }
  throw Error(ErrorCode::kUnknownStrategyName, std::string(name));
}

Load SegmentLoad(const ModelProfile& model, std::size_t begin, std::size_t end,
                 FusionStrategy s) {
  Load load;
  for (std::size_t i = begin; i < end && i < model.layers.size(); ++i) {
    load.flops += model.layers[i].Flops(s);
    load.bytes += model.layers[i].Bytes(s);
  }
  return load;
}

Load TotalLoad(const ModelProfile& model, FusionStrategy s) {
  return SegmentLoad(model, 0, model.layers.size(), s);
}

void Validate(const DeviceProfile& device, std::string_view key) {
  const std::string k(key);
  RequirePositive(device.peak_compute, Join(k, "peak_compute"));
  RequirePositive(device.mem_bandwidth, Join(k, "mem_bandwidth"));
  RequirePositive(device.utilization, Join(k, "utilization"));
  if (device.utilization > 1.0) {
    throw Error(ErrorCode::kInvalidProfile,
                Join(k, "utilization") + " exceeds 1");
  }
}

void Validate(const LinkProfile& link, std::string_view key) {
  RequirePositive(link.bandwidth, Join(key, "bandwidth"));
  RequireNonNegative(link.fixed_latency, Join(key, "fixed_latency"));
}

void Validate(const LayerProfile& layer, std::string_view key) {
  const std::string k(key);
  for (FusionStrategy s : kAllStrategies) {
    const std::string suffix = layer.fusible ? "." + std::string(StrategyName(s)) : "";
    RequirePositive(layer.Flops(s), Join(k, "flops") + suffix);
    RequirePositive(layer.Bytes(s), Join(k, "bytes") + suffix);
  }
  RequireNonNegative(layer.output_activation_bytes,
                     Join(k, "output_activation_bytes"));
  if (!layer.fusible) {
    for (FusionStrategy s : kAllStrategies) {
      if (layer.Flops(s) != layer.Flops(FusionStrategy::kS3) ||
          layer.Bytes(s) != layer.Bytes(FusionStrategy::kS3)) {
        throw Error(ErrorCode::kInvalidProfile,
                    k + " is not fusible but its cost depends on the strategy");
      }
    }
    return;
  }
  for (FusionStrategy a : kAllStrategies) {
    for (FusionStrategy b : kAllStrategies) {
      if (IsBranchSubset(a, b) && layer.Flops(a) > layer.Flops(b)) {
        throw Error(ErrorCode::kInvalidProfile,
                    Join(k, "flops") + " decreases from " +
                        std::string(StrategyName(a)) + " to " +
                        std::string(StrategyName(b)));
      }
    }
  }
}

void Validate(const ModelProfile& model, std::string_view key) {
  if (model.layers.size() < 2) {
    throw Error(ErrorCode::kInvalidProfile,
                Join(key, "layers") + " needs at least 2 layers");
  }
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    Validate(model.layers[i], Indexed(Join(key, "layers"), i));
  }
}

void Validate(const AccuracyPenaltyTable& table, std::string_view key) {
  for (int sub = 1; sub <= 2; ++sub) {
    const std::string row = Join(key, "sub_model_" + std::to_string(sub));
    for (FusionStrategy s : kAllStrategies) {
      RequireNonNegative(table.Penalty(sub, s),
                         row + "." + std::string(StrategyName(s)));
    }
    if (table.Penalty(sub, FusionStrategy::kS3SsS1) != 0.0) {
      throw Error(ErrorCode::kInvalidProfile,
                  row + ".S3_Ss_S1 must be 0 (full structure)");
    }
    const double s3 = table.Penalty(sub, FusionStrategy::kS3);
    if (s3 < table.Penalty(sub, FusionStrategy::kS3Ss) ||
        s3 < table.Penalty(sub, FusionStrategy::kS3S1)) {
      throw Error(ErrorCode::kInvalidProfile,
                  row + ".S3 must be at least every two-branch penalty");
    }
  }
}

void Validate(const Config& config) {
  if (config.devices.size() < 2) {
    throw Error(ErrorCode::kInvalidProfile, "devices needs at least 2 entries");
  }
  for (std::size_t i = 0; i < config.devices.size(); ++i) {
    Validate(config.devices[i], Indexed("devices", i));
  }
  Validate(config.link, "link");
  Validate(config.model, "model");
  for (std::size_t i = 0; i < config.extra_models.size(); ++i) {
    Validate(config.extra_models[i], Indexed("models", i));
  }
  Validate(config.penalties, "penalties");
  RequireNonNegative(config.lambda1, "lambda1");
  TerminalDevice(config);
  EdgeDevice(config);
}

DeviceProfile ParseDevice(const json& doc, std::string_view key) {
  const std::string k(key);
  DeviceProfile d;
  const json& name = Require(doc, "name", k);
  if (!name.is_string()) {
    throw Error(ErrorCode::kParseError, Join(k, "name") + " is not a string");
  }
  d.name = name.get<std::string>();
  d.peak_compute = RequireNumber(doc, "peak_compute", k);
  d.mem_bandwidth = RequireNumber(doc, "mem_bandwidth", k);
  d.utilization = OptionalNumber(doc, "utilization", k, 1.0);
  Validate(d, k);
  return d;
}

ModelProfile ParseModel(const json& doc, std::string_view key) {
  const std::string k(key);
  ModelProfile model;
  model.name = OptionalString(doc, "name", "model");
  const json& layers = Require(doc, "layers", k);
  if (!layers.is_array()) {
    throw Error(ErrorCode::kParseError, Join(k, "layers") + " is not an array");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    model.layers.push_back(
        ParseLayer(layers[i], i, Indexed(Join(k, "layers"), i)));
  }
  Validate(model, k);
  return model;
}

Config ParseConfig(const json& doc) {
  Config config;
  const json& devices = Require(doc, "devices", "");
  if (!devices.is_array()) {
    throw Error(ErrorCode::kParseError, "devices is not an array");
  }
  for (std::size_t i = 0; i < devices.size(); ++i) {
    config.devices.push_back(ParseDevice(devices[i], Indexed("devices", i)));
  }

  const json& link = Require(doc, "link", "");
  config.link.bandwidth = RequireNumber(link, "bandwidth", "link");
  config.link.fixed_latency = OptionalNumber(link, "fixed_latency", "link", 0.0);
  Validate(config.link, "link");

  config.model = ParseModel(Require(doc, "model", ""), "model");
  if (doc.contains("models")) {
    const json& extra = doc.at("models");
    if (!extra.is_array()) {
      throw Error(ErrorCode::kParseError, "models is not an array");
    }
    for (std::size_t i = 0; i < extra.size(); ++i) {
      config.extra_models.push_back(ParseModel(extra[i], Indexed("models", i)));
    }
  }

  const json& penalties = Require(doc, "penalties", "");
  config.penalties.penalties[0] = ParsePenaltyRow(
      Require(penalties, "sub_model_1", "penalties"), "penalties.sub_model_1");
  config.penalties.penalties[1] = ParsePenaltyRow(
      Require(penalties, "sub_model_2", "penalties"), "penalties.sub_model_2");

  config.lambda1 = RequireNumber(doc, "lambda1", "");

  if (doc.contains("deployment")) {
    const json& dep = doc.at("deployment");
    config.terminal_device = OptionalString(dep, "terminal", "");
    config.edge_device = OptionalString(dep, "edge", "");
  }
  Validate(config);
  return config;
}

Config LoadConfig(const std::filesystem::path& path) {
  return ParseConfig(ReadJsonFile(path));
}

DeviceProfile LoadDeviceFile(const std::filesystem::path& path) {
  return ParseDevice(ReadJsonFile(path), "");
}

json ToJson(const DeviceProfile& device) {
  return json{{"name", device.name},
              {"peak_compute", device.peak_compute},
              {"mem_bandwidth", device.mem_bandwidth},
              {"utilization", device.utilization}};
}

json ToJson(const ModelProfile& model) {
  json layers = json::array();
  for (const LayerProfile& layer : model.layers) {
    json l{{"name", layer.name},
           {"fusible", layer.fusible},
           {"output_activation_bytes", layer.output_activation_bytes}};
    if (layer.fusible) {
      l["flops"] = PerStrategyJson(layer.flops);
      l["bytes"] = PerStrategyJson(layer.bytes);
    } else {
      l["flops"] = layer.Flops(FusionStrategy::kS3);
      l["bytes"] = layer.Bytes(FusionStrategy::kS3);
    }
    layers.push_back(std::move(l));
  }
  return json{{"name", model.name}, {"layers", std::move(layers)}};
}

json ToJson(const Config& config) {
  json doc;
  json devices = json::array();
  for (const DeviceProfile& d : config.devices) devices.push_back(ToJson(d));
  doc["devices"] = std::move(devices);
  doc["link"] = json{{"bandwidth", config.link.bandwidth},
                     {"fixed_latency", config.link.fixed_latency}};
  doc["model"] = ToJson(config.model);
  if (!config.extra_models.empty()) {
    json models = json::array();
    for (const ModelProfile& m : config.extra_models) models.push_back(ToJson(m));
    doc["models"] = std::move(models);
  }
  doc["penalties"] =
      json{{"sub_model_1", PerStrategyJson(config.penalties.penalties[0])},
           {"sub_model_2", PerStrategyJson(config.penalties.penalties[1])}};
  doc["lambda1"] = config.lambda1;
  if (!config.terminal_device.empty() || !config.edge_device.empty()) {
    doc["deployment"] = json{{"terminal", config.terminal_device},
                             {"edge", config.edge_device}};
  }
  return doc;
}

const DeviceProfile& FindDevice(const Config& config, std::string_view name) {
  for (const DeviceProfile& d : config.devices) {
    if (d.name == name) return d;
  }
  throw Error(ErrorCode::kUnknownDevice, std::string(name));
}

const DeviceProfile& TerminalDevice(const Config& config) {
  if (!config.terminal_device.empty()) {
    return FindDevice(config, config.terminal_device);
  }
  return config.devices.at(0);
}

const DeviceProfile& EdgeDevice(const Config& config) {
  if (!config.edge_device.empty()) {
    return FindDevice(config, config.edge_device);
  }
  return config.devices.at(1);
}

}  // namespace codesign
