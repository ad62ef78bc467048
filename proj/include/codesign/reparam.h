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
// Structural re-parameterization of a RepBlock: BN folding, 1x1-to-3x3
// padding and summation of the surviving branches into one 3x3 kernel.
// Also the per-strategy FLOP/byte accounting that feeds LayerProfile.
//
// Convolutions here are stride 1, no dilation, no groups; a k x k kernel is
// zero-padded by (k - 1) / 2 so spatial size is preserved.

#ifndef CODESIGN_REPARAM_H_
#define CODESIGN_REPARAM_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "codesign/profiles.h"

namespace codesign {

// Dense [out_ch, in_ch, kh, kw] weights.
class Tensor4 {
 public:
  Tensor4() = default;
  Tensor4(int out_ch, int in_ch, int kh, int kw)
      : out_(out_ch), in_(in_ch), kh_(kh), kw_(kw),
        data_(static_cast<std::size_t>(out_ch) * in_ch * kh * kw, 0.0) {}

  int out_channels() const { return out_; }
  int in_channels() const { return in_; }
  int kernel_h() const { return kh_; }
  int kernel_w() const { return kw_; }
  bool empty() const { return data_.empty(); }

  double& operator()(int o, int i, int y, int x) { return data_[Offset(o, i, y, x)]; }
  double operator()(int o, int i, int y, int x) const {
    return data_[Offset(o, i, y, x)];
  }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool SameShape(const Tensor4& other) const {
    return out_ == other.out_ && in_ == other.in_ && kh_ == other.kh_ &&
           kw_ == other.kw_;
  }

 private:
  std::size_t Offset(int o, int i, int y, int x) const {
    return ((static_cast<std::size_t>(o) * in_ + i) * kh_ + y) * kw_ + x;
  }

  int out_ = 0, in_ = 0, kh_ = 0, kw_ = 0;
  std::vector<double> data_;
};

// [channels, height, width] feature map.
struct FeatureMap {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(int c, int h, int w)
      : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * h * w, 0.0) {}

  double& at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  double at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
};

// Per-output-channel inference batch norm.
struct BatchNorm {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> mean;
  std::vector<double> var;
  double eps = 1e-5;
};

enum class BranchKind { kConv3x3, kConv1x1, kIdentity };

struct BranchSpec {
  BranchKind kind = BranchKind::kConv3x3;
  int in_channels = 0;
  int out_channels = 0;
  Tensor4 weights;  // empty for kIdentity
  BatchNorm bn;
};

// Single 3x3 convolution with bias, the inference-time form of a block.
struct Kernel3x3 {
  Tensor4 weights;
  std::vector<double> bias;
};

struct FoldedBranch {
  Tensor4 kernel;
  std::vector<double> bias;
};

// The three parallel branches of a RepBlock. The shortcut only exists when
// in_ch == out_ch.
struct RepBlock {
  BranchSpec conv3x3;
  BranchSpec conv1x1;
  std::optional<BranchSpec> identity;
};

// Identity kernel [ch, ch, 1, 1].
Tensor4 DiracKernel(int channels);

// W' = W * gamma / sqrt(var + eps), b' = beta - gamma * mean / sqrt(var + eps).
// An identity branch is first materialized as a Dirac 1x1 kernel.
FoldedBranch FoldBatchNorm(const BranchSpec& branch);

Tensor4 PadToKernel3x3(const Tensor4& kernel1x1);

// Sums folded, padded branches into one kernel. Error(kShapeMismatch) when
// channel counts disagree or the list is empty.
Kernel3x3 Fuse(std::span<const BranchSpec> branches);

// Branches of `block` kept by strategy `s`, 3x3 first. Error(kShapeMismatch)
// when `s` keeps a shortcut the block does not have.
std::vector<BranchSpec> ActiveBranches(const RepBlock& block, FusionStrategy s);

Kernel3x3 Fuse(const RepBlock& block, FusionStrategy s);

// Stride-1 convolution, zero padding (k - 1) / 2.
FeatureMap Conv2d(const FeatureMap& x, const Tensor4& w,
                  std::span<const double> bias);

// BN(conv(x)) for a conv branch, BN(x) for the shortcut, evaluated directly
// without folding.
FeatureMap BranchForward(const BranchSpec& branch, const FeatureMap& x);

// Sum of BranchForward over the branches kept by `s`.
FeatureMap BlockForward(const RepBlock& block, FusionStrategy s,
                        const FeatureMap& x);

inline constexpr double kBytesPerValue = 4.0;

// FLOPs and bytes of one RepBlock at H x W under strategy . Each conv
// branch costs 2 * k^2 * in * out * H * W FLOPs, the shortcut one add per
// output element. Bytes are the weights of the kept conv branches plus one
// read of the input and one write of the output; the branches share the
// block's input and output.
Load StrategyCosts(int in_ch, int out_ch, int height, int width,
                   FusionStrategy s);

// LayerProfile for a RepBlock layer with costs from StrategyCosts and the
// block output as the transferred activation.
LayerProfile RepBlockLayer(std::size_t index, int in_ch, int out_ch,
                           int height, int width);

// Relative error max|a - b| / max|b| (absolute when b is all zero).
double MaxRelativeError(const FeatureMap& a, const FeatureMap& b);

// Random RepBlock with in_ch == out_ch (so the shortcut exists) and
// well-conditioned BN statistics.
RepBlock RandomRepBlock(int channels, std::mt19937_64& rng);

FeatureMap RandomFeatureMap(int channels, int height, int width,
                            std::mt19937_64& rng);

struct FuseCheckResult {
  FusionStrategy strategy = FusionStrategy::kS3;
  int trials = 0;
  double max_relative_error = 0.0;
};

// Randomized equivalence of the fused kernel against the branch sum, per
// strategy. Channels are drawn from {1, 4, 16} and spatial size from
// {5, 8, 16}.
std::vector<FuseCheckResult> RunFuseCheck(std::uint64_t seed,
                                          int trials_per_strategy);

}  // namespace codesign

#endif  // CODESIGN_REPARAM_H_
