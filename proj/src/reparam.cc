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

#include "codesign/reparam.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "codesign/error.h"

namespace codesign {
namespace {

void CheckBatchNorm(const BatchNorm& bn, int channels) {
  const auto n = static_cast<std::size_t>(channels);
  if (bn.gamma.size() != n || bn.beta.size() != n || bn.mean.size() != n ||
      bn.var.size() != n) {
    throw Error(ErrorCode::kShapeMismatch,
                "batch norm has the wrong number of channels");
  }
}

}  // namespace

Tensor4 DiracKernel(int channels) {
  Tensor4 k(channels, channels, 1, 1);
  for (int c = 0; c < channels; ++c) k(c, c, 0, 0) = 1.0;
  return k;
}

FoldedBranch FoldBatchNorm(const BranchSpec& branch) {
  CheckBatchNorm(branch.bn, branch.out_channels);
  FoldedBranch out;
  out.kernel = branch.kind == BranchKind::kIdentity
                   ? DiracKernel(branch.out_channels)
                   : branch.weights;
  out.bias.resize(static_cast<std::size_t>(branch.out_channels));

  const Tensor4& w = out.kernel;
  for (int o = 0; o < w.out_channels(); ++o) {
    const double std_dev = std::sqrt(branch.bn.var[o] + branch.bn.eps);
    const double scale = branch.bn.gamma[o] / std_dev;
    for (int i = 0; i < w.in_channels(); ++i) {
      for (int y = 0; y < w.kernel_h(); ++y) {
        for (int x = 0; x < w.kernel_w(); ++x) out.kernel(o, i, y, x) *= scale;
      }
    }
    out.bias[o] = branch.bn.beta[o] - branch.bn.gamma[o] * branch.bn.mean[o] / std_dev;
  }
  return out;
}

Tensor4 PadToKernel3x3(const Tensor4& k) {
  if (k.kernel_h() != 1 || k.kernel_w() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "expected a 1x1 kernel");
  }
  Tensor4 out(k.out_channels(), k.in_channels(), 3, 3);
  for (int o = 0; o < k.out_channels(); ++o) {
    for (int i = 0; i < k.in_channels(); ++i) out(o, i, 1, 1) = k(o, i, 0, 0);
  }
  return out;
}

Kernel3x3 Fuse(std::span<const BranchSpec> branches) {
  if (branches.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "nothing to fuse");
  }
  const int in_ch = branches.front().in_channels;
  const int out_ch = branches.front().out_channels;

  Kernel3x3 fused{Tensor4(out_ch, in_ch, 3, 3),
                  std::vector<double>(static_cast<std::size_t>(out_ch), 0.0)};
  for (const BranchSpec& b : branches) {
    if (b.in_channels != in_ch || b.out_channels != out_ch) {
      throw Error(ErrorCode::kShapeMismatch,
                  "branch is " + std::to_string(b.out_channels) + "x" +
                      std::to_string(b.in_channels) + ", block is " +
                      std::to_string(out_ch) + "x" + std::to_string(in_ch));
    }
    if (b.kind == BranchKind::kIdentity && in_ch != out_ch) {
      throw Error(ErrorCode::kShapeMismatch,
                  "shortcut needs in_ch == out_ch");
    }
    FoldedBranch folded = FoldBatchNorm(b);
    const Tensor4 kernel = folded.kernel.kernel_h() == 1
                               ? PadToKernel3x3(folded.kernel)
                               : std::move(folded.kernel);
    if (!kernel.SameShape(fused.weights)) {
      throw Error(ErrorCode::kShapeMismatch, "branch kernel is not 3x3 or 1x1");
    }
    std::span<double> acc = fused.weights.values();
    std::span<const double> add = kernel.values();
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += add[j];
    for (int o = 0; o < out_ch; ++o) fused.bias[o] += folded.bias[o];
  }
  return fused;
}

std::vector<BranchSpec> ActiveBranches(const RepBlock& block,
                                       FusionStrategy s) {
  std::vector<BranchSpec> out{block.conv3x3};
  if (HasShortcut(s)) {
    if (!block.identity) {
      throw Error(ErrorCode::kShapeMismatch,
                  std::string(StrategyName(s)) + " needs a shortcut branch");
    }
    out.push_back(*block.identity);
  }
  if (HasConv1x1(s)) out.push_back(block.conv1x1);
  return out;
}

Kernel3x3 Fuse(const RepBlock& block, FusionStrategy s) {
  const std::vector<BranchSpec> branches = ActiveBranches(block, s);
  return Fuse(branches);
}

FeatureMap Conv2d(const FeatureMap& x, const Tensor4& w,
                  std::span<const double> bias) {
  if (w.in_channels() != x.channels) {
    throw Error(ErrorCode::kShapeMismatch, "input channels do not match kernel");
  }
  const int pad_y = (w.kernel_h() - 1) / 2;
  const int pad_x = (w.kernel_w() - 1) / 2;
  FeatureMap y(w.out_channels(), x.height, x.width);
  for (int o = 0; o < w.out_channels(); ++o) {
    for (int r = 0; r < x.height; ++r) {
      for (int c = 0; c < x.width; ++c) {
        double sum = bias.empty() ? 0.0 : bias[o];
        for (int i = 0; i < w.in_channels(); ++i) {
          for (int ky = 0; ky < w.kernel_h(); ++ky) {
            const int sr = r + ky - pad_y;
            if (sr < 0 || sr >= x.height) continue;
            for (int kx = 0; kx < w.kernel_w(); ++kx) {
              const int sc = c + kx - pad_x;
              if (sc < 0 || sc >= x.width) continue;
              sum += w(o, i, ky, kx) * x.at(i, sr, sc);
            }
          }
        }
        y.at(o, r, c) = sum;
      }
    }
  }
  return y;
}

FeatureMap BranchForward(const BranchSpec& branch, const FeatureMap& x) {
  CheckBatchNorm(branch.bn, branch.out_channels);
  FeatureMap z = branch.kind == BranchKind::kIdentity
                     ? x
                     : Conv2d(x, branch.weights, {});
  const BatchNorm& bn = branch.bn;
  for (int o = 0; o < z.channels; ++o) {
    const double std_dev = std::sqrt(bn.var[o] + bn.eps);
    for (int r = 0; r < z.height; ++r) {
      for (int c = 0; c < z.width; ++c) {
        double& v = z.at(o, r, c);
        v = bn.gamma[o] * (v - bn.mean[o]) / std_dev + bn.beta[o];
      }
    }
  }
  return z;
}

FeatureMap BlockForward(const RepBlock& block, FusionStrategy s,
                        const FeatureMap& x) {
  FeatureMap sum;
  for (const BranchSpec& b : ActiveBranches(block, s)) {
    FeatureMap y = BranchForward(b, x);
    if (sum.data.empty()) {
      sum = std::move(y);
      continue;
    }
    for (std::size_t j = 0; j < sum.data.size(); ++j) sum.data[j] += y.data[j];
  }
  return sum;
}

Load StrategyCosts(int in_ch, int out_ch, int height, int width,
                   FusionStrategy s) {
  const double in = in_ch, out = out_ch;
  const double pixels = static_cast<double>(height) * width;
  const double macs_3x3 = 9.0 * in * out * pixels;
  const double macs_1x1 = in * out * pixels;

  Load load;
  load.flops = 2.0 * macs_3x3;
  double weights = 9.0 * in * out;
  if (HasConv1x1(s)) {
    load.flops += 2.0 * macs_1x1;
    weights += in * out;
  }
  if (HasShortcut(s)) load.flops += out * pixels;
  load.bytes = kBytesPerValue * (weights + in * pixels + out * pixels);
  return load;
}

LayerProfile RepBlockLayer(std::size_t index, int in_ch, int out_ch,
                           int height, int width) {
  LayerProfile layer;
  layer.index = index;
  layer.name = "repblock" + std::to_string(index);
  layer.fusible = true;
  for (FusionStrategy s : kAllStrategies) {
    const Load l = StrategyCosts(in_ch, out_ch, height, width, s);
    At(layer.flops, s) = l.flops;
    At(layer.bytes, s) = l.bytes;
  }
  layer.output_activation_bytes =
      kBytesPerValue * out_ch * static_cast<double>(height) * width;
  return layer;
}

RepBlock RandomRepBlock(int channels, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> weight(-1.0, 1.0);
  std::uniform_real_distribution<double> gamma(0.5, 1.5);
  std::uniform_real_distribution<double> shift(-1.0, 1.0);
  std::uniform_real_distribution<double> var(0.1, 2.0);

  auto make = [&](BranchKind kind, int k) {
    BranchSpec b;
    b.kind = kind;
    b.in_channels = channels;
    b.out_channels = channels;
    if (kind != BranchKind::kIdentity) {
      b.weights = Tensor4(channels, channels, k, k);
      for (double& v : b.weights.values()) v = weight(rng);
    }
    for (int c = 0; c < channels; ++c) {
      b.bn.gamma.push_back(gamma(rng));
      b.bn.beta.push_back(shift(rng));
      b.bn.mean.push_back(shift(rng));
      b.bn.var.push_back(var(rng));
    }
    return b;
  };
  RepBlock block;
  block.conv3x3 = make(BranchKind::kConv3x3, 3);
  block.conv1x1 = make(BranchKind::kConv1x1, 1);
  block.identity = make(BranchKind::kIdentity, 1);
  return block;
}

FeatureMap RandomFeatureMap(int channels, int height, int width,
                            std::mt19937_64& rng) {
  std::normal_distribution<double> value(0.0, 1.0);
  FeatureMap x(channels, height, width);
  for (double& v : x.data) v = value(rng);
  return x;
}

std::vector<FuseCheckResult> RunFuseCheck(std::uint64_t seed,
                                          int trials_per_strategy) {
  constexpr int kChannels[] = {1, 4, 16};
  constexpr int kSpatial[] = {5, 8, 16};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 2);

  std::vector<FuseCheckResult> results;
  for (FusionStrategy s : kAllStrategies) {
    FuseCheckResult r{.strategy = s, .trials = trials_per_strategy};
    for (int t = 0; t < trials_per_strategy; ++t) {
      const int ch = kChannels[pick(rng)];
      const int hw = kSpatial[pick(rng)];
      const RepBlock block = RandomRepBlock(ch, rng);
      const FeatureMap x = RandomFeatureMap(ch, hw, hw, rng);
      const Kernel3x3 fused = Fuse(block, s);
      r.max_relative_error =
          std::max(r.max_relative_error,
                   MaxRelativeError(Conv2d(x, fused.weights, fused.bias),
                                    BlockForward(block, s, x)));
    }
    results.push_back(r);
  }
  return results;
}

double MaxRelativeError(const FeatureMap& a, const FeatureMap& b) {
  if (a.data.size() != b.data.size()) {
    throw Error(ErrorCode::kShapeMismatch, "feature maps differ in size");
  }
  double diff = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < a.data.size(); ++j) {
    diff = std::max(diff, std::abs(a.data[j] - b.data[j]));
    scale = std::max(scale, std::abs(b.data[j]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace codesign
