// Copyright 2026 The spoofshap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPOOFSHAP_AUTODIFF_GRAPH_HPP_
#define SPOOFSHAP_AUTODIFF_GRAPH_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "spoofshap/autodiff/tensor.hpp"
#include "spoofshap/error.hpp"

namespace spoofshap::autodiff {

enum class OpKind { kInput, kConv1d, kConv2d, kAdd, kRelu, kGlobalMaxPool, kAffine, kSoftmax };

// One primitive application. `lhs`/`rhs` index earlier nodes, `weight`/`bias`
// index parameter slots.
struct Node {
  OpKind op = OpKind::kInput;
  std::string name;
  int lhs = -1;
  int rhs = -1;
  int weight = -1;
  int bias = -1;
  std::size_t stride = 1;
};

struct ParamSpec {
  std::string name;
  Shape shape;
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  bool is_bias = false;
};

// Static computation graph. Nodes are appended in topological order and the
// last node is the output. Spatial extents are left free so one graph serves
// inputs of any admissible length.
class Graph {
 public:
  int Input(std::string name = "input") {
    Require(nodes_.empty(), "the input must be the first node");
    return Push({OpKind::kInput, std::move(name)});
  }

  int Conv1d(int x, std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
             std::size_t stride, const std::string& name) {
    return Conv(OpKind::kConv1d, x, in_channels, out_channels, kernel, stride, name,
                {out_channels, in_channels, kernel}, in_channels * kernel, out_channels * kernel);
  }

  int Conv2d(int x, std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
             std::size_t stride, const std::string& name) {
    const std::size_t area = kernel * kernel;
    return Conv(OpKind::kConv2d, x, in_channels, out_channels, kernel, stride, name,
                {out_channels, in_channels, kernel, kernel}, in_channels * area, out_channels * area);
  }

  // main + skip, with skip centre-cropped to main's spatial extent (valid
  // convolutions leave the main branch shorter).
  int Add(int main, int skip, std::string name) {
    CheckRef(main);
    CheckRef(skip);
    Node n{OpKind::kAdd, std::move(name)};
    n.lhs = main;
    n.rhs = skip;
    return Push(std::move(n));
  }

  int Relu(int x, std::string name) { return Unary(OpKind::kRelu, x, std::move(name)); }
  int GlobalMaxPool(int x, std::string name) { return Unary(OpKind::kGlobalMaxPool, x, std::move(name)); }
  int Softmax(int x, std::string name) { return Unary(OpKind::kSoftmax, x, std::move(name)); }

  int Affine(int x, std::size_t in_features, std::size_t out_features, const std::string& name) {
    CheckRef(x);
    Node n{OpKind::kAffine, name};
    n.lhs = x;
    n.weight = AddParam({name + ".weight", {out_features, in_features}, in_features, out_features, false});
    n.bias = AddParam({name + ".bias", {out_features}, in_features, out_features, true});
    return Push(std::move(n));
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<ParamSpec>& params() const { return params_; }
  int output() const { return static_cast<int>(nodes_.size()) - 1; }

  std::size_t NumParameters() const {
    std::size_t total = 0;
    for (const auto& p : params_) total += NumElements(p.shape);
    return total;
  }

  // Output shape of node i given its input shapes; nullopt plus a message when
  // the inputs are inadmissible.
  std::optional<Shape> NodeShape(std::size_t i, const std::vector<Shape>& shapes,
                                 std::string* why) const {
    const Node& n = nodes_[i];
    auto fail = [&](const std::string& msg) -> std::optional<Shape> {
      if (why) *why = "node '" + n.name + "': " + msg;
      return std::nullopt;
    };
    switch (n.op) {
      case OpKind::kInput:
        return shapes[0];
      case OpKind::kConv1d:
      case OpKind::kConv2d: {
        const Shape& x = shapes[n.lhs];
        const Shape& w = params_[n.weight].shape;
        const std::size_t spatial = n.op == OpKind::kConv1d ? 1 : 2;
        if (x.size() != spatial + 1) return fail("expected rank " + std::to_string(spatial + 1) + " input, got " + ShapeString(x));
        if (x[0] != w[1]) return fail("expected " + std::to_string(w[1]) + " input channels, got " + std::to_string(x[0]));
        Shape out = {w[0]};
        for (std::size_t d = 1; d <= spatial; ++d) {
          if (x[d] < w[2]) {
            return fail("input extent " + std::to_string(x[d]) + " smaller than kernel " + std::to_string(w[2]));
          }
          out.push_back((x[d] - w[2]) / n.stride + 1);
        }
        return out;
      }
      case OpKind::kAdd: {
        const Shape& a = shapes[n.lhs];
        const Shape& b = shapes[n.rhs];
        if (a.size() != b.size() || a[0] != b[0]) return fail("operand shapes " + ShapeString(a) + " and " + ShapeString(b) + " differ");
        for (std::size_t d = 1; d < a.size(); ++d) {
          if (b[d] < a[d]) return fail("skip branch shorter than main branch");
        }
        return a;
      }
      case OpKind::kRelu:
        return shapes[n.lhs];
      case OpKind::kGlobalMaxPool: {
        const Shape& x = shapes[n.lhs];
        if (x.size() < 2 || NumElements(x) == 0) return fail("nothing to pool over " + ShapeString(x));
        return Shape{x[0]};
      }
      case OpKind::kAffine: {
        const Shape& x = shapes[n.lhs];
        const Shape& w = params_[n.weight].shape;
        if (NumElements(x) != w[1]) return fail("expected " + std::to_string(w[1]) + " features, got " + std::to_string(NumElements(x)));
        return Shape{w[0]};
      }
      case OpKind::kSoftmax: {
        const Shape& x = shapes[n.lhs];
        if (x.size() != 1) return fail("softmax expects a vector");
        return x;
      }
    }
    return fail("unknown op");
  }

  // Shapes of every node for a given input shape; throws naming the first
  // offending node.
  std::vector<Shape> InferShapes(const Shape& input_shape) const {
    std::string why;
    auto shapes = TryInferShapes(input_shape, &why);
    if (!shapes) Fail(ErrorCode::kInvalidArgument, "shape mismatch at " + why);
    return *shapes;
  }

  std::optional<std::vector<Shape>> TryInferShapes(const Shape& input_shape, std::string* why) const {
    Require(!nodes_.empty(), "empty graph");
    std::vector<Shape> shapes(nodes_.size());
    shapes[0] = input_shape;
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      auto s = NodeShape(i, shapes, why);
      if (!s) return std::nullopt;
      shapes[i] = std::move(*s);
    }
    return shapes;
  }

  // Smallest extent along `axis` of `base` for which the graph accepts the
  // input. Admissibility is monotone in the extent.
  std::size_t MinimumExtent(Shape base, std::size_t axis, std::size_t limit = 1u << 24) const {
    auto ok = [&](std::size_t extent) {
      base[axis] = extent;
      return TryInferShapes(base, nullptr).has_value();
    };
    std::size_t hi = 1;
    while (!ok(hi)) {
      if (hi >= limit) Fail(ErrorCode::kInvalidArgument, "no admissible input extent below limit");
      hi *= 2;
    }
    std::size_t lo = hi / 2;  // inadmissible (or 0)
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (ok(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return hi;
  }

 private:
  int Push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int AddParam(ParamSpec spec) {
    params_.push_back(std::move(spec));
    return static_cast<int>(params_.size()) - 1;
  }

  void CheckRef(int x) const {
    Require(x >= 0 && x < static_cast<int>(nodes_.size()), "node reference out of range");
  }

  int Unary(OpKind op, int x, std::string name) {
    CheckRef(x);
    Node n{op, std::move(name)};
    n.lhs = x;
    return Push(std::move(n));
  }

  int Conv(OpKind op, int x, std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
           std::size_t stride, const std::string& name, Shape weight_shape, std::size_t fan_in,
           std::size_t fan_out) {
    CheckRef(x);
    Require(in_channels >= 1 && out_channels >= 1 && kernel >= 1 && stride >= 1,
            "convolution '" + name + "' needs positive channels, kernel and stride");
    Node n{op, name};
    n.lhs = x;
    n.stride = stride;
    n.weight = AddParam({name + ".weight", std::move(weight_shape), fan_in, fan_out, false});
    n.bias = AddParam({name + ".bias", {out_channels}, fan_in, fan_out, true});
    return Push(std::move(n));
  }

  std::vector<Node> nodes_;
  std::vector<ParamSpec> params_;
};

// Forward values of every node, plus what the adjoint pass needs.
template <typename T>
struct Activations {
  std::vector<Tensor<T>> values;
  // Per global-max-pool node: flat spatial argmax per channel (lowest index
  // on ties).
  std::vector<std::vector<std::size_t>> argmax;

  const Tensor<T>& output() const { return values.back(); }
};

template <typename T>
struct Gradients {
  ParamSet<T> params;
  Tensor<T> input;
};

struct BackwardOptions {
  bool param_grads = true;
  bool input_grad = true;
};

namespace internal {

template <typename T>
void ConvForward1d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, std::size_t s,
                   Tensor<T>& out) {
  const std::size_t ci_n = x.dim(0), len = x.dim(1);
  const std::size_t co_n = w.dim(0), k_n = w.dim(2);
  const std::size_t lo = out.dim(1);
  for (std::size_t co = 0; co < co_n; ++co) {
    T* dst = out.data.data() + co * lo;
    std::fill(dst, dst + lo, b[co]);
    for (std::size_t ci = 0; ci < ci_n; ++ci) {
      for (std::size_t k = 0; k < k_n; ++k) {
        const T wv = w[(co * ci_n + ci) * k_n + k];
        const T* src = x.data.data() + ci * len + k;
        if (s == 1) {
          for (std::size_t t = 0; t < lo; ++t) dst[t] += wv * src[t];
        } else {
          for (std::size_t t = 0; t < lo; ++t) dst[t] += wv * src[t * s];
        }
      }
    }
  }
}

template <typename T>
void ConvForward2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, std::size_t s,
                   Tensor<T>& out) {
  const std::size_t ci_n = x.dim(0), h = x.dim(1), wd = x.dim(2);
  const std::size_t co_n = w.dim(0), k_n = w.dim(2);
  const std::size_t ho_n = out.dim(1), wo_n = out.dim(2);
  for (std::size_t co = 0; co < co_n; ++co) {
    T* plane = out.data.data() + co * ho_n * wo_n;
    std::fill(plane, plane + ho_n * wo_n, b[co]);
    for (std::size_t ci = 0; ci < ci_n; ++ci) {
      const T* in_plane = x.data.data() + ci * h * wd;
      for (std::size_t kh = 0; kh < k_n; ++kh) {
        for (std::size_t kw = 0; kw < k_n; ++kw) {
          const T wv = w[((co * ci_n + ci) * k_n + kh) * k_n + kw];
          for (std::size_t ho = 0; ho < ho_n; ++ho) {
            T* dst = plane + ho * wo_n;
            const T* src = in_plane + (ho * s + kh) * wd + kw;
            if (s == 1) {
              for (std::size_t wo = 0; wo < wo_n; ++wo) dst[wo] += wv * src[wo];
            } else {
              for (std::size_t wo = 0; wo < wo_n; ++wo) dst[wo] += wv * src[wo * s];
            }
          }
        }
      }
    }
  }
}

// Adjoint of ConvForward1d. Gradients through a global max pool are sparse, so
// work is restricted to the non-zero span of each output-channel row.
template <typename T>
void ConvBackward1d(const Tensor<T>& x, const Tensor<T>& w, std::size_t s, const Tensor<T>& dout,
                    Tensor<T>* dx, Tensor<T>* dw, Tensor<T>* db) {
  const std::size_t ci_n = x.dim(0), len = x.dim(1);
  const std::size_t co_n = w.dim(0), k_n = w.dim(2);
  const std::size_t lo = dout.dim(1);
  for (std::size_t co = 0; co < co_n; ++co) {
    const T* g = dout.data.data() + co * lo;
    std::size_t t0 = 0;
    while (t0 < lo && g[t0] == T(0)) ++t0;
    if (t0 == lo) continue;
    std::size_t t1 = lo;
    while (g[t1 - 1] == T(0)) --t1;
    if (db) {
      T acc = 0;
      for (std::size_t t = t0; t < t1; ++t) acc += g[t];
      (*db)[co] += acc;
    }
    for (std::size_t ci = 0; ci < ci_n; ++ci) {
      for (std::size_t k = 0; k < k_n; ++k) {
        const std::size_t wi = (co * ci_n + ci) * k_n + k;
        const T* src = x.data.data() + ci * len + k;
        if (dw) {
          T acc = 0;
          for (std::size_t t = t0; t < t1; ++t) acc += g[t] * src[t * s];
          (*dw)[wi] += acc;
        }
        if (dx) {
          const T wv = w[wi];
          T* dst = dx->data.data() + ci * len + k;
          if (s == 1) {
            for (std::size_t t = t0; t < t1; ++t) dst[t] += wv * g[t];
          } else {
            for (std::size_t t = t0; t < t1; ++t) dst[t * s] += wv * g[t];
          }
        }
      }
    }
  }
}

template <typename T>
void ConvBackward2d(const Tensor<T>& x, const Tensor<T>& w, std::size_t s, const Tensor<T>& dout,
                    Tensor<T>* dx, Tensor<T>* dw, Tensor<T>* db) {
  const std::size_t ci_n = x.dim(0), h = x.dim(1), wd = x.dim(2);
  const std::size_t co_n = w.dim(0), k_n = w.dim(2);
  const std::size_t ho_n = dout.dim(1), wo_n = dout.dim(2);
  for (std::size_t co = 0; co < co_n; ++co) {
    const T* g = dout.data.data() + co * ho_n * wo_n;
    // Bounding box of non-zero adjoints.
    std::size_t h0 = ho_n, h1 = 0, w0 = wo_n, w1 = 0;
    for (std::size_t ho = 0; ho < ho_n; ++ho) {
      for (std::size_t wo = 0; wo < wo_n; ++wo) {
        if (g[ho * wo_n + wo] != T(0)) {
          h0 = std::min(h0, ho);
          h1 = std::max(h1, ho + 1);
          w0 = std::min(w0, wo);
          w1 = std::max(w1, wo + 1);
        }
      }
    }
    if (h0 >= h1) continue;
    if (db) {
      T acc = 0;
      for (std::size_t ho = h0; ho < h1; ++ho) {
        for (std::size_t wo = w0; wo < w1; ++wo) acc += g[ho * wo_n + wo];
      }
      (*db)[co] += acc;
    }
    for (std::size_t ci = 0; ci < ci_n; ++ci) {
      const T* in_plane = x.data.data() + ci * h * wd;
      for (std::size_t kh = 0; kh < k_n; ++kh) {
        for (std::size_t kw = 0; kw < k_n; ++kw) {
          const std::size_t wi = ((co * ci_n + ci) * k_n + kh) * k_n + kw;
          const T wv = w[wi];
          T acc = 0;
          for (std::size_t ho = h0; ho < h1; ++ho) {
            const T* grow = g + ho * wo_n;
            const T* src = in_plane + (ho * s + kh) * wd + kw;
            if (dw) {
              for (std::size_t wo = w0; wo < w1; ++wo) acc += grow[wo] * src[wo * s];
            }
            if (dx) {
              T* dst = dx->data.data() + ci * h * wd + (ho * s + kh) * wd + kw;
              for (std::size_t wo = w0; wo < w1; ++wo) dst[wo * s] += wv * grow[wo];
            }
          }
          if (dw) (*dw)[wi] += acc;
        }
      }
    }
  }
}

// Offsets that centre-crop `from` onto `to` (channel axis excluded).
inline std::vector<std::size_t> CropOffsets(const Shape& from, const Shape& to) {
  std::vector<std::size_t> off(from.size(), 0);
  for (std::size_t d = 1; d < from.size(); ++d) off[d] = (from[d] - to[d]) / 2;
  return off;
}

// Visits (main_index, skip_index) pairs for a centre-cropped add.
template <typename F>
void ForEachCropped(const Shape& main, const Shape& skip, F&& f) {
  const auto off = CropOffsets(skip, main);
  if (main.size() == 2) {
    for (std::size_t c = 0; c < main[0]; ++c) {
      for (std::size_t t = 0; t < main[1]; ++t) f(c * main[1] + t, c * skip[1] + t + off[1]);
    }
  } else if (main.size() == 3) {
    for (std::size_t c = 0; c < main[0]; ++c) {
      for (std::size_t i = 0; i < main[1]; ++i) {
        for (std::size_t j = 0; j < main[2]; ++j) {
          f((c * main[1] + i) * main[2] + j,
            (c * skip[1] + i + off[1]) * skip[2] + j + off[2]);
        }
      }
    }
  } else {
    for (std::size_t i = 0; i < NumElements(main); ++i) f(i, i);
  }
}

}  // namespace internal

template <typename T>
void CheckParams(const Graph& g, const ParamSet<T>& params) {
  Require(params.size() == g.params().size(), "parameter set does not match graph");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape != g.params()[i].shape) {
      Fail(ErrorCode::kInvalidArgument, "shape mismatch at parameter '" + g.params()[i].name +
                                            "': expected " + ShapeString(g.params()[i].shape) +
                                            ", got " + ShapeString(params[i].shape));
    }
  }
}

template <typename T>
Activations<T> Forward(const Graph& g, const ParamSet<T>& params, const Tensor<T>& input) {
  CheckParams(g, params);
  const auto shapes = g.InferShapes(input.shape);
  const auto& nodes = g.nodes();
  Activations<T> act;
  act.values.resize(nodes.size());
  act.argmax.resize(nodes.size());
  act.values[0] = input;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    Tensor<T>& out = act.values[i];
    out = Tensor<T>(shapes[i]);
    const Tensor<T>& x = act.values[n.lhs];
    switch (n.op) {
      case OpKind::kInput:
        break;
      case OpKind::kConv1d:
        internal::ConvForward1d(x, params[n.weight], params[n.bias], n.stride, out);
        break;
      case OpKind::kConv2d:
        internal::ConvForward2d(x, params[n.weight], params[n.bias], n.stride, out);
        break;
      case OpKind::kAdd: {
        const Tensor<T>& skip = act.values[n.rhs];
        internal::ForEachCropped(out.shape, skip.shape, [&](std::size_t a, std::size_t b) {
          out[a] = x[a] + skip[b];
        });
        break;
      }
      case OpKind::kRelu:
        for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] > T(0) ? x[j] : T(0);
        break;
      case OpKind::kGlobalMaxPool: {
        const std::size_t channels = x.dim(0);
        const std::size_t span = x.size() / channels;
        auto& arg = act.argmax[i];
        arg.assign(channels, 0);
        for (std::size_t c = 0; c < channels; ++c) {
          const T* row = x.data.data() + c * span;
          std::size_t best = 0;
          for (std::size_t j = 1; j < span; ++j) {
            if (row[j] > row[best]) best = j;
          }
          arg[c] = best;
          out[c] = row[best];
        }
        break;
      }
      case OpKind::kAffine: {
        const Tensor<T>& w = params[n.weight];
        const Tensor<T>& b = params[n.bias];
        const std::size_t in = w.dim(1);
        for (std::size_t o = 0; o < w.dim(0); ++o) {
          T acc = b[o];
          for (std::size_t j = 0; j < in; ++j) acc += w[o * in + j] * x[j];
          out[o] = acc;
        }
        break;
      }
      case OpKind::kSoftmax: {
        const T peak = *std::max_element(x.data.begin(), x.data.end());
        T total = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
          out[j] = std::exp(x[j] - peak);
          total += out[j];
        }
        for (auto& v : out.data) v /= total;
        break;
      }
    }
  }
  for (const auto& v : act.output().data) {
    if (!std::isfinite(static_cast<double>(v))) Fail(ErrorCode::kNumerical, "non-finite model output");
  }
  return act;
}

template <typename T>
Tensor<T> Evaluate(const Graph& g, const ParamSet<T>& params, const Tensor<T>& input) {
  return Forward(g, params, input).output();
}

template <typename T>
ParamSet<T> ZeroParamGrads(const Graph& g) {
  ParamSet<T> out;
  for (const auto& p : g.params()) out.emplace_back(p.shape);
  return out;
}

// Reverse pass seeded with d(objective)/d(output). Parameter gradients are
// accumulated into `grads->params` (which must be sized like the graph's
// parameters); the input gradient overwrites `grads->input`.
template <typename T>
void BackwardInto(const Graph& g, const ParamSet<T>& params, const Activations<T>& act,
                  const Tensor<T>& output_seed, Gradients<T>* grads,
                  BackwardOptions options = {}) {
  const auto& nodes = g.nodes();
  Require(output_seed.shape == act.output().shape, "output seed shape mismatch");
  if (options.param_grads && grads->params.size() != params.size()) grads->params = ZeroParamGrads<T>(g);

  // A node needs an adjoint if anything upstream of it wants a gradient.
  std::vector<char> needed(nodes.size(), 0);
  needed[0] = options.input_grad;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    needed[i] = (options.param_grads && n.weight >= 0) || needed[n.lhs] || (n.rhs >= 0 && needed[n.rhs]);
  }

  std::vector<Tensor<T>> adj(nodes.size());
  adj.back() = output_seed;
  for (std::size_t i = nodes.size() - 1; i >= 1; --i) {
    const Node& n = nodes[i];
    if (!needed[i] || adj[i].data.empty()) continue;
    const Tensor<T>& dout = adj[i];
    const Tensor<T>& x = act.values[n.lhs];
    auto input_adj = [&](int node) -> Tensor<T>* {
      if (!needed[node]) return nullptr;
      if (adj[node].data.empty()) adj[node] = Tensor<T>(act.values[node].shape);
      return &adj[node];
    };
    switch (n.op) {
      case OpKind::kInput:
        break;
      case OpKind::kConv1d:
      case OpKind::kConv2d: {
        Tensor<T>* dw = options.param_grads ? &grads->params[n.weight] : nullptr;
        Tensor<T>* db = options.param_grads ? &grads->params[n.bias] : nullptr;
        Tensor<T>* dx = input_adj(n.lhs);
        if (n.op == OpKind::kConv1d) {
          internal::ConvBackward1d(x, params[n.weight], n.stride, dout, dx, dw, db);
        } else {
          internal::ConvBackward2d(x, params[n.weight], n.stride, dout, dx, dw, db);
        }
        break;
      }
      case OpKind::kAdd: {
        if (Tensor<T>* da = input_adj(n.lhs)) {
          for (std::size_t j = 0; j < dout.size(); ++j) (*da)[j] += dout[j];
        }
        if (Tensor<T>* ds = input_adj(n.rhs)) {
          internal::ForEachCropped(dout.shape, act.values[n.rhs].shape,
                                   [&](std::size_t a, std::size_t b) { (*ds)[b] += dout[a]; });
        }
        break;
      }
      case OpKind::kRelu:
        if (Tensor<T>* dx = input_adj(n.lhs)) {
          for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] > T(0)) (*dx)[j] += dout[j];
          }
        }
        break;
      case OpKind::kGlobalMaxPool:
        if (Tensor<T>* dx = input_adj(n.lhs)) {
          const std::size_t span = x.size() / x.dim(0);
          for (std::size_t c = 0; c < x.dim(0); ++c) (*dx)[c * span + act.argmax[i][c]] += dout[c];
        }
        break;
      case OpKind::kAffine: {
        const Tensor<T>& w = params[n.weight];
        const std::size_t in = w.dim(1);
        if (options.param_grads) {
          Tensor<T>& dw = grads->params[n.weight];
          Tensor<T>& db = grads->params[n.bias];
          for (std::size_t o = 0; o < w.dim(0); ++o) {
            db[o] += dout[o];
            for (std::size_t j = 0; j < in; ++j) dw[o * in + j] += dout[o] * x[j];
          }
        }
        if (Tensor<T>* dx = input_adj(n.lhs)) {
          for (std::size_t j = 0; j < in; ++j) {
            T acc = 0;
            for (std::size_t o = 0; o < w.dim(0); ++o) acc += w[o * in + j] * dout[o];
            (*dx)[j] += acc;
          }
        }
        break;
      }
      case OpKind::kSoftmax:
        if (Tensor<T>* dx = input_adj(n.lhs)) {
          const Tensor<T>& y = act.values[i];
          if (y.size() == 2) {
            // y0 * y1 * (g0 - g1): the two class adjoints are exact negatives.
            const T c = y[0] * y[1];
            const T d = c * (dout[0] - dout[1]);
            (*dx)[0] += d;
            (*dx)[1] -= d;
          } else {
            T dot = 0;
            for (std::size_t j = 0; j < y.size(); ++j) dot += dout[j] * y[j];
            for (std::size_t j = 0; j < y.size(); ++j) (*dx)[j] += y[j] * (dout[j] - dot);
          }
        }
        break;
    }
  }
  if (options.input_grad) {
    grads->input = adj[0].data.empty() ? Tensor<T>(act.values[0].shape) : std::move(adj[0]);
  }
}

template <typename T>
Gradients<T> Backward(const Graph& g, const ParamSet<T>& params, const Activations<T>& act,
                      const Tensor<T>& output_seed, BackwardOptions options = {}) {
  Gradients<T> grads;
  if (options.param_grads) grads.params = ZeroParamGrads<T>(g);
  BackwardInto(g, params, act, output_seed, &grads, options);
  return grads;
}

// Derivatives of output[output_index] with respect to every parameter and the
// input.
template <typename T>
Gradients<T> ComputeGradients(const Graph& g, const ParamSet<T>& params, const Tensor<T>& input,
                              std::size_t output_index, BackwardOptions options = {}) {
  const Activations<T> act = Forward(g, params, input);
  Require(act.output().rank() == 1, "gradients need a vector-valued output");
  Require(output_index < act.output().size(), "output index out of range");
  Tensor<T> seed(act.output().shape);
  seed[output_index] = T(1);
  return Backward(g, params, act, seed, options);
}

}  // namespace spoofshap::autodiff

#endif  // SPOOFSHAP_AUTODIFF_GRAPH_HPP_
