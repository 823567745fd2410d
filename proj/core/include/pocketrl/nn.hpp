#pragma once

#include <cstdint>
#include <new>
#include <random>
#include <span>
#include <vector>

namespace pocketrl::nn {

// Minimal dense network engine: MLP forward, exact backpropagation for the
// three losses used by the agents, and bias-corrected Adam. All math is in
// 64-bit floats; persistence quantizes to 32-bit (see model_io.hpp).

// Matrix buffers are 64-byte aligned so vectorized kernels take the same
// code path (and the same floating-point reduction order) on every run;
// training determinism depends on this.
template <class T, std::size_t Alignment>
struct AlignedAllocator {
  using value_type = T;
  using is_always_equal = std::true_type;
  template <class U>
  struct rebind {
    using other = AlignedAllocator<U, Alignment>;
  };

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U, Alignment>&) {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(
        ::operator new(n * sizeof(T), std::align_val_t(Alignment)));
  }
  void deallocate(T* p, std::size_t) {
    ::operator delete(p, std::align_val_t(Alignment));
  }
  bool operator==(const AlignedAllocator&) const { return true; }
};

using AlignedVector = std::vector<double, AlignedAllocator<double, 64>>;

struct Matrix {
  int rows = 0;
  int cols = 0;
  AlignedVector data;  // row-major

  Matrix() = default;
  Matrix(int r, int c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  // Reshapes without shrinking capacity; contents are unspecified.
  void resize(int r, int c) {
    rows = r;
    cols = c;
    data.resize(static_cast<std::size_t>(r) * c);
  }
  bool operator==(const Matrix&) const = default;
};

enum class OutputActivation { Identity, Softplus };

struct Layer {
  Matrix weights;            // [out x in]
  std::vector<double> bias;  // [out]
  bool operator==(const Layer&) const = default;
};

// Hidden layers use ReLU; the output layer is identity unless configured
// softplus (used by the distance head to keep predictions positive).
struct MLP {
  std::vector<Layer> layers;
  OutputActivation output_activation = OutputActivation::Identity;

  int input_dim() const { return layers.front().weights.cols; }
  int output_dim() const { return layers.back().weights.rows; }
  std::size_t parameter_count() const;
  bool operator==(const MLP&) const = default;
};

struct ForwardCache {
  Matrix input;                 // [B x in]
  std::vector<Matrix> preacts;  // per layer, [B x out]
};

// Batched forward: x is [B x input_dim], result [B x output_dim]. The
// network is never mutated. Throws std::invalid_argument on a shape
// mismatch.
Matrix forward(const MLP& net, const Matrix& x, ForwardCache* cache = nullptr);

// Single-sample convenience wrapper.
std::vector<double> forward1(const MLP& net, std::span<const double> x,
                             ForwardCache* cache = nullptr);

enum class LossKind { MeanSquaredError, GroupedCrossEntropy, Huber };

struct LossSpec {
  LossKind kind = LossKind::MeanSquaredError;
  double delta = 1.0;  // Huber threshold
  int groups = 24;     // GroupedCrossEntropy block layout
  int classes = 6;

  static LossSpec mse() { return {LossKind::MeanSquaredError}; }
  static LossSpec grouped_ce(int groups = 24, int classes = 6) {
    return {LossKind::GroupedCrossEntropy, 1.0, groups, classes};
  }
  static LossSpec huber(double delta) { return {LossKind::Huber, delta}; }
};

// Loss value alone (used by the finite-difference tests and evaluation).
// Losses are means over all batch elements: MSE and Huber per element,
// grouped cross-entropy per 6-way block.
double loss_value(const LossSpec& loss, const Matrix& prediction,
                  const Matrix& target);

struct Gradients {
  std::vector<Layer> layers;  // same shapes as the network
};

struct BackwardResult {
  double loss = 0.0;
  Gradients grads;
};

// Exact analytic gradients of the loss w.r.t. every parameter, from a cache
// produced by a matching forward call.
BackwardResult backward(const MLP& net, const ForwardCache& cache,
                        const LossSpec& loss, const Matrix& target);

// Buffer-reusing variant for training loops; grads (and the internal
// scratch) are resized on first use and reused afterwards. Returns the loss.
struct BackwardScratch {
  Matrix pred;
  Matrix dcur;
  Matrix dprev;
  Matrix act;
};
double backward_into(const MLP& net, const ForwardCache& cache,
                     const LossSpec& loss, const Matrix& target,
                     Gradients& grads, BackwardScratch& scratch);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::int64_t t = 0;
  std::vector<Layer> m;  // first/second moment buffers, network shapes
  std::vector<Layer> v;
};

AdamState make_adam(const MLP& net, const AdamConfig& config = {});
void adam_step(MLP& net, const Gradients& grads, AdamState& state);

// Weights ~ Normal(0, sqrt(2/fan_in)), biases zero.
MLP he_init(const std::vector<int>& dims, std::mt19937_64& rng,
            OutputActivation output_activation = OutputActivation::Identity);

}  // namespace pocketrl::nn
