#include "pocketrl/nn.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace pocketrl::nn {
namespace {

using EMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<EMat>;
using CMap = Eigen::Map<const EMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using CVecMap = Eigen::Map<const Eigen::VectorXd>;

Map map(Matrix& m) { return Map(m.data.data(), m.rows, m.cols); }
CMap map(const Matrix& m) { return CMap(m.data.data(), m.rows, m.cols); }

double softplus(double z) {
  // max(z,0) + log1p(exp(-|z|)) is stable for large |z|.
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument(std::string(what) + ": shape mismatch (" +
                                std::to_string(a.rows) + "x" +
                                std::to_string(a.cols) + " vs " +
                                std::to_string(b.rows) + "x" +
                                std::to_string(b.cols) + ")");
}

// dL/d(prediction); returns the loss value. dpred is fully overwritten.
double loss_grad(const LossSpec& loss, const Matrix& pred, const Matrix& target,
                 Matrix& dpred) {
  check_same_shape(pred, target, "loss");
  dpred.resize(pred.rows, pred.cols);
  const std::size_t n = pred.data.size();

  switch (loss.kind) {
    case LossKind::MeanSquaredError: {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double e = pred.data[i] - target.data[i];
        sum += e * e;
        dpred.data[i] = 2.0 * e / static_cast<double>(n);
      }
      return sum / static_cast<double>(n);
    }
    case LossKind::Huber: {
      const double d = loss.delta;
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double e = pred.data[i] - target.data[i];
        if (std::abs(e) <= d) {
          sum += 0.5 * e * e;
          dpred.data[i] = e / static_cast<double>(n);
        } else {
          sum += d * (std::abs(e) - 0.5 * d);
          dpred.data[i] = (e > 0 ? d : -d) / static_cast<double>(n);
        }
      }
      return sum / static_cast<double>(n);
    }
    case LossKind::GroupedCrossEntropy: {
      if (pred.cols != loss.groups * loss.classes)
        throw std::invalid_argument(
            "grouped cross-entropy needs groups*classes columns");
      const int total_groups = pred.rows * loss.groups;
      double sum = 0.0;
      for (int r = 0; r < pred.rows; ++r) {
        for (int g = 0; g < loss.groups; ++g) {
          const int base = g * loss.classes;
          double zmax = pred.at(r, base);
          for (int c = 1; c < loss.classes; ++c)
            zmax = std::max(zmax, pred.at(r, base + c));
          double denom = 0.0;
          for (int c = 0; c < loss.classes; ++c)
            denom += std::exp(pred.at(r, base + c) - zmax);
          const double log_denom = std::log(denom) + zmax;
          for (int c = 0; c < loss.classes; ++c) {
            const double p = std::exp(pred.at(r, base + c) - log_denom);
            const double t = target.at(r, base + c);
            sum -= t * (pred.at(r, base + c) - log_denom);
            dpred.at(r, base + c) = (p - t) / static_cast<double>(total_groups);
          }
        }
      }
      return sum / static_cast<double>(total_groups);
    }
  }
  throw std::logic_error("unknown loss kind");
}

}  // namespace

std::size_t MLP::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += l.weights.data.size() + l.bias.size();
  return n;
}

Matrix forward(const MLP& net, const Matrix& x, ForwardCache* cache) {
  if (net.layers.empty()) throw std::invalid_argument("empty network");
  if (x.cols != net.input_dim())
    throw std::invalid_argument("forward: input has " + std::to_string(x.cols) +
                                " columns, network expects " +
                                std::to_string(net.input_dim()));
  if (cache) {
    cache->input = x;
    cache->preacts.clear();
    cache->preacts.reserve(net.layers.size());
  }

  Matrix cur = x;
  const std::size_t last = net.layers.size() - 1;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    if (layer.weights.cols != cur.cols)
      throw std::invalid_argument("forward: layer " + std::to_string(l) +
                                  " dimension mismatch");
    Matrix z(cur.rows, layer.weights.rows);
    map(z).noalias() = map(cur) * map(layer.weights).transpose();
    map(z).rowwise() += CVecMap(layer.bias.data(), layer.bias.size()).transpose();
    if (cache) cache->preacts.push_back(z);

    if (l != last) {
      for (double& v : z.data) v = v > 0.0 ? v : 0.0;  // ReLU
    } else if (net.output_activation == OutputActivation::Softplus) {
      for (double& v : z.data) v = softplus(v);
    }
    cur = std::move(z);
  }
  return cur;
}

std::vector<double> forward1(const MLP& net, std::span<const double> x,
                             ForwardCache* cache) {
  Matrix in(1, static_cast<int>(x.size()));
  std::copy(x.begin(), x.end(), in.data.begin());
  const Matrix out = forward(net, in, cache);
  return {out.data.begin(), out.data.end()};
}

double loss_value(const LossSpec& loss, const Matrix& prediction,
                  const Matrix& target) {
  Matrix scratch;
  return loss_grad(loss, prediction, target, scratch);
}

double backward_into(const MLP& net, const ForwardCache& cache,
                     const LossSpec& loss, const Matrix& target,
                     Gradients& grads, BackwardScratch& sc) {
  if (cache.preacts.size() != net.layers.size())
    throw std::invalid_argument("backward: cache does not match network");

  if (grads.layers.size() != net.layers.size()) {
    grads.layers.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      grads.layers[l].weights =
          Matrix(net.layers[l].weights.rows, net.layers[l].weights.cols);
      grads.layers[l].bias.assign(net.layers[l].bias.size(), 0.0);
    }
  }

  // Rebuild the output from the last pre-activation.
  const Matrix& zlast = cache.preacts.back();
  const Matrix* pred = &zlast;
  if (net.output_activation == OutputActivation::Softplus) {
    sc.pred = zlast;
    for (double& v : sc.pred.data) v = softplus(v);
    pred = &sc.pred;
  }

  const double loss_value = loss_grad(loss, *pred, target, sc.dcur);

  if (net.output_activation == OutputActivation::Softplus)
    for (std::size_t i = 0; i < sc.dcur.data.size(); ++i)
      sc.dcur.data[i] *= sigmoid(zlast.data[i]);

  for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
    const Layer& layer = net.layers[static_cast<std::size_t>(l)];
    // sc.dcur holds dL/d(preact of layer l) once the ReLU mask is applied
    // (hidden layers only; the output activation was handled above).
    if (l != static_cast<int>(net.layers.size()) - 1) {
      const Matrix& z = cache.preacts[static_cast<std::size_t>(l)];
      for (std::size_t i = 0; i < sc.dcur.data.size(); ++i)
        if (z.data[i] <= 0.0) sc.dcur.data[i] = 0.0;
    }

    // Input of layer l: cache.input for l == 0, else ReLU(preact[l-1]).
    const Matrix* in_ptr;
    if (l == 0) {
      in_ptr = &cache.input;
    } else {
      sc.act = cache.preacts[static_cast<std::size_t>(l) - 1];
      for (double& v : sc.act.data) v = v > 0.0 ? v : 0.0;
      in_ptr = &sc.act;
    }

    Layer& g = grads.layers[static_cast<std::size_t>(l)];
    map(g.weights).noalias() = map(sc.dcur).transpose() * map(*in_ptr);
    VecMap(g.bias.data(), g.bias.size()) = map(sc.dcur).colwise().sum();

    if (l > 0) {
      sc.dprev.resize(sc.dcur.rows, layer.weights.cols);
      map(sc.dprev).noalias() = map(sc.dcur) * map(layer.weights);
      std::swap(sc.dcur, sc.dprev);
    }
  }
  return loss_value;
}

BackwardResult backward(const MLP& net, const ForwardCache& cache,
                        const LossSpec& loss, const Matrix& target) {
  BackwardResult out;
  BackwardScratch scratch;
  out.loss = backward_into(net, cache, loss, target, out.grads, scratch);
  return out;
}

AdamState make_adam(const MLP& net, const AdamConfig& config) {
  AdamState st;
  st.config = config;
  st.m.resize(net.layers.size());
  st.v.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    st.m[l].weights = Matrix(layer.weights.rows, layer.weights.cols);
    st.m[l].bias.assign(layer.bias.size(), 0.0);
    st.v[l].weights = Matrix(layer.weights.rows, layer.weights.cols);
    st.v[l].bias.assign(layer.bias.size(), 0.0);
  }
  return st;
}

void adam_step(MLP& net, const Gradients& grads, AdamState& state) {
  if (grads.layers.size() != net.layers.size() ||
      state.m.size() != net.layers.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  state.t += 1;
  const AdamConfig& c = state.config;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));

  using ArrMap = Eigen::Map<Eigen::ArrayXd>;
  using CArrMap = Eigen::Map<const Eigen::ArrayXd>;
  auto update = [&](double* p, const double* g, double* m, double* v,
                    std::size_t n) {
    const auto len = static_cast<Eigen::Index>(n);
    ArrMap P(p, len), M(m, len), V(v, len);
    CArrMap G(g, len);
    M = c.beta1 * M + (1.0 - c.beta1) * G;
    V = c.beta2 * V + (1.0 - c.beta2) * G.square();
    P -= c.lr * (M / bc1) / ((V / bc2).sqrt() + c.eps);
  };

  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    Layer& layer = net.layers[l];
    const Layer& g = grads.layers[l];
    check_same_shape(layer.weights, g.weights, "adam_step");
    update(layer.weights.data.data(), g.weights.data.data(),
           state.m[l].weights.data.data(), state.v[l].weights.data.data(),
           layer.weights.data.size());
    update(layer.bias.data(), g.bias.data(), state.m[l].bias.data(),
           state.v[l].bias.data(), layer.bias.size());
  }
}

MLP he_init(const std::vector<int>& dims, std::mt19937_64& rng,
            OutputActivation output_activation) {
  if (dims.size() < 2) throw std::invalid_argument("he_init needs >= 2 dims");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("he_init: dims must be positive");

  MLP net;
  net.output_activation = output_activation;
  net.layers.resize(dims.size() - 1);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    std::normal_distribution<double> dist(
        0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    Layer& layer = net.layers[l];
    layer.weights = Matrix(fan_out, fan_in);
    for (double& w : layer.weights.data) w = dist(rng);
    layer.bias.assign(static_cast<std::size_t>(fan_out), 0.0);
  }
  return net;
}

}  // namespace pocketrl::nn
