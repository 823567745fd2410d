#include "pocketrl/gradcheck.hpp"

#include <cmath>
#include <vector>

namespace pocketrl::nn {
namespace {

constexpr double kStep = 1e-5;
constexpr double kTolerance = 1e-4;
// Margin keeping sampled points away from ReLU and Huber kinks, where the
// two-sided difference quotient does not estimate the one-sided derivative.
constexpr double kKinkMargin = 1e-3;

std::vector<double*> parameter_pointers(MLP& net) {
  std::vector<double*> out;
  for (Layer& layer : net.layers) {
    for (double& w : layer.weights.data) out.push_back(&w);
    for (double& b : layer.bias) out.push_back(&b);
  }
  return out;
}

std::vector<double> flatten(const Gradients& grads) {
  std::vector<double> out;
  for (const Layer& layer : grads.layers) {
    out.insert(out.end(), layer.weights.data.begin(), layer.weights.data.end());
    out.insert(out.end(), layer.bias.begin(), layer.bias.end());
  }
  return out;
}

bool has_kink_risk(const MLP& net, const LossSpec& loss, const Matrix& x,
                   const Matrix& target) {
  ForwardCache cache;
  const Matrix pred = forward(net, x, &cache);
  for (std::size_t l = 0; l + 1 < net.layers.size(); ++l)
    for (double z : cache.preacts[l].data)
      if (std::abs(z) < kKinkMargin) return true;
  if (loss.kind == LossKind::Huber) {
    for (std::size_t i = 0; i < pred.data.size(); ++i)
      if (std::abs(std::abs(pred.data[i] - target.data[i]) - loss.delta) <
          kKinkMargin)
        return true;
  }
  return false;
}

}  // namespace

double gradcheck_single(const MLP& net, const LossSpec& loss, const Matrix& x,
                        const Matrix& target) {
  ForwardCache cache;
  forward(net, x, &cache);
  const BackwardResult bw = backward(net, cache, loss, target);
  const std::vector<double> analytic = flatten(bw.grads);

  MLP probe = net;
  std::vector<double*> params = parameter_pointers(probe);

  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = *params[i];
    *params[i] = saved + kStep;
    const double lp = loss_value(loss, forward(probe, x), target);
    *params[i] = saved - kStep;
    const double lm = loss_value(loss, forward(probe, x), target);
    *params[i] = saved;

    const double numeric = (lp - lm) / (2.0 * kStep);
    const double rel = std::abs(analytic[i] - numeric) /
                       std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-6);
    worst = std::max(worst, rel);
  }
  return worst;
}

GradcheckReport gradcheck(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GradcheckReport report;

  for (int trial = 0; trial < trials; ++trial) {
    const int loss_pick = std::uniform_int_distribution<int>(0, 2)(rng);
    LossSpec loss;
    int out_dim;
    if (loss_pick == 0) {
      loss = LossSpec::mse();
      out_dim = std::uniform_int_distribution<int>(1, 8)(rng);
    } else if (loss_pick == 1) {
      loss = LossSpec::huber(
          std::uniform_real_distribution<double>(0.5, 2.0)(rng));
      out_dim = std::uniform_int_distribution<int>(1, 8)(rng);
    } else {
      const int groups = std::uniform_int_distribution<int>(2, 4)(rng);
      const int classes = std::uniform_int_distribution<int>(2, 4)(rng);
      loss = LossSpec::grouped_ce(groups, classes);
      out_dim = groups * classes;
    }

    std::vector<int> dims{std::uniform_int_distribution<int>(1, 16)(rng)};
    const int hidden_layers = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int l = 0; l < hidden_layers; ++l)
      dims.push_back(std::uniform_int_distribution<int>(1, 32)(rng));
    dims.push_back(out_dim);

    // Softplus output only where the loss is elementwise.
    const OutputActivation out_act =
        (loss.kind != LossKind::GroupedCrossEntropy &&
         std::uniform_int_distribution<int>(0, 1)(rng) == 1)
            ? OutputActivation::Softplus
            : OutputActivation::Identity;

    const int batch = std::uniform_int_distribution<int>(1, 4)(rng);

    MLP net;
    Matrix x;
    Matrix target;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    do {
      net = he_init(dims, rng, out_act);
      x = Matrix(batch, dims.front());
      for (double& v : x.data) v = unit(rng);
      target = Matrix(batch, out_dim);
      if (loss.kind == LossKind::GroupedCrossEntropy) {
        for (int r = 0; r < batch; ++r)
          for (int g = 0; g < loss.groups; ++g) {
            const int hot =
                std::uniform_int_distribution<int>(0, loss.classes - 1)(rng);
            target.at(r, g * loss.classes + hot) = 1.0;
          }
      } else {
        for (double& v : target.data) v = unit(rng);
      }
    } while (has_kink_risk(net, loss, x, target));

    const double worst = gradcheck_single(net, loss, x, target);
    report.worst_rel_error = std::max(report.worst_rel_error, worst);
    ++report.trials;
    if (worst >= kTolerance) ++report.failures;
  }
  return report;
}

}  // namespace pocketrl::nn
