#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pocketrl/errors.hpp"
#include "pocketrl/gradcheck.hpp"
#include "pocketrl/model_io.hpp"
#include "pocketrl/nn.hpp"

using namespace pocketrl;
using namespace pocketrl::nn;

namespace {

MLP tiny_net() {
  // W1 = [[1,2],[3,4]], b1 = [0.5,-1]; W2 = [[1,-1]], b2 = [0.25]
  MLP net;
  net.layers.resize(2);
  net.layers[0].weights = Matrix(2, 2);
  net.layers[0].weights.data = {1, 2, 3, 4};
  net.layers[0].bias = {0.5, -1};
  net.layers[1].weights = Matrix(1, 2);
  net.layers[1].weights.data = {1, -1};
  net.layers[1].bias = {0.25};
  return net;
}

Matrix row(std::initializer_list<double> values) {
  Matrix m(1, static_cast<int>(values.size()));
  std::copy(values.begin(), values.end(), m.data.begin());
  return m;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("forward: identity, constant-bias, and a hand-computed net") {
  // single identity layer passes non-negative input through
  MLP id;
  id.layers.resize(1);
  id.layers[0].weights = Matrix(3, 3);
  id.layers[0].weights.data = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  id.layers[0].bias = {0, 0, 0};
  const Matrix x = row({0.5, 2.0, 0.0});
  CHECK(forward(id, x) == x);

  // zero weights: output equals the bias, whatever the input
  MLP constant;
  constant.layers.resize(1);
  constant.layers[0].weights = Matrix(2, 3);
  constant.layers[0].bias = {4.0, -2.5};
  CHECK(forward(constant, x) == row({4.0, -2.5}));
  CHECK(forward(constant, row({9, -9, 1})) == row({4.0, -2.5}));

  // two-layer pinned value: z1 = [3.5, 6], relu, out = 3.5 - 6 + 0.25
  CHECK(forward(tiny_net(), row({1, 1})).data[0] == doctest::Approx(-2.25));
}

TEST_CASE("forward validates shapes and never mutates the network") {
  const MLP net = tiny_net();
  const MLP copy = net;
  CHECK_THROWS_AS(forward(net, row({1, 2, 3})), std::invalid_argument);
  forward(net, row({1, 1}));
  CHECK(net == copy);
}

TEST_CASE("losses: zero at match, non-negative everywhere") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-3, 3);
  for (int i = 0; i < 200; ++i) {
    Matrix pred(2, 6);
    Matrix target(2, 6);
    for (double& v : pred.data) v = dist(rng);
    for (double& v : target.data) v = dist(rng);
    CHECK(loss_value(LossSpec::mse(), pred, target) >= 0.0);
    CHECK(loss_value(LossSpec::huber(1.0), pred, target) >= 0.0);
    CHECK(loss_value(LossSpec::mse(), pred, pred) == 0.0);
    CHECK(loss_value(LossSpec::huber(1.0), pred, pred) == 0.0);
  }

  // grouped cross-entropy: saturated one-hot logits drive the loss to 0
  Matrix logits(1, 12);
  Matrix onehot(1, 12);
  for (int g = 0; g < 2; ++g) {
    logits.at(0, g * 6 + g) = 30.0;
    onehot.at(0, g * 6 + g) = 1.0;
  }
  const LossSpec ce = LossSpec::grouped_ce(2, 6);
  CHECK(loss_value(ce, logits, onehot) < 1e-10);
  CHECK(loss_value(ce, Matrix(1, 12), onehot) > 0.0);
}

TEST_CASE("backward: zero gradients at an exact MSE match") {
  const MLP net = tiny_net();
  const Matrix x = row({1, 1});
  ForwardCache cache;
  const Matrix pred = forward(net, x, &cache);
  const BackwardResult bw = backward(net, cache, LossSpec::mse(), pred);
  CHECK(bw.loss == 0.0);
  for (const Layer& g : bw.grads.layers) {
    for (double w : g.weights.data) CHECK(w == 0.0);
    for (double b : g.bias) CHECK(b == 0.0);
  }
}

TEST_CASE("gradcheck: analytic gradients match finite differences") {
  const GradcheckReport report = gradcheck(12, 20250809);
  CHECK(report.trials == 12);
  CHECK(report.failures == 0);
  CHECK(report.worst_rel_error < 1e-4);
}

TEST_CASE("backward_into equals backward and reuses buffers") {
  std::mt19937_64 rng(6);
  const MLP net = he_init({8, 16, 4}, rng);
  Matrix x(3, 8);
  Matrix target(3, 4);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (double& v : x.data) v = dist(rng);
  for (double& v : target.data) v = dist(rng);

  ForwardCache cache;
  forward(net, x, &cache);
  const BackwardResult reference = backward(net, cache, LossSpec::mse(), target);

  Gradients grads;
  BackwardScratch scratch;
  for (int repeat = 0; repeat < 3; ++repeat) {
    const double loss =
        backward_into(net, cache, LossSpec::mse(), target, grads, scratch);
    CHECK(loss == reference.loss);
    for (std::size_t l = 0; l < grads.layers.size(); ++l) {
      CHECK(grads.layers[l].weights == reference.grads.layers[l].weights);
      CHECK(grads.layers[l].bias == reference.grads.layers[l].bias);
    }
  }
}

TEST_CASE("adam: no-op on zero gradients, descent on constant gradients") {
  std::mt19937_64 rng(7);
  MLP net = he_init({4, 4}, rng);
  const MLP before = net;
  AdamState state = make_adam(net);

  Gradients zero;
  zero.layers.resize(1);
  zero.layers[0].weights = Matrix(4, 4);
  zero.layers[0].bias.assign(4, 0.0);
  adam_step(net, zero, state);
  CHECK(state.t == 1);
  CHECK(net == before);

  Gradients grad = zero;
  for (double& g : grad.layers[0].weights.data) g = 0.7;
  const double w0 = net.layers[0].weights.data[0];
  for (int i = 0; i < 50; ++i) adam_step(net, grad, state);
  CHECK(net.layers[0].weights.data[0] < w0);  // moves against the gradient
}

TEST_CASE("adam: first step from fresh state moves by about lr") {
  for (double g : {0.3, -0.8, 2.0}) {
    MLP net;
    net.layers.resize(1);
    net.layers[0].weights = Matrix(1, 1);
    net.layers[0].weights.data = {1.0};
    net.layers[0].bias = {0.0};
    AdamState state = make_adam(net, {.lr = 0.01});
    Gradients grads;
    grads.layers.resize(1);
    grads.layers[0].weights = Matrix(1, 1);
    grads.layers[0].weights.data = {g};
    grads.layers[0].bias = {0.0};
    adam_step(net, grads, state);
    const double delta = net.layers[0].weights.data[0] - 1.0;
    // m-hat / sqrt(v-hat) = sign(g) exactly, up to eps
    CHECK(delta == doctest::Approx(-0.01 * (g > 0 ? 1.0 : -1.0)).epsilon(1e-4));
  }
}

TEST_CASE("he_init: reproducible, zero biases, He variance") {
  std::mt19937_64 a(42);
  std::mt19937_64 b(42);
  const MLP na = he_init({64, 256, 10}, a);
  const MLP nb = he_init({64, 256, 10}, b);
  CHECK(na == nb);

  for (const Layer& l : na.layers)
    for (double bias : l.bias) CHECK(bias == 0.0);

  const auto& w = na.layers[0].weights.data;  // fan_in 64, 16384 samples
  double sum = 0.0;
  double sq = 0.0;
  for (double v : w) {
    sum += v;
    sq += v * v;
  }
  const double mean = sum / static_cast<double>(w.size());
  const double var = sq / static_cast<double>(w.size()) - mean * mean;
  const double expected = 2.0 / 64.0;
  CHECK(std::abs(var - expected) / expected < 0.2);
}

TEST_CASE("training determinism: same seed and data, identical parameters") {
  auto run = [] {
    std::mt19937_64 rng(77);
    MLP net = he_init({6, 12, 3}, rng);
    AdamState adam = make_adam(net);
    std::uniform_real_distribution<double> dist(-1, 1);
    Matrix x(4, 6);
    Matrix target(4, 3);
    for (double& v : x.data) v = dist(rng);
    for (double& v : target.data) v = dist(rng);
    for (int i = 0; i < 50; ++i) {
      ForwardCache cache;
      forward(net, x, &cache);
      const BackwardResult bw = backward(net, cache, LossSpec::mse(), target);
      adam_step(net, bw.grads, adam);
    }
    return net;
  };
  CHECK(run() == run());
}

TEST_CASE("softplus output keeps predictions positive") {
  std::mt19937_64 rng(9);
  const MLP net = he_init({8, 16, 1}, rng, OutputActivation::Softplus);
  std::uniform_real_distribution<double> dist(-2, 2);
  for (int i = 0; i < 100; ++i) {
    Matrix x(1, 8);
    for (double& v : x.data) v = dist(rng);
    CHECK(forward(net, x).data[0] > 0.0);
  }
}

TEST_CASE("model files: float32 round-trip, idempotent bytes, errors") {
  const std::string dir = "nn_io_test_out";
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/model.nlrl";

  std::mt19937_64 rng(11);
  ModelFile file;
  file.networks.push_back(he_init({5, 7, 3}, rng));
  file.networks.push_back(he_init({4, 4}, rng));
  save_model(path, file);

  const ModelFile loaded = load_model(path);
  REQUIRE(loaded.networks.size() == 2);
  for (std::size_t n = 0; n < 2; ++n) {
    REQUIRE(loaded.networks[n].layers.size() ==
            file.networks[n].layers.size());
    for (std::size_t l = 0; l < loaded.networks[n].layers.size(); ++l) {
      const auto& got = loaded.networks[n].layers[l];
      const auto& want = file.networks[n].layers[l];
      REQUIRE(got.weights.rows == want.weights.rows);
      REQUIRE(got.weights.cols == want.weights.cols);
      for (std::size_t i = 0; i < got.weights.data.size(); ++i)
        CHECK(got.weights.data[i] ==
              static_cast<double>(static_cast<float>(want.weights.data[i])));
    }
  }

  // saving the quantized load reproduces the file byte for byte
  const std::string path2 = dir + "/model2.nlrl";
  save_model(path2, loaded);
  CHECK(read_bytes(path) == read_bytes(path2));

  // tabular payload round-trip, sorted order enforced
  ModelFile tab;
  tab.table.push_back({7u, {}});
  tab.table.push_back({9u, {}});
  tab.table[0].values[3] = 1.5f;
  const std::string path3 = dir + "/table.nlrl";
  save_model(path3, tab);
  const ModelFile tab_loaded = load_model(path3);
  CHECK(tab_loaded.networks.empty());
  REQUIRE(tab_loaded.table.size() == 2);
  CHECK(tab_loaded.table[0].index == 7);
  CHECK(tab_loaded.table[0].values[3] == 1.5f);

  // errors: missing file, bad magic, truncation
  CHECK_THROWS_AS(load_model(dir + "/absent.nlrl"), IoError);
  {
    std::ofstream bad(dir + "/bad.nlrl", std::ios::binary);
    bad << "XXXX";
  }
  CHECK_THROWS_AS(load_model(dir + "/bad.nlrl"), IoError);
  {
    const std::string bytes = read_bytes(path);
    std::ofstream trunc(dir + "/trunc.nlrl", std::ios::binary);
    trunc.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(load_model(dir + "/trunc.nlrl"), IoError);
}
