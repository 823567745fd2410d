#include "pocketrl/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "pocketrl/errors.hpp"

namespace pocketrl::nn {
namespace {

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian; big-endian hosts unsupported");

constexpr char kMagic[4] = {'N', 'L', 'R', 'L'};

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

void write_f32(std::ostream& out, float v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 4))
    throw IoError("truncated model file: " + path);
  return v;
}

float read_f32(std::istream& in, const std::string& path) {
  float v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 4))
    throw IoError("truncated model file: " + path);
  return v;
}

}  // namespace

void save_model(const std::string& path, const ModelFile& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);

  out.write(kMagic, 4);
  write_u32(out, kModelFormatVersion);
  write_u32(out, static_cast<std::uint32_t>(model.networks.size()));
  for (const MLP& net : model.networks) {
    write_u32(out, static_cast<std::uint32_t>(net.layers.size()));
    for (const Layer& layer : net.layers) {
      write_u32(out, static_cast<std::uint32_t>(layer.weights.cols));
      write_u32(out, static_cast<std::uint32_t>(layer.weights.rows));
      for (double w : layer.weights.data) write_f32(out, static_cast<float>(w));
      for (double b : layer.bias) write_f32(out, static_cast<float>(b));
    }
  }
  if (!model.table.empty()) {
    write_u32(out, static_cast<std::uint32_t>(model.table.size()));
    for (const TableRecord& rec : model.table) {
      write_u32(out, rec.index);
      for (float v : rec.values) write_f32(out, v);
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);

  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("not a model file (bad magic): " + path);
  const std::uint32_t version = read_u32(in, path);
  if (version != kModelFormatVersion)
    throw IoError("unsupported model format version " +
                  std::to_string(version) + ": " + path);

  ModelFile model;
  const std::uint32_t net_count = read_u32(in, path);
  model.networks.resize(net_count);
  for (MLP& net : model.networks) {
    const std::uint32_t layer_count = read_u32(in, path);
    if (layer_count == 0) throw IoError("network with zero layers: " + path);
    net.layers.resize(layer_count);
    for (Layer& layer : net.layers) {
      const std::uint32_t in_dim = read_u32(in, path);
      const std::uint32_t out_dim = read_u32(in, path);
      if (in_dim == 0 || out_dim == 0 || in_dim > (1u << 20) ||
          out_dim > (1u << 20))
        throw IoError("implausible layer dimensions: " + path);
      layer.weights = Matrix(static_cast<int>(out_dim), static_cast<int>(in_dim));
      for (double& w : layer.weights.data)
        w = static_cast<double>(read_f32(in, path));
      layer.bias.resize(out_dim);
      for (double& b : layer.bias) b = static_cast<double>(read_f32(in, path));
    }
  }

  // Optional trailing tabular payload.
  std::uint32_t rec_count = 0;
  if (in.read(reinterpret_cast<char*>(&rec_count), 4)) {
    model.table.resize(rec_count);
    std::uint32_t prev = 0;
    bool first = true;
    for (TableRecord& rec : model.table) {
      rec.index = read_u32(in, path);
      if (!first && rec.index <= prev)
        throw IoError("tabular records not sorted: " + path);
      first = false;
      prev = rec.index;
      for (float& v : rec.values) v = read_f32(in, path);
    }
    char extra = 0;
    if (in.read(&extra, 1))
      throw IoError("trailing bytes after tabular records: " + path);
  }
  return model;
}

}  // namespace pocketrl::nn
