#include "dupliq/neural/weights.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "dupliq/common.hpp"

namespace dupliq::neural {

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

}  // namespace

void save_weights(Network& net, const std::filesystem::path& stem, const nlohmann::json& extra) {
  nlohmann::json manifest = extra.is_object() ? extra : nlohmann::json::object();
  manifest["format"] = "dupliq-weights";
  manifest["version"] = 1;
  manifest["byte_order"] = "little";
  nlohmann::json params = nlohmann::json::array();

  const auto bin = with_suffix(stem, ".bin");
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw IoError("cannot write " + bin.string());
  std::size_t index = 0;
  for (const Parameter* p : net.parameters()) {
    params.push_back({{"name", std::to_string(index++) + ":" + p->name}, {"shape", p->value.shape}, {"trainable", p->trainable}});
    for (double v : p->value.data) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      unsigned char bytes[8];
      for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
      out.write(reinterpret_cast<const char*>(bytes), 8);
    }
  }
  if (!out) throw IoError("failed writing " + bin.string());
  manifest["parameters"] = params;

  const auto json_path = with_suffix(stem, ".json");
  std::ofstream js(json_path, std::ios::binary);
  if (!js) throw IoError("cannot write " + json_path.string());
  js << manifest.dump(2) << '\n';
  if (!js) throw IoError("failed writing " + json_path.string());
}

nlohmann::json load_weights(Network& net, const std::filesystem::path& stem) {
  const auto json_path = with_suffix(stem, ".json");
  std::ifstream js(json_path, std::ios::binary);
  if (!js) throw IoError("cannot open " + json_path.string());
  nlohmann::json manifest;
  try {
    js >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(json_path.string() + ": " + e.what());
  }
  if (manifest.value("format", "") != "dupliq-weights") throw ContractError(json_path.string() + ": not a weights manifest");
  const auto params = net.parameters();
  const auto& listed = manifest.at("parameters");
  if (listed.size() != params.size()) {
    throw ContractError("weights list " + std::to_string(listed.size()) + " tensors, network has " +
                        std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (listed[i].at("shape").get<std::vector<std::size_t>>() != params[i]->value.shape) {
      throw ContractError("weight tensor " + std::to_string(i) + " has shape " +
                          listed[i].at("shape").dump() + ", network expects " + shape_string(params[i]->value.shape));
    }
  }

  const auto bin = with_suffix(stem, ".bin");
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw IoError("cannot open " + bin.string());
  unsigned char bytes[8];
  for (Parameter* p : params) {
    for (double& v : p->value.data) {
      if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw IoError(bin.string() + " is truncated");
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
      v = std::bit_cast<double>(bits);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ContractError(bin.string() + " has trailing data");
  return manifest;
}

}  // namespace dupliq::neural
