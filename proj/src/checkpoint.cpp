#include "pdanet/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include "pdanet/error.hpp"
#include "pdanet/pda_io.hpp"

namespace pdanet::neural {

std::string format_checkpoint(const ModelParams& params) {
  nlohmann::ordered_json j;
  j["format"] = "pdanet-checkpoint";
  j["version"] = kCheckpointVersion;
  const ModelConfig& c = params.config;
  j["config"] = {{"hidden", c.hidden},     {"embed", c.embed},
                 {"max_rows", c.max_rows}, {"max_cols", c.max_cols},
                 {"attention_window", c.attention_window}, {"seed", c.seed}};
  auto tensors = nlohmann::ordered_json::array();
  params.for_each_tensor([&](TensorView<const double> t) {
    nlohmann::ordered_json item;
    item["name"] = t.name;
    item["rows"] = t.rows;
    item["cols"] = t.cols;
    item["data"] = std::vector<double>(t.data, t.data + t.size());
    tensors.push_back(std::move(item));
  });
  j["tensors"] = std::move(tensors);
  return j.dump() + "\n";
}

ModelParams parse_checkpoint(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("checkpoint: ") + ex.what(), 1, 1);
  }
  try {
    if (j.at("format").get<std::string>() != "pdanet-checkpoint") throw ParseError("not a pdanet checkpoint", 1, 1);
    if (j.at("version").get<int>() != kCheckpointVersion) throw ParseError("unsupported checkpoint version", 1, 1);
    const auto& jc = j.at("config");
    ModelConfig c;
    c.hidden = jc.at("hidden").get<int>();
    c.embed = jc.at("embed").get<int>();
    c.max_rows = jc.at("max_rows").get<int>();
    c.max_cols = jc.at("max_cols").get<int>();
    c.attention_window = jc.at("attention_window").get<int>();
    c.seed = jc.at("seed").get<std::uint64_t>();
    ModelParams params = ModelParams::zeros(c);

    const auto& tensors = j.at("tensors");
    std::size_t k = 0;
    params.for_each_tensor([&](TensorView<double> t) {
      if (k >= tensors.size()) throw ShapeError("checkpoint is missing tensor " + std::string(t.name));
      const auto& item = tensors[k++];
      if (item.at("name").get<std::string>() != t.name || item.at("rows").get<Eigen::Index>() != t.rows ||
          item.at("cols").get<Eigen::Index>() != t.cols) {
        throw ShapeError("checkpoint tensor mismatch at " + std::string(t.name));
      }
      const auto data = item.at("data").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(data.size()) != t.size()) {
        throw ShapeError("checkpoint tensor " + std::string(t.name) + " has the wrong element count");
      }
      std::copy(data.begin(), data.end(), t.data);
    });
    if (k != tensors.size()) throw ShapeError("checkpoint has unexpected extra tensors");
    return params;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("checkpoint: ") + ex.what(), 1, 1);
  }
}

void save_checkpoint(const std::string& path, const ModelParams& params) {
  write_text_file(path, format_checkpoint(params));
}

ModelParams load_checkpoint(const std::string& path) { return parse_checkpoint(read_text_file(path)); }

}  // namespace pdanet::neural
