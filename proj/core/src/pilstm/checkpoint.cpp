#include "teleop/pilstm/checkpoint.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "teleop/error.hpp"

namespace teleop::pilstm {
namespace {

using nlohmann::json;

json minmax_json(const MinMax& m) { return json{{"min", m.min}, {"max", m.max}}; }

MinMax minmax_from(const json& j) { return {j.at("min").get<double>(), j.at("max").get<double>()}; }

json config_json(const TrainConfig& c) {
  return json{{"learning_rate", c.learning_rate},
              {"grad_clip_threshold", c.grad_clip_threshold},
              {"physics_weight", c.physics_weight},
              {"batch_size", c.batch_size},
              {"epochs", c.epochs},
              {"patience", c.patience},
              {"seed", c.seed},
              {"validation_fraction", c.validation_fraction},
              {"dt", c.dt},
              {"alpha", c.alpha},
              {"beta", c.beta}};
}

TrainConfig config_from(const json& j) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.grad_clip_threshold = j.at("grad_clip_threshold").get<double>();
  c.physics_weight = j.at("physics_weight").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.patience = j.at("patience").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.validation_fraction = j.at("validation_fraction").get<double>();
  c.dt = j.at("dt").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  return c;
}

}  // namespace

std::string checkpoint_to_json(const Model& model) {
  const Topology& top = model.params.topology();
  json j;
  j["format"] = "teleop-pilstm";
  j["version"] = kCheckpointVersion;
  j["variable"] = std::string(var_name(model.variable));
  j["topology"] = {{"input_len", top.input_len},   {"feature_dim", top.feature_dim},
                   {"dense_units", top.dense_units}, {"lstm_depth", top.lstm_depth},
                   {"lstm_units", top.lstm_units}};
  json tensors = json::array();
  const auto& flat = model.params.flat();
  for (const auto& t : model.params.tensors()) {
    std::vector<double> data(flat.data() + t.offset, flat.data() + t.offset + t.rows * t.cols);
    tensors.push_back({{"name", t.name}, {"shape", {t.rows, t.cols}}, {"data", data}});
  }
  j["tensors"] = std::move(tensors);
  json features = json::array();
  for (const auto& f : model.scaler.features) features.push_back(minmax_json(f));
  j["scaler"] = {{"features", features}, {"target", minmax_json(model.scaler.target)}};
  j["train_config"] = config_json(model.config);
  j["metrics"] = model.metrics;
  return j.dump(1);
}

Model checkpoint_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "teleop-pilstm") {
      throw ParseError("not a predictor checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw ParseError("unsupported checkpoint version " + std::to_string(version));
    }
    const json& jt = j.at("topology");
    Topology top;
    top.input_len = jt.at("input_len").get<std::size_t>();
    top.feature_dim = jt.at("feature_dim").get<std::size_t>();
    top.dense_units = jt.at("dense_units").get<std::size_t>();
    top.lstm_depth = jt.at("lstm_depth").get<std::size_t>();
    top.lstm_units = jt.at("lstm_units").get<std::size_t>();
    if (top.feature_dim != 4) throw TopologyError("checkpoint feature_dim must be 4");

    Model model{parse_var(j.at("variable").get<std::string>()), Params(top), {}, {}, {}};
    const auto expected = model.params.tensors();
    const json& tensors = j.at("tensors");
    if (tensors.size() != expected.size()) throw TopologyError("checkpoint tensor count mismatch");
    auto& flat = model.params.flat();
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const json& t = tensors[i];
      const auto& e = expected[i];
      const auto shape = t.at("shape").get<std::vector<std::size_t>>();
      if (t.at("name").get<std::string>() != e.name || shape.size() != 2 || shape[0] != e.rows ||
          shape[1] != e.cols) {
        throw TopologyError("checkpoint tensor '" + e.name + "' has unexpected name or shape");
      }
      const auto data = t.at("data").get<std::vector<double>>();
      if (data.size() != e.rows * e.cols) {
        throw TopologyError("checkpoint tensor '" + e.name + "' has wrong element count");
      }
      std::copy(data.begin(), data.end(), flat.data() + e.offset);
    }
    if (!flat.allFinite()) throw NumericError("checkpoint contains non-finite weights");

    const json& js = j.at("scaler");
    const json& jf = js.at("features");
    if (jf.size() != 4) throw TopologyError("checkpoint scaler must have 4 features");
    for (std::size_t k = 0; k < 4; ++k) model.scaler.features[k] = minmax_from(jf[k]);
    model.scaler.target = minmax_from(js.at("target"));
    model.config = config_from(j.at("train_config"));
    if (j.contains("metrics")) model.metrics = j.at("metrics").get<std::map<std::string, double>>();
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << checkpoint_to_json(model) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

void save_training_log(const TrainResult& result, CouplingVar variable,
                       const std::filesystem::path& path) {
  json epochs = json::array();
  for (const auto& e : result.log) {
    epochs.push_back({{"epoch", e.epoch},
                      {"data_loss", e.data_loss},
                      {"physics_loss", e.physics_loss},
                      {"val_loss", e.val_loss},
                      {"val_residual", e.val_residual}});
  }
  json j{{"variable", std::string(var_name(variable))},
         {"best_epoch", result.best_epoch},
         {"best_val_loss", result.best_val_loss},
         {"epochs", epochs}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(1) << '\n';
}

}  // namespace teleop::pilstm
