#include "agile/harness/checkpoint.hpp"

#include <fstream>

#include "agile/errors.hpp"
#include "agile/harness/training.hpp"

namespace agile::harness {

using nlohmann::json;

namespace {

std::string hidden_name(nn::HiddenKind k) { return k == nn::HiddenKind::ReLU ? "relu" : "leaky_relu"; }

std::string output_name(nn::OutputActivation a) {
  switch (a) {
    case nn::OutputActivation::Identity:
      return "identity";
    case nn::OutputActivation::Tanh:
      return "tanh";
    case nn::OutputActivation::Sigmoid:
      return "sigmoid";
  }
  return "identity";
}

nn::OutputActivation output_from(const std::string& s) {
  if (s == "tanh") return nn::OutputActivation::Tanh;
  if (s == "sigmoid") return nn::OutputActivation::Sigmoid;
  if (s == "identity") return nn::OutputActivation::Identity;
  throw ConfigError("checkpoint", "unknown output activation '" + s + "'");
}

std::vector<double> flat(const Eigen::MatrixXd& m) { return {m.data(), m.data() + m.size()}; }

}  // namespace

json params_to_json(const nn::MlpParams& p) {
  json layers = json::array();
  for (const auto& l : p.layers) {
    layers.push_back({{"rows", l.weight.rows()}, {"cols", l.weight.cols()}, {"weight", flat(l.weight)},
                      {"bias", flat(l.bias)}});
  }
  return {{"hidden", hidden_name(p.hidden.kind)},
          {"slope", p.hidden.slope},
          {"output", output_name(p.output)},
          {"output_scale", flat(p.output_scale)},
          {"layers", layers}};
}

nn::MlpParams params_from_json(const json& j) {
  nn::MlpParams p;
  p.hidden = j.at("hidden").get<std::string>() == "relu" ? nn::HiddenActivation::relu()
                                                         : nn::HiddenActivation::leaky_relu(j.at("slope").get<double>());
  p.output = output_from(j.at("output").get<std::string>());
  const auto scale = j.at("output_scale").get<std::vector<double>>();
  p.output_scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  for (const auto& lj : j.at("layers")) {
    const auto rows = lj.at("rows").get<Eigen::Index>();
    const auto cols = lj.at("cols").get<Eigen::Index>();
    const auto w = lj.at("weight").get<std::vector<double>>();
    const auto b = lj.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows) {
      throw ShapeError("checkpoint layer has inconsistent sizes");
    }
    p.layers.push_back({Eigen::Map<const Eigen::MatrixXd>(w.data(), rows, cols), Eigen::Map<const Eigen::VectorXd>(b.data(), rows)});
  }
  p.validate();
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const Config& cfg, const hrl::Learner& learner) {
  auto agent_json = [](const td3::Td3Agent& a) {
    return json{{"actor", params_to_json(a.actor)},
                {"critic1", params_to_json(a.critic1)},
                {"critic2", params_to_json(a.critic2)},
                {"actor_target", params_to_json(a.actor_target)},
                {"critic1_target", params_to_json(a.critic1_target)},
                {"critic2_target", params_to_json(a.critic2_target)}};
  };
  json j{{"config", to_json(cfg)}, {"low", agent_json(learner.low)}};
  if (learner.high) j["high"] = agent_json(*learner.high);
  if (learner.adversarial) j["discriminator"] = params_to_json(learner.adversarial->discriminator);

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + tmp.string() + "'");
    out << j.dump();
  }
  std::filesystem::rename(tmp, path);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("checkpoint", "cannot open '" + path.string() + "'");
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("config")) throw ConfigError("checkpoint", "malformed checkpoint file");

  Config cfg = config_from_json(j.at("config"));
  const auto spec = make_env_spec(cfg);
  LoadedCheckpoint ck{cfg, make_learner(cfg, spec)};
  auto load_agent = [](td3::Td3Agent& a, const json& aj) {
    a.actor = params_from_json(aj.at("actor"));
    a.critic1 = params_from_json(aj.at("critic1"));
    a.critic2 = params_from_json(aj.at("critic2"));
    a.actor_target = params_from_json(aj.at("actor_target"));
    a.critic1_target = params_from_json(aj.at("critic1_target"));
    a.critic2_target = params_from_json(aj.at("critic2_target"));
  };
  load_agent(ck.learner.low, j.at("low"));
  if (ck.learner.high) load_agent(*ck.learner.high, j.at("high"));
  if (ck.learner.adversarial) ck.learner.adversarial->discriminator = params_from_json(j.at("discriminator"));
  return ck;
}

}  // namespace agile::harness
