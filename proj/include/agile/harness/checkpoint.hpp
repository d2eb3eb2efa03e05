#pragma once

#include <filesystem>

#include <json.hpp>

#include "agile/harness/config.hpp"
#include "agile/hrl/hrl.hpp"

namespace agile::harness {

nlohmann::json params_to_json(const nn::MlpParams& p);
nn::MlpParams params_from_json(const nlohmann::json& j);

// Stores the config and every network (policies, critics, targets,
// discriminator). Optimiser moments and replay buffers are not saved.
void save_checkpoint(const std::filesystem::path& path, const Config& cfg, const hrl::Learner& learner);

struct LoadedCheckpoint {
  Config cfg;
  hrl::Learner learner;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace agile::harness
