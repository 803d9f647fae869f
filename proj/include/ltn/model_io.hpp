#pragma once

#include <string>

#include "ltn/grounding.hpp"

namespace ltn {

// Versioned JSON model: config, signature, and every grounding with
// shape-tagged arrays. Serialisation is byte-deterministic for a given
// environment; doubles round-trip exactly.
std::string model_to_json(const GroundingEnv& env);
GroundingEnv model_from_json(const std::string& json_text);

void save_model(const GroundingEnv& env, const std::string& path);
GroundingEnv load_model(const std::string& path);

}  // namespace ltn
