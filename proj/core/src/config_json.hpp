#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mfchaos/config.hpp"

namespace mfchaos::detail {

using Json = nlohmann::json;

/// Throws ConfigError naming the first key of `object` not in `allowed`.
void reject_unknown_keys(const Json& object, const std::vector<std::string>& allowed,
                         const std::string& where);

SimConfig config_from_json(const Json& j);
Json config_to_json_value(const SimConfig& config);

}  // namespace mfchaos::detail
