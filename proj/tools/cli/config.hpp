#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fracflow/error.hpp"

namespace fracflow::cli {

/// Input or parameter problem the user can fix; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Every recognized key with its default. Null defaults accept any value.
nlohmann::json default_config();

/// Overlays a user document on the defaults. Unknown keys and type
/// mismatches throw UsageError naming the dotted path.
nlohmann::json merge_config(const nlohmann::json& user);
nlohmann::json load_config(const std::optional<std::string>& path);

/// --seed beats the config's "seed".
std::uint64_t root_seed(const nlohmann::json& config, std::optional<std::uint64_t> flag);

}  // namespace fracflow::cli
