#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "dupliq/neural/network.hpp"

namespace dupliq::neural {

/// Writes every parameter (running statistics included) as little-endian
/// doubles to `<stem>.bin` and a manifest of names and shapes, merged with
/// `extra`, to `<stem>.json`.
void save_weights(Network& net, const std::filesystem::path& stem, const nlohmann::json& extra = {});

/// Restores weights saved from a network of the same topology. Returns the
/// manifest.
nlohmann::json load_weights(Network& net, const std::filesystem::path& stem);

}  // namespace dupliq::neural
