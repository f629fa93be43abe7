#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "riseg/raster.hpp"
#include "riseg/scene.hpp"

namespace riseg::io {

namespace fs = std::filesystem;

nlohmann::json scene_to_json(const SceneState& scene);
/// Throws InvalidConfig on malformed documents.
SceneState scene_from_json(const nlohmann::json& j);

void write_scene(const fs::path& path, const SceneState& scene);
SceneState read_scene(const fs::path& path);

/// Binary PGM (P5). Labels use maxval 65535 (big-endian samples), the
/// uncertainty map maxval 255.
void write_pgm(const fs::path& path, const LabelMask& mask);
void write_pgm(const fs::path& path, const UncertaintyMap& map);
LabelMask read_label_pgm(const fs::path& path);
UncertaintyMap read_uncertainty_pgm(const fs::path& path);

/// "RISFLOW1" magic, uint32 H, uint32 W, then H*W interleaved (du, dv)
/// float32 pairs in row-major order. Everything little-endian.
void write_flow(const fs::path& path, const FlowField& flow);
FlowField read_flow(const fs::path& path);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace riseg::io
