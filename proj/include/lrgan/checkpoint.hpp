#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "lrgan/tensor_nn.hpp"

namespace lrgan {

/// A network and, optionally, the Adam state that trains it.
struct Checkpoint {
  Net net;
  std::optional<Adam> optimizer;
};

/// JSON document: spec (widths, activations, seed), per-layer parameter arrays in
/// column-major order and the optimizer moments. Identical state gives identical bytes.
std::string checkpoint_to_string(const Net& net, const Adam* optimizer = nullptr);
Checkpoint checkpoint_from_string(const std::string& text);

void write_checkpoint(const std::filesystem::path& path, const Net& net,
                      const Adam* optimizer = nullptr);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace lrgan
