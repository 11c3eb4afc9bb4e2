#pragma once

#include <filesystem>
#include <string>

#include "auxlearn/model.hpp"

namespace auxlearn {

/// Plain-text model checkpoint, format "auxlearn-mlp 1":
///
///   auxlearn-mlp 1
///   activation tanh
///   layer_dims 2 32 3
///   weights 0 2 32
///   <one line per row, values space-separated>
///   biases 0 32
///   <one line of values>
///   ...
///   end
///
/// Values are written with shortest-round-trip formatting, so
/// save -> load reproduces every parameter bit-exactly.
std::string save_model_text(const MlpModel& model);

/// Parses a checkpoint produced by save_model_text. Throws ParseError on a
/// malformed file, unknown version, inconsistent shapes, or non-finite
/// parameters.
MlpModel load_model_text(const std::string& text);

void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

}  // namespace auxlearn
