// Self-describing model checkpoint: encoder config, vocabulary, and every
// named parameter tensor with its shape. Loading rejects shape mismatches.
#pragma once

#include <string>

#include "spanproto/encoder.hpp"

namespace spanproto {

void save_checkpoint(const Model& model, const std::string& path);

Model load_checkpoint(const std::string& path);

}  // namespace spanproto
