#pragma once

#include <string>

#include "model.hpp"

namespace onenet {

// Single-file binary checkpoint: magic + version, a JSON header (dimensions,
// head layout, label inventories, vocab sizes), the vocabularies, then the
// named parameter tensors in declaration order as 64-bit little-endian
// floats. A text manifest (path + ".manifest.txt") lists tensor names,
// shapes and CRC32 checksums.
void save_model(const OneNetModel& model, const std::string& path);
OneNetModel load_model(const std::string& path);

}  // namespace onenet
