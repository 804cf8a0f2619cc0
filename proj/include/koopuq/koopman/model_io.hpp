#pragma once

#include <string>

#include "koopuq/koopman/model.hpp"

namespace koopuq::koopman {

// Binary model artifact: an 8-byte magic tag, a little-endian uint64 header
// length, a JSON header describing scalars and the matrix manifest, then the
// matrices as row-major little-endian float64 blocks in manifest order.
// See docs/formats.md for the full layout.
void save_model(const std::string& path, const KoopmanModel& model);

// Throws data_error on missing files, bad magic, version or shape mismatch.
KoopmanModel load_model(const std::string& path);

}  // namespace koopuq::koopman
