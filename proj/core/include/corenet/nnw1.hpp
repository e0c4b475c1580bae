#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "corenet/network.hpp"

namespace corenet {

// NNW1 container: 8-byte little-endian manifest length, JSON manifest, then a
// little-endian binary payload. Dense layers are row-major float64; sparse
// layers store per row a uint64 count followed by (uint64 column, float64
// value) pairs. The manifest checksum is the CRC-32 of the payload.
// Low-rank layers are materialized as dense on encode.
std::string encode_nnw1(const Network& net);
Network decode_nnw1(std::string_view bytes);

void save_weights(const Network& net, const std::filesystem::path& path);
Network load_weights(const std::filesystem::path& path);

}  // namespace corenet
