#pragma once

#include <string>

#include "silt/mask.hpp"

namespace silt {

/// Reads a P2 (ASCII) or P5 (binary) PGM file, maxval <= 65535.
/// Intensities are scaled to [0,1] by dividing by maxval. Malformed input
/// is reported with the byte offset where parsing failed.
GrayMap load_pgm(const std::string& path);

/// Writes P5 with maxval 255. Values are clamped to [0,1] then rounded.
void save_pgm(const GrayMap& map, const std::string& path);

/// Writes a mask as P5 with {0,255} payload; load_pgm + binarize(0.5)
/// round-trips it exactly.
void save_pgm(const BinaryMask& mask, const std::string& path);

/// Convenience: load_pgm followed by binarize at 0.5.
BinaryMask load_mask(const std::string& path);

}  // namespace silt
