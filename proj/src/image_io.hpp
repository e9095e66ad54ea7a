#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glcm.hpp"
#include "image.hpp"

namespace radsynth {

// Whole-file helpers. Writes go through a temp file in the same directory
// followed by a rename, so readers never observe a partial file.
std::vector<char> read_file(const std::string& path);
void atomic_write_file(const std::string& path, const void* data, std::size_t size);
void atomic_write_file(const std::string& path, const std::string& text);

std::uint64_t fnv1a64(const void* data, std::size_t size);

// PGM (P2 ASCII / P5 binary), maxval up to 65535.
GrayImage read_image(const std::string& path);
void write_image(const GrayImage& img, const std::string& path, bool binary = true);

// Quantized images are PGM with maxval = g - 1.
QuantizedImage read_qimage(const std::string& path);
void write_qimage(const QuantizedImage& img, const std::string& path, bool binary = true);

// Feature maps: magic "FMAP", version u32, height u32, width u32, then
// height*width little-endian float32, row-major.
FeatureMap read_map(const std::string& path);
void write_map(const FeatureMap& map, const std::string& path);

// Masks: PBM (P1 ASCII / P4 packed), or an FMAP file holding only 0.0/1.0.
RoiMask read_mask(const std::string& path);
void write_mask(const RoiMask& mask, const std::string& path, bool binary = true);

}  // namespace radsynth
