// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "semimesh/grid.hpp"
#include "semimesh/image.hpp"
#include "semimesh/mesh.hpp"

namespace semimesh::io {

/// "VOXL <R> <C>\n" followed by C * R^3 little-endian float32 values, channel-major,
/// then z, y, x with x fastest. Values are rounded to float32 on write.
void write_vox(const std::filesystem::path& path, const VoxelGrid& grid);
VoxelGrid read_vox(const std::filesystem::path& path);
/// read_vox plus a single-channel and [0,1] range check (the error names the cell).
OccupancyGrid read_occupancy(const std::filesystem::path& path);

/// Wavefront subset: "v x y z [r g b]" and "f i j k" (1-based). Missing colors read as 0.5.
void write_obj(const std::filesystem::path& path, const TexturedMesh& mesh);
TexturedMesh read_obj(const std::filesystem::path& path);

/// Binary P6 (images) / P5 (masks) with maxval 255, round-half-up quantization.
void write_image(const std::filesystem::path& path, const Image& image);
void write_mask(const std::filesystem::path& path, const Mask& mask);
Image read_image(const std::filesystem::path& path);
Mask read_mask(const std::filesystem::path& path);

}  // namespace semimesh::io
