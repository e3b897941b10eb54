#pragma once

#include "d3r/png_io.hpp"
#include "d3r/tensor.hpp"

namespace d3r {

// Bilinear resample of a (C, H, W) float image to (C, side, side).
// Uses pixel-center alignment: src = (dst + 0.5) * scale - 0.5, edge-clamped.
// Output stays in [0,1] because samples are convex combinations.
ImageTensor resize_bilinear(const ImageTensor& img, int side);

// Nearest-neighbor resample of an 8-bit single-channel grid.
Tensor<uint8_t> resize_nearest(const Tensor<uint8_t>& img, int side);

// PngImage (8-bit gray or RGB) -> (3, H, W) float in [0,1]; gray replicated.
ImageTensor to_image_tensor(const PngImage& png);

// (3, H, W) float in [0,1] -> 8-bit RGB, round(v * 255).
PngImage to_png(const ImageTensor& img);

// (H, W) binary mask -> 8-bit gray PNG data (0/255).
PngImage mask_to_png(const MaskTensor& mask);

bool image_in_unit_range(const ImageTensor& img);

} // namespace d3r
