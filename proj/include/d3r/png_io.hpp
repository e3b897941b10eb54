#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace d3r {

// Decoded 8-bit raster, interleaved rows. channels is 1 (gray) or 3 (RGB).
struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<uint8_t> pixels;

    uint8_t at(int y, int x, int c) const {
        return pixels[static_cast<size_t>((y * width + x) * channels + c)];
    }
};

// Reads a PNG, normalizing palette/alpha/16-bit inputs down to 8-bit gray or RGB.
// Throws DataError with the path on any decode failure.
PngImage png_read(const std::string& path);

// Writes an 8-bit gray (channels=1) or RGB (channels=3) PNG. Output is
// byte-deterministic for identical input.
void png_write(const std::string& path, const PngImage& img);

} // namespace d3r
