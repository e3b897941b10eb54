#include "d3r/image.hpp"

#include <algorithm>
#include <cmath>

#include "d3r/errors.hpp"

namespace d3r {

ImageTensor resize_bilinear(const ImageTensor& img, int side) {
    const long c = img.dim(0), h = img.dim(1), w = img.dim(2);
    if (h == side && w == side) return img;
    ImageTensor out({c, side, side});
    const double sy = static_cast<double>(h) / side;
    const double sx = static_cast<double>(w) / side;
    for (long ch = 0; ch < c; ++ch) {
        for (long y = 0; y < side; ++y) {
            double fy = (y + 0.5) * sy - 0.5;
            fy = std::clamp(fy, 0.0, static_cast<double>(h - 1));
            const long y0 = static_cast<long>(fy);
            const long y1 = std::min(y0 + 1, h - 1);
            const double wy = fy - y0;
            for (long x = 0; x < side; ++x) {
                double fx = (x + 0.5) * sx - 0.5;
                fx = std::clamp(fx, 0.0, static_cast<double>(w - 1));
                const long x0 = static_cast<long>(fx);
                const long x1 = std::min(x0 + 1, w - 1);
                const double wx = fx - x0;
                const double v = (1 - wy) * ((1 - wx) * img.at(ch, y0, x0) + wx * img.at(ch, y0, x1)) +
                                 wy * ((1 - wx) * img.at(ch, y1, x0) + wx * img.at(ch, y1, x1));
                out.at(ch, y, x) = static_cast<float>(v);
            }
        }
    }
    return out;
}

Tensor<uint8_t> resize_nearest(const Tensor<uint8_t>& img, int side) {
    const long h = img.dim(0), w = img.dim(1);
    if (h == side && w == side) return img;
    Tensor<uint8_t> out({side, side});
    const double sy = static_cast<double>(h) / side;
    const double sx = static_cast<double>(w) / side;
    for (long y = 0; y < side; ++y) {
        const long yy = std::min<long>(static_cast<long>((y + 0.5) * sy), h - 1);
        for (long x = 0; x < side; ++x) {
            const long xx = std::min<long>(static_cast<long>((x + 0.5) * sx), w - 1);
            out.at(y, x) = img.at(yy, xx);
        }
    }
    return out;
}

ImageTensor to_image_tensor(const PngImage& png) {
    ImageTensor out({3, png.height, png.width});
    for (long y = 0; y < png.height; ++y) {
        for (long x = 0; x < png.width; ++x) {
            for (long c = 0; c < 3; ++c) {
                const int src_c = png.channels == 1 ? 0 : static_cast<int>(c);
                out.at(c, y, x) =
                    static_cast<float>(png.at(static_cast<int>(y), static_cast<int>(x), src_c)) / 255.0f;
            }
        }
    }
    return out;
}

PngImage to_png(const ImageTensor& img) {
    PngImage out;
    out.height = static_cast<int>(img.dim(1));
    out.width = static_cast<int>(img.dim(2));
    out.channels = 3;
    out.pixels.resize(static_cast<size_t>(out.width) * out.height * 3);
    size_t i = 0;
    for (long y = 0; y < out.height; ++y)
        for (long x = 0; x < out.width; ++x)
            for (long c = 0; c < 3; ++c) {
                const float v = std::clamp(img.at(c, y, x), 0.0f, 1.0f);
                out.pixels[i++] = static_cast<uint8_t>(std::lround(v * 255.0f));
            }
    return out;
}

PngImage mask_to_png(const MaskTensor& mask) {
    PngImage out;
    out.height = static_cast<int>(mask.dim(0));
    out.width = static_cast<int>(mask.dim(1));
    out.channels = 1;
    out.pixels.resize(static_cast<size_t>(out.width) * out.height);
    for (long i = 0; i < mask.numel(); ++i) out.pixels[static_cast<size_t>(i)] = mask[i] ? 255 : 0;
    return out;
}

bool image_in_unit_range(const ImageTensor& img) {
    for (long i = 0; i < img.numel(); ++i)
        if (img[i] < 0.0f || img[i] > 1.0f) return false;
    return true;
}

} // namespace d3r
