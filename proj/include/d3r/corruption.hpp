#pragma once

#include <vector>

#include "d3r/rng.hpp"
#include "d3r/tensor.hpp"

namespace d3r::corruption {

// Parameters of the on-the-fly corruption operator applied to clean training
// batches. Defaults: each patch covers 0.25%-4% of the image area, up to
// three patches, applied to half of the images.
struct CorruptionConfig {
    double probability = 0.5;
    int max_regions = 3;
    double side_fraction_lo = 0.05, side_fraction_hi = 0.20;
    double fill_lo = 0.0, fill_hi = 1.0;
    double noise_sigma = 0.2;
    double alpha_lo = 0.3, alpha_hi = 0.9;

    void validate() const;
};

enum class Kind { Occlusion, Noise, Foreign };

// One sampled rectangle, fully inside the image, plus its kind parameters.
struct RegionSpec {
    int x = 0, y = 0, w = 1, h = 1;
    Kind kind = Kind::Occlusion;
    float fill = 0.0f;  // occlusion
    float sigma = 0.0f; // noise
    int donor = -1;     // foreign: batch index, filled in by corrupt_batch
    float alpha = 0.0f; // foreign
};

// With probability (1 - cfg.probability) returns no regions; otherwise K is
// uniform on {1..max_regions} and each region gets uniform size, position,
// kind and kind parameters.
std::vector<RegionSpec> sample_regions(Rng& rng, const CorruptionConfig& cfg, int height, int width);

// Constant-intensity overwrite inside the region; outside is untouched.
ImageTensor apply_occlusion(const ImageTensor& img, const RegionSpec& region, float fill);

// Adds clipped i.i.d. Gaussian noise inside the region.
ImageTensor apply_noise_patch(const ImageTensor& img, const RegionSpec& region, float sigma, Rng& rng);

// Convex blend with the donor's content at the same coordinates.
ImageTensor apply_foreign_patch(const ImageTensor& img, const ImageTensor& donor, const RegionSpec& region,
                                float alpha);

struct CorruptionResult {
    std::vector<ImageTensor> images;
    std::vector<MaskTensor> masks; // union of corrupted regions, per image
    long regions_applied = 0;
};

// Applies sample_regions + per-kind operators per image, one rng stream per
// image. Foreign patches draw a donor from the rest of the batch; with a
// single-image batch the foreign kind degrades to a noise patch.
CorruptionResult corrupt_batch(const std::vector<ImageTensor>& batch, const CorruptionConfig& cfg,
                               std::vector<Rng>& rngs);

// Convenience wrapper deriving one stream per image from a single seed stream.
CorruptionResult corrupt_batch(const std::vector<ImageTensor>& batch, const CorruptionConfig& cfg, Rng& rng);

} // namespace d3r::corruption
