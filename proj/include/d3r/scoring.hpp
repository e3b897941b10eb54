#pragma once

#include <string>
#include <vector>

#include "d3r/autoencoder.hpp"
#include "d3r/dataset.hpp"
#include "d3r/tensor.hpp"

namespace d3r::scoring {

// Per-pixel anomaly score field. image_score is always the spatial maximum.
struct AnomalyMap {
    int height = 0, width = 0;
    std::vector<float> values;
    float image_score = 0.0f;

    float at(int y, int x) const { return values[static_cast<size_t>(y) * width + x]; }
};

// Mean over channels of |input - reconstruction| per pixel.
AnomalyMap anomaly_map(const ImageTensor& input, const ImageTensor& recon);

struct ScoredSample {
    AnomalyMap map;
    int label = 0; // 1 iff defect_type != "good"
    MaskTensor mask;
    std::string path;
    std::string defect_type;
    ImageTensor input; // retained for panel rendering
    ImageTensor recon;
};

// Uncorrupted eval-mode pass over the whole test split, in index order.
std::vector<ScoredSample> score_test_set(ae::ModelParams<float>& params, const dataset::DatasetIndex& index);

// Affine min-max normalization to [0,1] using the global range over all maps;
// degenerates to all-zero when the range is empty. Monotone, so rankings
// (and rank metrics under matched thresholds) are preserved.
std::vector<AnomalyMap> normalize_maps(const std::vector<AnomalyMap>& maps);

// Raw float32 grid with a small header: magic "D3RMAP", u32 height, u32 width,
// then height*width little-endian floats.
void write_map(const std::string& path, const AnomalyMap& map);
AnomalyMap read_map(const std::string& path);

// 8-bit grayscale export, round(value * 255) clamped.
void write_map_png(const std::string& path, const AnomalyMap& map);

} // namespace d3r::scoring
