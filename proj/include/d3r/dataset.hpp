#pragma once

#include <optional>
#include <string>
#include <vector>

#include "d3r/tensor.hpp"

namespace d3r::dataset {

struct TestSample {
    std::string path;
    std::string defect_type; // "good" means normal, no mask on disk
    std::string mask_path;   // empty for good samples
};

struct DatasetIndex {
    std::string category;
    std::vector<std::string> train; // paths, lexicographic
    std::vector<TestSample> test;   // lexicographic by (defect_type, path)
    int image_side = 0;
};

// Enumerates an MVTec-layout category:
//   <root>/<category>/train/good/*.png
//   <root>/<category>/test/<defect_type>/*.png
//   <root>/<category>/ground_truth/<defect_type>/<stem>_mask.png
// Paths are sorted in lexicographic byte order. A defective test image
// without its mask is a fatal integrity error.
DatasetIndex load_mvtec_category(const std::string& root, const std::string& category, int image_side);

// Decodes an 8-bit gray/RGB PNG, replicates gray to 3 channels, scales to
// [0,1] and resizes bilinearly to image_side.
ImageTensor decode_and_resize(const std::string& path, int image_side);

// Decodes a mask, resizes with nearest-neighbor and binarizes at >127.
MaskTensor load_mask(const std::string& path, int image_side);

struct SyntheticOptions {
    uint64_t seed = 0;
    int n_train = 64;
    int n_good_test = 16;
    int n_defect_test = 16;
    int image_side = 64;
};

// Geometry of one painted defect region, for mask verification.
struct DefectRegion {
    bool ellipse = false;
    double cx = 0, cy = 0, rx = 0, ry = 0;
};

// Writes one MVTec-layout category of seeded sinusoidal-grating textures.
// Defective test images get 1-3 elliptical/rectangular regions, either
// intensity-shifted or phase-scrambled, with exact masks alongside. The
// whole tree is byte-deterministic for a given (seed, category). When given,
// defects_out receives the painted geometry per defective test image.
DatasetIndex generate_synthetic_category(const std::string& out_root, const std::string& category,
                                         const SyntheticOptions& opt,
                                         std::vector<std::vector<DefectRegion>>* defects_out = nullptr);

} // namespace d3r::dataset
