#include "d3r/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "d3r/errors.hpp"
#include "d3r/image.hpp"

namespace d3r::scoring {

AnomalyMap anomaly_map(const ImageTensor& input, const ImageTensor& recon) {
    if (!input.same_shape(recon)) throw DataError("anomaly_map: shape mismatch");
    const long c = input.dim(0), h = input.dim(1), w = input.dim(2);
    AnomalyMap map;
    map.height = static_cast<int>(h);
    map.width = static_cast<int>(w);
    map.values.assign(static_cast<size_t>(h * w), 0.0f);
    float maxv = 0.0f;
    for (long y = 0; y < h; ++y)
        for (long x = 0; x < w; ++x) {
            float acc = 0.0f;
            for (long ch = 0; ch < c; ++ch) acc += std::abs(input.at(ch, y, x) - recon.at(ch, y, x));
            const float v = acc / static_cast<float>(c);
            map.values[static_cast<size_t>(y * w + x)] = v;
            maxv = std::max(maxv, v);
        }
    map.image_score = maxv;
    return map;
}

std::vector<ScoredSample> score_test_set(ae::ModelParams<float>& params, const dataset::DatasetIndex& index) {
    std::vector<ScoredSample> out;
    out.reserve(index.test.size());
    for (const auto& sample : index.test) {
        ScoredSample s;
        s.path = sample.path;
        s.defect_type = sample.defect_type;
        s.label = sample.defect_type != "good" ? 1 : 0;
        s.input = dataset::decode_and_resize(sample.path, index.image_side);
        Tensor<float> batch({1, s.input.dim(0), s.input.dim(1), s.input.dim(2)});
        std::copy(s.input.data(), s.input.data() + s.input.numel(), batch.data());
        const Tensor<float> recon_b = ae::forward(params, batch, ae::Mode::Eval);
        s.recon = ImageTensor({s.input.dim(0), s.input.dim(1), s.input.dim(2)});
        std::copy(recon_b.data(), recon_b.data() + recon_b.numel(), s.recon.data());
        s.map = anomaly_map(s.input, s.recon);
        if (s.label) {
            s.mask = dataset::load_mask(sample.mask_path, index.image_side);
        } else {
            s.mask = MaskTensor({index.image_side, index.image_side});
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<AnomalyMap> normalize_maps(const std::vector<AnomalyMap>& maps) {
    if (maps.empty()) throw DataError("normalize_maps: empty map list");
    float lo = std::numeric_limits<float>::max();
    float hi = std::numeric_limits<float>::lowest();
    for (const auto& m : maps)
        for (float v : m.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    std::vector<AnomalyMap> out = maps;
    const float span = hi - lo;
    for (auto& m : out) {
        float maxv = 0.0f;
        for (auto& v : m.values) {
            v = span > 0.0f ? (v - lo) / span : 0.0f;
            maxv = std::max(maxv, v);
        }
        m.image_score = maxv;
    }
    return out;
}

namespace {
constexpr char kMagic[6] = {'D', '3', 'R', 'M', 'A', 'P'};
}

void write_map(const std::string& path, const AnomalyMap& map) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write map file: " + path);
    out.write(kMagic, sizeof(kMagic));
    const uint32_t h = static_cast<uint32_t>(map.height), w = static_cast<uint32_t>(map.width);
    out.write(reinterpret_cast<const char*>(&h), 4);
    out.write(reinterpret_cast<const char*>(&w), 4);
    out.write(reinterpret_cast<const char*>(map.values.data()),
              static_cast<std::streamsize>(map.values.size() * sizeof(float)));
    if (!out) throw DataError("write failed: " + path);
}

AnomalyMap read_map(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read map file: " + path);
    char magic[6];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw DataError("not a D3RMAP file: " + path);
    uint32_t h = 0, w = 0;
    in.read(reinterpret_cast<char*>(&h), 4);
    in.read(reinterpret_cast<char*>(&w), 4);
    AnomalyMap map;
    map.height = static_cast<int>(h);
    map.width = static_cast<int>(w);
    map.values.resize(static_cast<size_t>(h) * w);
    in.read(reinterpret_cast<char*>(map.values.data()),
            static_cast<std::streamsize>(map.values.size() * sizeof(float)));
    if (!in) throw DataError("truncated D3RMAP file: " + path);
    map.image_score = map.values.empty() ? 0.0f : *std::max_element(map.values.begin(), map.values.end());
    return map;
}

void write_map_png(const std::string& path, const AnomalyMap& map) {
    PngImage png;
    png.height = map.height;
    png.width = map.width;
    png.channels = 1;
    png.pixels.resize(map.values.size());
    for (size_t i = 0; i < map.values.size(); ++i) {
        const float v = std::clamp(map.values[i], 0.0f, 1.0f);
        png.pixels[i] = static_cast<uint8_t>(std::lround(v * 255.0f));
    }
    png_write(path, png);
}

} // namespace d3r::scoring
