#include "d3r/corruption.hpp"

#include <algorithm>
#include <cmath>

#include "d3r/errors.hpp"

namespace d3r::corruption {

void CorruptionConfig::validate() const {
    if (probability < 0 || probability > 1) throw DataError("corruption: probability must be in [0,1]");
    if (max_regions < 1) throw DataError("corruption: max_regions must be >= 1");
    if (!(side_fraction_lo > 0 && side_fraction_lo <= side_fraction_hi && side_fraction_hi <= 1))
        throw DataError("corruption: side fraction range must satisfy 0 < lo <= hi <= 1");
    if (!(fill_lo >= 0 && fill_lo <= fill_hi && fill_hi <= 1))
        throw DataError("corruption: fill range must satisfy 0 <= lo <= hi <= 1");
    if (!(noise_sigma > 0)) throw DataError("corruption: noise_sigma must be positive");
    if (!(alpha_lo > 0 && alpha_lo <= alpha_hi && alpha_hi <= 1))
        throw DataError("corruption: alpha range must satisfy 0 < lo <= hi <= 1");
}

std::vector<RegionSpec> sample_regions(Rng& rng, const CorruptionConfig& cfg, int height, int width) {
    std::vector<RegionSpec> regions;
    if (rng.uniform() >= cfg.probability) return regions;
    const long k = rng.uniform_int(1, cfg.max_regions);
    for (long i = 0; i < k; ++i) {
        RegionSpec r;
        r.w = static_cast<int>(std::clamp<long>(
            std::llround(rng.uniform(cfg.side_fraction_lo * width, cfg.side_fraction_hi * width)), 1, width));
        r.h = static_cast<int>(std::clamp<long>(
            std::llround(rng.uniform(cfg.side_fraction_lo * height, cfg.side_fraction_hi * height)), 1, height));
        r.x = static_cast<int>(rng.uniform_int(0, width - r.w));
        r.y = static_cast<int>(rng.uniform_int(0, height - r.h));
        switch (rng.uniform_int(0, 2)) {
            case 0:
                r.kind = Kind::Occlusion;
                r.fill = static_cast<float>(rng.uniform(cfg.fill_lo, cfg.fill_hi));
                break;
            case 1:
                r.kind = Kind::Noise;
                r.sigma = static_cast<float>(cfg.noise_sigma);
                break;
            default:
                r.kind = Kind::Foreign;
                r.alpha = static_cast<float>(rng.uniform(cfg.alpha_lo, cfg.alpha_hi));
                break;
        }
        regions.push_back(r);
    }
    return regions;
}

ImageTensor apply_occlusion(const ImageTensor& img, const RegionSpec& region, float fill) {
    ImageTensor out = img;
    const long c = img.dim(0);
    for (long ch = 0; ch < c; ++ch)
        for (int y = region.y; y < region.y + region.h; ++y)
            for (int x = region.x; x < region.x + region.w; ++x) out.at(ch, y, x) = fill;
    return out;
}

ImageTensor apply_noise_patch(const ImageTensor& img, const RegionSpec& region, float sigma, Rng& rng) {
    ImageTensor out = img;
    const long c = img.dim(0);
    for (long ch = 0; ch < c; ++ch)
        for (int y = region.y; y < region.y + region.h; ++y)
            for (int x = region.x; x < region.x + region.w; ++x) {
                const double v = out.at(ch, y, x) + rng.normal(0.0, sigma);
                out.at(ch, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
    return out;
}

ImageTensor apply_foreign_patch(const ImageTensor& img, const ImageTensor& donor, const RegionSpec& region,
                                float alpha) {
    ImageTensor out = img;
    const long c = img.dim(0);
    for (long ch = 0; ch < c; ++ch)
        for (int y = region.y; y < region.y + region.h; ++y)
            for (int x = region.x; x < region.x + region.w; ++x)
                out.at(ch, y, x) = (1.0f - alpha) * img.at(ch, y, x) + alpha * donor.at(ch, y, x);
    return out;
}

CorruptionResult corrupt_batch(const std::vector<ImageTensor>& batch, const CorruptionConfig& cfg,
                               std::vector<Rng>& rngs) {
    cfg.validate();
    if (rngs.size() != batch.size()) throw DataError("corrupt_batch: one rng stream per image required");
    CorruptionResult res;
    res.images.reserve(batch.size());
    res.masks.reserve(batch.size());
    const int n = static_cast<int>(batch.size());
    for (int i = 0; i < n; ++i) {
        Rng& rng = rngs[static_cast<size_t>(i)];
        const int h = static_cast<int>(batch[static_cast<size_t>(i)].dim(1));
        const int w = static_cast<int>(batch[static_cast<size_t>(i)].dim(2));
        auto regions = sample_regions(rng, cfg, h, w);
        ImageTensor img = batch[static_cast<size_t>(i)];
        MaskTensor mask({h, w});
        for (auto& r : regions) {
            if (r.kind == Kind::Foreign) {
                if (n < 2) {
                    r.kind = Kind::Noise;
                    r.sigma = static_cast<float>(cfg.noise_sigma);
                } else {
                    long d = rng.uniform_int(0, n - 2);
                    if (d >= i) ++d; // skip self
                    r.donor = static_cast<int>(d);
                }
            }
            switch (r.kind) {
                case Kind::Occlusion:
                    img = apply_occlusion(img, r, r.fill);
                    break;
                case Kind::Noise:
                    img = apply_noise_patch(img, r, r.sigma, rng);
                    break;
                case Kind::Foreign:
                    img = apply_foreign_patch(img, batch[static_cast<size_t>(r.donor)], r, r.alpha);
                    break;
            }
            for (int y = r.y; y < r.y + r.h; ++y)
                for (int x = r.x; x < r.x + r.w; ++x) mask.at(y, x) = 1;
            ++res.regions_applied;
        }
        res.images.push_back(std::move(img));
        res.masks.push_back(std::move(mask));
    }
    return res;
}

CorruptionResult corrupt_batch(const std::vector<ImageTensor>& batch, const CorruptionConfig& cfg, Rng& rng) {
    std::vector<Rng> rngs;
    rngs.reserve(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) rngs.emplace_back(rng.next_u64());
    return corrupt_batch(batch, cfg, rngs);
}

} // namespace d3r::corruption
