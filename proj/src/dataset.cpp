#include "d3r/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "d3r/errors.hpp"
#include "d3r/hash.hpp"
#include "d3r/image.hpp"
#include "d3r/rng.hpp"

namespace fs = std::filesystem;

namespace d3r::dataset {

namespace {

std::vector<std::string> list_pngs(const fs::path& dir) {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".png") out.push_back(e.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> list_subdirs(const fs::path& dir) {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_directory()) out.push_back(e.path().filename().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

DatasetIndex load_mvtec_category(const std::string& root, const std::string& category, int image_side) {
    const fs::path cat_dir = fs::path(root) / category;
    if (!fs::is_directory(cat_dir))
        throw DataError("dataset category directory not found: " + cat_dir.string());

    const fs::path train_dir = cat_dir / "train" / "good";
    if (!fs::is_directory(train_dir))
        throw DataError("missing train/good directory under " + cat_dir.string());

    DatasetIndex index;
    index.category = category;
    index.image_side = image_side;
    index.train = list_pngs(train_dir);
    if (index.train.empty())
        throw DataError("integrity: empty training split in " + train_dir.string());

    const fs::path test_dir = cat_dir / "test";
    if (!fs::is_directory(test_dir))
        throw DataError("missing test directory under " + cat_dir.string());

    for (const std::string& defect_type : list_subdirs(test_dir)) {
        for (const std::string& img_path : list_pngs(test_dir / defect_type)) {
            TestSample s;
            s.path = img_path;
            s.defect_type = defect_type;
            if (defect_type != "good") {
                const std::string stem = fs::path(img_path).stem().string();
                const fs::path mask = cat_dir / "ground_truth" / defect_type / (stem + "_mask.png");
                if (!fs::is_regular_file(mask))
                    throw DataError("integrity: defect image without mask: " + img_path +
                                    " (expected " + mask.string() + ")");
                s.mask_path = mask.string();
            }
            index.test.push_back(std::move(s));
        }
    }
    return index;
}

ImageTensor decode_and_resize(const std::string& path, int image_side) {
    const PngImage png = png_read(path);
    return resize_bilinear(to_image_tensor(png), image_side);
}

MaskTensor load_mask(const std::string& path, int image_side) {
    const PngImage png = png_read(path);
    Tensor<uint8_t> gray({png.height, png.width});
    for (int y = 0; y < png.height; ++y)
        for (int x = 0; x < png.width; ++x) gray.at(y, x) = png.at(y, x, 0);
    gray = resize_nearest(gray, image_side);
    MaskTensor mask({image_side, image_side});
    for (long i = 0; i < gray.numel(); ++i) mask[i] = gray[i] > 127 ? 1 : 0;
    return mask;
}

namespace {

struct Grating {
    double kx, ky;  // wave vector, radians per pixel
    double phase;
    double amplitude;
};

struct TextureModel {
    double base = 0.5;
    std::vector<Grating> gratings;

    double value(double x, double y) const {
        double v = base;
        for (const auto& g : gratings) v += g.amplitude * std::sin(g.kx * x + g.ky * y + g.phase);
        return v;
    }
};

TextureModel make_texture(Rng& rng, int side) {
    TextureModel tex;
    const long n = rng.uniform_int(2, 4);
    double total = 0.0;
    std::vector<double> raw;
    for (long i = 0; i < n; ++i) {
        Grating g;
        const double theta = rng.uniform(0.0, 3.14159265358979323846);
        const double freq = rng.uniform(2.0, 8.0); // cycles per image side
        const double k = 2.0 * 3.14159265358979323846 * freq / side;
        g.kx = k * std::cos(theta);
        g.ky = k * std::sin(theta);
        g.phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        raw.push_back(rng.uniform(0.5, 1.0));
        total += raw.back();
        tex.gratings.push_back(g);
    }
    // Total swing 0.3 keeps the clean texture inside [0.2, 0.8].
    for (size_t i = 0; i < tex.gratings.size(); ++i)
        tex.gratings[i].amplitude = 0.3 * raw[i] / total;
    return tex;
}

ImageTensor render_clean(const TextureModel& tex, int side, Rng& rng, double noise_sigma) {
    ImageTensor img({1, side, side});
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const double v = tex.value(x, y) + rng.normal(0.0, noise_sigma);
            img.at(0, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    return img;
}

struct Region {
    bool ellipse;
    double cx, cy, rx, ry; // center and half-extents, pixels

    bool contains(int x, int y) const {
        const double dx = (x + 0.5 - cx) / rx;
        const double dy = (y + 0.5 - cy) / ry;
        if (ellipse) return dx * dx + dy * dy <= 1.0;
        return std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
    }
};

std::vector<DefectRegion> paint_defects(ImageTensor& img, MaskTensor& mask, const TextureModel& tex,
                                        int side, Rng& rng) {
    std::vector<DefectRegion> painted;
    const long n_regions = rng.uniform_int(1, 3);
    for (long r = 0; r < n_regions; ++r) {
        Region reg;
        reg.ellipse = rng.uniform() < 0.5;
        reg.rx = rng.uniform(0.06, 0.15) * side;
        reg.ry = rng.uniform(0.06, 0.15) * side;
        reg.cx = rng.uniform(reg.rx, side - reg.rx);
        reg.cy = rng.uniform(reg.ry, side - reg.ry);
        const bool scramble = rng.uniform() < 0.5;

        TextureModel scrambled = tex;
        for (auto& g : scrambled.gratings) g.phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        double shift = rng.uniform(0.2, 0.5);

        // Pre-scan region mean so the shift goes toward the side with headroom.
        double mean = 0.0;
        long count = 0;
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x)
                if (reg.contains(x, y)) {
                    mean += img.at(0, y, x);
                    ++count;
                }
        if (count == 0) continue;
        mean /= static_cast<double>(count);
        if (mean > 0.5) shift = -shift;

        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x) {
                if (!reg.contains(x, y)) continue;
                double v;
                if (scramble)
                    v = scrambled.value(x, y) + rng.normal(0.0, 0.02);
                else
                    v = img.at(0, y, x) + shift;
                img.at(0, y, x) = static_cast<float>(std::clamp(v, 0.0, 1.0));
                mask.at(y, x) = 1;
            }
        painted.push_back({reg.ellipse, reg.cx, reg.cy, reg.rx, reg.ry});
    }
    return painted;
}

void write_gray(const std::string& path, const ImageTensor& img) {
    PngImage png;
    png.height = static_cast<int>(img.dim(1));
    png.width = static_cast<int>(img.dim(2));
    png.channels = 1;
    png.pixels.resize(static_cast<size_t>(png.width) * png.height);
    for (long i = 0; i < img.dim(1) * img.dim(2); ++i)
        png.pixels[static_cast<size_t>(i)] = static_cast<uint8_t>(std::lround(img[i] * 255.0f));
    png_write(path, png);
}

std::string numbered(const char* fmt, int i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), fmt, i);
    return buf;
}

} // namespace

DatasetIndex generate_synthetic_category(const std::string& out_root, const std::string& category,
                                         const SyntheticOptions& opt,
                                         std::vector<std::vector<DefectRegion>>* defects_out) {
    if (opt.image_side % 16 != 0)
        throw DataError("image_side must be a multiple of 16, got " + std::to_string(opt.image_side));

    const fs::path cat_dir = fs::path(out_root) / category;
    std::error_code ec;
    fs::create_directories(cat_dir / "train" / "good", ec);
    fs::create_directories(cat_dir / "test" / "good", ec);
    if (opt.n_defect_test > 0) {
        fs::create_directories(cat_dir / "test" / "defect", ec);
        fs::create_directories(cat_dir / "ground_truth" / "defect", ec);
    }
    if (!fs::is_directory(cat_dir / "train" / "good"))
        throw DataError("cannot create dataset directory: " + cat_dir.string());

    const uint64_t cat_hash = fnv1a64(category);
    Rng tex_rng(Rng::key(opt.seed, cat_hash, 0x7e8));
    const TextureModel tex = make_texture(tex_rng, opt.image_side);

    for (int i = 0; i < opt.n_train; ++i) {
        Rng rng(Rng::key(opt.seed, cat_hash, 0x11, static_cast<uint64_t>(i)));
        write_gray((cat_dir / "train" / "good" / numbered("%03d.png", i)).string(),
                   render_clean(tex, opt.image_side, rng, 0.02));
    }
    for (int i = 0; i < opt.n_good_test; ++i) {
        Rng rng(Rng::key(opt.seed, cat_hash, 0x22, static_cast<uint64_t>(i)));
        write_gray((cat_dir / "test" / "good" / numbered("%03d.png", i)).string(),
                   render_clean(tex, opt.image_side, rng, 0.02));
    }
    if (defects_out) defects_out->clear();
    for (int i = 0; i < opt.n_defect_test; ++i) {
        Rng rng(Rng::key(opt.seed, cat_hash, 0x33, static_cast<uint64_t>(i)));
        ImageTensor img = render_clean(tex, opt.image_side, rng, 0.02);
        MaskTensor mask({opt.image_side, opt.image_side});
        auto painted = paint_defects(img, mask, tex, opt.image_side, rng);
        if (defects_out) defects_out->push_back(std::move(painted));
        write_gray((cat_dir / "test" / "defect" / numbered("%03d.png", i)).string(), img);
        png_write((cat_dir / "ground_truth" / "defect" / numbered("%03d_mask.png", i)).string(),
                  mask_to_png(mask));
    }

    return load_mvtec_category(out_root, category, opt.image_side);
}

} // namespace d3r::dataset
