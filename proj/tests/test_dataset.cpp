#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <functional>

#include "d3r/dataset.hpp"
#include "d3r/errors.hpp"
#include "d3r/hash.hpp"
#include "d3r/image.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace d3r;
using test_util::TempDir;

namespace {

void write_png_rgb(const std::string& path, int h, int w,
                   const std::function<std::array<uint8_t, 3>(int, int)>& pixel) {
    PngImage img;
    img.height = h;
    img.width = w;
    img.channels = 3;
    img.pixels.resize(static_cast<size_t>(h) * w * 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const auto p = pixel(y, x);
            for (int c = 0; c < 3; ++c) img.pixels[(static_cast<size_t>(y) * w + x) * 3 + c] = p[c];
        }
    png_write(path, img);
}

void write_png_gray(const std::string& path, int h, int w,
                    const std::function<uint8_t(int, int)>& pixel) {
    PngImage img;
    img.height = h;
    img.width = w;
    img.channels = 1;
    img.pixels.resize(static_cast<size_t>(h) * w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.pixels[static_cast<size_t>(y) * w + x] = pixel(y, x);
    png_write(path, img);
}

uint64_t tree_hash(const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& f : files) {
        const auto rel = fs::relative(f, root).string();
        h = fnv1a64(rel.data(), rel.size(), h);
        const uint64_t fh = fnv1a64_file(f.string());
        h = fnv1a64(&fh, sizeof(fh), h);
    }
    return h;
}

} // namespace

TEST_CASE("decode_and_resize: shape, range and gray replication") {
    TempDir tmp("decode");
    const auto rgb = (tmp.path() / "rgb.png").string();
    write_png_rgb(rgb, 512, 512, [](int y, int x) {
        return std::array<uint8_t, 3>{static_cast<uint8_t>(x % 256), static_cast<uint8_t>(y % 256), 128};
    });
    const auto img = dataset::decode_and_resize(rgb, 256);
    CHECK(img.shape() == std::vector<long>{3, 256, 256});
    CHECK(image_in_unit_range(img));

    const auto gray = (tmp.path() / "gray.png").string();
    write_png_gray(gray, 64, 64, [](int y, int x) { return static_cast<uint8_t>((x + y) % 256); });
    const auto gimg = dataset::decode_and_resize(gray, 64);
    CHECK(gimg.shape() == std::vector<long>{3, 64, 64});
    for (long y = 0; y < 64; ++y)
        for (long x = 0; x < 64; ++x) {
            CHECK(gimg.at(0, y, x) == gimg.at(1, y, x));
            CHECK(gimg.at(1, y, x) == gimg.at(2, y, x));
        }
}

TEST_CASE("decode_and_resize: all-white 8-bit input maps to exactly 1.0") {
    TempDir tmp("white");
    const auto path = (tmp.path() / "white.png").string();
    write_png_gray(path, 32, 32, [](int, int) { return 255; });
    const auto img = dataset::decode_and_resize(path, 32);
    for (long i = 0; i < img.numel(); ++i) CHECK(img[i] == 1.0f);
}

TEST_CASE("decode_and_resize: undecodable file raises with path context") {
    TempDir tmp("bad");
    const auto path = (tmp.path() / "junk.png").string();
    std::ofstream(path) << "not a png";
    try {
        dataset::decode_and_resize(path, 32);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("junk.png") != std::string::npos);
    }
}

TEST_CASE("bilinear upscale of a 2x2 checkerboard: hand-computed kernel values") {
    TempDir tmp("bilinear");
    const auto path = (tmp.path() / "cb.png").string();
    write_png_gray(path, 2, 2, [](int y, int x) { return (y + x) % 2 ? 255 : 0; });
    const auto img = dataset::decode_and_resize(path, 4);
    // src coords (d + 0.5)/2 - 0.5 -> {0 (clamped), 0.25, 0.75, 1 (clamped)}
    CHECK(img.at(0, 0, 0) == doctest::Approx(0.0));
    CHECK(img.at(0, 0, 3) == doctest::Approx(1.0));
    CHECK(img.at(0, 3, 0) == doctest::Approx(1.0));
    CHECK(img.at(0, 3, 3) == doctest::Approx(0.0));
    CHECK(img.at(0, 1, 1) == doctest::Approx(0.375));
    CHECK(img.at(0, 1, 2) == doctest::Approx(0.625));
    CHECK(img.at(0, 2, 1) == doctest::Approx(0.625));
    CHECK(img.at(0, 2, 2) == doctest::Approx(0.375));
    for (long y = 1; y <= 2; ++y)
        for (long x = 1; x <= 2; ++x) {
            CHECK(img.at(0, y, x) > 0.0f);
            CHECK(img.at(0, y, x) < 1.0f);
        }
}

TEST_CASE("load_mask: zero mask, aligned NN downscale, threshold at 127") {
    TempDir tmp("mask");
    const auto zero = (tmp.path() / "zero.png").string();
    write_png_gray(zero, 16, 16, [](int, int) { return 0; });
    const auto zmask = dataset::load_mask(zero, 8);
    CHECK(zmask.shape() == std::vector<long>{8, 8});
    for (long i = 0; i < zmask.numel(); ++i) CHECK(zmask[i] == 0);

    // 10x10 white block at (4,6) in a 20x20 mask, NN-downscaled by 2 -> 5x5 block
    const auto block = (tmp.path() / "block.png").string();
    write_png_gray(block, 20, 20,
                   [](int y, int x) { return (y >= 4 && y < 14 && x >= 6 && x < 16) ? 255 : 0; });
    const auto bmask = dataset::load_mask(block, 10);
    long count = 0;
    for (long i = 0; i < bmask.numel(); ++i) count += bmask[i];
    CHECK(count == 25);

    const auto gray = (tmp.path() / "gray128.png").string();
    write_png_gray(gray, 8, 8, [](int, int) { return 128; });
    const auto gmask = dataset::load_mask(gray, 8);
    for (long i = 0; i < gmask.numel(); ++i) CHECK(gmask[i] == 1);

    const auto gray127 = (tmp.path() / "gray127.png").string();
    write_png_gray(gray127, 8, 8, [](int, int) { return 127; });
    const auto gmask127 = dataset::load_mask(gray127, 8);
    for (long i = 0; i < gmask127.numel(); ++i) CHECK(gmask127[i] == 0);
}

TEST_CASE("load_mvtec_category enumerates deterministically in lexicographic order") {
    TempDir tmp("layout");
    dataset::SyntheticOptions opt;
    opt.n_train = 8;
    opt.n_good_test = 3;
    opt.n_defect_test = 3;
    opt.image_side = 32;
    dataset::generate_synthetic_category(tmp.str(), "texa", opt);

    const auto index = dataset::load_mvtec_category(tmp.str(), "texa", 32);
    CHECK(index.train.size() == 8);
    CHECK(index.test.size() == 6);
    CHECK(std::is_sorted(index.train.begin(), index.train.end()));
    for (size_t i = 1; i < index.test.size(); ++i)
        CHECK(index.test[i - 1].path < index.test[i].path);
    for (const auto& s : index.test) {
        if (s.defect_type == "good")
            CHECK(s.mask_path.empty());
        else
            CHECK(fs::is_regular_file(s.mask_path));
    }

    const auto again = dataset::load_mvtec_category(tmp.str(), "texa", 32);
    CHECK(again.train == index.train);
    REQUIRE(again.test.size() == index.test.size());
    for (size_t i = 0; i < index.test.size(); ++i) {
        CHECK(again.test[i].path == index.test[i].path);
        CHECK(again.test[i].defect_type == index.test[i].defect_type);
        CHECK(again.test[i].mask_path == index.test[i].mask_path);
    }
}

TEST_CASE("loader errors: missing directory, empty train split, defect without mask") {
    TempDir tmp("errors");
    CHECK_THROWS_AS(dataset::load_mvtec_category(tmp.str(), "nope", 32), DataError);

    fs::create_directories(tmp.path() / "empty" / "train" / "good");
    fs::create_directories(tmp.path() / "empty" / "test" / "good");
    CHECK_THROWS_AS(dataset::load_mvtec_category(tmp.str(), "empty", 32), DataError);

    fs::create_directories(tmp.path() / "nomask" / "train" / "good");
    fs::create_directories(tmp.path() / "nomask" / "test" / "crack");
    write_png_gray((tmp.path() / "nomask" / "train" / "good" / "000.png").string(), 16, 16,
                   [](int, int) { return 100; });
    write_png_gray((tmp.path() / "nomask" / "test" / "crack" / "000.png").string(), 16, 16,
                   [](int, int) { return 100; });
    CHECK_THROWS_AS(dataset::load_mvtec_category(tmp.str(), "nomask", 16), DataError);
}

TEST_CASE("synthetic generator is byte-deterministic per seed") {
    TempDir a("gen_a"), b("gen_b");
    dataset::SyntheticOptions opt;
    opt.seed = 7;
    opt.n_train = 4;
    opt.n_good_test = 2;
    opt.n_defect_test = 2;
    opt.image_side = 32;
    dataset::generate_synthetic_category(a.str(), "tex", opt);
    dataset::generate_synthetic_category(b.str(), "tex", opt);
    CHECK(tree_hash(a.path() / "tex") == tree_hash(b.path() / "tex"));

    opt.seed = 8;
    TempDir c("gen_c");
    dataset::generate_synthetic_category(c.str(), "tex", opt);
    CHECK(tree_hash(a.path() / "tex") != tree_hash(c.path() / "tex"));
}

TEST_CASE("synthetic generator with no defect samples writes no masks") {
    TempDir tmp("nodefect");
    dataset::SyntheticOptions opt;
    opt.n_train = 3;
    opt.n_good_test = 2;
    opt.n_defect_test = 0;
    opt.image_side = 32;
    const auto index = dataset::generate_synthetic_category(tmp.str(), "tex", opt);
    CHECK(index.test.size() == 2);
    CHECK(!fs::exists(tmp.path() / "tex" / "ground_truth"));
}

TEST_CASE("defect masks equal the rasterization oracle of the painted regions") {
    TempDir tmp("oracle");
    dataset::SyntheticOptions opt;
    opt.seed = 3;
    opt.n_train = 2;
    opt.n_good_test = 1;
    opt.n_defect_test = 5;
    opt.image_side = 48;
    std::vector<std::vector<dataset::DefectRegion>> defects;
    const auto index = dataset::generate_synthetic_category(tmp.str(), "tex", opt, &defects);
    REQUIRE(defects.size() == 5);

    size_t di = 0;
    for (const auto& sample : index.test) {
        if (sample.defect_type == "good") continue;
        const auto mask = dataset::load_mask(sample.mask_path, opt.image_side);
        const auto& regions = defects[di++];
        long oracle_count = 0;
        for (int y = 0; y < opt.image_side; ++y)
            for (int x = 0; x < opt.image_side; ++x) {
                bool inside = false;
                for (const auto& r : regions) {
                    const double dx = (x + 0.5 - r.cx) / r.rx;
                    const double dy = (y + 0.5 - r.cy) / r.ry;
                    inside |= r.ellipse ? (dx * dx + dy * dy <= 1.0)
                                        : (std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0);
                }
                if (inside) ++oracle_count;
                CHECK(mask.at(y, x) == (inside ? 1 : 0));
            }
        long mask_count = 0;
        for (long i = 0; i < mask.numel(); ++i) mask_count += mask[i];
        CHECK(mask_count == oracle_count);
        CHECK(mask_count > 0);
    }
}

TEST_CASE("generated images satisfy the unit-range and shape invariants") {
    TempDir tmp("roundtrip");
    dataset::SyntheticOptions opt;
    opt.seed = 11;
    opt.n_train = 3;
    opt.n_good_test = 2;
    opt.n_defect_test = 2;
    opt.image_side = 32;
    const auto index = dataset::generate_synthetic_category(tmp.str(), "tex", opt);
    for (const auto& path : index.train) {
        const auto img = dataset::decode_and_resize(path, 32);
        CHECK(img.shape() == std::vector<long>{3, 32, 32});
        CHECK(image_in_unit_range(img));
    }
    for (const auto& s : index.test) {
        const auto img = dataset::decode_and_resize(s.path, 32);
        CHECK(image_in_unit_range(img));
        if (!s.mask_path.empty()) {
            const auto mask = dataset::load_mask(s.mask_path, 32);
            CHECK(mask.dim(0) == img.dim(1));
            CHECK(mask.dim(1) == img.dim(2));
            for (long i = 0; i < mask.numel(); ++i) CHECK((mask[i] == 0 || mask[i] == 1));
        }
    }
}
