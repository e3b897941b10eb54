#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "d3r/dataset.hpp"
#include "d3r/errors.hpp"
#include "d3r/metrics.hpp"
#include "d3r/scoring.hpp"
#include "test_util.hpp"

using namespace d3r;
using namespace d3r::scoring;
using test_util::random_tensor;
using test_util::TempDir;

TEST_CASE("anomaly_map: zero at equality, single-pixel case, score is spatial max") {
    Rng rng(1);
    const auto img = random_tensor<float>({3, 8, 8}, rng);
    const auto zero = anomaly_map(img, img);
    CHECK(zero.image_score == 0.0f);
    for (float v : zero.values) CHECK(v == 0.0f);

    auto recon = img;
    recon.at(1, 3, 4) += 0.9f > 1.0f - recon.at(1, 3, 4) ? -0.9f : 0.9f;
    const float delta = std::abs(recon.at(1, 3, 4) - img.at(1, 3, 4));
    const auto map = anomaly_map(img, recon);
    CHECK(map.at(3, 4) == doctest::Approx(delta / 3.0).epsilon(1e-6));
    CHECK(map.image_score == doctest::Approx(delta / 3.0).epsilon(1e-6));
}

TEST_CASE("anomaly_map matches the elementwise oracle") {
    Rng rng(2);
    const auto a = random_tensor<float>({3, 6, 7}, rng);
    const auto b = random_tensor<float>({3, 6, 7}, rng);
    const auto map = anomaly_map(a, b);
    float max_seen = 0.0f;
    for (long y = 0; y < 6; ++y)
        for (long x = 0; x < 7; ++x) {
            float acc = 0.0f;
            for (long c = 0; c < 3; ++c) acc += std::abs(a.at(c, y, x) - b.at(c, y, x));
            const float expect = acc / 3.0f;
            CHECK(std::abs(map.at(static_cast<int>(y), static_cast<int>(x)) - expect) < 1e-12);
            max_seen = std::max(max_seen, expect);
        }
    CHECK(map.image_score == max_seen);
    CHECK_THROWS_AS(anomaly_map(a, random_tensor<float>({3, 7, 6}, rng)), DataError);
}

TEST_CASE("normalize_maps: affine map to the global range") {
    AnomalyMap m1, m2;
    m1.height = m1.width = 2;
    m1.values = {0.2f, 0.3f, 0.4f, 0.5f};
    m1.image_score = 0.5f;
    m2 = m1;
    m2.values = {0.3f, 0.4f, 0.5f, 0.6f};
    m2.image_score = 0.6f;

    const auto out = normalize_maps({m1, m2});
    // global range [0.2, 0.6]: value 0.4 -> 0.5
    CHECK(out[0].values[2] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(out[0].values[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(out[1].values[3] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(out[1].image_score == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("normalize_maps: already-spanning maps unchanged; constant maps go to zero") {
    AnomalyMap spanning;
    spanning.height = 1;
    spanning.width = 3;
    spanning.values = {0.0f, 0.25f, 1.0f};
    spanning.image_score = 1.0f;
    const auto kept = normalize_maps({spanning});
    for (size_t i = 0; i < 3; ++i) CHECK(std::abs(kept[0].values[i] - spanning.values[i]) < 1e-12);

    AnomalyMap flat;
    flat.height = 1;
    flat.width = 4;
    flat.values = {0.7f, 0.7f, 0.7f, 0.7f};
    flat.image_score = 0.7f;
    const auto zeroed = normalize_maps({flat});
    for (float v : zeroed[0].values) CHECK(v == 0.0f);
}

TEST_CASE("D3RMAP files round-trip bit-exactly and reject truncation") {
    TempDir tmp("maps");
    Rng rng(3);
    AnomalyMap map;
    map.height = 5;
    map.width = 9;
    for (int i = 0; i < 45; ++i) map.values.push_back(static_cast<float>(rng.uniform()));
    map.image_score = *std::max_element(map.values.begin(), map.values.end());

    const auto path = (tmp.path() / "m.d3rmap").string();
    write_map(path, map);
    const auto back = read_map(path);
    CHECK(back.height == 5);
    CHECK(back.width == 9);
    for (size_t i = 0; i < map.values.size(); ++i) CHECK(back.values[i] == map.values[i]);

    std::ofstream trunc(path, std::ios::binary | std::ios::trunc);
    trunc << "D3RMAP";
    trunc.close();
    CHECK_THROWS_AS(read_map(path), DataError);

    const auto png_path = (tmp.path() / "m.png").string();
    write_map_png(png_path, map);
    CHECK(std::ifstream(png_path).good());
}

TEST_CASE("normalization preserves rankings: pixel metrics and matched-grid PRO unchanged") {
    Rng rng(7);
    std::vector<AnomalyMap> maps;
    std::vector<MaskTensor> masks;
    for (int i = 0; i < 3; ++i) {
        AnomalyMap m;
        m.height = m.width = 8;
        for (int j = 0; j < 64; ++j)
            m.values.push_back(static_cast<float>(rng.uniform(0.1, 0.7)));
        m.image_score = *std::max_element(m.values.begin(), m.values.end());
        maps.push_back(m);
        MaskTensor mask({8, 8});
        mask.at(static_cast<long>(i + 1), 2) = 1;
        mask.at(static_cast<long>(i + 1), 3) = 1;
        masks.push_back(mask);
    }
    const auto normalized = normalize_maps(maps);

    const auto [auc_raw, ap_raw] = metrics::pixel_metrics(maps, masks);
    const auto [auc_norm, ap_norm] = metrics::pixel_metrics(normalized, masks);
    CHECK(std::abs(auc_raw - auc_norm) < 1e-12);
    CHECK(std::abs(ap_raw - ap_norm) < 1e-12);

    // matched threshold grids: map raw thresholds through the same affine
    float lo = maps[0].values[0], hi = lo;
    for (const auto& m : maps)
        for (float v : m.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    std::vector<double> norm_grid, raw_grid;
    for (int k = 0; k <= 20; ++k) {
        const double t = 1.0 - k / 20.0;
        norm_grid.push_back(t);
        raw_grid.push_back(static_cast<double>(lo) + t * (static_cast<double>(hi) - lo));
    }
    const auto pro_raw = metrics::pro_curve(maps, masks, raw_grid);
    const auto pro_norm = metrics::pro_curve(normalized, masks, norm_grid);
    for (size_t k = 0; k < pro_raw.fprs.size(); ++k) {
        CHECK(std::abs(pro_raw.fprs[k] - pro_norm.fprs[k]) < 1e-6);
        CHECK(std::abs(pro_raw.pros[k] - pro_norm.pros[k]) < 1e-6);
    }
}

TEST_CASE("score_test_set: one map per test image, labels from defect type") {
    TempDir tmp("score");
    dataset::SyntheticOptions opt;
    opt.seed = 5;
    opt.n_train = 2;
    opt.n_good_test = 3;
    opt.n_defect_test = 2;
    opt.image_side = 32;
    const auto index = dataset::generate_synthetic_category(tmp.str(), "tex", opt);

    auto params = ae::init_params<float>(0);
    const auto samples = score_test_set(params, index);
    REQUIRE(samples.size() == index.test.size());
    int defects = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
        CHECK(samples[i].path == index.test[i].path);
        CHECK(samples[i].label == (index.test[i].defect_type != "good" ? 1 : 0));
        defects += samples[i].label;
        CHECK(samples[i].map.height == 32);
        CHECK(samples[i].map.width == 32);
        CHECK(samples[i].mask.dim(0) == 32);
        float maxv = 0.0f;
        for (float v : samples[i].map.values) {
            CHECK(v >= 0.0f);
            maxv = std::max(maxv, v);
        }
        CHECK(samples[i].map.image_score == maxv);
    }
    CHECK(defects == 2);
}
