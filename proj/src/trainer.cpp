#include "d3r/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "d3r/errors.hpp"

namespace d3r::trainer {

namespace {

constexpr uint64_t kShuffleTag = 0x5f; // stream tags for key derivation
constexpr uint64_t kCorruptTag = 0xc0;

Tensor<float> stack_batch(const std::vector<ImageTensor>& images, const std::vector<size_t>& ids,
                          size_t begin, size_t end) {
    const auto& first = images[ids[begin]];
    const long c = first.dim(0), h = first.dim(1), w = first.dim(2);
    Tensor<float> batch({static_cast<long>(end - begin), c, h, w});
    for (size_t i = begin; i < end; ++i) {
        const auto& img = images[ids[i]];
        std::copy(img.data(), img.data() + img.numel(), batch.data() + static_cast<long>(i - begin) * c * h * w);
    }
    return batch;
}

Tensor<float> stack_images(const std::vector<ImageTensor>& images) {
    std::vector<size_t> ids(images.size());
    std::iota(ids.begin(), ids.end(), 0);
    return stack_batch(images, ids, 0, images.size());
}

// Fisher-Yates with our own stream so the permutation is portable.
void seeded_shuffle(std::vector<size_t>& ids, Rng& rng) {
    for (size_t i = ids.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<long>(i) - 1));
        std::swap(ids[i - 1], ids[j]);
    }
}

} // namespace

void TrainConfig::validate() const {
    if (epochs < 1) throw DataError("train config: epochs must be >= 1");
    if (batch_size < 2) throw DataError("train config: batch_size must be >= 2");
    if (!(lr > 0)) throw DataError("train config: lr must be positive");
    if (image_side % 16 != 0) throw DataError("train config: image_side must be a multiple of 16");
    weights.validate();
    corruption.validate();
}

TrainResult train_on_images(const std::vector<ImageTensor>& images, const TrainConfig& cfg, int start_epoch,
                            const ae::ModelParams<float>* initial, const ae::AdamState<float>* initial_optim,
                            const EpochCallback& on_epoch) {
    cfg.validate();
    if (images.size() < 2) throw DataError("training needs at least 2 images");

    TrainResult res;
    res.params = initial ? *initial : ae::init_params<float>(cfg.seed, 3, cfg.encoder_channels);
    res.optim = initial_optim ? *initial_optim : ae::init_adam(res.params);

    const size_t n = images.size();
    int global_step = static_cast<int>(res.optim.step);

    for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
        const auto epoch_start = std::chrono::steady_clock::now();
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        Rng shuffle_rng(Rng::key(cfg.seed, kShuffleTag, static_cast<uint64_t>(epoch)));
        seeded_shuffle(order, shuffle_rng);

        losses::LossBreakdown epoch_sum;
        long epoch_steps = 0;

        for (size_t begin = 0; begin < n; begin += static_cast<size_t>(cfg.batch_size)) {
            const size_t end = std::min(n, begin + static_cast<size_t>(cfg.batch_size));
            if (end - begin < 2) break; // drop degenerate partial batch

            std::vector<ImageTensor> clean;
            std::vector<Rng> streams;
            clean.reserve(end - begin);
            for (size_t i = begin; i < end; ++i) {
                clean.push_back(images[order[i]]);
                streams.emplace_back(Rng::key(cfg.seed, kCorruptTag, static_cast<uint64_t>(epoch),
                                              static_cast<uint64_t>(order[i])));
            }
            auto corrupted = corruption::corrupt_batch(clean, cfg.corruption, streams);
            res.log.corruption_regions += corrupted.regions_applied;

            const Tensor<float> input = stack_images(corrupted.images);
            const Tensor<float> target = stack_images(clean);

            ae::ForwardCache<float> cache;
            const Tensor<float> recon = ae::forward(res.params, input, ae::Mode::Train, &cache);
            auto [breakdown, grad] = losses::total_loss(recon, target, cfg.weights);
            const auto grads = ae::backward(res.params, cache, grad);
            ae::adam_step(res.params, grads, res.optim, cfg.lr);

            ++global_step;
            ++epoch_steps;
            epoch_sum.mse += breakdown.mse;
            epoch_sum.fft += breakdown.fft;
            epoch_sum.ssim += breakdown.ssim;
            epoch_sum.total += breakdown.total;
            res.log.steps.push_back({epoch, global_step, breakdown});
        }

        EpochRecord er;
        er.epoch = epoch;
        if (epoch_steps > 0) {
            er.mean_loss.mse = epoch_sum.mse / static_cast<double>(epoch_steps);
            er.mean_loss.fft = epoch_sum.fft / static_cast<double>(epoch_steps);
            er.mean_loss.ssim = epoch_sum.ssim / static_cast<double>(epoch_steps);
            er.mean_loss.total = epoch_sum.total / static_cast<double>(epoch_steps);
        }
        er.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
        res.log.epochs.push_back(er);
        if (on_epoch) on_epoch(er, res.params, res.optim);
    }
    return res;
}

TrainResult train_category(const dataset::DatasetIndex& index, const TrainConfig& cfg,
                           const EpochCallback& on_epoch) {
    if (index.train.size() < 2) throw DataError("train split too small: " + index.category);
    std::vector<ImageTensor> images;
    images.reserve(index.train.size());
    for (const auto& path : index.train) images.push_back(dataset::decode_and_resize(path, cfg.image_side));
    return train_on_images(images, cfg, 0, nullptr, nullptr, on_epoch);
}

EvalResult evaluate_category(ae::ModelParams<float>& params, const dataset::DatasetIndex& index,
                             int n_thresholds, const std::string& method_name) {
    EvalResult res;
    res.report.category = index.category;
    res.report.method = method_name;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    res.samples = scoring::score_test_set(params, index);
    if (res.samples.empty()) throw DataError("evaluate: empty test split in " + index.category);

    metrics::ScoredSet image_set;
    std::vector<scoring::AnomalyMap> maps;
    std::vector<MaskTensor> masks;
    std::vector<ImageTensor> inputs;
    for (const auto& s : res.samples) {
        image_set.scores.push_back(s.map.image_score);
        image_set.labels.push_back(s.label);
        maps.push_back(s.map);
        masks.push_back(s.mask);
        inputs.push_back(s.input);
    }

    try {
        res.report.img_auc = metrics::roc_auc(image_set);
        res.report.img_ap = metrics::average_precision(image_set);
        res.image_roc = metrics::roc_curve(image_set);
    } catch (const MetricError& e) {
        res.report.img_auc = nan;
        res.report.img_ap = nan;
        res.report.warnings.push_back(std::string("image metrics undefined: ") + e.what());
    }

    try {
        const auto [px_auc, px_ap] = metrics::pixel_metrics(maps, masks);
        res.report.px_auc = px_auc;
        res.report.px_ap = px_ap;
    } catch (const MetricError& e) {
        res.report.px_auc = nan;
        res.report.px_ap = nan;
        res.report.warnings.push_back(std::string("pixel metrics undefined: ") + e.what());
    }

    res.normalized_maps = scoring::normalize_maps(maps);
    try {
        res.pro = metrics::pro_curve(res.normalized_maps, masks, n_thresholds);
        bool extended = false;
        res.report.pro_auc = metrics::pro_auc(res.pro, 0.3, &extended);
        if (extended)
            res.report.warnings.push_back("pro curve did not reach max FPR 0.3; extended flat");
    } catch (const MetricError& e) {
        res.report.pro_auc = nan;
        res.report.warnings.push_back(std::string("pro metrics undefined: ") + e.what());
    }

    res.report.fps = metrics::throughput_fps(params, inputs);
    return res;
}

void write_train_log_csv(const std::string& path, const TrainLog& log) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write train log: " + path);
    out << "epoch,step,mse,fft,ssim,total\n";
    char buf[192];
    for (const auto& s : log.steps) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.9g,%.9g,%.9g,%.9g\n", s.epoch, s.step, s.loss.mse,
                      s.loss.fft, s.loss.ssim, s.loss.total);
        out << buf;
    }
    if (!out) throw DataError("train log write failed: " + path);
}

} // namespace d3r::trainer
