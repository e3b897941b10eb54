#pragma once

#include <functional>
#include <string>
#include <vector>

#include "d3r/autoencoder.hpp"
#include "d3r/corruption.hpp"
#include "d3r/dataset.hpp"
#include "d3r/losses.hpp"
#include "d3r/metrics.hpp"

namespace d3r::trainer {

struct TrainConfig {
    int epochs = 50;
    int batch_size = 8;
    double lr = 1e-3;
    uint64_t seed = 0;
    losses::LossWeights weights;
    corruption::CorruptionConfig corruption;
    int image_side = 256;
    int checkpoint_every = 0; // epochs; 0 disables periodic checkpoints
    std::vector<int> encoder_channels = {32, 64, 128, 256};

    void validate() const;
};

struct StepRecord {
    int epoch = 0;
    int step = 0; // global step, 1-based
    losses::LossBreakdown loss;
};

struct EpochRecord {
    int epoch = 0;
    losses::LossBreakdown mean_loss;
    double wall_seconds = 0;
};

struct TrainLog {
    std::vector<StepRecord> steps;
    std::vector<EpochRecord> epochs;
    long corruption_regions = 0;
};

struct TrainResult {
    ae::ModelParams<float> params;
    ae::AdamState<float> optim;
    TrainLog log;
};

using EpochCallback = std::function<void(const EpochRecord&, const ae::ModelParams<float>&,
                                         const ae::AdamState<float>&)>;

// Core loop over preloaded images. Per epoch: seeded shuffle, corruption with
// per-image streams keyed by (seed, epoch, original index), train-mode
// forward, loss against the clean targets, backward, Adam. A final partial
// batch is kept when its size is >= 2 and dropped otherwise. Bit-identical
// per seed; resuming at start_epoch with the saved optimizer state matches
// an uninterrupted run exactly.
TrainResult train_on_images(const std::vector<ImageTensor>& images, const TrainConfig& cfg,
                            int start_epoch = 0, const ae::ModelParams<float>* initial = nullptr,
                            const ae::AdamState<float>* initial_optim = nullptr,
                            const EpochCallback& on_epoch = nullptr);

// Loads the train split of `index` and runs train_on_images.
TrainResult train_category(const dataset::DatasetIndex& index, const TrainConfig& cfg,
                           const EpochCallback& on_epoch = nullptr);

struct EvalResult {
    metrics::MetricsReport report;
    std::vector<metrics::RocPoint> image_roc; // empty when undefined
    metrics::ProCurve pro;                    // empty when undefined
    std::vector<scoring::ScoredSample> samples;
    std::vector<scoring::AnomalyMap> normalized_maps;
};

// Full evaluation pass: anomaly maps, image metrics, pooled pixel metrics,
// PRO AUC at max FPR 0.3 on normalized maps, throughput. Metrics undefined
// for the test set come back as NaN plus a warning.
EvalResult evaluate_category(ae::ModelParams<float>& params, const dataset::DatasetIndex& index,
                             int n_thresholds, const std::string& method_name = "");

// CSV with one row per step: epoch,step,mse,fft,ssim,total. Deterministic
// formatting; bit-identical for identical training runs.
void write_train_log_csv(const std::string& path, const TrainLog& log);

} // namespace d3r::trainer
