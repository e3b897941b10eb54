#pragma once

#include <string>
#include <vector>

#include "d3r/autoencoder.hpp"
#include "d3r/scoring.hpp"
#include "d3r/tensor.hpp"

namespace d3r::metrics {

struct ScoredSet {
    std::vector<double> scores;
    std::vector<int> labels; // 0/1
};

// Mann-Whitney AUC: fraction of (positive, negative) pairs ranked correctly,
// ties counted 1/2. O(n log n). Throws MetricError on single-class input.
double roc_auc(const ScoredSet& set);

// Step-interpolated average precision over descending-score prefixes, with
// equal scores treated as one group. Throws MetricError without positives.
double average_precision(const ScoredSet& set);

struct RocPoint {
    double threshold, fpr, tpr;
};

// Full ROC curve at every distinct score (prediction = score >= threshold).
std::vector<RocPoint> roc_curve(const ScoredSet& set);

// Pools every pixel of every map/mask pair into one ScoredSet and computes
// (ROC AUC, AP). Sort-based, no pairwise materialization.
std::pair<double, double> pixel_metrics(const std::vector<scoring::AnomalyMap>& maps,
                                        const std::vector<MaskTensor>& masks);

struct Component {
    std::vector<std::pair<int, int>> pixels; // (y, x)
};

// 8-connectivity labeling; components ordered by scanline position of their
// first pixel.
std::vector<Component> connected_components(const MaskTensor& mask);

struct ProCurve {
    std::vector<double> thresholds; // descending
    std::vector<double> fprs;       // nondecreasing
    std::vector<double> pros;
    bool reached_max_fpr = true;
};

// Per-region-overlap curve on normalized maps: for each threshold t
// (prediction = value >= t), FPR pools normal pixels over all images and PRO
// averages |component ∩ prediction| / |component| over all components.
ProCurve pro_curve(const std::vector<scoring::AnomalyMap>& maps, const std::vector<MaskTensor>& masks,
                   const std::vector<double>& thresholds_descending);
ProCurve pro_curve(const std::vector<scoring::AnomalyMap>& maps, const std::vector<MaskTensor>& masks,
                   int n_thresholds);

// Trapezoidal integral of PRO over FPR in [0, max_fpr], normalized by
// max_fpr. A curve that stops short is extended flat; *extended reports it.
double pro_auc(const ProCurve& curve, double max_fpr, bool* extended = nullptr);

// Wall-clock throughput of eval-mode forward passes over preloaded images,
// one warm-up pass excluded.
double throughput_fps(ae::ModelParams<float>& params, const std::vector<ImageTensor>& images);
double throughput_fps(ae::ModelParams<float>& params, const dataset::DatasetIndex& index);

// The six benchmark numbers for one (category, method) pair. Metrics that are
// undefined for the given test set are NaN with a note in `warnings`.
struct MetricsReport {
    std::string category;
    std::string method;
    double img_auc = 0, img_ap = 0, px_auc = 0, px_ap = 0, pro_auc = 0, fps = 0;
    std::vector<std::string> warnings;
};

} // namespace d3r::metrics
