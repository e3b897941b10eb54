#include "d3r/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "d3r/errors.hpp"

namespace d3r::metrics {

namespace {

void check_set(const ScoredSet& set) {
    if (set.scores.size() != set.labels.size()) throw DataError("scored set: length mismatch");
    if (set.scores.empty()) throw MetricError("scored set: empty");
}

} // namespace

double roc_auc(const ScoredSet& set) {
    check_set(set);
    const size_t n = set.scores.size();
    long pos = 0;
    for (int l : set.labels) pos += l;
    const long neg = static_cast<long>(n) - pos;
    if (pos == 0 || neg == 0) throw MetricError("roc_auc undefined: needs both classes");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return set.scores[a] < set.scores[b]; });

    // Sum of average ranks of positives (ties share their mean rank).
    double rank_sum = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && set.scores[order[j]] == set.scores[order[i]]) ++j;
        const double mean_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (size_t k = i; k < j; ++k)
            if (set.labels[order[k]] == 1) rank_sum += mean_rank;
        i = j;
    }
    const double pos_d = static_cast<double>(pos), neg_d = static_cast<double>(neg);
    return (rank_sum - pos_d * (pos_d + 1.0) / 2.0) / (pos_d * neg_d);
}

double average_precision(const ScoredSet& set) {
    check_set(set);
    long pos = 0;
    for (int l : set.labels) pos += l;
    if (pos == 0) throw MetricError("average_precision undefined: no positives");

    const size_t n = set.scores.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return set.scores[a] > set.scores[b]; });

    double ap = 0.0;
    long tp = 0, fp = 0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        long tp_g = 0, fp_g = 0;
        while (j < n && set.scores[order[j]] == set.scores[order[i]]) {
            if (set.labels[order[j]] == 1)
                ++tp_g;
            else
                ++fp_g;
            ++j;
        }
        tp += tp_g;
        fp += fp_g;
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double recall_step = static_cast<double>(tp_g) / static_cast<double>(pos);
        ap += recall_step * precision;
        i = j;
    }
    return ap;
}

std::vector<RocPoint> roc_curve(const ScoredSet& set) {
    check_set(set);
    long pos = 0;
    for (int l : set.labels) pos += l;
    const long neg = static_cast<long>(set.scores.size()) - pos;
    if (pos == 0 || neg == 0) throw MetricError("roc_curve undefined: needs both classes");

    const size_t n = set.scores.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return set.scores[a] > set.scores[b]; });

    std::vector<RocPoint> curve;
    curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    long tp = 0, fp = 0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && set.scores[order[j]] == set.scores[order[i]]) {
            if (set.labels[order[j]] == 1)
                ++tp;
            else
                ++fp;
            ++j;
        }
        curve.push_back({set.scores[order[i]], static_cast<double>(fp) / static_cast<double>(neg),
                         static_cast<double>(tp) / static_cast<double>(pos)});
        i = j;
    }
    return curve;
}

std::pair<double, double> pixel_metrics(const std::vector<scoring::AnomalyMap>& maps,
                                        const std::vector<MaskTensor>& masks) {
    if (maps.size() != masks.size()) throw DataError("pixel_metrics: map/mask count mismatch");
    ScoredSet set;
    size_t total = 0;
    for (const auto& m : maps) total += m.values.size();
    set.scores.reserve(total);
    set.labels.reserve(total);
    for (size_t i = 0; i < maps.size(); ++i) {
        const auto& map = maps[i];
        const auto& mask = masks[i];
        if (mask.dim(0) != map.height || mask.dim(1) != map.width)
            throw DataError("pixel_metrics: map/mask dimension mismatch");
        for (long p = 0; p < mask.numel(); ++p) {
            set.scores.push_back(map.values[static_cast<size_t>(p)]);
            set.labels.push_back(mask[p] ? 1 : 0);
        }
    }
    return {roc_auc(set), average_precision(set)};
}

std::vector<Component> connected_components(const MaskTensor& mask) {
    const int h = static_cast<int>(mask.dim(0)), w = static_cast<int>(mask.dim(1));
    std::vector<Component> out;
    std::vector<uint8_t> seen(static_cast<size_t>(h) * w, 0);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t idx = static_cast<size_t>(y) * w + x;
            if (!mask[static_cast<long>(idx)] || seen[idx]) continue;
            Component comp;
            stack.clear();
            stack.emplace_back(y, x);
            seen[idx] = 1;
            while (!stack.empty()) {
                const auto [cy, cx] = stack.back();
                stack.pop_back();
                comp.pixels.emplace_back(cy, cx);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dy == 0 && dx == 0) continue;
                        const int ny = cy + dy, nx = cx + dx;
                        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                        const size_t nidx = static_cast<size_t>(ny) * w + nx;
                        if (mask[static_cast<long>(nidx)] && !seen[nidx]) {
                            seen[nidx] = 1;
                            stack.emplace_back(ny, nx);
                        }
                    }
            }
            out.push_back(std::move(comp));
        }
    }
    return out;
}

ProCurve pro_curve(const std::vector<scoring::AnomalyMap>& maps, const std::vector<MaskTensor>& masks,
                   const std::vector<double>& thresholds_descending) {
    if (maps.size() != masks.size()) throw DataError("pro_curve: map/mask count mismatch");
    const size_t nt = thresholds_descending.size();
    if (nt == 0) throw DataError("pro_curve: empty threshold grid");

    // Ascending copy for binary search; results are identical to direct
    // per-threshold comparison because the grid values themselves are compared.
    std::vector<double> asc(thresholds_descending.rbegin(), thresholds_descending.rend());

    std::vector<long> fp_count(nt, 0);     // per threshold index in `asc`
    long normal_pixels = 0;
    std::vector<double> pro_sum(nt, 0.0);
    long n_components = 0;

    auto count_at_or_above = [&](float value) {
        // number of thresholds t in `asc` with t <= value
        return static_cast<size_t>(std::upper_bound(asc.begin(), asc.end(), static_cast<double>(value)) -
                                   asc.begin());
    };

    for (size_t i = 0; i < maps.size(); ++i) {
        const auto& map = maps[i];
        const auto& mask = masks[i];
        if (mask.dim(0) != map.height || mask.dim(1) != map.width)
            throw DataError("pro_curve: map/mask dimension mismatch");

        for (long p = 0; p < mask.numel(); ++p) {
            if (mask[p]) continue;
            ++normal_pixels;
            const size_t k = count_at_or_above(map.values[static_cast<size_t>(p)]);
            if (k > 0) ++fp_count[k - 1]; // suffix-summed below
        }

        for (const auto& comp : connected_components(mask)) {
            ++n_components;
            std::vector<long> hit(nt, 0);
            for (const auto& [y, x] : comp.pixels) {
                const size_t k = count_at_or_above(map.at(y, x));
                if (k > 0) ++hit[k - 1];
            }
            // suffix sum: overlap at asc[j] counts pixels with value >= asc[j]
            long acc = 0;
            const double size = static_cast<double>(comp.pixels.size());
            for (size_t j = nt; j-- > 0;) {
                acc += hit[j];
                pro_sum[j] += static_cast<double>(acc) / size;
            }
        }
    }
    if (n_components == 0) throw MetricError("pro_curve undefined: no ground-truth components");
    if (normal_pixels == 0) throw MetricError("pro_curve undefined: no normal pixels");

    long acc = 0;
    std::vector<long> fp_at(nt, 0);
    for (size_t j = nt; j-- > 0;) {
        acc += fp_count[j];
        fp_at[j] = acc;
    }

    ProCurve curve;
    curve.thresholds = thresholds_descending;
    curve.fprs.resize(nt);
    curve.pros.resize(nt);
    for (size_t k = 0; k < nt; ++k) {
        const size_t j = nt - 1 - k; // descending threshold k maps to asc index j
        curve.fprs[k] = static_cast<double>(fp_at[j]) / static_cast<double>(normal_pixels);
        curve.pros[k] = pro_sum[j] / static_cast<double>(n_components);
    }
    return curve;
}

ProCurve pro_curve(const std::vector<scoring::AnomalyMap>& maps, const std::vector<MaskTensor>& masks,
                   int n_thresholds) {
    if (n_thresholds < 2) throw DataError("pro_curve: need at least 2 thresholds");
    std::vector<double> desc(static_cast<size_t>(n_thresholds));
    for (int k = 0; k < n_thresholds; ++k)
        desc[static_cast<size_t>(k)] = 1.0 - static_cast<double>(k) / (n_thresholds - 1);
    return pro_curve(maps, masks, desc);
}

double pro_auc(const ProCurve& curve, double max_fpr, bool* extended) {
    if (!(max_fpr > 0.0 && max_fpr <= 1.0)) throw DataError("pro_auc: max_fpr must be in (0,1]");
    const size_t n = curve.fprs.size();
    if (n == 0) throw DataError("pro_auc: empty curve");

    // Points ascending in FPR; prepend (0,0)-side anchor if needed.
    std::vector<double> fpr(curve.fprs), pro(curve.pros);
    if (fpr.front() > 0.0) {
        fpr.insert(fpr.begin(), 0.0);
        pro.insert(pro.begin(), 0.0);
    }
    double area = 0.0;
    bool reached = false;
    for (size_t i = 1; i < fpr.size(); ++i) {
        double x0 = fpr[i - 1], x1 = fpr[i];
        double y0 = pro[i - 1], y1 = pro[i];
        if (x1 <= x0) continue;
        if (x0 >= max_fpr) {
            reached = true;
            break;
        }
        if (x1 > max_fpr) {
            // linear interpolation at the cut point
            const double t = (max_fpr - x0) / (x1 - x0);
            y1 = y0 + t * (y1 - y0);
            x1 = max_fpr;
            reached = true;
        }
        area += 0.5 * (y0 + y1) * (x1 - x0);
        if (x1 >= max_fpr) {
            reached = true;
            break;
        }
    }
    if (extended) *extended = !reached;
    if (!reached) {
        // Extend flat with the last PRO value.
        const double x_last = fpr.back();
        if (x_last < max_fpr) area += pro.back() * (max_fpr - x_last);
    }
    return area / max_fpr;
}

double throughput_fps(ae::ModelParams<float>& params, const std::vector<ImageTensor>& images) {
    if (images.empty()) throw DataError("throughput: empty test set");
    auto run_one = [&](const ImageTensor& img) {
        Tensor<float> batch({1, img.dim(0), img.dim(1), img.dim(2)});
        std::copy(img.data(), img.data() + img.numel(), batch.data());
        volatile float sink = ae::forward(params, batch, ae::Mode::Eval)[0];
        (void)sink;
    };
    run_one(images.front()); // warm-up, excluded
    const auto start = std::chrono::steady_clock::now();
    for (const auto& img : images) run_one(img);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    const double seconds = std::max(elapsed.count(), 1e-9);
    return static_cast<double>(images.size()) / seconds;
}

double throughput_fps(ae::ModelParams<float>& params, const dataset::DatasetIndex& index) {
    std::vector<ImageTensor> images;
    images.reserve(index.test.size());
    for (const auto& s : index.test) images.push_back(dataset::decode_and_resize(s.path, index.image_side));
    return throughput_fps(params, images);
}

} // namespace d3r::metrics
