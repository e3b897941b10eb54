#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "d3r/metrics.hpp"
#include "d3r/png_io.hpp"
#include "d3r/scoring.hpp"
#include "d3r/trainer.hpp"

namespace d3r::report {

// Published MVTec AD reference results for this method family. The exact
// loss weights behind these runs are not published and MVTec AD is an
// external dataset, so these rows are context for the report tooling, not
// reproduction targets.
struct ReferenceRow {
    std::string table;  // "mvtec-average", "hazelnut", "leather", "pro-selected"
    std::string method; // or category for "pro-selected"
    std::map<std::string, double> values;
};
const std::vector<ReferenceRow>& reference_rows();

void write_report_json(const std::string& path, const metrics::MetricsReport& report,
                       const std::string& hardware, uint64_t seed);
metrics::MetricsReport read_report_json(const std::string& path);

void write_roc_csv(const std::string& path, const std::vector<metrics::RocPoint>& curve);
std::vector<metrics::RocPoint> read_roc_csv(const std::string& path);
void write_pro_csv(const std::string& path, const metrics::ProCurve& curve);

// input | reconstruction | anomaly map | overlay, 2px separators.
PngImage render_panel(const scoring::ScoredSample& sample, const scoring::AnomalyMap& normalized);

// One SVG with an ROC polyline per method, fixed palette, deterministic bytes.
void write_roc_svg(const std::string& path, const std::string& category,
                   const std::vector<std::pair<std::string, std::vector<metrics::RocPoint>>>& curves);

// Benchmark tables. Summary rows are methods; cells are category means.
// Missing cells (failed pairs) render as "nan".
struct SummaryTable {
    std::vector<std::string> methods;
    std::vector<std::string> categories;
    // (category, method) -> report
    std::map<std::pair<std::string, std::string>, metrics::MetricsReport> cells;
};
void write_summary_csv(const std::string& path, const SummaryTable& table);
void write_category_csv(const std::string& path, const SummaryTable& table, const std::string& category);
void write_summary_markdown(const std::string& path, const SummaryTable& table);

// Reproducibility manifest: config snapshot, seed and FNV-1a64 hashes of the
// artifacts written by the run. Deliberately timestamp-free so reruns over
// unchanged inputs emit identical bytes.
void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& config, uint64_t seed,
                    const std::vector<std::string>& artifact_paths, const std::string& artifact_root);

std::string hardware_descriptor();

} // namespace d3r::report
