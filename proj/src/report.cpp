#include "d3r/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "d3r/errors.hpp"
#include "d3r/hash.hpp"
#include "d3r/image.hpp"
#include "d3r/parallel.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace d3r::report {

const std::vector<ReferenceRow>& reference_rows() {
    static const std::vector<ReferenceRow> rows = {
        {"mvtec-average", "ae-mse",
         {{"img_auc", 0.708}, {"img_ap", 0.859}, {"px_auc", 0.733}, {"px_ap", 0.152}, {"pro_auc", 0.417}, {"fps", 19.8}}},
        {"mvtec-average", "d3r-mse",
         {{"img_auc", 0.720}, {"img_ap", 0.867}, {"px_auc", 0.738}, {"px_ap", 0.177}, {"pro_auc", 0.441}, {"fps", 21.5}}},
        {"mvtec-average", "d3r-fft",
         {{"img_auc", 0.706}, {"img_ap", 0.867}, {"px_auc", 0.751}, {"px_ap", 0.166}, {"pro_auc", 0.468}, {"fps", 20.3}}},
        {"mvtec-average", "d3r-fft-ssim",
         {{"img_auc", 0.657}, {"img_ap", 0.840}, {"px_auc", 0.625}, {"px_ap", 0.127}, {"pro_auc", 0.346}, {"fps", 20.5}}},
        {"hazelnut", "ae-mse",
         {{"img_auc", 0.936}, {"img_ap", 0.961}, {"px_auc", 0.914}, {"px_ap", 0.468}, {"pro_auc", 0.603}}},
        {"hazelnut", "d3r-mse",
         {{"img_auc", 0.928}, {"img_ap", 0.956}, {"px_auc", 0.925}, {"px_ap", 0.490}, {"pro_auc", 0.606}}},
        {"hazelnut", "d3r-fft",
         {{"img_auc", 0.923}, {"img_ap", 0.956}, {"px_auc", 0.882}, {"px_ap", 0.428}, {"pro_auc", 0.687}}},
        {"hazelnut", "d3r-fft-ssim",
         {{"img_auc", 0.739}, {"img_ap", 0.858}, {"px_auc", 0.858}, {"px_ap", 0.260}, {"pro_auc", 0.616}}},
        {"leather", "ae-mse",
         {{"img_auc", 0.846}, {"img_ap", 0.945}, {"px_auc", 0.748}, {"px_ap", 0.113}, {"pro_auc", 0.445}}},
        {"leather", "d3r-mse",
         {{"img_auc", 0.849}, {"img_ap", 0.946}, {"px_auc", 0.790}, {"px_ap", 0.171}, {"pro_auc", 0.467}}},
        {"leather", "d3r-fft",
         {{"img_auc", 0.659}, {"img_ap", 0.867}, {"px_auc", 0.772}, {"px_ap", 0.061}, {"pro_auc", 0.471}}},
        {"leather", "d3r-fft-ssim",
         {{"img_auc", 0.690}, {"img_ap", 0.898}, {"px_auc", 0.885}, {"px_ap", 0.222}, {"pro_auc", 0.599}}},
        {"pro-selected", "tile", {{"ae-mse", 0.412}, {"d3r-mse", 0.449}, {"d3r-fft", 0.453}}},
        {"pro-selected", "wood", {{"ae-mse", 0.495}, {"d3r-mse", 0.555}, {"d3r-fft", 0.608}}},
        {"pro-selected", "pill", {{"ae-mse", 0.534}, {"d3r-mse", 0.619}, {"d3r-fft", 0.721}}},
        {"pro-selected", "carpet", {{"ae-mse", 0.255}, {"d3r-mse", 0.337}, {"d3r-fft", 0.316}}},
        {"pro-selected", "screw", {{"ae-mse", 0.356}, {"d3r-mse", 0.427}, {"d3r-fft", 0.588}}},
    };
    return rows;
}

namespace {

ordered_json metric_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double metric_from(const ordered_json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j[key].get<double>();
}

std::string fmt(double v, const char* spec = "%.6f") {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

} // namespace

void write_report_json(const std::string& path, const metrics::MetricsReport& report,
                       const std::string& hardware, uint64_t seed) {
    ordered_json j;
    j["category"] = report.category;
    j["method"] = report.method;
    j["img_auc"] = metric_or_null(report.img_auc);
    j["img_ap"] = metric_or_null(report.img_ap);
    j["px_auc"] = metric_or_null(report.px_auc);
    j["px_ap"] = metric_or_null(report.px_ap);
    j["pro_auc"] = metric_or_null(report.pro_auc);
    j["fps"] = metric_or_null(report.fps);
    j["hardware"] = hardware;
    j["seed"] = seed;
    j["warnings"] = report.warnings;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write report: " + path);
    out << j.dump(2) << "\n";
}

metrics::MetricsReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read report: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("invalid report JSON " + path + ": " + e.what());
    }
    metrics::MetricsReport r;
    r.category = j.value("category", "");
    r.method = j.value("method", "");
    r.img_auc = metric_from(j, "img_auc");
    r.img_ap = metric_from(j, "img_ap");
    r.px_auc = metric_from(j, "px_auc");
    r.px_ap = metric_from(j, "px_ap");
    r.pro_auc = metric_from(j, "pro_auc");
    r.fps = metric_from(j, "fps");
    if (j.contains("warnings"))
        for (const auto& w : j["warnings"]) r.warnings.push_back(w.get<std::string>());
    return r;
}

void write_roc_csv(const std::string& path, const std::vector<metrics::RocPoint>& curve) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write curve: " + path);
    out << "threshold,fpr,tpr\n";
    char buf[128];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", p.threshold, p.fpr, p.tpr);
        out << buf;
    }
}

std::vector<metrics::RocPoint> read_roc_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read curve: " + path);
    std::string line;
    std::getline(in, line); // header
    std::vector<metrics::RocPoint> curve;
    while (std::getline(in, line)) {
        metrics::RocPoint p{};
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &p.threshold, &p.fpr, &p.tpr) == 3) curve.push_back(p);
    }
    return curve;
}

void write_pro_csv(const std::string& path, const metrics::ProCurve& curve) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write curve: " + path);
    out << "threshold,fpr,pro\n";
    char buf[128];
    for (size_t i = 0; i < curve.thresholds.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", curve.thresholds[i], curve.fprs[i],
                      curve.pros[i]);
        out << buf;
    }
}

PngImage render_panel(const scoring::ScoredSample& sample, const scoring::AnomalyMap& normalized) {
    const int h = static_cast<int>(sample.input.dim(1));
    const int w = static_cast<int>(sample.input.dim(2));
    const int sep = 2;
    PngImage out;
    out.height = h;
    out.width = 4 * w + 3 * sep;
    out.channels = 3;
    out.pixels.assign(static_cast<size_t>(out.width) * out.height * 3, 255);

    auto put = [&](int x0, int y, int x, float r, float g, float b) {
        const size_t idx = (static_cast<size_t>(y) * out.width + x0 + x) * 3;
        out.pixels[idx] = static_cast<uint8_t>(std::lround(std::clamp(r, 0.0f, 1.0f) * 255.0f));
        out.pixels[idx + 1] = static_cast<uint8_t>(std::lround(std::clamp(g, 0.0f, 1.0f) * 255.0f));
        out.pixels[idx + 2] = static_cast<uint8_t>(std::lround(std::clamp(b, 0.0f, 1.0f) * 255.0f));
    };

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            put(0, y, x, sample.input.at(0, y, x), sample.input.at(1, y, x), sample.input.at(2, y, x));
            put(w + sep, y, x, sample.recon.at(0, y, x), sample.recon.at(1, y, x), sample.recon.at(2, y, x));
            const float m = normalized.at(y, x);
            put(2 * (w + sep), y, x, m, m, m);
            const float blend = 0.7f * m;
            put(3 * (w + sep), y, x, (1 - blend) * sample.input.at(0, y, x) + blend,
                (1 - blend) * sample.input.at(1, y, x), (1 - blend) * sample.input.at(2, y, x));
        }
    return out;
}

void write_roc_svg(const std::string& path, const std::string& category,
                   const std::vector<std::pair<std::string, std::vector<metrics::RocPoint>>>& curves) {
    const int size = 480, margin = 50;
    const int plot = size - 2 * margin;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << size / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">Image-level ROC - "
        << category << "</text>\n";
    // axes
    svg << "<line x1=\"" << margin << "\" y1=\"" << size - margin << "\" x2=\"" << size - margin
        << "\" y2=\"" << size - margin << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << size - margin << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << size / 2 << "\" y=\"" << size - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">FPR</text>\n";
    svg << "<text x=\"14\" y=\"" << size / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 "
        << size / 2 << ")\">TPR</text>\n";
    // diagonal
    svg << "<line x1=\"" << margin << "\" y1=\"" << size - margin << "\" x2=\"" << size - margin
        << "\" y2=\"" << margin << "\" stroke=\"#cccccc\" stroke-dasharray=\"4 4\"/>\n";

    char buf[64];
    for (size_t ci = 0; ci < curves.size(); ++ci) {
        const auto& [method, curve] = curves[ci];
        if (!curve.empty()) {
            svg << "<polyline fill=\"none\" stroke=\"" << palette[ci % 6]
                << "\" stroke-width=\"1.5\" points=\"";
            for (const auto& p : curve) {
                const double x = margin + p.fpr * plot;
                const double y = size - margin - p.tpr * plot;
                std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x, y);
                svg << buf;
            }
            svg << "\"/>\n";
        }
        svg << "<text x=\"" << size - margin - 120 << "\" y=\"" << margin + 16 + 16 * ci
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << palette[ci % 6] << "\">" << method
            << (curve.empty() ? " (no data)" : "") << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write SVG: " + path);
    out << svg.str();
}

namespace {

const char* kMetricKeys[] = {"img_auc", "img_ap", "px_auc", "px_ap", "pro_auc", "fps"};

double metric_by_key(const metrics::MetricsReport& r, const std::string& key) {
    if (key == "img_auc") return r.img_auc;
    if (key == "img_ap") return r.img_ap;
    if (key == "px_auc") return r.px_auc;
    if (key == "px_ap") return r.px_ap;
    if (key == "pro_auc") return r.pro_auc;
    return r.fps;
}

// Mean over categories; NaN cells poison the mean so missing data is visible.
double method_mean(const SummaryTable& table, const std::string& method, const std::string& key) {
    double acc = 0.0;
    long n = 0;
    for (const auto& cat : table.categories) {
        const auto it = table.cells.find({cat, method});
        if (it == table.cells.end()) return std::numeric_limits<double>::quiet_NaN();
        acc += metric_by_key(it->second, key);
        ++n;
    }
    return n ? acc / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

} // namespace

void write_summary_csv(const std::string& path, const SummaryTable& table) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write summary: " + path);
    out << "method,img_auc,img_ap,px_auc,px_ap,pro_auc,fps\n";
    for (const auto& method : table.methods) {
        out << method;
        for (const char* key : kMetricKeys) out << "," << fmt(method_mean(table, method, key));
        out << "\n";
    }
}

void write_category_csv(const std::string& path, const SummaryTable& table, const std::string& category) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write summary: " + path);
    out << "method,img_auc,img_ap,px_auc,px_ap,pro_auc,fps\n";
    for (const auto& method : table.methods) {
        out << method;
        const auto it = table.cells.find({category, method});
        for (const char* key : kMetricKeys) {
            out << ",";
            out << (it == table.cells.end() ? "nan" : fmt(metric_by_key(it->second, key)));
        }
        out << "\n";
    }
}

void write_summary_markdown(const std::string& path, const SummaryTable& table) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write summary: " + path);
    out << "# Benchmark summary\n\n";
    out << "## Method averages over " << table.categories.size() << " categories\n\n";
    out << "| Method | Img AUC | Img AP | Px AUC | Px AP | PRO | FPS |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const auto& method : table.methods) {
        out << "| " << method;
        for (const char* key : kMetricKeys) out << " | " << fmt(method_mean(table, method, key), "%.3f");
        out << " |\n";
    }
    out << "\n";
    for (const auto& cat : table.categories) {
        out << "## " << cat << "\n\n";
        out << "| Method | Img AUC | Img AP | Px AUC | Px AP | PRO | FPS |\n";
        out << "|---|---|---|---|---|---|---|\n";
        for (const auto& method : table.methods) {
            const auto it = table.cells.find({cat, method});
            out << "| " << method;
            for (const char* key : kMetricKeys) {
                out << " | ";
                out << (it == table.cells.end() ? "nan" : fmt(metric_by_key(it->second, key), "%.3f"));
            }
            out << " |\n";
        }
        out << "\n";
    }

    out << "## Published MVTec AD reference (original D3R-Net evaluation)\n\n";
    out << "These rows are external context: MVTec AD is a licensed dataset and the\n";
    out << "loss weights behind the published runs are not disclosed, so they are not\n";
    out << "reproduction targets for this harness.\n\n";
    out << "| Table | Row | Values |\n|---|---|---|\n";
    for (const auto& row : reference_rows()) {
        out << "| " << row.table << " | " << row.method << " | ";
        bool first = true;
        for (const auto& [k, v] : row.values) {
            if (!first) out << ", ";
            out << k << "=" << fmt(v, "%.3f");
            first = false;
        }
        out << " |\n";
    }
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& config, uint64_t seed,
                    const std::vector<std::string>& artifact_paths, const std::string& artifact_root) {
    ordered_json j;
    j["command"] = command;
    ordered_json cfg = ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    j["seed"] = seed;
    ordered_json artifacts = ordered_json::object();
    std::vector<std::string> sorted = artifact_paths;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& p : sorted) {
        std::string rel = p;
        if (!artifact_root.empty()) {
            std::error_code ec;
            const auto r = fs::relative(p, artifact_root, ec);
            if (!ec) rel = r.string();
        }
        artifacts[rel] = hex64(fnv1a64_file(p));
    }
    j["artifacts"] = artifacts;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

std::string hardware_descriptor() {
    std::string model = "unknown-cpu";
    std::ifstream cpuinfo("/proc/cpuinfo");
    std::string line;
    while (std::getline(cpuinfo, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto pos = line.find(':');
            if (pos != std::string::npos) {
                model = line.substr(pos + 1);
                while (!model.empty() && model.front() == ' ') model.erase(model.begin());
            }
            break;
        }
    }
    return model + ", " + std::to_string(std::thread::hardware_concurrency()) + " hw threads, " +
           std::to_string(num_threads()) + " worker threads";
}

} // namespace d3r::report
