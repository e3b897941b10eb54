// d3r: train/evaluate/benchmark the D3R-Net healing autoencoder on
// MVTec-AD-layout datasets, and generate synthetic categories for offline
// testing.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>

#include "d3r/checkpoint.hpp"
#include "d3r/dataset.hpp"
#include "d3r/errors.hpp"
#include "d3r/parallel.hpp"
#include "d3r/report.hpp"
#include "d3r/trainer.hpp"

namespace fs = std::filesystem;
using namespace d3r;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

struct MethodPreset {
    double corrupt_probability;
    losses::LossWeights weights;
};

const std::map<std::string, MethodPreset>& method_presets() {
    static const std::map<std::string, MethodPreset> presets = {
        {"ae-mse", {0.0, {1.0, 0.0, 0.0}}},
        {"d3r-mse", {0.5, {1.0, 0.0, 0.0}}},
        {"d3r-fft", {0.5, {1.0, 1.0, 0.0}}},
        {"d3r-fft-ssim", {0.5, {1.0, 1.0, 0.5}}},
    };
    return presets;
}

struct CommonOpts {
    std::string root;
    std::string out = "runs";
    uint64_t seed = 0;
    int epochs = 50;
    int batch_size = 8;
    double lr = 1e-3;
    int image_side = 256;
    double w_mse = 1.0, w_fft = 1.0, w_ssim = 0.0;
    double corrupt_prob = 0.5;
    int max_regions = 3;
    corruption::CorruptionConfig corruption_tunables; // side/fill/sigma/alpha ranges
    int checkpoint_every = 0;
    int n_thresholds = 200;
    bool strict = false;
    int threads = 0; // 0 = all hardware threads
};

void add_train_options(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--epochs", o.epochs, "Training epochs");
    cmd->add_option("--batch-size", o.batch_size, "Minibatch size");
    cmd->add_option("--lr", o.lr, "Adam learning rate");
    cmd->add_option("--image-side", o.image_side, "Square input size (multiple of 16)");
    cmd->add_option("--w-mse", o.w_mse, "Spatial MSE weight");
    cmd->add_option("--w-fft", o.w_fft, "FFT magnitude loss weight");
    cmd->add_option("--w-ssim", o.w_ssim, "SSIM loss weight");
    cmd->add_option("--corrupt-prob", o.corrupt_prob, "Per-image corruption probability");
    cmd->add_option("--max-regions", o.max_regions, "Max corrupted regions per image");
    auto& ct = o.corruption_tunables;
    cmd->add_option("--side-frac-lo", ct.side_fraction_lo, "Min region side as a fraction of image side");
    cmd->add_option("--side-frac-hi", ct.side_fraction_hi, "Max region side as a fraction of image side");
    cmd->add_option("--fill-lo", ct.fill_lo, "Min occlusion fill intensity");
    cmd->add_option("--fill-hi", ct.fill_hi, "Max occlusion fill intensity");
    cmd->add_option("--noise-sigma", ct.noise_sigma, "Gaussian noise patch sigma");
    cmd->add_option("--alpha-lo", ct.alpha_lo, "Min foreign-patch blend coefficient");
    cmd->add_option("--alpha-hi", ct.alpha_hi, "Max foreign-patch blend coefficient");
    cmd->add_option("--checkpoint-every", o.checkpoint_every, "Save a checkpoint every N epochs");
}

// Resolves the effective training configuration for a method. Explicit
// loss/corruption flags override the preset; the run is then labeled
// "custom" so reports never mislabel a modified preset.
std::string resolve_method(const CLI::App* cmd, const std::string& method, const CommonOpts& o,
                           trainer::TrainConfig& cfg) {
    const auto it = method_presets().find(method);
    if (it == method_presets().end())
        throw CLI::ValidationError("--method", "unknown method '" + method + "'");
    cfg.weights = it->second.weights;
    cfg.corruption.probability = it->second.corrupt_probability;

    bool overridden = false;
    auto apply = [&](const char* flag, auto setter) {
        if (cmd->count(flag) > 0) {
            setter();
            overridden = true;
        }
    };
    apply("--w-mse", [&] { cfg.weights.mse = o.w_mse; });
    apply("--w-fft", [&] { cfg.weights.fft = o.w_fft; });
    apply("--w-ssim", [&] { cfg.weights.ssim = o.w_ssim; });
    apply("--corrupt-prob", [&] { cfg.corruption.probability = o.corrupt_prob; });
    if (cmd->count("--max-regions") > 0) cfg.corruption.max_regions = o.max_regions;
    const auto& ct = o.corruption_tunables;
    if (cmd->count("--side-frac-lo") > 0) cfg.corruption.side_fraction_lo = ct.side_fraction_lo;
    if (cmd->count("--side-frac-hi") > 0) cfg.corruption.side_fraction_hi = ct.side_fraction_hi;
    if (cmd->count("--fill-lo") > 0) cfg.corruption.fill_lo = ct.fill_lo;
    if (cmd->count("--fill-hi") > 0) cfg.corruption.fill_hi = ct.fill_hi;
    if (cmd->count("--noise-sigma") > 0) cfg.corruption.noise_sigma = ct.noise_sigma;
    if (cmd->count("--alpha-lo") > 0) cfg.corruption.alpha_lo = ct.alpha_lo;
    if (cmd->count("--alpha-hi") > 0) cfg.corruption.alpha_hi = ct.alpha_hi;
    return overridden ? "custom" : method;
}

std::vector<std::pair<std::string, std::string>> config_snapshot(const trainer::TrainConfig& cfg,
                                                                 const std::string& category,
                                                                 const std::string& method) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%g", v);
        return std::string(buf);
    };
    return {
        {"category", category},
        {"method", method},
        {"epochs", std::to_string(cfg.epochs)},
        {"batch_size", std::to_string(cfg.batch_size)},
        {"lr", num(cfg.lr)},
        {"image_side", std::to_string(cfg.image_side)},
        {"w_mse", num(cfg.weights.mse)},
        {"w_fft", num(cfg.weights.fft)},
        {"w_ssim", num(cfg.weights.ssim)},
        {"corrupt_prob", num(cfg.corruption.probability)},
        {"max_regions", std::to_string(cfg.corruption.max_regions)},
    };
}

void write_train_summary(const std::string& path, const trainer::TrainResult& result) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write train summary: " + path);
    out << "{\n  \"epochs\": [\n";
    char buf[256];
    for (size_t i = 0; i < result.log.epochs.size(); ++i) {
        const auto& e = result.log.epochs[i];
        std::snprintf(buf, sizeof(buf),
                      "    {\"epoch\": %d, \"mean_total\": %.9g, \"mean_mse\": %.9g, \"mean_fft\": %.9g, "
                      "\"mean_ssim\": %.9g, \"wall_seconds\": %.3f}%s\n",
                      e.epoch, e.mean_loss.total, e.mean_loss.mse, e.mean_loss.fft, e.mean_loss.ssim,
                      e.wall_seconds, i + 1 < result.log.epochs.size() ? "," : "");
        out << buf;
    }
    out << "  ],\n";
    out << "  \"steps\": " << result.log.steps.size() << ",\n";
    out << "  \"corruption_regions\": " << result.log.corruption_regions << ",\n";
    out << "  \"parameters\": " << result.params.param_count() << "\n}\n";
}

struct PairPaths {
    fs::path dir, checkpoint, train_log, train_summary, report, roc_csv, pro_csv;
};

PairPaths pair_paths(const std::string& out, const std::string& category, const std::string& method) {
    PairPaths p;
    p.dir = fs::path(out) / category / method;
    p.checkpoint = p.dir / "checkpoint.d3rckpt";
    p.train_log = p.dir / "train_log.csv";
    p.train_summary = p.dir / "train_summary.json";
    p.report = p.dir / "report.json";
    p.roc_csv = p.dir / "roc_curve.csv";
    p.pro_csv = p.dir / "pro_curve.csv";
    return p;
}

// --- train ---------------------------------------------------------------

void run_train_pair(const CLI::App* cmd, const CommonOpts& o, const std::string& category,
                    const std::string& method) {
    trainer::TrainConfig cfg;
    cfg.epochs = o.epochs;
    cfg.batch_size = o.batch_size;
    cfg.lr = o.lr;
    cfg.seed = o.seed;
    cfg.image_side = o.image_side;
    const std::string label = resolve_method(cmd, method, o, cfg);

    const auto index = dataset::load_mvtec_category(o.root, category, o.image_side);
    const auto paths = pair_paths(o.out, category, label);
    fs::create_directories(paths.dir);

    std::cerr << "[train] " << category << " / " << label << ": " << index.train.size()
              << " train images, " << cfg.epochs << " epochs\n";
    cfg.checkpoint_every = o.checkpoint_every;
    trainer::EpochCallback on_epoch = nullptr;
    if (cfg.checkpoint_every > 0) {
        on_epoch = [&](const trainer::EpochRecord& er, const ae::ModelParams<float>& params,
                       const ae::AdamState<float>& optim) {
            if ((er.epoch + 1) % cfg.checkpoint_every == 0)
                ckpt::save_checkpoint(paths.checkpoint.string(), params, &optim,
                                      static_cast<uint32_t>(er.epoch + 1));
        };
    }
    const auto result = trainer::train_category(index, cfg, on_epoch);
    ckpt::save_checkpoint(paths.checkpoint.string(), result.params, &result.optim,
                          static_cast<uint32_t>(cfg.epochs));
    trainer::write_train_log_csv(paths.train_log.string(), result.log);
    write_train_summary(paths.train_summary.string(), result);

    report::write_manifest((paths.dir / "manifest.json").string(), "train",
                           config_snapshot(cfg, category, label), o.seed,
                           {paths.checkpoint.string(), paths.train_log.string(), paths.train_summary.string()},
                           paths.dir.string());
    std::cerr << "[train] wrote " << paths.checkpoint.string() << "\n";
}

// --- eval ----------------------------------------------------------------

int run_eval_pair(const CommonOpts& o, const std::string& category, const std::string& method,
                  const std::string& checkpoint_override, bool export_maps, const std::string& panels) {
    const auto paths = pair_paths(o.out, category, method);
    const std::string ckpt_path =
        checkpoint_override.empty() ? paths.checkpoint.string() : checkpoint_override;
    if (!fs::is_regular_file(ckpt_path)) throw DataError("checkpoint not found: " + ckpt_path);

    auto loaded = ckpt::load_checkpoint(ckpt_path);
    const auto index = dataset::load_mvtec_category(o.root, category, o.image_side);
    fs::create_directories(paths.dir);

    auto eval = trainer::evaluate_category(loaded.params, index, o.n_thresholds, method);
    for (const auto& w : eval.report.warnings) std::cerr << "[eval] warning: " << w << "\n";

    std::vector<std::string> artifacts;
    report::write_report_json(paths.report.string(), eval.report, report::hardware_descriptor(), o.seed);
    artifacts.push_back(paths.report.string());
    if (!eval.image_roc.empty()) {
        report::write_roc_csv(paths.roc_csv.string(), eval.image_roc);
        artifacts.push_back(paths.roc_csv.string());
    }
    if (!eval.pro.thresholds.empty()) {
        report::write_pro_csv(paths.pro_csv.string(), eval.pro);
        artifacts.push_back(paths.pro_csv.string());
    }

    if (export_maps) {
        const fs::path map_dir = paths.dir / "maps";
        fs::create_directories(map_dir);
        for (size_t i = 0; i < eval.samples.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "%04zu.d3rmap", i);
            const auto p = (map_dir / name).string();
            scoring::write_map(p, eval.samples[i].map);
            artifacts.push_back(p);
            std::snprintf(name, sizeof(name), "%04zu.png", i);
            const auto png_p = (map_dir / name).string();
            scoring::write_map_png(png_p, eval.normalized_maps[i]);
            artifacts.push_back(png_p);
        }
    }

    size_t n_panels = 8;
    if (panels == "all")
        n_panels = eval.samples.size();
    else if (!panels.empty())
        n_panels = static_cast<size_t>(std::stoul(panels));
    n_panels = std::min(n_panels, eval.samples.size());
    if (n_panels > 0) {
        const fs::path panel_dir = paths.dir / "panels";
        fs::create_directories(panel_dir);
        for (size_t i = 0; i < n_panels; ++i) {
            char name[48];
            std::snprintf(name, sizeof(name), "%04zu_%s.png", i, eval.samples[i].defect_type.c_str());
            const auto p = (panel_dir / name).string();
            png_write(p, report::render_panel(eval.samples[i], eval.normalized_maps[i]));
            artifacts.push_back(p);
        }
    }

    trainer::TrainConfig cfg_snapshot; // for flag echo only
    cfg_snapshot.epochs = o.epochs;
    cfg_snapshot.image_side = o.image_side;
    report::write_manifest((paths.dir / "eval_manifest.json").string(), "eval",
                           {{"category", category},
                            {"method", method},
                            {"checkpoint", ckpt_path},
                            {"n_thresholds", std::to_string(o.n_thresholds)},
                            {"image_side", std::to_string(o.image_side)}},
                           o.seed, artifacts, paths.dir.string());

    std::printf("%s/%s: img_auc=%.4f img_ap=%.4f px_auc=%.4f px_ap=%.4f pro_auc=%.4f fps=%.2f\n",
                category.c_str(), method.c_str(), eval.report.img_auc, eval.report.img_ap,
                eval.report.px_auc, eval.report.px_ap, eval.report.pro_auc, eval.report.fps);

    if (o.strict && !eval.report.warnings.empty()) {
        std::cerr << "[eval] strict mode: metrics undefined for this test set\n";
        return kExitData;
    }
    return kExitOk;
}

// --- report --------------------------------------------------------------

int run_report(const std::string& out_dir) {
    report::SummaryTable table;
    std::set<std::string> methods;
    std::map<std::string, std::vector<std::pair<std::string, std::vector<metrics::RocPoint>>>> roc_by_cat;

    if (!fs::is_directory(out_dir)) throw DataError("output directory not found: " + out_dir);
    std::vector<fs::path> cat_dirs;
    for (const auto& e : fs::directory_iterator(out_dir))
        if (e.is_directory() && e.path().filename() != "report") cat_dirs.push_back(e.path());
    std::sort(cat_dirs.begin(), cat_dirs.end());

    for (const auto& cat_dir : cat_dirs) {
        std::vector<fs::path> method_dirs;
        for (const auto& e : fs::directory_iterator(cat_dir))
            if (e.is_directory()) method_dirs.push_back(e.path());
        std::sort(method_dirs.begin(), method_dirs.end());
        for (const auto& mdir : method_dirs) {
            const auto report_path = mdir / "report.json";
            if (!fs::is_regular_file(report_path)) continue;
            auto rep = report::read_report_json(report_path.string());
            const std::string cat = cat_dir.filename().string();
            const std::string method = mdir.filename().string();
            if (std::find(table.categories.begin(), table.categories.end(), cat) == table.categories.end())
                table.categories.push_back(cat);
            methods.insert(method);
            table.cells[{cat, method}] = rep;
            const auto roc_path = mdir / "roc_curve.csv";
            roc_by_cat[cat].emplace_back(method, fs::is_regular_file(roc_path)
                                                     ? report::read_roc_csv(roc_path.string())
                                                     : std::vector<metrics::RocPoint>{});
        }
    }
    if (table.cells.empty()) throw DataError("no report.json files found under " + out_dir);
    table.methods.assign(methods.begin(), methods.end());

    const fs::path report_dir = fs::path(out_dir) / "report";
    fs::create_directories(report_dir);
    std::vector<std::string> artifacts;

    report::write_summary_csv((report_dir / "summary.csv").string(), table);
    artifacts.push_back((report_dir / "summary.csv").string());
    report::write_summary_markdown((report_dir / "summary.md").string(), table);
    artifacts.push_back((report_dir / "summary.md").string());
    for (const auto& [cat, curves] : roc_by_cat) {
        const auto svg_path = (report_dir / (cat + "_roc.svg")).string();
        report::write_roc_svg(svg_path, cat, curves);
        artifacts.push_back(svg_path);
    }
    report::write_manifest((report_dir / "manifest.json").string(), "report", {{"out", out_dir}}, 0,
                           artifacts, report_dir.string());
    std::cerr << "[report] wrote " << (report_dir / "summary.md").string() << "\n";
    return kExitOk;
}

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"D3R-Net dual-domain healing autoencoder benchmark harness"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file (key = value, [subcommand] sections)");

    CommonOpts o;
    app.add_option("--threads", o.threads, "Worker threads (0 = all hardware threads)");

    // generate
    auto* gen = app.add_subcommand("generate", "Write synthetic MVTec-layout categories");
    std::string gen_out = "data";
    std::string gen_categories = "synthetic";
    dataset::SyntheticOptions gen_opt;
    bool gen_force = false;
    gen->add_option("--out", gen_out, "Dataset root to create");
    gen->add_option("--categories", gen_categories, "Comma-separated category names");
    gen->add_option("--seed", gen_opt.seed, "Random seed");
    gen->add_option("--n-train", gen_opt.n_train, "Training images per category");
    gen->add_option("--n-good-test", gen_opt.n_good_test, "Good test images per category");
    gen->add_option("--n-defect-test", gen_opt.n_defect_test, "Defective test images per category");
    gen->add_option("--image-side", gen_opt.image_side, "Image side (multiple of 16)");
    gen->add_flag("--force", gen_force, "Overwrite existing category trees");

    // train
    auto* train = app.add_subcommand("train", "Train one (category, method) pair");
    std::string train_category_name, train_method = "d3r-fft";
    train->add_option("--root", o.root, "Dataset root")->required();
    train->add_option("--category", train_category_name, "Category name")->required();
    train->add_option("--method", train_method, "ae-mse | d3r-mse | d3r-fft | d3r-fft-ssim");
    train->add_option("--out", o.out, "Output directory");
    add_train_options(train, o);

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a trained checkpoint");
    std::string eval_category_name, eval_method = "d3r-fft", eval_checkpoint, eval_panels = "8";
    bool eval_export_maps = false;
    eval->add_option("--root", o.root, "Dataset root")->required();
    eval->add_option("--category", eval_category_name, "Category name")->required();
    eval->add_option("--method", eval_method, "Method label (locates the checkpoint)");
    eval->add_option("--out", o.out, "Output directory");
    eval->add_option("--checkpoint", eval_checkpoint, "Explicit checkpoint path");
    eval->add_option("--image-side", o.image_side, "Square input size (multiple of 16)");
    eval->add_option("--n-thresholds", o.n_thresholds, "PRO threshold grid size");
    eval->add_option("--seed", o.seed, "Seed recorded in the report");
    eval->add_flag("--export-maps", eval_export_maps, "Write one D3RMAP file per test image");
    eval->add_option("--panels", eval_panels, "Heatmap panels: a count or 'all'");
    eval->add_flag("--strict", o.strict, "Exit nonzero when metrics are undefined");

    // bench
    auto* bench = app.add_subcommand("bench", "Train + evaluate categories x methods");
    std::string bench_categories, bench_methods = "ae-mse,d3r-mse,d3r-fft,d3r-fft-ssim";
    std::string bench_panels = "4";
    bench->add_option("--root", o.root, "Dataset root")->required();
    bench->add_option("--categories", bench_categories, "Comma-separated categories")->required();
    bench->add_option("--methods", bench_methods, "Comma-separated methods");
    bench->add_option("--out", o.out, "Output directory");
    bench->add_option("--n-thresholds", o.n_thresholds, "PRO threshold grid size");
    bench->add_option("--panels", bench_panels, "Heatmap panels per pair: a count or 'all'");
    bench->add_flag("--strict", o.strict, "Exit nonzero on any pair failure");
    add_train_options(bench, o);

    // report
    auto* rep = app.add_subcommand("report", "Aggregate reports into tables and ROC SVGs");
    rep->add_option("--out", o.out, "Output directory holding <category>/<method>/report.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    set_num_threads(o.threads);

    try {
        if (gen->parsed()) {
            const auto categories = split_csv_list(gen_categories);
            if (categories.empty()) throw DataError("no categories given");
            for (const auto& cat : categories) {
                const fs::path cat_dir = fs::path(gen_out) / cat;
                if (fs::exists(cat_dir)) {
                    if (!gen_force)
                        throw DataError("refusing to overwrite existing " + cat_dir.string() +
                                        " (use --force)");
                    fs::remove_all(cat_dir);
                }
                const auto index = dataset::generate_synthetic_category(gen_out, cat, gen_opt);
                std::printf("%s: %zu train, %zu test images under %s\n", cat.c_str(), index.train.size(),
                            index.test.size(), cat_dir.string().c_str());
                std::vector<std::string> files;
                for (const auto& e : fs::recursive_directory_iterator(cat_dir))
                    if (e.is_regular_file()) files.push_back(e.path().string());
                report::write_manifest((cat_dir / "manifest.json").string(), "generate",
                                       {{"category", cat},
                                        {"n_train", std::to_string(gen_opt.n_train)},
                                        {"n_good_test", std::to_string(gen_opt.n_good_test)},
                                        {"n_defect_test", std::to_string(gen_opt.n_defect_test)},
                                        {"image_side", std::to_string(gen_opt.image_side)}},
                                       gen_opt.seed, files, cat_dir.string());
            }
            return kExitOk;
        }

        if (train->parsed()) {
            run_train_pair(train, o, train_category_name, train_method);
            return kExitOk;
        }

        if (eval->parsed()) {
            return run_eval_pair(o, eval_category_name, eval_method, eval_checkpoint, eval_export_maps,
                                 eval_panels);
        }

        if (bench->parsed()) {
            const auto categories = split_csv_list(bench_categories);
            const auto methods = split_csv_list(bench_methods);
            if (categories.empty() || methods.empty()) throw DataError("empty category or method list");

            report::SummaryTable table;
            table.categories = categories;
            table.methods = methods;
            bool any_failure = false;
            for (const auto& cat : categories) {
                for (const auto& method : methods) {
                    try {
                        run_train_pair(bench, o, cat, method);
                        const int rc =
                            run_eval_pair(o, cat, method, "", /*export_maps=*/false, bench_panels);
                        if (rc != kExitOk) {
                            any_failure = true;
                            continue;
                        }
                        table.cells[{cat, method}] =
                            report::read_report_json(pair_paths(o.out, cat, method).report.string());
                    } catch (const std::exception& e) {
                        std::cerr << "[bench] " << cat << "/" << method << " failed: " << e.what() << "\n";
                        any_failure = true;
                    }
                }
            }

            fs::create_directories(o.out);
            std::vector<std::string> artifacts;
            const auto summary_path = (fs::path(o.out) / "summary.csv").string();
            report::write_summary_csv(summary_path, table);
            artifacts.push_back(summary_path);
            const fs::path tables_dir = fs::path(o.out) / "tables";
            fs::create_directories(tables_dir);
            for (const auto& cat : categories) {
                const auto p = (tables_dir / (cat + ".csv")).string();
                report::write_category_csv(p, table, cat);
                artifacts.push_back(p);
            }
            report::write_manifest((fs::path(o.out) / "bench_manifest.json").string(), "bench",
                                   {{"categories", bench_categories},
                                    {"methods", bench_methods},
                                    {"epochs", std::to_string(o.epochs)},
                                    {"image_side", std::to_string(o.image_side)}},
                                   o.seed, artifacts, o.out);
            std::cerr << "[bench] wrote " << summary_path << "\n";
            if (any_failure && o.strict) return kExitData;
            return kExitOk;
        }

        if (rep->parsed()) return run_report(o.out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
