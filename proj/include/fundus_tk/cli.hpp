#pragma once

// Command-line front end. Every subcommand reads its inputs, never modifies
// them, and writes outputs in sorted-id order so repeated runs are
// byte-identical.
//
// Exit codes: 0 success, 1 runtime/input failure (diagnostics on stderr),
// 2 usage error, 3 evaluation report produced but incomplete.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "fundus_tk/core.hpp"
#include "fundus_tk/evaluate.hpp"
#include "fundus_tk/io.hpp"
#include "fundus_tk/losses.hpp"
#include "fundus_tk/overlay.hpp"
#include "fundus_tk/parallel.hpp"
#include "fundus_tk/postprocess.hpp"
#include "fundus_tk/preprocess.hpp"
#include "fundus_tk/sampler.hpp"
#include "fundus_tk/tiler.hpp"

namespace ftk::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIncomplete = 3;

namespace detail {

/// A file maps to {stem: file}; a directory to every matching file in it.
inline std::map<std::string, fs::path> collect(const fs::path& p, std::initializer_list<std::string_view> exts) {
    if (fs::is_directory(p)) return io::list_by_id(p, exts);
    if (!fs::exists(p)) throw FormatError("input not found: " + p.string());
    return {{p.stem().string(), p}};
}

/// Collects per-id failures from worker threads; reported in id order.
class Diagnostics {
public:
    void add(const std::string& id, const std::string& msg) {
        std::lock_guard lock(mu_);
        entries_[id].push_back(msg);
    }
    bool empty() const { return entries_.empty(); }
    void print(std::ostream& err) const {
        for (const auto& [id, msgs] : entries_)
            for (const auto& m : msgs) err << "error: " << id << ": " << m << "\n";
    }

private:
    std::mutex mu_;
    std::map<std::string, std::vector<std::string>> entries_;
};

template <typename Fn>
void for_each_id(const std::vector<std::string>& ids, Diagnostics& diag, Fn&& fn) {
    parallel_for(ids.size(), [&](std::size_t i) {
        try {
            fn(ids[i]);
        } catch (const std::exception& e) {
            diag.add(ids[i], e.what());
        }
    });
}

inline std::vector<std::string> keys(const std::map<std::string, fs::path>& m) {
    std::vector<std::string> out;
    for (const auto& kv : m) out.push_back(kv.first);
    return out;
}

inline const std::initializer_list<std::string_view> kImageExts{".png", ".jpg", ".jpeg", ".tif", ".tiff", ".bmp"};

// ---------------------------------------------------------------------------

struct PreprocessOpts {
    std::string input, output;
    double sigma = 0.0;
    double gain = 4.0;
    int offset = 128;
    std::vector<int> resize;
};

inline int cmd_preprocess(const PreprocessOpts& o, std::ostream&, std::ostream& err) {
    const auto inputs = collect(o.input, kImageExts);
    const bool dir_mode = fs::is_directory(o.input);
    Diagnostics diag;
    for_each_id(keys(inputs), diag, [&](const std::string& id) {
        auto image = io::read_raster(inputs.at(id));
        if (o.resize.size() == 2) image = preprocess::resize(image, o.resize[0], o.resize[1], preprocess::Interp::bilinear);
        const auto out = preprocess::illumination_correct(image, {o.sigma, o.gain, o.offset});
        io::write_raster(dir_mode ? fs::path(o.output) / (id + ".png") : fs::path(o.output), out);
    });
    diag.print(err);
    return diag.empty() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------

struct StitchOpts {
    std::vector<std::string> tiles;
    std::vector<int> scales;
    int patch = tiler::kDefaultPatch;
    int stride = 0;  // 0: default minimal overlapping cover
    int width = 0, height = 0;
    std::string output;
};

inline std::vector<tiler::Tile> read_tiles(const fs::path& dir) {
    static const std::regex name(R"(x(\d+)_y(\d+))");
    std::vector<tiler::Tile> tiles;
    for (const auto& [stem, path] : io::list_by_id(dir, {".pmap"})) {
        std::smatch m;
        if (!std::regex_match(stem, m, name)) {
            throw FormatError(path.string() + ": tile files must be named x<X>_y<Y>.pmap");
        }
        tiles.push_back({{std::stoi(m[1]), std::stoi(m[2])}, io::read_probmap(path)});
    }
    if (tiles.empty()) throw FormatError("no tiles in " + dir.string());
    return tiles;
}

inline int cmd_stitch(const StitchOpts& o, std::ostream&, std::ostream&) {
    if (o.tiles.size() != o.scales.size()) {
        throw ParameterError("stitch: give one --scale per --tiles directory");
    }
    std::vector<tiler::ScaleTiles> per_scale;
    for (std::size_t i = 0; i < o.tiles.size(); ++i) {
        auto plan = o.stride > 0 ? tiler::plan_tiles(o.scales[i], o.patch, o.stride)
                                 : tiler::default_plan(o.scales[i], o.patch);
        per_scale.push_back({std::move(plan), read_tiles(o.tiles[i])});
    }
    const int w = o.width > 0 ? o.width : o.scales.front();
    const int h = o.height > 0 ? o.height : o.scales.front();
    io::write_probmap(o.output, tiler::fuse_scales(per_scale, w, h));
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct FuseOpts {
    std::string disc, atrophy, output, polarity = "foreground=0";
    double threshold = 0.5;
};

inline int cmd_fuse(const FuseOpts& o, std::ostream&, std::ostream& err) {
    const auto polarity = io::parse_polarity(o.polarity);
    const auto disc = collect(o.disc, {".pmap"});
    const auto atrophy = collect(o.atrophy, {".pmap"});
    Diagnostics diag;
    for (const auto& [id, p] : atrophy)
        if (!disc.contains(id)) diag.add(id, "atrophy map without disc map");
    for_each_id(keys(disc), diag, [&](const std::string& id) {
        auto it = atrophy.find(id);
        if (it == atrophy.end()) throw FormatError("disc map without atrophy map");
        const auto fused = postprocess::fuse_disc_atrophy(io::read_probmap(disc.at(id)), io::read_probmap(it->second),
                                                          o.threshold);
        io::write_mask(fs::path(o.output) / "disc" / (id + ".png"), fused.disc, polarity);
        io::write_mask(fs::path(o.output) / "atrophy" / (id + ".png"), fused.atrophy, polarity);
    });
    diag.print(err);
    return diag.empty() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------

struct DetachOpts {
    std::string input, output, polarity = "foreground=0";
    double fraction = postprocess::kDefaultDetachmentFraction;
    double threshold = 0.5;
};

inline int cmd_detach_fix(const DetachOpts& o, std::ostream&, std::ostream& err) {
    const auto polarity = io::parse_polarity(o.polarity);
    const auto inputs = collect(o.input, {".png", ".pmap"});
    Diagnostics diag;
    for_each_id(keys(inputs), diag, [&](const std::string& id) {
        const auto& path = inputs.at(id);
        const auto mask = path.extension() == ".pmap" ? threshold(io::read_probmap(path), o.threshold)
                                                      : io::read_mask(path, polarity);
        io::write_mask(fs::path(o.output) / (id + ".png"), postprocess::detachment_fix(mask, o.fraction), polarity);
    });
    diag.print(err);
    return diag.empty() ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------

struct FoveaOpts {
    std::string fovea, disc, stats, output, polarity = "foreground=0";
    double threshold = 0.5;
};

inline int cmd_fovea(const FoveaOpts& o, std::ostream&, std::ostream& err) {
    const auto polarity = io::parse_polarity(o.polarity);
    const auto maps = collect(o.fovea, {".pmap"});
    std::map<std::string, fs::path> discs;
    if (!o.disc.empty()) discs = collect(o.disc, {".png"});
    postprocess::FoveaStats stats;
    if (!o.stats.empty()) stats = io::read_fovea_stats(o.stats);

    std::map<std::string, Point> results;
    std::mutex mu;
    Diagnostics diag;
    for_each_id(keys(maps), diag, [&](const std::string& id) {
        const auto fovea_p = io::read_probmap(maps.at(id));
        BinaryMask disc(fovea_p.width(), fovea_p.height());
        if (auto it = discs.find(id); it != discs.end()) disc = io::read_mask(it->second, polarity);
        const auto meta = make_meta(id, fovea_p.width(), fovea_p.height());
        const auto p = postprocess::localize_fovea(fovea_p, disc, stats, meta, o.threshold);
        std::lock_guard lock(mu);
        results[id] = p;
    });
    diag.print(err);
    if (!diag.empty()) return kExitFailure;
    io::write_coordinates(o.output, results);
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct FoveaStatsOpts {
    std::string labels, disc, output, polarity = "foreground=0";
    double k = 2.0;
};

inline int cmd_fovea_stats(const FoveaStatsOpts& o, std::ostream& out, std::ostream& err) {
    const auto polarity = io::parse_polarity(o.polarity);
    const auto labels = io::read_coordinates(o.labels);
    const auto discs = collect(o.disc, {".png"});
    std::vector<postprocess::FoveaSample> samples;
    std::size_t skipped = 0;
    for (const auto& [id, fovea] : labels) {
        auto it = discs.find(id);
        if (it == discs.end()) {
            ++skipped;
            continue;
        }
        const auto mask = io::read_mask(it->second, polarity);
        const auto c = centroid(mask);
        if (!c) {
            ++skipped;
            continue;
        }
        samples.push_back({resolution_group(mask.width(), mask.height()), *c, fovea});
    }
    if (samples.empty()) {
        err << "error: no image has both a fovea label and a visible disc\n";
        return kExitFailure;
    }
    const auto stats = postprocess::estimate_fovea_stats(samples, o.k);
    io::write_text(o.output, io::format_fovea_stats(stats));
    out << "groups=" << stats.groups().size() << " samples=" << samples.size() << " skipped=" << skipped << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvaluateOpts {
    std::string pred, gt, output, roc, polarity = "foreground=0";
    std::size_t min_area = 1;
    double dice_weight = 0.75;
    double f1_weight = 0.25;
};

inline int cmd_evaluate(const EvaluateOpts& o, std::ostream& out, std::ostream& err) {
    eval::EvalConfig cfg{o.min_area, io::parse_polarity(o.polarity), {o.dice_weight, o.f1_weight}};
    const auto report = eval::evaluate_run(o.pred, o.gt, cfg);
    const auto kv = eval::format_report_kv(report);
    out << eval::format_report_text(report) << "\n" << kv;
    if (!o.output.empty()) io::write_text(o.output, kv);

    if (!o.roc.empty()) {
        const auto gt = io::read_scores(fs::path(o.gt) / "classification.csv");
        const auto pred = io::read_scores(fs::path(o.pred) / "classification.csv");
        std::vector<double> scores;
        std::vector<int> labels;
        for (const auto& [id, label] : gt) {
            if (auto it = pred.find(id); it != pred.end()) {
                scores.push_back(it->second);
                labels.push_back(static_cast<int>(label));
            }
        }
        std::string csv = "threshold,fpr,tpr\n";
        for (const auto& p : metrics::roc_points(scores, labels)) {
            csv += io::format_double(p.threshold) + "," + io::format_double(p.fpr) + "," + io::format_double(p.tpr) + "\n";
        }
        io::write_text(o.roc, csv);
    }
    if (report.incomplete()) {
        for (const auto& e : report.errors) err << "warning: " << e << "\n";
        return kExitIncomplete;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct LossOpts {
    std::string scores, labels, kind = "all", polarity = "foreground=0";
    double smooth = 1.0;
};

inline int cmd_loss(const LossOpts& o, std::ostream& out, std::ostream&) {
    const fs::path sp(o.scores);
    const fs::path lp(o.labels);
    std::vector<double> scores;
    if (sp.extension() == ".pmap") {
        const auto m = io::decode_pmap(io::read_text(sp), sp.string());
        scores.assign(m.values.begin(), m.values.end());
    } else {
        scores = io::read_numbers(sp);
    }
    std::vector<int> labels;
    if (lp.extension() == ".png") {
        const auto mask = io::read_mask(lp, io::parse_polarity(o.polarity));
        labels.assign(mask.bits().begin(), mask.bits().end());
    } else {
        for (double v : io::read_numbers(lp)) {
            if (v != 0.0 && v != 1.0) throw FormatError(lp.string() + ": labels must be 0 or 1");
            labels.push_back(static_cast<int>(v));
        }
    }

    const bool all = o.kind == "all";
    if (!all && o.kind != "bce" && o.kind != "dice" && o.kind != "lovasz") {
        throw ParameterError("loss: --kind must be one of all, bce, dice, lovasz");
    }
    if (all || o.kind == "bce") out << "bce=" << io::format_double(losses::bce(scores, labels)) << "\n";
    if (all || o.kind == "dice") out << "dice=" << io::format_double(losses::dice_loss(scores, labels, o.smooth)) << "\n";
    if (all || o.kind == "lovasz") out << "lovasz=" << io::format_double(losses::lovasz_binary(scores, labels)) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ScheduleOpts {
    double f_orig = 0.03;
    double decay = 0.75;
    int period = 5;
    std::uint64_t seed = 0;
    int batch = 8;
    int epochs = 1;
    int first_epoch = 0;
    std::size_t n_minority = 0, n_majority = 0;
    std::string minority_ids, majority_ids;
    bool indices = false;
};

inline std::vector<std::string> read_id_list(const fs::path& path) {
    std::istringstream in(io::read_text(path));
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (auto t = io::trim(line); !t.empty()) ids.emplace_back(t);
    }
    return ids;
}

inline int cmd_schedule(const ScheduleOpts& o, std::ostream& out, std::ostream&) {
    sampler::ScheduleConfig cfg{o.f_orig, o.decay, o.period, o.seed, o.batch};
    sampler::validate(cfg);
    std::vector<std::string> minority;
    std::vector<std::string> majority;
    if (!o.minority_ids.empty()) minority = read_id_list(o.minority_ids);
    if (!o.majority_ids.empty()) majority = read_id_list(o.majority_ids);
    const std::size_t n_min = minority.empty() ? o.n_minority : minority.size();
    const std::size_t n_maj = majority.empty() ? o.n_majority : majority.size();

    for (int e = o.first_epoch; e < o.first_epoch + o.epochs; ++e) {
        out << "epoch=" << e << " fraction=" << io::format_double(sampler::minority_fraction(e, cfg));
        if (o.indices) {
            const auto draws = sampler::epoch_draws(n_min, n_maj, e, cfg);
            std::size_t n_drawn_min = 0;
            std::string list;
            for (const auto& d : draws) {
                n_drawn_min += d.minority;
                if (!list.empty()) list += ",";
                if (d.minority) list += minority.empty() ? "min:" + std::to_string(d.index) : minority[d.index];
                else list += majority.empty() ? "maj:" + std::to_string(d.index) : majority[d.index];
            }
            out << " draws=" << draws.size() << " minority_drawn=" << n_drawn_min << " samples=" << list;
        }
        out << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct OverlayOpts {
    std::string image, disc, atrophy, detachment, fovea, fovea_csv, id, output, polarity = "foreground=0";
};

inline int cmd_overlay(const OverlayOpts& o, std::ostream&, std::ostream&) {
    const auto polarity = io::parse_polarity(o.polarity);
    const auto image = io::read_raster(o.image);
    overlay::OverlayInput in;
    if (!o.disc.empty()) in.disc = io::read_mask(o.disc, polarity);
    if (!o.atrophy.empty()) in.atrophy = io::read_mask(o.atrophy, polarity);
    if (!o.detachment.empty()) in.detachment = io::read_mask(o.detachment, polarity);
    if (!o.fovea.empty()) {
        const auto parts = io::split(o.fovea, ',');
        if (parts.size() != 2) throw ParameterError("overlay: --fovea expects x,y");
        in.fovea = Point{io::parse_double(parts[0], "--fovea"), io::parse_double(parts[1], "--fovea")};
    } else if (!o.fovea_csv.empty()) {
        const auto id = o.id.empty() ? fs::path(o.image).stem().string() : o.id;
        const auto coords = io::read_coordinates(o.fovea_csv);
        auto it = coords.find(id);
        if (it == coords.end()) throw FormatError(o.fovea_csv + ": no coordinates for id " + id);
        in.fovea = it->second;
    }
    const auto canvas = overlay::render(image, in);
    if (fs::path(o.output).has_parent_path()) fs::create_directories(fs::path(o.output).parent_path());
    if (!cv::imwrite(o.output, canvas)) throw FormatError("cannot write " + o.output);
    return kExitOk;
}

}  // namespace detail

/// Parses argv and runs one subcommand. Output goes to `out`, diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    using namespace detail;
    CLI::App app{"Fundus segmentation post-processing and evaluation toolkit", "fundus_tk"};
    app.require_subcommand(1);
    const std::vector<std::string> polarities{"foreground=0", "foreground=255"};

    PreprocessOpts pre;
    auto* c_pre = app.add_subcommand("preprocess", "Illumination-correct an image or a directory of images");
    c_pre->add_option("-i,--input", pre.input, "Image file or directory")->required();
    c_pre->add_option("-o,--output", pre.output, "Output file or directory")->required();
    c_pre->add_option("--sigma", pre.sigma, "Gaussian sigma in px (0: width/30)");
    c_pre->add_option("--gain", pre.gain, "Contrast gain");
    c_pre->add_option("--offset", pre.offset, "Output offset")->check(CLI::Range(0, 255));
    c_pre->add_option("--resize", pre.resize, "Resize to W H before correction")->expected(2);

    StitchOpts st;
    auto* c_st = app.add_subcommand("stitch", "Average overlapping tiles into a probability map");
    c_st->add_option("-t,--tiles", st.tiles, "Directory of x<X>_y<Y>.pmap tiles (repeat per scale)")->required();
    c_st->add_option("-s,--scale", st.scales, "Square scale of each tile directory")->required();
    c_st->add_option("--patch", st.patch, "Tile size");
    c_st->add_option("--stride", st.stride, "Tile stride (default: scale - patch)");
    c_st->add_option("--width", st.width, "Output width (default: scale)");
    c_st->add_option("--height", st.height, "Output height (default: scale)");
    c_st->add_option("-o,--output", st.output, "Output PMAP file")->required();

    FuseOpts fu;
    auto* c_fu = app.add_subcommand("fuse", "Disc/atrophy maps to mutually exclusive masks");
    c_fu->add_option("--disc", fu.disc, "Disc PMAP file or directory")->required();
    c_fu->add_option("--atrophy", fu.atrophy, "Atrophy PMAP file or directory")->required();
    c_fu->add_option("--threshold", fu.threshold, "Probability threshold")->check(CLI::Range(0.0, 1.0));
    c_fu->add_option("-o,--output", fu.output, "Output directory (disc/, atrophy/)")->required();
    c_fu->add_option("--polarity", fu.polarity, "Mask polarity")->check(CLI::IsMember(polarities));

    DetachOpts de;
    auto* c_de = app.add_subcommand("detach-fix", "Replace large detachment predictions by the full image");
    c_de->add_option("-i,--input", de.input, "Mask PNG/PMAP file or directory")->required();
    c_de->add_option("-o,--output", de.output, "Output directory")->required();
    c_de->add_option("--fraction", de.fraction, "Area fraction triggering replacement")->check(CLI::Range(0.0, 1.0));
    c_de->add_option("--threshold", de.threshold, "Threshold for PMAP inputs")->check(CLI::Range(0.0, 1.0));
    c_de->add_option("--polarity", de.polarity, "Mask polarity")->check(CLI::IsMember(polarities));

    FoveaOpts fo;
    auto* c_fo = app.add_subcommand("fovea", "Fovea coordinates from probability maps and disc masks");
    c_fo->add_option("--fovea", fo.fovea, "Fovea PMAP file or directory")->required();
    c_fo->add_option("--disc", fo.disc, "Disc mask PNG file or directory");
    c_fo->add_option("--stats", fo.stats, "Fovea offset statistics file");
    c_fo->add_option("--threshold", fo.threshold, "Probability threshold")->check(CLI::Range(0.0, 1.0));
    c_fo->add_option("-o,--output", fo.output, "Output CSV (id,x,y)")->required();
    c_fo->add_option("--polarity", fo.polarity, "Mask polarity")->check(CLI::IsMember(polarities));

    FoveaStatsOpts fs_;
    auto* c_fs = app.add_subcommand("fovea-stats", "Estimate per-resolution fovea offset statistics from labels");
    c_fs->add_option("--labels", fs_.labels, "Fovea label CSV (id,x,y)")->required();
    c_fs->add_option("--disc", fs_.disc, "Ground-truth disc mask directory")->required();
    c_fs->add_option("--k", fs_.k, "Tolerance multiplier written to each group");
    c_fs->add_option("-o,--output", fs_.output, "Output stats file")->required();
    c_fs->add_option("--polarity", fs_.polarity, "Mask polarity")->check(CLI::IsMember(polarities));

    EvaluateOpts ev;
    auto* c_ev = app.add_subcommand("evaluate", "Score a prediction directory against ground truth");
    c_ev->add_option("--pred", ev.pred, "Prediction directory")->required();
    c_ev->add_option("--gt", ev.gt, "Ground-truth directory")->required();
    c_ev->add_option("--min-area", ev.min_area, "Foreground pixels for a predicted lesion to count as present");
    c_ev->add_option("--dice-weight", ev.dice_weight, "Weight of Dice in the combined score");
    c_ev->add_option("--f1-weight", ev.f1_weight, "Weight of detection F1 in the combined score");
    c_ev->add_option("-o,--output", ev.output, "Write key=value report to this file");
    c_ev->add_option("--roc", ev.roc, "Write ROC operating points CSV");
    c_ev->add_option("--polarity", ev.polarity, "Mask polarity")->check(CLI::IsMember(polarities));

    LossOpts lo;
    auto* c_lo = app.add_subcommand("loss", "Forward loss values for scores and labels");
    c_lo->add_option("--scores", lo.scores, "Scores (text numbers or PMAP)")->required();
    c_lo->add_option("--labels", lo.labels, "Labels (text 0/1 or mask PNG)")->required();
    c_lo->add_option("--kind", lo.kind, "all, bce, dice or lovasz");
    c_lo->add_option("--smooth", lo.smooth, "Dice loss smoothing constant");
    c_lo->add_option("--polarity", lo.polarity, "Mask polarity")->check(CLI::IsMember(polarities));

    ScheduleOpts sc;
    auto* c_sc = app.add_subcommand("schedule", "Balanced-sampling schedule fractions and draws");
    c_sc->add_option("--f-orig", sc.f_orig, "Minority prevalence in the data");
    c_sc->add_option("--decay", sc.decay, "Decay factor per period");
    c_sc->add_option("--period", sc.period, "Epochs per decay step");
    c_sc->add_option("--seed", sc.seed, "PRNG seed");
    c_sc->add_option("--batch", sc.batch, "Mini-batch size");
    c_sc->add_option("--epochs", sc.epochs, "Number of epochs to emit")->check(CLI::NonNegativeNumber);
    c_sc->add_option("--first-epoch", sc.first_epoch, "First epoch to emit")->check(CLI::NonNegativeNumber);
    c_sc->add_option("--minority", sc.n_minority, "Minority sample count");
    c_sc->add_option("--majority", sc.n_majority, "Majority sample count");
    c_sc->add_option("--minority-ids", sc.minority_ids, "File with one minority id per line");
    c_sc->add_option("--majority-ids", sc.majority_ids, "File with one majority id per line");
    c_sc->add_flag("--indices", sc.indices, "Emit the drawn samples per epoch");

    OverlayOpts ov;
    auto* c_ov = app.add_subcommand("overlay", "Render predictions onto a fundus image");
    c_ov->add_option("--image", ov.image, "Fundus image")->required();
    c_ov->add_option("--disc", ov.disc, "Disc mask");
    c_ov->add_option("--atrophy", ov.atrophy, "Atrophy mask");
    c_ov->add_option("--detachment", ov.detachment, "Detachment mask");
    auto* fovea_opt = c_ov->add_option("--fovea", ov.fovea, "Fovea as x,y");
    c_ov->add_option("--fovea-csv", ov.fovea_csv, "Fovea CSV (id,x,y)")->excludes(fovea_opt);
    c_ov->add_option("--id", ov.id, "Row of --fovea-csv to use (default: image stem)");
    c_ov->add_option("-o,--output", ov.output, "Output PNG")->required();
    c_ov->add_option("--polarity", ov.polarity, "Mask polarity")->check(CLI::IsMember(polarities));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (c_pre->parsed()) return cmd_preprocess(pre, out, err);
        if (c_st->parsed()) return cmd_stitch(st, out, err);
        if (c_fu->parsed()) return cmd_fuse(fu, out, err);
        if (c_de->parsed()) return cmd_detach_fix(de, out, err);
        if (c_fo->parsed()) return cmd_fovea(fo, out, err);
        if (c_fs->parsed()) return cmd_fovea_stats(fs_, out, err);
        if (c_ev->parsed()) return cmd_evaluate(ev, out, err);
        if (c_lo->parsed()) return cmd_loss(lo, out, err);
        if (c_sc->parsed()) return cmd_schedule(sc, out, err);
        if (c_ov->parsed()) return cmd_overlay(ov, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<const char*> argv{"fundus_tk"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ftk::cli
