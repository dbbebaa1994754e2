#pragma once

// Run-level evaluation over a prediction directory and a ground-truth
// directory sharing one layout:
//
//   classification.csv   id,score   (ground truth: id,label with 0/1)
//   fovea.csv            id,x,y
//   disc/<id>.png        lesion masks
//   atrophy/<id>.png
//   detachment/<id>.png
//
// Ground truth defines the id set. A task is evaluated when its ground-truth
// file or directory exists. Missing or unreadable predictions become per-id
// error entries and the report is flagged incomplete.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fundus_tk/io.hpp"
#include "fundus_tk/metrics.hpp"
#include "fundus_tk/parallel.hpp"

namespace ftk::eval {

namespace fs = std::filesystem;

inline constexpr std::array<const char*, 3> kLesionClasses{"disc", "atrophy", "detachment"};

struct EvalConfig {
    std::size_t min_area = 1;  // predicted presence needs at least this many foreground pixels
    io::Polarity polarity = io::Polarity::foreground_zero;
    metrics::ScoreWeights weights;
};

struct ClassReport {
    std::string name;
    bool evaluated = false;
    std::optional<double> dice_mean;  // nullopt when every ground truth is empty
    double f1_detection = 0.0;
    metrics::DetectionCounts counts;
    std::size_t n_images = 0;
    std::size_t n_excluded = 0;  // empty ground truth, left out of the Dice mean
    std::optional<double> weighted_score;
};

struct EvalReport {
    std::optional<double> auc;
    std::size_t n_classification = 0;
    std::optional<double> fovea_mean_euclidean;
    std::size_t n_fovea = 0;
    std::array<ClassReport, 3> classes;
    std::vector<std::string> errors;  // sorted: task, then id

    bool incomplete() const { return !errors.empty(); }

    const ClassReport& lesion(std::string_view name) const {
        for (const auto& c : classes)
            if (c.name == name) return c;
        throw ParameterError("unknown lesion class " + std::string(name));
    }
};

namespace detail {

inline void evaluate_classification(const fs::path& pred_dir, const fs::path& gt_dir, EvalReport& report) {
    const auto gt_path = gt_dir / "classification.csv";
    if (!fs::exists(gt_path)) return;
    const auto gt = io::read_scores(gt_path);
    std::map<std::string, double> pred;
    if (fs::exists(pred_dir / "classification.csv")) {
        pred = io::read_scores(pred_dir / "classification.csv");
    }

    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& [id, label] : gt) {
        if (label != 0.0 && label != 1.0) throw FormatError(gt_path.string() + ": label for " + id + " is not 0/1");
        auto it = pred.find(id);
        if (it == pred.end()) {
            report.errors.push_back("classification " + id + ": missing prediction");
            continue;
        }
        if (!(it->second >= 0.0 && it->second <= 1.0)) {
            report.errors.push_back("classification " + id + ": score outside [0,1]");
            continue;
        }
        scores.push_back(it->second);
        labels.push_back(static_cast<int>(label));
    }
    report.n_classification = scores.size();
    try {
        report.auc = metrics::auc(scores, labels);
    } catch (const UndefinedMetricError& e) {
        report.errors.push_back(std::string("classification: ") + e.what());
    }
}

inline void evaluate_fovea(const fs::path& pred_dir, const fs::path& gt_dir, EvalReport& report) {
    const auto gt_path = gt_dir / "fovea.csv";
    if (!fs::exists(gt_path)) return;
    const auto gt = io::read_coordinates(gt_path);
    std::map<std::string, Point> pred;
    if (fs::exists(pred_dir / "fovea.csv")) pred = io::read_coordinates(pred_dir / "fovea.csv");

    double sum = 0.0;
    for (const auto& [id, g] : gt) {
        auto it = pred.find(id);
        if (it == pred.end()) {
            report.errors.push_back("fovea " + id + ": missing prediction");
            continue;
        }
        sum += metrics::euclidean(it->second, g);
        ++report.n_fovea;
    }
    if (report.n_fovea > 0) report.fovea_mean_euclidean = sum / static_cast<double>(report.n_fovea);
}

struct MaskTerm {
    bool ok = false;
    std::string error;
    metrics::Overlap overlap;
};

inline void evaluate_lesion(const fs::path& pred_dir, const fs::path& gt_dir, const EvalConfig& cfg,
                            ClassReport& out, std::vector<std::string>& errors) {
    const auto gt_sub = gt_dir / out.name;
    if (!fs::is_directory(gt_sub)) return;
    out.evaluated = true;
    const auto gt_files = io::list_by_id(gt_sub, {".png"});
    std::map<std::string, fs::path> pred_files;
    if (fs::is_directory(pred_dir / out.name)) pred_files = io::list_by_id(pred_dir / out.name, {".png"});

    std::vector<std::pair<std::string, fs::path>> items(gt_files.begin(), gt_files.end());
    std::vector<MaskTerm> terms(items.size());
    parallel_for(items.size(), [&](std::size_t i) {
        const auto& [id, gt_path] = items[i];
        auto it = pred_files.find(id);
        if (it == pred_files.end()) {
            terms[i].error = "missing prediction";
            return;
        }
        const auto gt = io::read_mask(gt_path, cfg.polarity);
        BinaryMask pred(1, 1);
        try {
            pred = io::read_mask(it->second, cfg.polarity);
        } catch (const FormatError& e) {
            terms[i].error = e.what();
            return;
        }
        if (pred.width() != gt.width() || pred.height() != gt.height()) {
            terms[i].error = "size " + resolution_group(pred.width(), pred.height()) + " differs from ground truth " +
                             resolution_group(gt.width(), gt.height());
            return;
        }
        terms[i] = {true, {}, metrics::overlap(pred, gt)};
    });

    double dice_sum = 0.0;
    std::size_t dice_n = 0;
    std::vector<bool> pred_present;
    std::vector<bool> gt_present;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& t = terms[i];
        if (!t.ok) {
            errors.push_back(out.name + " " + items[i].first + ": " + t.error);
            continue;
        }
        ++out.n_images;
        pred_present.push_back(t.overlap.pred >= std::max<std::size_t>(cfg.min_area, 1));
        gt_present.push_back(t.overlap.gt > 0);
        if (t.overlap.gt == 0) {
            ++out.n_excluded;
            continue;
        }
        dice_sum += 2.0 * static_cast<double>(t.overlap.intersection) /
                    static_cast<double>(t.overlap.pred + t.overlap.gt);
        ++dice_n;
    }
    if (dice_n > 0) out.dice_mean = dice_sum / static_cast<double>(dice_n);
    out.counts = metrics::count_detections(pred_present, gt_present);
    out.f1_detection = metrics::f1(out.counts);
    if (out.dice_mean) out.weighted_score = metrics::weighted_score(*out.dice_mean, out.f1_detection, cfg.weights);
}

}  // namespace detail

inline EvalReport evaluate_run(const fs::path& pred_dir, const fs::path& gt_dir, const EvalConfig& cfg = {}) {
    if (!fs::is_directory(gt_dir)) throw FormatError("ground-truth directory not found: " + gt_dir.string());
    if (!fs::is_directory(pred_dir)) throw FormatError("prediction directory not found: " + pred_dir.string());

    EvalReport report;
    for (std::size_t c = 0; c < kLesionClasses.size(); ++c) report.classes[c].name = kLesionClasses[c];

    detail::evaluate_classification(pred_dir, gt_dir, report);
    detail::evaluate_fovea(pred_dir, gt_dir, report);
    for (auto& cls : report.classes) detail::evaluate_lesion(pred_dir, gt_dir, cfg, cls, report.errors);
    return report;
}

/// Machine-readable key=value lines, fixed key order.
inline std::string format_report_kv(const EvalReport& r) {
    std::string out;
    auto line = [&out](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
    auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string("na"); };

    line("auc", opt(r.auc));
    line("auc.n", std::to_string(r.n_classification));
    line("fovea.mean_euclidean", opt(r.fovea_mean_euclidean));
    line("fovea.n", std::to_string(r.n_fovea));
    for (const auto& c : r.classes) {
        if (!c.evaluated) continue;
        line(c.name + ".dice_mean", opt(c.dice_mean));
        line(c.name + ".f1_detection", io::format_double(c.f1_detection));
        line(c.name + ".weighted_score", opt(c.weighted_score));
        line(c.name + ".tp", std::to_string(c.counts.tp));
        line(c.name + ".fp", std::to_string(c.counts.fp));
        line(c.name + ".fn", std::to_string(c.counts.fn));
        line(c.name + ".tn", std::to_string(c.counts.tn));
        line(c.name + ".n_images", std::to_string(c.n_images));
        line(c.name + ".n_excluded", std::to_string(c.n_excluded));
    }
    line("incomplete", r.incomplete() ? "1" : "0");
    for (const auto& e : r.errors) line("error", e);
    return out;
}

/// Human-readable summary.
inline std::string format_report_text(const EvalReport& r) {
    auto num = [](const std::optional<double>& v) { return v ? io::format_fixed(*v, 4) : std::string("n/a"); };
    std::string out = "Evaluation report\n";
    out += "  PM detection         AUC        " + num(r.auc) + "  (n=" + std::to_string(r.n_classification) + ")\n";
    out += "  Fovea localization   Euclidean  " + num(r.fovea_mean_euclidean) + " px  (n=" +
           std::to_string(r.n_fovea) + ")\n";
    for (const auto& c : r.classes) {
        if (!c.evaluated) continue;
        std::string name = c.name;
        name.resize(12, ' ');
        out += "  " + name + "         Dice       " + num(c.dice_mean) + "  F1 " + io::format_fixed(c.f1_detection, 4) +
               "  score " + num(c.weighted_score) + "  (n=" + std::to_string(c.n_images) +
               ", empty gt=" + std::to_string(c.n_excluded) + ")\n";
    }
    if (r.incomplete()) {
        out += "  WARNING: " + std::to_string(r.errors.size()) + " problem(s); metrics cover the remaining images\n";
        for (const auto& e : r.errors) out += "    " + e + "\n";
    }
    return out;
}

}  // namespace ftk::eval
