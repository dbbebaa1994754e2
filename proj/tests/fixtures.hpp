#pragma once

// Synthetic challenge-style directories for evaluation and CLI tests.

#include <filesystem>
#include <map>
#include <random>
#include <string>

#include "fundus_tk/io.hpp"
#include "fundus_tk/postprocess.hpp"

namespace ftk::fixture {

namespace fs = std::filesystem;

/// Fresh empty directory under the system temp dir.
inline fs::path temp_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("fundus_tk_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct RunData {
    std::map<std::string, double> labels;
    std::map<std::string, Point> fovea;
    std::map<std::string, std::map<std::string, BinaryMask>> masks;  // class -> id -> mask
};

/// n images of w x h: half labelled positive, discs on every image, atrophy on
/// positives only, detachment on the first n/2 images.
inline RunData make_run(std::mt19937_64& rng, int n = 12, int w = 64, int h = 48) {
    std::uniform_real_distribution<double> ux(12.0, w - 12.0), uy(12.0, h - 12.0), ur(3.0, 8.0);
    RunData d;
    for (int i = 0; i < n; ++i) {
        const std::string id = "img" + std::string(i < 9 ? "0" : "") + std::to_string(i + 1);
        const bool positive = i % 2 == 0;
        d.labels[id] = positive ? 1.0 : 0.0;
        d.fovea[id] = {ux(rng), uy(rng)};
        d.masks["disc"].emplace(id, postprocess::rasterize_fovea({ux(rng), uy(rng)}, ur(rng), w, h));
        d.masks["atrophy"].emplace(id, positive ? postprocess::rasterize_fovea({ux(rng), uy(rng)}, ur(rng), w, h)
                                                : BinaryMask(w, h));
        d.masks["detachment"].emplace(id, i < n / 2 ? postprocess::rasterize_fovea({ux(rng), uy(rng)}, ur(rng), w, h)
                                                    : BinaryMask(w, h));
    }
    return d;
}

inline void write_run(const fs::path& dir, const RunData& d, const std::string& score_header = "score") {
    fs::create_directories(dir);
    std::string csv = "id," + score_header + "\n";
    for (const auto& [id, v] : d.labels) csv += id + "," + io::format_double(v) + "\n";
    io::write_text(dir / "classification.csv", csv);
    io::write_coordinates(dir / "fovea.csv", d.fovea);
    for (const auto& [cls, by_id] : d.masks) {
        fs::create_directories(dir / cls);
        for (const auto& [id, m] : by_id) io::write_mask(dir / cls / (id + ".png"), m);
    }
}

}  // namespace ftk::fixture
