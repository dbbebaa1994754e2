#pragma once

// On-disk formats.
//
//   PMAP   "PMAP" | u32 width | u32 height | u32 channels | f32 values[w*h*c]
//          all little-endian, values row-major (channel-interleaved).
//   masks  8-bit single-channel PNG. Polarity foreground_zero (default):
//          value < 128 is foreground; foreground_high: value >= 128 is foreground.
//   CSV    coordinates "id,x,y" (x = column, y = row, origin top-left),
//          scores "id,score".
//   stats  key=value text with one [WxH] section per resolution group.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "fundus_tk/core.hpp"
#include "fundus_tk/postprocess.hpp"

namespace ftk::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Text helpers

/// Shortest decimal representation that round-trips.
inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

/// Fixed-point representation with the given number of decimals.
inline std::string format_fixed(double v, int decimals) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
    return std::string(buf.data(), end);
}

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view s, const std::string& context) {
    s = trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw FormatError(context + ": expected a number, got '" + std::string(s) + "'");
    }
    return v;
}

inline std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << text;
    if (!out) throw FormatError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// PMAP

struct PmapData {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t channels = 0;
    std::vector<float> values;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline std::string encode_pmap(const PmapData& d) {
    std::string out("PMAP");
    detail::put_u32(out, d.width);
    detail::put_u32(out, d.height);
    detail::put_u32(out, d.channels);
    for (float f : d.values) {
        std::uint32_t bits = 0;
        std::memcpy(&bits, &f, sizeof bits);
        detail::put_u32(out, bits);
    }
    return out;
}

inline PmapData decode_pmap(std::string_view bytes, const std::string& name = "PMAP") {
    if (bytes.size() < 16 || bytes.substr(0, 4) != "PMAP") throw FormatError(name + ": missing PMAP header");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    PmapData d{detail::get_u32(p + 4), detail::get_u32(p + 8), detail::get_u32(p + 12), {}};
    if (d.width == 0 || d.height == 0 || d.channels == 0) throw FormatError(name + ": zero dimension");
    const std::uint64_t n = static_cast<std::uint64_t>(d.width) * d.height * d.channels;
    if (bytes.size() != 16 + 4 * n) throw FormatError(name + ": payload size does not match header");
    d.values.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        const std::uint32_t bits = detail::get_u32(p + 16 + 4 * i);
        std::memcpy(&d.values[i], &bits, sizeof bits);
    }
    return d;
}

inline ProbMap to_probmap(const PmapData& d, const std::string& name = "PMAP") {
    if (d.channels != 1) throw FormatError(name + ": expected a single-channel map");
    std::vector<double> v(d.values.begin(), d.values.end());
    for (double x : v)
        if (!(x >= 0.0 && x <= 1.0)) throw FormatError(name + ": probability outside [0,1]");
    return ProbMap(static_cast<int>(d.width), static_cast<int>(d.height), std::move(v));
}

inline PmapData from_probmap(const ProbMap& m) {
    PmapData d{static_cast<std::uint32_t>(m.width()), static_cast<std::uint32_t>(m.height()), 1, {}};
    d.values.assign(m.values().begin(), m.values().end());
    return d;
}

inline ProbMap read_probmap(const fs::path& path) {
    return to_probmap(decode_pmap(read_text(path), path.string()), path.string());
}

inline void write_probmap(const fs::path& path, const ProbMap& m) { write_text(path, encode_pmap(from_probmap(m))); }

// ---------------------------------------------------------------------------
// Images and masks

enum class Polarity { foreground_zero, foreground_high };

inline Polarity parse_polarity(std::string_view s) {
    if (s == "foreground=0" || s == "0") return Polarity::foreground_zero;
    if (s == "foreground=255" || s == "255") return Polarity::foreground_high;
    throw ParameterError("unknown mask polarity '" + std::string(s) + "' (use foreground=0 or foreground=255)");
}

inline BinaryMask mask_from_gray(const cv::Mat& gray, Polarity polarity) {
    CV_Assert(gray.type() == CV_8UC1);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(gray.rows) * gray.cols);
    for (int y = 0; y < gray.rows; ++y) {
        const auto* row = gray.ptr<std::uint8_t>(y);
        for (int x = 0; x < gray.cols; ++x) {
            const bool high = row[x] >= 128;
            bits[static_cast<std::size_t>(y) * gray.cols + x] = polarity == Polarity::foreground_high ? high : !high;
        }
    }
    return BinaryMask(gray.cols, gray.rows, std::move(bits));
}

inline BinaryMask read_mask(const fs::path& path, Polarity polarity = Polarity::foreground_zero) {
    cv::Mat img = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
    if (img.empty()) throw FormatError("cannot read mask image " + path.string());
    return mask_from_gray(img, polarity);
}

inline cv::Mat mask_to_gray(const BinaryMask& mask, Polarity polarity) {
    const std::uint8_t fg = polarity == Polarity::foreground_zero ? 0 : 255;
    const std::uint8_t bg = 255 - fg;
    cv::Mat img(mask.height(), mask.width(), CV_8UC1);
    for (int y = 0; y < mask.height(); ++y) {
        auto* row = img.ptr<std::uint8_t>(y);
        for (int x = 0; x < mask.width(); ++x) row[x] = mask.get(x, y) ? fg : bg;
    }
    return img;
}

inline void write_mask(const fs::path& path, const BinaryMask& mask, Polarity polarity = Polarity::foreground_zero) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    if (!cv::imwrite(path.string(), mask_to_gray(mask, polarity))) throw FormatError("cannot write " + path.string());
}

/// Raster (RGB order) from an OpenCV BGR or gray matrix.
inline Raster raster_from_mat(const cv::Mat& img) {
    CV_Assert(img.depth() == CV_8U && (img.channels() == 1 || img.channels() == 3));
    const int nc = img.channels();
    Raster r(img.cols, img.rows, nc);
    for (int y = 0; y < img.rows; ++y) {
        const auto* row = img.ptr<std::uint8_t>(y);
        for (int x = 0; x < img.cols; ++x) {
            if (nc == 1) {
                r.at(x, y) = row[x];
            } else {
                r.at(x, y, 0) = row[3 * x + 2];
                r.at(x, y, 1) = row[3 * x + 1];
                r.at(x, y, 2) = row[3 * x + 0];
            }
        }
    }
    return r;
}

inline cv::Mat mat_from_raster(const Raster& r) {
    const int nc = r.channels();
    cv::Mat img(r.height(), r.width(), nc == 1 ? CV_8UC1 : CV_8UC3);
    for (int y = 0; y < r.height(); ++y) {
        auto* row = img.ptr<std::uint8_t>(y);
        for (int x = 0; x < r.width(); ++x) {
            if (nc == 1) {
                row[x] = r.at(x, y);
            } else {
                row[3 * x + 2] = r.at(x, y, 0);
                row[3 * x + 1] = r.at(x, y, 1);
                row[3 * x + 0] = r.at(x, y, 2);
            }
        }
    }
    return img;
}

inline Raster read_raster(const fs::path& path) {
    cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (img.empty()) throw FormatError("cannot read image " + path.string());
    return raster_from_mat(img);
}

inline void write_raster(const fs::path& path, const Raster& r) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    if (!cv::imwrite(path.string(), mat_from_raster(r))) throw FormatError("cannot write " + path.string());
}

/// Image size without keeping the pixels around.
inline std::pair<int, int> image_size(const fs::path& path) {
    cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (img.empty()) throw FormatError("cannot read image " + path.string());
    return {img.cols, img.rows};
}

// ---------------------------------------------------------------------------
// Directory listing

/// Files with one of the given extensions, keyed by stem, sorted by id.
inline std::map<std::string, fs::path> list_by_id(const fs::path& dir, std::initializer_list<std::string_view> exts) {
    if (!fs::is_directory(dir)) throw FormatError("not a directory: " + dir.string());
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (std::ranges::find(exts, std::string_view(ext)) == exts.end()) continue;
        const auto id = entry.path().stem().string();
        if (!out.emplace(id, entry.path()).second) throw FormatError("duplicate id '" + id + "' in " + dir.string());
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::vector<std::vector<std::string>> read_csv(const fs::path& path, std::size_t columns,
                                                      std::string_view first_header) {
    const auto text = read_text(path);
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    bool header_seen = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        if (!header_seen) {
            header_seen = true;
            if (cells.size() != columns || cells[0] != first_header) {
                throw FormatError(path.string() + ": unexpected header '" + std::string(trim(line)) + "'");
            }
            continue;
        }
        if (cells.size() != columns) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(columns) + " columns");
        }
        rows.push_back(std::move(cells));
    }
    if (!header_seen) throw FormatError(path.string() + ": empty CSV");
    return rows;
}

}  // namespace detail

inline std::map<std::string, Point> read_coordinates(const fs::path& path) {
    std::map<std::string, Point> out;
    for (const auto& row : detail::read_csv(path, 3, "id")) {
        const std::string ctx = path.string() + " id " + row[0];
        Point p{parse_double(row[1], ctx), parse_double(row[2], ctx)};
        if (!is_finite(p)) throw FormatError(ctx + ": non-finite coordinate");
        if (!out.emplace(row[0], p).second) throw FormatError(ctx + ": duplicate id");
    }
    return out;
}

inline std::string format_coordinates(const std::map<std::string, Point>& coords) {
    std::string out = "id,x,y\n";
    for (const auto& [id, p] : coords) out += id + "," + format_double(p.x) + "," + format_double(p.y) + "\n";
    return out;
}

inline void write_coordinates(const fs::path& path, const std::map<std::string, Point>& coords) {
    write_text(path, format_coordinates(coords));
}

/// "id,<value>" CSV; the second header cell is free (score, label, ...).
inline std::map<std::string, double> read_scores(const fs::path& path) {
    std::map<std::string, double> out;
    for (const auto& row : detail::read_csv(path, 2, "id")) {
        const std::string ctx = path.string() + " id " + row[0];
        if (!out.emplace(row[0], parse_double(row[1], ctx)).second) throw FormatError(ctx + ": duplicate id");
    }
    return out;
}

/// Whitespace/comma separated numbers.
inline std::vector<double> read_numbers(const fs::path& path) {
    auto text = read_text(path);
    std::ranges::replace(text, ',', ' ');
    std::istringstream in(text);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok, path.string()));
    return out;
}

// ---------------------------------------------------------------------------
// Fovea statistics config

inline bool is_group_key(std::string_view s) {
    const auto x = s.find('x');
    if (x == std::string_view::npos || x == 0 || x + 1 == s.size()) return false;
    auto digits = [](std::string_view d) { return std::ranges::all_of(d, [](char c) { return c >= '0' && c <= '9'; }); };
    return digits(s.substr(0, x)) && digits(s.substr(x + 1));
}

inline postprocess::FoveaStats parse_fovea_stats(const std::string& text, const std::string& name = "stats") {
    postprocess::FoveaStats stats;
    std::istringstream in(text);
    std::string line;
    std::string group;
    std::map<std::string, double> fields;
    std::map<std::string, bool> seen;
    int line_no = 0;

    auto flush = [&] {
        if (group.empty()) return;
        for (const char* key : {"mean_dx", "mean_dy", "sd_dx", "sd_dy"}) {
            if (!fields.contains(key)) throw ConfigError(name + ": section [" + group + "] lacks " + key);
        }
        postprocess::FoveaGroupStats s{fields["mean_dx"], fields["mean_dy"], fields["sd_dx"], fields["sd_dy"],
                                       fields.contains("k") ? fields["k"] : 2.0};
        stats.set(group, s);
        fields.clear();
    };

    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = name + ":" + std::to_string(line_no);
        auto body = trim(line);
        if (body.empty() || body.front() == '#' || body.front() == ';') continue;
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(where + ": malformed section header");
            flush();
            group = std::string(trim(body.substr(1, body.size() - 2)));
            if (!is_group_key(group)) throw ConfigError(where + ": section must be a WxH resolution group");
            if (seen[group]) throw ConfigError(where + ": duplicate section [" + group + "]");
            seen[group] = true;
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
        if (group.empty()) throw ConfigError(where + ": key outside of a [WxH] section");
        const std::string key(trim(body.substr(0, eq)));
        if (key != "mean_dx" && key != "mean_dy" && key != "sd_dx" && key != "sd_dy" && key != "k") {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
        try {
            fields[key] = parse_double(body.substr(eq + 1), where);
        } catch (const FormatError& e) {
            throw ConfigError(e.what());
        }
    }
    flush();
    return stats;
}

inline postprocess::FoveaStats read_fovea_stats(const fs::path& path) {
    std::string text;
    try {
        text = read_text(path);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
    return parse_fovea_stats(text, path.string());
}

inline std::string format_fovea_stats(const postprocess::FoveaStats& stats) {
    std::string out;
    for (const auto& [group, s] : stats.groups()) {
        if (!out.empty()) out += "\n";
        out += "[" + group + "]\n";
        out += "mean_dx = " + format_double(s.mean_dx) + "\n";
        out += "mean_dy = " + format_double(s.mean_dy) + "\n";
        out += "sd_dx = " + format_double(s.sd_dx) + "\n";
        out += "sd_dy = " + format_double(s.sd_dy) + "\n";
        out += "k = " + format_double(s.k) + "\n";
    }
    return out;
}

}  // namespace ftk::io
