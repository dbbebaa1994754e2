#pragma once

// Decaying class-balanced sampling schedule.
//
// Training starts from balanced mini-batches (minority fraction 0.5) and the
// excess over the natural prevalence shrinks geometrically:
//
//     f(e) = f_orig + (0.5 - f_orig) * decay^floor(e / period)
//
// Draws use SplitMix64 so index sequences are reproducible in any language:
//
//     state  = seed XOR (epoch * 0xD1B54A32D192ED03)
//     next() : state += 0x9E3779B97F4A7C15
//              z = state
//              z = (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9
//              z = (z XOR (z >> 27)) * 0x94D049BB133111EB
//              return z XOR (z >> 31)
//
// For each draw: u = (next() >> 11) * 2^-53; the draw is minority iff u < f(e);
// the within-class index is next() mod class_size (with replacement).

#include <cmath>
#include <cstdint>
#include <vector>

#include "fundus_tk/errors.hpp"

namespace ftk::sampler {

struct ScheduleConfig {
    double f_orig = 0.03;
    double decay = 0.75;
    int period = 5;
    std::uint64_t seed = 0;
    int batch = 8;
};

inline void validate(const ScheduleConfig& cfg) {
    if (!(cfg.f_orig > 0.0 && cfg.f_orig < 0.5)) throw ParameterError("schedule: f_orig must lie in (0, 0.5)");
    if (!(cfg.decay > 0.0 && cfg.decay < 1.0)) throw ParameterError("schedule: decay must lie in (0, 1)");
    if (cfg.period < 1) throw ParameterError("schedule: period must be >= 1");
    if (cfg.batch < 1) throw ParameterError("schedule: batch must be >= 1");
}

inline double minority_fraction(int epoch, const ScheduleConfig& cfg) {
    validate(cfg);
    if (epoch < 0) throw ParameterError("minority_fraction: epoch must be >= 0");
    const int steps = epoch / cfg.period;
    return cfg.f_orig + (0.5 - cfg.f_orig) * std::pow(cfg.decay, steps);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

inline SplitMix64 epoch_generator(std::uint64_t seed, int epoch) {
    return SplitMix64(seed ^ (static_cast<std::uint64_t>(epoch) * 0xD1B54A32D192ED03ULL));
}

struct Draw {
    bool minority = false;
    std::size_t index = 0;  // into the minority or majority list

    friend bool operator==(const Draw&, const Draw&) = default;
};

/// One epoch of draws: ceil((n_minority + n_majority) / batch) * batch entries.
inline std::vector<Draw> epoch_draws(std::size_t n_minority, std::size_t n_majority, int epoch,
                                     const ScheduleConfig& cfg) {
    if (n_minority == 0 || n_majority == 0) throw ParameterError("epoch_indices: both classes need samples");
    const double f = minority_fraction(epoch, cfg);
    const auto batch = static_cast<std::size_t>(cfg.batch);
    const std::size_t total = (n_minority + n_majority + batch - 1) / batch * batch;

    auto rng = epoch_generator(cfg.seed, epoch);
    std::vector<Draw> out;
    out.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        const bool minority = rng.next_unit() < f;
        const std::uint64_t n = minority ? n_minority : n_majority;
        out.push_back({minority, static_cast<std::size_t>(rng.next() % n)});
    }
    return out;
}

/// Draws resolved to concrete sample ids.
template <typename Id>
std::vector<Id> epoch_indices(const std::vector<Id>& minority_ids, const std::vector<Id>& majority_ids, int epoch,
                              const ScheduleConfig& cfg) {
    const auto draws = epoch_draws(minority_ids.size(), majority_ids.size(), epoch, cfg);
    std::vector<Id> out;
    out.reserve(draws.size());
    for (const auto& d : draws) out.push_back(d.minority ? minority_ids[d.index] : majority_ids[d.index]);
    return out;
}

}  // namespace ftk::sampler
