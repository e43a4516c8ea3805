#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lnspdc {

// splitmix64 with explicit transforms: streams are bit-identical across
// platforms for a given seed (no implementation-defined std distributions).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {
        // splitmix64 warmup to decorrelate small seeds
        for (int i = 0; i < 4; ++i) next();
    }
    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; } // [0,1)
    double exponential(double mean);
    double normal(double sigma);
    bool bernoulli(double p) { return u01() < p; }
    std::uint64_t poisson(double mean);

private:
    std::uint64_t s_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// channel 0 = signal arm, 1 = idler arm A, 2 = idler arm B.
struct TagRecord {
    std::uint16_t channel = 0;
    std::int64_t timestamp_ps = 0;
};

struct TagStream {
    std::vector<TagRecord> records; // non-decreasing timestamps
    std::uint16_t channel_count = 2;
    bool is_sorted() const;
};

// Synthetic pair source around the measurement layout: Poisson pair
// emission, independent per-arm survival, Gaussian timing jitter, optional
// 50:50 split of the idler onto channels 1/2, independent dark counts per
// detector. Everything is reproducible from the seed.
struct SourceConfig {
    double pair_rate_hz = 1e6;
    double duration_s = 1.0;
    double eta_s = 0.4;
    double eta_i = 0.4;
    double dark_s_hz = 0.0;
    double dark_i_hz = 0.0; // per idler detector
    double jitter_sigma_ps = 0.0;
    bool splitter = false;
    std::uint64_t seed = 1;

    void validate() const;
};

TagStream simulate_tags(const SourceConfig& cfg);

struct Histogram {
    std::int64_t bin_ps = 0;
    std::int64_t span_ps = 0;
    std::vector<std::int64_t> counts;
    std::int64_t n_a = 0, n_b = 0; // singles used

    double delay_of_bin_ps(std::size_t k) const {
        return -static_cast<double>(span_ps) / 2.0 + (static_cast<double>(k) + 0.5) * bin_ps;
    }
};

// Exact pairwise counts of t_b − t_a within ±span/2, single sorted sweep.
// bin must divide span; the stream must be sorted.
Histogram coincidence_histogram(const TagStream& stream, std::uint16_t ch_a, std::uint16_t ch_b,
                                std::int64_t bin_ps, std::int64_t span_ps);

struct CarResult {
    double car = 0.0;
    double sigma = 0.0;
    std::int64_t peak_counts = 0;
    std::int64_t floor_counts = 0;
    double floor_per_bin = 0.0;
    bool lower_bound = false; // zero floor counts: car is a lower bound
};

// CAR = peak/floor − 1, floor scaled to the peak-window width; Poisson
// error propagation. The floor region |t| >= floor_min_ps must exclude the
// peak window.
CarResult car(const Histogram& hist, std::int64_t peak_window_ps, std::int64_t floor_min_ps);

// PCR = C_i·C_s / (splitter_factor · C_si); factor 2 matches the layout
// where both photons pass one 50:50 splitter, factor 1 the direct one.
double pcr(double c_s_hz, double c_i_hz, double c_si_hz, int splitter_factor);

struct HeraldedG2Result {
    double g2 = 0.0;
    double sigma = 0.0;
    std::int64_t n_signal = 0;
    std::int64_t c_si1 = 0, c_si2 = 0, c_si1i2 = 0;
};

// g_H²(0) = C_si1i2 · C_s / (2 · C_si1 · C_si2), counting idler tags within
// ±window of each signal tag (pair counts; the threefold term is n1·n2 per
// herald). include_factor_2=false drops the 2 for the other literature
// convention. Uncertainty by Poisson Monte-Carlo resampling of the four
// counts.
HeraldedG2Result heralded_g2(const TagStream& stream, std::int64_t window_ps,
                             bool include_factor_2 = true, int resamples = 1000,
                             std::uint64_t resample_seed = 1);

struct AnalyzeParams {
    std::int64_t bin_ps = 50;
    std::int64_t span_ps = 40000;
    std::int64_t peak_window_ps = 1000; // total width of the peak window
    std::int64_t floor_min_ps = 10000;  // floor estimated from |t| >= this
    int splitter_factor = 2;            // matches the beamsplit detection layout
    double duration_s = 0.0;            // 0: estimated from the tag span
    int g2_resamples = 1000;
    std::uint64_t g2_seed = 1;
    bool g2_factor_2 = true;
};

// Full coincidence analysis between the signal channel and idler arm A,
// plus heralded g² when an idler arm B is present.
struct CoincidenceReport {
    double duration_s = 0.0;
    double c_s_hz = 0.0;  // singles, channel 0
    double c_i_hz = 0.0;  // singles, channel 1
    Histogram histogram;  // C_si(t)
    double c_si_hz = 0.0; // peak-window coincidence rate
    double accidental_floor_per_bin = 0.0;
    CarResult car;
    double pcr_hz = 0.0;
    std::optional<HeraldedG2Result> g2;
};

CoincidenceReport analyze_stream(const TagStream& stream, const AnalyzeParams& params);

// Tag file, bit-exact little-endian layout:
//   header (16 B): magic "TTAG", u16 version = 1, u16 channel count,
//                  u64 record count
//   records (16 B each): u16 channel, u16 reserved = 0, u32 reserved = 0,
//                  u64 timestamp in ps
void write_tag_file(const std::string& path, const TagStream& stream);
TagStream read_tag_file(const std::string& path);

} // namespace lnspdc
