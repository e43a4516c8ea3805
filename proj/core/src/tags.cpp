#include "lnspdc/tags.hpp"

#include "lnspdc/errors.hpp"
#include "lnspdc/units.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

namespace lnspdc {

double Rng::exponential(double mean) {
    // inverse CDF on (0,1]; 1 - u01() avoids log(0)
    return -mean * std::log(1.0 - u01());
}

double Rng::normal(double sigma) {
    if (have_spare_) {
        have_spare_ = false;
        return spare_ * sigma;
    }
    // Box-Muller
    const double u1 = 1.0 - u01();
    const double u2 = u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * units::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a) * sigma;
}

std::uint64_t Rng::poisson(double mean) {
    if (mean < 0.0) throw NumericError("poisson: negative mean");
    if (mean == 0.0) return 0;
    if (mean < 50.0) {
        // Knuth product method
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= u01();
        } while (p > limit);
        return k - 1;
    }
    // normal approximation for large means
    const double v = mean + std::sqrt(mean) * normal(1.0);
    return v <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(v));
}

bool TagStream::is_sorted() const {
    for (std::size_t i = 1; i < records.size(); ++i)
        if (records[i].timestamp_ps < records[i - 1].timestamp_ps) return false;
    return true;
}

void SourceConfig::validate() const {
    if (pair_rate_hz < 0.0 || dark_s_hz < 0.0 || dark_i_hz < 0.0)
        throw ConfigError("tags: rates must be >= 0");
    if (duration_s <= 0.0) throw ConfigError("tags: duration must be > 0");
    if (eta_s <= 0.0 || eta_s > 1.0 || eta_i <= 0.0 || eta_i > 1.0)
        throw ConfigError("tags: arm efficiencies must be in (0, 1]");
    if (jitter_sigma_ps < 0.0) throw ConfigError("tags: jitter sigma must be >= 0");
}

TagStream simulate_tags(const SourceConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const double duration_ps = cfg.duration_s * 1e12;

    TagStream stream;
    stream.channel_count = cfg.splitter ? 3 : 2;

    auto emit = [&](std::uint16_t ch, double t_ps) {
        if (t_ps < 0.0 || t_ps > duration_ps) return; // jitter pushed it off the record
        stream.records.push_back({ch, static_cast<std::int64_t>(std::llround(t_ps))});
    };

    // Pair process. Draws happen in a fixed order regardless of survival so
    // the substreams stay aligned across config tweaks.
    if (cfg.pair_rate_hz > 0.0) {
        const double mean_gap_ps = 1e12 / cfg.pair_rate_hz;
        double t = rng.exponential(mean_gap_ps);
        while (t <= duration_ps) {
            const bool s_alive = rng.bernoulli(cfg.eta_s);
            const bool i_alive = rng.bernoulli(cfg.eta_i);
            const double jit_s = rng.normal(cfg.jitter_sigma_ps);
            const double jit_i = rng.normal(cfg.jitter_sigma_ps);
            const bool coin = rng.bernoulli(0.5);
            if (s_alive) emit(0, t + jit_s);
            if (i_alive) emit(cfg.splitter ? (coin ? 1 : 2) : 1, t + jit_i);
            t += rng.exponential(mean_gap_ps);
        }
    }

    // Independent dark counts per detector.
    auto darks = [&](std::uint16_t ch, double rate_hz) {
        if (rate_hz <= 0.0) return;
        const double mean_gap_ps = 1e12 / rate_hz;
        double t = rng.exponential(mean_gap_ps);
        while (t <= duration_ps) {
            emit(ch, t);
            t += rng.exponential(mean_gap_ps);
        }
    };
    darks(0, cfg.dark_s_hz);
    darks(1, cfg.dark_i_hz);
    if (cfg.splitter) darks(2, cfg.dark_i_hz);

    std::stable_sort(stream.records.begin(), stream.records.end(),
                     [](const TagRecord& a, const TagRecord& b) {
                         return a.timestamp_ps != b.timestamp_ps ? a.timestamp_ps < b.timestamp_ps
                                                                 : a.channel < b.channel;
                     });
    return stream;
}

namespace {

std::vector<std::int64_t> channel_times(const TagStream& stream, std::uint16_t ch) {
    std::vector<std::int64_t> t;
    for (const auto& r : stream.records)
        if (r.channel == ch) t.push_back(r.timestamp_ps);
    return t;
}

} // namespace

Histogram coincidence_histogram(const TagStream& stream, std::uint16_t ch_a, std::uint16_t ch_b,
                                std::int64_t bin_ps, std::int64_t span_ps) {
    if (bin_ps <= 0 || span_ps <= 0 || span_ps % bin_ps != 0 || span_ps % 2 != 0)
        throw ConfigError("histogram: bin must divide span, span even, both > 0");
    if (!stream.is_sorted()) throw NumericError("histogram: stream is not sorted");

    const auto ta = channel_times(stream, ch_a);
    const auto tb = channel_times(stream, ch_b);

    Histogram h;
    h.bin_ps = bin_ps;
    h.span_ps = span_ps;
    h.counts.assign(static_cast<std::size_t>(span_ps / bin_ps), 0);
    h.n_a = static_cast<std::int64_t>(ta.size());
    h.n_b = static_cast<std::int64_t>(tb.size());

    // delays dt = t_b − t_a in [−span/2, span/2), half-open on the right
    const std::int64_t half = span_ps / 2;
    std::size_t lo = 0;
    for (const std::int64_t a : ta) {
        while (lo < tb.size() && tb[lo] < a - half) ++lo;
        for (std::size_t j = lo; j < tb.size(); ++j) {
            const std::int64_t dt = tb[j] - a;
            if (dt >= half) break;
            ++h.counts[static_cast<std::size_t>((dt + half) / bin_ps)];
        }
    }
    return h;
}

CarResult car(const Histogram& hist, std::int64_t peak_window_ps, std::int64_t floor_min_ps) {
    if (peak_window_ps <= 0) throw ConfigError("car: peak window must be > 0");
    if (floor_min_ps <= peak_window_ps / 2)
        throw ConfigError("car: floor region must exclude the peak window");

    std::int64_t peak = 0, floor_counts = 0;
    std::int64_t n_peak_bins = 0, n_floor_bins = 0;
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
        const double center = hist.delay_of_bin_ps(k);
        if (std::abs(center) <= peak_window_ps / 2.0) {
            peak += hist.counts[k];
            ++n_peak_bins;
        } else if (std::abs(center) >= static_cast<double>(floor_min_ps)) {
            floor_counts += hist.counts[k];
            ++n_floor_bins;
        }
    }
    if (n_peak_bins == 0) throw ConfigError("car: no bins inside the peak window");
    if (n_floor_bins == 0) throw ConfigError("car: no bins in the floor region");

    CarResult out;
    out.peak_counts = peak;
    out.floor_counts = floor_counts;
    out.floor_per_bin = static_cast<double>(floor_counts) / static_cast<double>(n_floor_bins);

    if (floor_counts == 0) {
        // report a lower bound instead of infinity
        out.lower_bound = true;
        out.car = static_cast<double>(peak) * n_floor_bins / n_peak_bins - 1.0;
        out.sigma = 0.0;
        return out;
    }
    const double ratio = static_cast<double>(peak) * n_floor_bins /
                         (static_cast<double>(floor_counts) * n_peak_bins);
    out.car = ratio - 1.0;
    out.sigma = peak > 0
                    ? ratio * std::sqrt(1.0 / static_cast<double>(peak) +
                                        1.0 / static_cast<double>(floor_counts))
                    : 0.0;
    return out;
}

double pcr(double c_s_hz, double c_i_hz, double c_si_hz, int splitter_factor) {
    if (splitter_factor != 1 && splitter_factor != 2)
        throw ConfigError("pcr: splitter factor must be 1 or 2");
    if (c_si_hz <= 0.0)
        throw NumericError("pcr: undefined for zero coincidence rate");
    return c_s_hz * c_i_hz / (splitter_factor * c_si_hz);
}

HeraldedG2Result heralded_g2(const TagStream& stream, std::int64_t window_ps,
                             bool include_factor_2, int resamples, std::uint64_t resample_seed) {
    if (window_ps <= 0) throw ConfigError("heralded_g2: window must be > 0");
    if (stream.channel_count < 3)
        throw ConfigError("heralded_g2: needs signal and two idler channels");
    if (!stream.is_sorted()) throw NumericError("heralded_g2: stream is not sorted");

    const auto ts = channel_times(stream, 0);
    const auto t1 = channel_times(stream, 1);
    const auto t2 = channel_times(stream, 2);

    HeraldedG2Result out;
    out.n_signal = static_cast<std::int64_t>(ts.size());

    auto count_in_window = [window_ps](const std::vector<std::int64_t>& v, std::int64_t t) {
        const auto lo = std::lower_bound(v.begin(), v.end(), t - window_ps);
        const auto hi = std::upper_bound(v.begin(), v.end(), t + window_ps);
        return static_cast<std::int64_t>(hi - lo);
    };

    for (const std::int64_t s : ts) {
        const std::int64_t n1 = count_in_window(t1, s);
        const std::int64_t n2 = count_in_window(t2, s);
        out.c_si1 += n1;
        out.c_si2 += n2;
        out.c_si1i2 += n1 * n2;
    }
    if (out.c_si1 == 0 || out.c_si2 == 0)
        throw NumericError("heralded_g2: zero two-fold coincidences");

    const double factor = include_factor_2 ? 2.0 : 1.0;
    auto formula = [factor](double c12, double cs, double c1, double c2) {
        return c12 * cs / (factor * c1 * c2);
    };
    out.g2 = formula(static_cast<double>(out.c_si1i2), static_cast<double>(out.n_signal),
                     static_cast<double>(out.c_si1), static_cast<double>(out.c_si2));

    // Poisson Monte-Carlo over the four collected counts.
    if (resamples > 1) {
        Rng rng(resample_seed);
        double sum = 0.0, sum2 = 0.0;
        int n_ok = 0;
        for (int b = 0; b < resamples; ++b) {
            const double c12 = static_cast<double>(rng.poisson(static_cast<double>(out.c_si1i2)));
            const double cs = static_cast<double>(rng.poisson(static_cast<double>(out.n_signal)));
            const double c1 = static_cast<double>(rng.poisson(static_cast<double>(out.c_si1)));
            const double c2 = static_cast<double>(rng.poisson(static_cast<double>(out.c_si2)));
            if (c1 <= 0.0 || c2 <= 0.0) continue;
            const double g = formula(c12, cs, c1, c2);
            sum += g;
            sum2 += g * g;
            ++n_ok;
        }
        if (n_ok > 1) {
            const double mean = sum / n_ok;
            out.sigma = std::sqrt(std::max(0.0, sum2 / n_ok - mean * mean));
        }
    }
    return out;
}

CoincidenceReport analyze_stream(const TagStream& stream, const AnalyzeParams& params) {
    if (stream.records.empty()) throw NumericError("analyze: empty tag stream");
    if (!stream.is_sorted()) throw NumericError("analyze: stream is not sorted");

    CoincidenceReport rep;
    if (params.duration_s > 0.0) {
        rep.duration_s = params.duration_s;
    } else {
        const double span_ps = static_cast<double>(stream.records.back().timestamp_ps -
                                                   stream.records.front().timestamp_ps);
        if (span_ps <= 0.0) throw NumericError("analyze: cannot estimate duration from the stream");
        rep.duration_s = span_ps * 1e-12;
    }

    std::int64_t n_s = 0, n_i = 0;
    for (const auto& r : stream.records) {
        if (r.channel == 0) ++n_s;
        if (r.channel == 1) ++n_i;
    }
    rep.c_s_hz = static_cast<double>(n_s) / rep.duration_s;
    rep.c_i_hz = static_cast<double>(n_i) / rep.duration_s;

    rep.histogram = coincidence_histogram(stream, 0, 1, params.bin_ps, params.span_ps);
    rep.car = car(rep.histogram, params.peak_window_ps, params.floor_min_ps);
    rep.c_si_hz = static_cast<double>(rep.car.peak_counts) / rep.duration_s;
    rep.accidental_floor_per_bin = rep.car.floor_per_bin;
    rep.pcr_hz = pcr(rep.c_s_hz, rep.c_i_hz, rep.c_si_hz, params.splitter_factor);

    if (stream.channel_count >= 3) {
        rep.g2 = heralded_g2(stream, params.peak_window_ps / 2, params.g2_factor_2,
                             params.g2_resamples, params.g2_seed);
    }
    return rep;
}

namespace {

void put_u16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}
void put_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& s, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

} // namespace

void write_tag_file(const std::string& path, const TagStream& stream) {
    std::string buf;
    buf.reserve(16 + stream.records.size() * 16);
    buf += "TTAG";
    put_u16(buf, 1); // version
    put_u16(buf, stream.channel_count);
    put_u64(buf, stream.records.size());
    for (const auto& r : stream.records) {
        if (r.timestamp_ps < 0) throw NumericError("tag file: negative timestamp");
        put_u16(buf, r.channel);
        put_u16(buf, 0);
        put_u32(buf, 0);
        put_u64(buf, static_cast<std::uint64_t>(r.timestamp_ps));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericError("cannot open tag file '" + path + "' for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw NumericError("short write to tag file '" + path + "'");
}

TagStream read_tag_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open tag file '" + path + "'");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 16 || data.compare(0, 4, "TTAG") != 0)
        throw ConfigError("'" + path + "' is not a tag file (bad magic)");
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    const std::uint16_t version = get_u16(p + 4);
    if (version != 1)
        throw ConfigError("tag file '" + path + "': unsupported version " + std::to_string(version));
    TagStream stream;
    stream.channel_count = get_u16(p + 6);
    const std::uint64_t count = get_u64(p + 8);
    if (data.size() != 16 + count * 16)
        throw ConfigError("tag file '" + path + "': truncated or trailing bytes");
    stream.records.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const unsigned char* rec = p + 16 + i * 16;
        TagRecord r;
        r.channel = get_u16(rec);
        r.timestamp_ps = static_cast<std::int64_t>(get_u64(rec + 8));
        stream.records.push_back(r);
    }
    return stream;
}

} // namespace lnspdc
