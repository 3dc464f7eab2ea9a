#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ssanet/errors.hpp"
#include "ssanet/prng.hpp"
#include "ssanet/tensor.hpp"

namespace ssanet {

/// T frames of shape [H, W, C] with a binary anomaly label.
struct SequenceSample {
    std::vector<Tensor> frames;
    int label = 0;
    double anomaly_magnitude = 0.0;  // jump length in pixels; 0 for normal samples

    friend bool operator==(const SequenceSample&, const SequenceSample&) = default;
};

using Dataset = std::vector<SequenceSample>;

struct GeneratorConfig {
    std::size_t n_samples = 200;
    std::size_t frames = 16;  // T
    std::size_t height = 8;
    std::size_t width = 8;
    double anomaly_rate = 0.5;
    double noise_std = 0.1;
    std::uint64_t seed = 0;

    // trajectory shape, not exposed as run-config keys
    double blob_sigma = 1.0;
    double orbit_radius = 1.0;
    double min_jump = 2.0;
    double max_jump = 4.0;

    void validate() const {
        if (!n_samples || !frames || !height || !width) throw ConfigError("generator sizes must be positive");
        if (!(anomaly_rate >= 0.0 && anomaly_rate <= 1.0)) throw ConfigError("generator anomaly_rate must lie in [0,1]");
        if (!(noise_std >= 0.0)) throw ConfigError("generator noise_std must be >= 0");
    }
};

/// Gaussian blob circling the frame centre once over the sequence, plus
/// pixel noise. Anomalous samples jump by U(min_jump, max_jump) pixels in a
/// random direction at frame T/2 and continue the orbit from there.
///
/// Exactly round(anomaly_rate * n) samples are anomalous; which ones is a
/// seeded shuffle. Draw order: label shuffle, then per sample: phase,
/// [jump length, jump angle], then noise frame by frame in row-major order.
inline Dataset generate_synthetic(const GeneratorConfig& cfg) {
    cfg.validate();
    Prng rng(cfg.seed);
    const std::size_t n = cfg.n_samples;
    std::vector<int> labels(n, 0);
    const auto n_anom = static_cast<std::size_t>(std::lround(cfg.anomaly_rate * static_cast<double>(n)));
    for (std::size_t i = 0; i < n_anom; ++i) labels[i] = 1;
    for (std::size_t i = n; i-- > 1;) std::swap(labels[i], labels[rng.below(i + 1)]);

    const double two_pi = 2.0 * std::numbers::pi;
    const double cy0 = (static_cast<double>(cfg.height) - 1.0) / 2.0;
    const double cx0 = (static_cast<double>(cfg.width) - 1.0) / 2.0;
    const double inv2s2 = 1.0 / (2.0 * cfg.blob_sigma * cfg.blob_sigma);

    Dataset data;
    data.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        SequenceSample smp;
        smp.label = labels[s];
        const double phase = two_pi * rng.uniform();
        double dy = 0.0, dx = 0.0;
        if (smp.label) {
            smp.anomaly_magnitude = rng.uniform(cfg.min_jump, cfg.max_jump);
            const double ang = two_pi * rng.uniform();
            dy = smp.anomaly_magnitude * std::sin(ang);
            dx = smp.anomaly_magnitude * std::cos(ang);
        }
        for (std::size_t t = 0; t < cfg.frames; ++t) {
            const double th = phase + two_pi * static_cast<double>(t) / static_cast<double>(cfg.frames);
            double cy = cy0 + cfg.orbit_radius * std::sin(th);
            double cx = cx0 + cfg.orbit_radius * std::cos(th);
            if (smp.label && 2 * t >= cfg.frames) {
                cy += dy;
                cx += dx;
            }
            Tensor f({cfg.height, cfg.width, 1});
            for (std::size_t i = 0; i < cfg.height; ++i)
                for (std::size_t j = 0; j < cfg.width; ++j) {
                    const double ry = static_cast<double>(i) - cy, rx = static_cast<double>(j) - cx;
                    f.at(i, j, 0) = std::exp(-(ry * ry + rx * rx) * inv2s2) + cfg.noise_std * rng.normal();
                }
            smp.frames.push_back(std::move(f));
        }
        data.push_back(std::move(smp));
    }
    return data;
}

/// Pure-noise frames where only pixel `signal_pixel` carries class
/// information: it is shifted by `signal` in every frame of a positive
/// sample. Labels alternate so both classes are balanced.
inline Dataset generate_planted_pixel(std::size_t n, std::size_t frames, std::size_t height, std::size_t width,
                                      std::size_t signal_pixel, double signal, std::uint64_t seed) {
    if (signal_pixel >= height * width) throw DimensionError("planted pixel index outside the frame");
    Prng rng(seed);
    Dataset data;
    for (std::size_t s = 0; s < n; ++s) {
        SequenceSample smp;
        smp.label = static_cast<int>(s % 2);
        smp.anomaly_magnitude = smp.label ? signal : 0.0;
        for (std::size_t t = 0; t < frames; ++t) {
            Tensor f({height, width, 1});
            for (std::size_t p = 0; p < height * width; ++p) f[p] = rng.normal();
            if (smp.label) f[signal_pixel] += signal;
            smp.frames.push_back(std::move(f));
        }
        data.push_back(std::move(smp));
    }
    return data;
}

// CSV dataset format, one row per frame:
//   sample_id,t,label,magnitude,p0,...,p{H*W-1}
// Header row required, LF line endings, frames of one sample contiguous
// with t = 0, 1, 2, ... Pixels are single-channel, row-major.

inline void write_csv(std::ostream& os, const Dataset& data) {
    if (data.empty()) throw SchemaError("write_csv: empty dataset");
    const auto& f0 = data.front().frames.front();
    if (f0.dim(2) != 1) throw SchemaError("write_csv: CSV schema holds single-channel frames only");
    const std::size_t px = f0.dim(0) * f0.dim(1);
    os << "sample_id,t,label,magnitude";
    for (std::size_t p = 0; p < px; ++p) os << ",p" << p;
    os << '\n';
    char buf[64];
    auto num = [&](double v) {
        const auto r = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
        os.write(buf, r.ptr - buf);
    };
    for (std::size_t s = 0; s < data.size(); ++s) {
        for (std::size_t t = 0; t < data[s].frames.size(); ++t) {
            const auto& f = data[s].frames[t];
            if (f.shape() != f0.shape()) throw SchemaError("write_csv: frame shapes differ across the dataset");
            os << s << ',' << t << ',' << data[s].label << ',';
            num(data[s].anomaly_magnitude);
            for (double v : f.data()) {
                os << ',';
                num(v);
            }
            os << '\n';
        }
    }
}

inline void write_csv(const std::string& path, const Dataset& data) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(os, data);
}

namespace detail {

inline double parse_double(std::string_view s, std::size_t line, const char* field) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v))
        throw ParseError(std::string("field ") + field + " is not a finite number: '" + std::string(s) + "'", line);
    return v;
}

inline long long parse_int(std::string_view s, std::size_t line, const char* field) {
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw ParseError(std::string("field ") + field + " is not an integer: '" + std::string(s) + "'", line);
    return v;
}

inline std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto p = s.find(',', start);
        out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

}  // namespace detail

/// Parses the CSV schema above into frames of shape [height, width, 1].
inline Dataset load_csv(std::istream& is, std::size_t height, std::size_t width) {
    const std::size_t px = height * width;
    std::string line;
    if (!std::getline(is, line) || line.empty()) throw SchemaError("dataset CSV is empty");
    {
        const auto head = detail::split_commas(line);
        if (head.size() < 5 || head[0] != "sample_id" || head[1] != "t" || head[2] != "label" || head[3] != "magnitude")
            throw ParseError("missing or malformed header row", 1);
        if (head.size() != 4 + px)
            throw SchemaError("header has " + std::to_string(head.size() - 4) + " pixel columns, expected " +
                              std::to_string(px) + " for " + std::to_string(height) + "x" + std::to_string(width) +
                              " frames");
        for (std::size_t p = 0; p < px; ++p)
            if (head[4 + p] != "p" + std::to_string(p)) throw ParseError("pixel header column " + std::to_string(p) + " misnamed", 1);
    }

    Dataset data;
    long long cur_id = -1;
    std::unordered_set<long long> seen;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = detail::split_commas(line);
        if (fields.size() != 4 + px)
            throw ParseError("expected " + std::to_string(4 + px) + " fields, found " + std::to_string(fields.size()),
                             lineno);
        const auto id = detail::parse_int(fields[0], lineno, "sample_id");
        const auto t = detail::parse_int(fields[1], lineno, "t");
        const auto label = detail::parse_int(fields[2], lineno, "label");
        const double mag = detail::parse_double(fields[3], lineno, "magnitude");
        if (label != 0 && label != 1) throw ParseError("label must be 0 or 1", lineno);
        if (mag < 0.0) throw ParseError("magnitude must be >= 0", lineno);

        if (id != cur_id) {
            if (t != 0)
                throw SchemaError("line " + std::to_string(lineno) + ": sample " + std::to_string(id) +
                                  " does not start at t = 0");
            if (!seen.insert(id).second)
                throw SchemaError("line " + std::to_string(lineno) + ": frames of sample " + std::to_string(id) +
                                  " are not contiguous");
            cur_id = id;
            SequenceSample smp;
            smp.label = static_cast<int>(label);
            smp.anomaly_magnitude = mag;
            if (label == 0 && mag != 0.0)
                throw SchemaError("line " + std::to_string(lineno) + ": normal sample with non-zero magnitude");
            data.push_back(std::move(smp));
        } else {
            auto& smp = data.back();
            if (t != static_cast<long long>(smp.frames.size()))
                throw SchemaError("line " + std::to_string(lineno) + ": t must increase by one from 0 within a sample");
            if (label != smp.label || mag != smp.anomaly_magnitude)
                throw SchemaError("line " + std::to_string(lineno) + ": label/magnitude change within sample " +
                                  std::to_string(id));
        }
        Tensor f({height, width, 1});
        for (std::size_t p = 0; p < px; ++p) f[p] = detail::parse_double(fields[4 + p], lineno, "pixel");
        data.back().frames.push_back(std::move(f));
    }
    if (data.empty()) throw SchemaError("dataset CSV has a header but no rows");
    const std::size_t T = data.front().frames.size();
    for (std::size_t s = 0; s < data.size(); ++s)
        if (data[s].frames.size() != T)
            throw SchemaError("sample " + std::to_string(s) + " has " + std::to_string(data[s].frames.size()) +
                              " frames, first sample has " + std::to_string(T));
    return data;
}

inline Dataset load_csv(const std::string& path, std::size_t height, std::size_t width) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return load_csv(is, height, width);
}

}  // namespace ssanet
