#include "gsvc/telemetry_comms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <set>

namespace gsvc {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'G', 'S', 'V', 'C'};
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderSize = 4 + 1 + 2 + 8 + 4 + 4 + 8;
constexpr std::size_t kTrailerSize = 4;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
    return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> b, std::size_t at) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
    return v;
}

double get_f64(std::span<const std::uint8_t> b, std::size_t at) {
    const std::uint64_t bits = get_u64(b, at);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

}  // namespace

TelemetryWindow concatenate_areas(const std::vector<TelemetryWindow>& windows) {
    if (windows.empty())
        throw std::invalid_argument("cannot concatenate an empty window list");

    std::vector<const TelemetryWindow*> ordered;
    ordered.reserve(windows.size());
    std::set<int> ids;
    for (const auto& w : windows) {
        if (!ids.insert(w.area_id).second)
            throw std::invalid_argument("duplicate area_id in window list");
        ordered.push_back(&w);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const TelemetryWindow* a, const TelemetryWindow* b) {
                  return a->area_id < b->area_id;
              });

    const TelemetryWindow& first = *ordered.front();
    Eigen::Index total = 0;
    for (const auto* w : ordered) {
        if (w->window_length() != first.window_length() ||
            w->sample_period != first.sample_period ||
            w->start_time != first.start_time)
            throw std::invalid_argument("windows are not aligned");
        total += w->state_count();
    }

    TelemetryWindow out;
    out.area_id = windows.size() == 1 ? first.area_id : kPdcAreaId;
    out.start_time = first.start_time;
    out.sample_period = first.sample_period;
    out.states.resize(total, first.window_length());
    Eigen::Index row = 0;
    for (const auto* w : ordered) {
        out.states.middleRows(row, w->state_count()) = w->states;
        row += w->state_count();
    }
    return out;
}

TelemetryWindow inject_sensor_noise(const TelemetryWindow& window,
                                    double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0.0) return window;
    if (!std::isfinite(snr_db))
        throw std::invalid_argument("snr_db must be finite or +infinity");

    TelemetryWindow out = window;
    GaussianSource gauss(seed);
    const auto w = static_cast<double>(window.window_length());
    for (Eigen::Index i = 0; i < window.state_count(); ++i) {
        const double power = window.states.row(i).squaredNorm() / w;
        const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
        for (Eigen::Index j = 0; j < window.window_length(); ++j)
            out.states(i, j) += sigma * gauss.next();
    }
    return out;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::uint8_t b : bytes) crc = table[(crc ^ b) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

std::vector<std::uint8_t> serialize(const CompressedFrame& frame) {
    frame.config.validate();
    if (static_cast<std::size_t>(frame.y.size()) != frame.config.m)
        throw std::invalid_argument("measurement length disagrees with config.m");
    if (!(frame.timestamp >= 0.0) || !std::isfinite(frame.timestamp))
        throw std::invalid_argument("timestamp must be finite and nonnegative");

    std::vector<std::uint8_t> out;
    out.reserve(kHeaderSize + 8 * frame.config.m + kTrailerSize);
    for (std::uint8_t b : kMagic) out.push_back(b);
    out.push_back(kVersion);
    put_u16(out, frame.area_id);
    put_u64(out, static_cast<std::uint64_t>(std::llround(frame.timestamp * 1e6)));
    put_u32(out, static_cast<std::uint32_t>(frame.config.n));
    put_u32(out, static_cast<std::uint32_t>(frame.config.m));
    put_u64(out, frame.config.matrix_seed);
    for (Eigen::Index i = 0; i < frame.y.size(); ++i) put_f64(out, frame.y[i]);
    put_u32(out, crc32(out));
    return out;
}

CompressedFrame deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize + kTrailerSize)
        throw WireError(WireError::Kind::SizeMismatch,
                        "frame shorter than header plus trailer");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
        throw WireError(WireError::Kind::BadMagic, "frame magic is not GSVC");
    if (bytes[4] != kVersion)
        throw WireError(WireError::Kind::BadMagic, "unsupported frame version");

    const std::uint32_t n = get_u32(bytes, 7 + 8);
    const std::uint32_t m = get_u32(bytes, 7 + 8 + 4);
    const std::size_t expected = kHeaderSize + 8 * static_cast<std::size_t>(m) + kTrailerSize;
    if (bytes.size() != expected)
        throw WireError(WireError::Kind::SizeMismatch,
                        "byte count disagrees with the declared m");

    const std::uint32_t stored = get_u32(bytes, bytes.size() - kTrailerSize);
    if (crc32(bytes.first(bytes.size() - kTrailerSize)) != stored)
        throw WireError(WireError::Kind::BadChecksum, "frame checksum failed");

    CompressedFrame frame;
    frame.area_id = get_u16(bytes, 5);
    frame.timestamp = static_cast<double>(get_u64(bytes, 7)) * 1e-6;
    frame.config.n = n;
    frame.config.m = m;
    frame.config.matrix_seed = get_u64(bytes, 7 + 8 + 4 + 4);
    try {
        frame.config.validate();
    } catch (const std::invalid_argument& e) {
        throw WireError(WireError::Kind::SizeMismatch, e.what());
    }
    frame.y.resize(m);
    for (std::uint32_t i = 0; i < m; ++i)
        frame.y[i] = get_f64(bytes, kHeaderSize + 8 * static_cast<std::size_t>(i));
    return frame;
}

void ChannelModel::validate() const {
    if (!(bandwidth_bps > 0.0))
        throw std::invalid_argument("bandwidth must be positive");
    if (!(fixed_latency_s >= 0.0))
        throw std::invalid_argument("latency must be nonnegative");
}

Channel::Channel(ChannelModel model) : model_(model) { model_.validate(); }

TransmitResult Channel::transmit(std::span<const std::uint8_t> bytes) {
    TransmitResult res;
    res.delay_s = model_.fixed_latency_s +
                  8.0 * static_cast<double>(bytes.size()) / model_.bandwidth_bps;
    const std::uint64_t frame_index = frames_sent_++;

    if (std::isinf(model_.noise_snr_db) && model_.noise_snr_db > 0.0) {
        res.bytes.assign(bytes.begin(), bytes.end());
        return res;
    }

    CompressedFrame frame;
    try {
        frame = deserialize(bytes);
    } catch (const WireError&) {
        res.bytes.assign(bytes.begin(), bytes.end());
        return res;
    }

    const double power = frame.y.squaredNorm() / static_cast<double>(frame.y.size());
    const double sigma =
        std::sqrt(power / std::pow(10.0, model_.noise_snr_db / 10.0));
    GaussianSource gauss(mix_seed(model_.rng_seed, frame_index));
    for (Eigen::Index i = 0; i < frame.y.size(); ++i)
        frame.y[i] += sigma * gauss.next();
    res.bytes = serialize(frame);
    return res;
}

TransmitResult transmit(std::span<const std::uint8_t> bytes,
                        const ChannelModel& model) {
    Channel ch(model);
    return ch.transmit(bytes);
}

}  // namespace gsvc
