#pragma once

#include "gsvc/cs_codec.hpp"
#include "gsvc/rng.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsvc {

/// Area id carried by frames that aggregate every area (PDC output).
inline constexpr std::uint16_t kPdcAreaId = 0xFFFF;

/// Rolling measurement window of one area: `states` holds one row per state
/// (voltages stacked over reactive powers) and one column per sample.
struct TelemetryWindow {
    int area_id = 0;
    double start_time = 0.0;     // seconds, time of the first column
    double sample_period = 1.0;  // seconds
    Eigen::MatrixXd states;      // n_states x w

    Eigen::Index state_count() const { return states.rows(); }
    Eigen::Index window_length() const { return states.cols(); }
};

/// Stacks windows into one PDC window in ascending area_id order.
/// Windows must agree on window length, sample period, and start time.
TelemetryWindow concatenate_areas(const std::vector<TelemetryWindow>& windows);

/// Adds zero-mean white Gaussian noise per state row, scaled so each row's
/// noise power is signal_power / 10^(snr_db/10). snr_db = +infinity returns
/// the window unchanged. Identical seeds give identical noise.
TelemetryWindow inject_sensor_noise(const TelemetryWindow& window,
                                    double snr_db, std::uint64_t seed);

struct WireError : std::runtime_error {
    enum class Kind { BadMagic, BadChecksum, SizeMismatch };
    Kind kind;
    WireError(Kind k, const std::string& what)
        : std::runtime_error(what), kind(k) {}
};

/// CRC-32 (reflected 0xEDB88320, init and final xor 0xFFFFFFFF);
/// crc32 of "123456789" is 0xCBF43926.
std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// Frame layout, all integers little-endian:
///   magic "GSVC" (4) | version=1 (1) | area_id (2) | timestamp_micros (8) |
///   n (4) | m (4) | matrix_seed (8) | payload m x f64 LE | crc32 (4)
/// The checksum covers header and payload. Timestamps are quantized to
/// whole microseconds on the wire.
std::vector<std::uint8_t> serialize(const CompressedFrame& frame);

/// Rejects frames with a foreign magic/version (BadMagic), a byte count that
/// disagrees with the declared m (SizeMismatch), or a failing checksum
/// (BadChecksum).
CompressedFrame deserialize(std::span<const std::uint8_t> bytes);

struct ChannelModel {
    double bandwidth_bps = 10e6;
    double fixed_latency_s = 0.0;
    // +infinity disables payload noise.
    double noise_snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t rng_seed = 0;

    void validate() const;  // bandwidth > 0, latency >= 0
};

struct TransmitResult {
    std::vector<std::uint8_t> bytes;
    double delay_s = 0.0;
};

/// Serial link: delay = fixed_latency + 8*len/bandwidth. With noise enabled,
/// well-formed frames get seeded white Gaussian noise on their payload floats
/// (power scaled to the requested SNR) and a recomputed checksum; bytes that
/// do not parse as a frame pass through unchanged. Each transmitted frame
/// draws an independent noise stream derived from the channel seed.
class Channel {
  public:
    explicit Channel(ChannelModel model);
    TransmitResult transmit(std::span<const std::uint8_t> bytes);
    const ChannelModel& model() const { return model_; }

  private:
    ChannelModel model_;
    std::uint64_t frames_sent_ = 0;
};

/// One-shot convenience over a fresh Channel.
TransmitResult transmit(std::span<const std::uint8_t> bytes,
                        const ChannelModel& model);

}  // namespace gsvc
