#pragma once

#include "gsvc/grid_model.hpp"
#include "gsvc/mse_detector.hpp"
#include "gsvc/svc_controller.hpp"
#include "gsvc/telemetry_comms.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsvc {

/// Errors in user-supplied input files (scenario or network fixtures).
struct FixtureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadEvent {
    double time_s = 0.0;
    std::vector<int> buses;  // global load indices
    double factor = 1.0;     // multiplies the reactive demand
};

struct SyntheticSpec {
    int areas = 3, nG = 3, nC = 3, nL = 3;
    std::uint64_t seed = 1;
    std::complex<double> tie_line_impedance{0.02, 0.07};
};

struct DetectorConfig {
    std::size_t scales = kDefaultScaleCount;          // rows of H
    double threshold = kDefaultEntropyThreshold;      // nats
    std::size_t window_length = kDefaultWindowLength; // samples
    std::size_t mmf_se_length = 3;                    // denoising SE, odd
};

struct Scenario {
    std::string name = "scenario";
    std::filesystem::path network_path;      // empty: use `synthetic`
    std::optional<SyntheticSpec> synthetic;  // defaulted when both unset
    double duration_s = 60.0;
    double sample_period_s = 1.0;
    std::vector<LoadEvent> events;           // sorted by time
    std::vector<int> pilot_buses;            // empty: every load bus
    double rho = 1.0;                        // n/m; 1 sends raw payloads
    ChannelModel channel;
    DetectorConfig detector;
    ControllerConfig controller;
    bool control_enabled = true;
    double gen_bound = 0.05;  // |dV_G| limit, p.u.
    double cap_bound = 0.30;  // |dQ_C| limit, p.u.
    double q_load = 0.5;      // initial reactive demand per load bus
    double q_cap = 0.2;       // initial capacitor output
    double q_gen = 0.3;       // base generator output for the Q_G channel
    double sensor_snr_db = std::numeric_limits<double>::infinity();
    double sensor_start_s = 0.0;
    std::uint64_t rng_seed = 1;

    void validate() const;  // throws FixtureError
};

struct CsvRow {
    double time_s = 0.0;
    int area_id = 0;
    int bus_id = 0;  // global load index
    double v_pu = 0.0, q_pu = 0.0, entropy_nat = 0.0;
    bool alarm = false;
    double rho = 1.0, snr_db = 0.0, delay_s = 0.0;
};

/// First sample at which a bus's entropy crossed the threshold upward.
struct AlarmEvent {
    int bus_id = 0;
    double time_s = 0.0;
    double entropy_nat = 0.0;
    double threshold = 0.0;
};

struct ControlStep {
    double time_s = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct EventOutcome {
    double time_s = 0.0;
    double pre_x_rms = 0.0;   // at the event sample, before any new control
    double post_x_rms = 0.0;  // at the last sample before the next event/end
};

struct RunReport {
    std::vector<CsvRow> rows;  // one per load bus per sample
    std::vector<AlarmEvent> alarms;
    std::vector<ControlStep> control_steps;
    std::vector<EventOutcome> event_outcomes;
    std::vector<double> x_rms_per_step;
    std::vector<double> step_snr_db;          // frame recovery SNR per step
    std::vector<Eigen::VectorXd> telemetry;   // measured PDC column per step
    Eigen::VectorXd u_cumulative;             // total applied control
    int n_states = 0;
    double final_x_rms = 0.0;
    double mean_delay_s = 0.0;
    bool all_control_converged = true;
};

/// Loads the fixture named by the scenario or builds its synthetic network.
NetworkModel scenario_network(const Scenario& s);

/// Full deterministic pipeline, one pass per sample: plant, optional sensor
/// noise, MMF denoising, per-bus entropy detection, PDC concatenation,
/// compressive encoding, channel, decoding, and the controller whose output
/// is applied at the next sample.
RunReport run_scenario(const Scenario& s);

struct RhoSweepPoint {
    double rho = 1.0;
    double median_snr_db = 0.0;
};
/// Re-encodes the telemetry captured from one scenario run at each ratio and
/// reports the median per-sample recovery SNR.
std::vector<RhoSweepPoint> sweep_compression(const Scenario& s,
                                             const std::vector<double>& rhos);

struct PilotSweepPoint {
    int count = 0;
    double final_x_rms = 0.0;
};
/// Re-runs the scenario with the lowest `count` load buses as pilots.
std::vector<PilotSweepPoint> sweep_pilots(const Scenario& s,
                                          const std::vector<int>& counts);

void write_csv(const RunReport& report, std::ostream& out);
void write_csv(const RunReport& report, const std::filesystem::path& path);

/// Flat key/value scenario file (format = 1) with repeated
/// `event = time, buses, factor` lines. Relative network paths resolve
/// against the scenario file's directory. Throws FixtureError.
Scenario load_scenario(const std::filesystem::path& path);

/// Network fixture (format = 1): counts, tie impedance, reference voltages,
/// and the nine susceptance blocks in row-major order. Round-trips exactly.
NetworkModel load_network(const std::filesystem::path& path);
void save_network(const NetworkModel& net, const std::filesystem::path& path);

}  // namespace gsvc
