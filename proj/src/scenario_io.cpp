#include "gsvc/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace gsvc {

namespace {

std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

// Lines of `key = value` with '#' comments and blank lines skipped.
std::vector<std::pair<std::string, std::string>> read_kv_lines(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FixtureError("cannot open " + path.string());
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FixtureError(path.string() + ":" + std::to_string(lineno) +
                               ": expected key = value");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw FixtureError("key '" + key + "': cannot parse number '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const std::uint64_t d = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw FixtureError("key '" + key + "': cannot parse integer '" + v + "'");
    }
}

int to_int(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const long d = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(d);
    } catch (const std::exception&) {
        throw FixtureError("key '" + key + "': cannot parse integer '" + v + "'");
    }
}

std::vector<std::string> split_ws(std::string v) {
    for (auto& c : v)
        if (c == ',') c = ' ';
    std::istringstream is(v);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::vector<int> to_int_list(const std::string& v, const std::string& key) {
    std::vector<int> out;
    for (const auto& tok : split_ws(v)) out.push_back(to_int(tok, key));
    return out;
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw FixtureError("key '" + key + "': expected on/off, got '" + v + "'");
}

LoadEvent parse_event(const std::string& v) {
    // time, bus list, factor
    std::vector<std::string> parts;
    std::string cur;
    for (char c : v) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    if (parts.size() != 3)
        throw FixtureError("event '" + v + "': expected time, buses, factor");
    LoadEvent e;
    e.time_s = to_double(trim(parts[0]), "event time");
    e.buses = to_int_list(parts[1], "event buses");
    e.factor = to_double(trim(parts[2]), "event factor");
    return e;
}

void wrap_validation(const std::function<void()>& f) {
    try {
        f();
    } catch (const FixtureError&) {
        throw;
    } catch (const std::exception& e) {
        throw FixtureError(e.what());
    }
}

}  // namespace

void Scenario::validate() const {
    if (!(duration_s > 0.0)) throw FixtureError("duration must be positive");
    if (!(sample_period_s > 0.0))
        throw FixtureError("sample_period must be positive");
    if (!(rho >= 1.0)) throw FixtureError("rho must be at least 1");
    double prev = 0.0;
    for (const auto& e : events) {
        if (e.time_s < prev) throw FixtureError("events must be sorted by time");
        prev = e.time_s;
        if (!(e.time_s > 0.0) || !(e.time_s < duration_s))
            throw FixtureError("event times must lie inside (0, duration)");
        if (e.buses.empty()) throw FixtureError("event needs at least one bus");
        for (int b : e.buses)
            if (b < 0) throw FixtureError("event bus indices must be nonnegative");
        if (!(e.factor > 0.0)) throw FixtureError("event factor must be positive");
    }
    for (int p : pilot_buses)
        if (p < 0) throw FixtureError("pilot indices must be nonnegative");
    if (detector.scales < 1) throw FixtureError("detector needs at least one scale");
    if (detector.window_length < 2 * detector.scales - 1)
        throw FixtureError("window too short for the detector scale count");
    if (detector.mmf_se_length % 2 == 0 || detector.mmf_se_length < 1)
        throw FixtureError("mmf_se_length must be odd");
    if (!(detector.threshold > 0.0))
        throw FixtureError("detector threshold must be positive");
    if (!(gen_bound >= 0.0) || !(cap_bound >= 0.0))
        throw FixtureError("control bounds must be nonnegative");
    if (!std::isfinite(q_load) || !std::isfinite(q_cap) || !std::isfinite(q_gen))
        throw FixtureError("base operating point must be finite");
    if (!(sensor_start_s >= 0.0))
        throw FixtureError("sensor_start must be nonnegative");
    if (!std::isfinite(sensor_snr_db) &&
        !(std::isinf(sensor_snr_db) && sensor_snr_db > 0.0))
        throw FixtureError("sensor_snr must be finite or inf");
    if (synthetic) {
        const auto& sp = *synthetic;
        if (sp.areas < 1 || sp.nG < 1 || sp.nC < 1 || sp.nL < 1)
            throw FixtureError("synthetic spec needs positive bus counts");
    }
    wrap_validation([&] { channel.validate(); });
    wrap_validation([&] { controller.validate(); });
}

Scenario load_scenario(const std::filesystem::path& path) {
    Scenario s;
    bool saw_format = false;
    for (const auto& [key, value] : read_kv_lines(path)) {
        if (key == "format") {
            if (to_int(value, key) != 1)
                throw FixtureError("unsupported scenario format " + value);
            saw_format = true;
        } else if (key == "name") {
            s.name = value;
        } else if (key == "network") {
            std::filesystem::path p(value);
            s.network_path = p.is_absolute() ? p : path.parent_path() / p;
        } else if (key == "synthetic") {
            const auto parts = split_ws(value);
            if (parts.size() != 5)
                throw FixtureError("synthetic: expected areas nG nC nL seed");
            SyntheticSpec sp;
            sp.areas = to_int(parts[0], key);
            sp.nG = to_int(parts[1], key);
            sp.nC = to_int(parts[2], key);
            sp.nL = to_int(parts[3], key);
            sp.seed = to_u64(parts[4], key);
            s.synthetic = sp;
        } else if (key == "duration") {
            s.duration_s = to_double(value, key);
        } else if (key == "sample_period") {
            s.sample_period_s = to_double(value, key);
        } else if (key == "event") {
            s.events.push_back(parse_event(value));
        } else if (key == "pilots") {
            s.pilot_buses = to_int_list(value, key);
        } else if (key == "rho") {
            s.rho = to_double(value, key);
        } else if (key == "bandwidth") {
            s.channel.bandwidth_bps = to_double(value, key);
        } else if (key == "latency") {
            s.channel.fixed_latency_s = to_double(value, key);
        } else if (key == "channel_snr") {
            s.channel.noise_snr_db = to_double(value, key);
        } else if (key == "detector_scales") {
            s.detector.scales = static_cast<std::size_t>(to_int(value, key));
        } else if (key == "detector_threshold") {
            s.detector.threshold = to_double(value, key);
        } else if (key == "detector_window") {
            s.detector.window_length = static_cast<std::size_t>(to_int(value, key));
        } else if (key == "mmf_se_length") {
            s.detector.mmf_se_length = static_cast<std::size_t>(to_int(value, key));
        } else if (key == "beta") {
            s.controller.beta = to_double(value, key);
        } else if (key == "epsilon") {
            s.controller.epsilon = to_double(value, key);
        } else if (key == "max_control_iterations") {
            s.controller.max_iterations = to_int(value, key);
        } else if (key == "control") {
            s.control_enabled = to_bool(value, key);
        } else if (key == "gen_bound") {
            s.gen_bound = to_double(value, key);
        } else if (key == "cap_bound") {
            s.cap_bound = to_double(value, key);
        } else if (key == "q_load") {
            s.q_load = to_double(value, key);
        } else if (key == "q_cap") {
            s.q_cap = to_double(value, key);
        } else if (key == "q_gen") {
            s.q_gen = to_double(value, key);
        } else if (key == "sensor_snr") {
            s.sensor_snr_db = to_double(value, key);
        } else if (key == "sensor_start") {
            s.sensor_start_s = to_double(value, key);
        } else if (key == "seed") {
            s.rng_seed = to_u64(value, key);
        } else {
            throw FixtureError(path.string() + ": unknown key '" + key + "'");
        }
    }
    if (!saw_format)
        throw FixtureError(path.string() + ": missing 'format = 1' line");
    s.validate();
    return s;
}

namespace {

const char* const kBlockNames[9] = {"B_GG", "B_GC", "B_GL", "B_CG", "B_CC",
                                    "B_CL", "B_LG", "B_LC", "B_LL"};

Eigen::MatrixXd* block_by_index(NetworkModel& net, int i) {
    Eigen::MatrixXd* blocks[9] = {&net.B_GG, &net.B_GC, &net.B_GL,
                                  &net.B_CG, &net.B_CC, &net.B_CL,
                                  &net.B_LG, &net.B_LC, &net.B_LL};
    return blocks[i];
}

}  // namespace

NetworkModel load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FixtureError("cannot open " + path.string());

    NetworkModel net;
    bool saw_format = false;
    int next_block = 0;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> FixtureError {
        return FixtureError(path.string() + ":" + std::to_string(lineno) + ": " + msg);
    };

    std::vector<double> numbers;  // accumulates the current block's entries
    std::size_t numbers_needed = 0;
    Eigen::MatrixXd* target = nullptr;
    int target_rows = 0, target_cols = 0;

    auto flush_block = [&] {
        if (!target) return;
        if (numbers.size() != numbers_needed)
            throw fail(std::string("block ") + kBlockNames[next_block - 1] +
                       " has " + std::to_string(numbers.size()) + " entries, expected " +
                       std::to_string(numbers_needed));
        target->resize(target_rows, target_cols);
        for (int r = 0; r < target_rows; ++r)
            for (int c = 0; c < target_cols; ++c)
                (*target)(r, c) = numbers[static_cast<std::size_t>(r) * target_cols + c];
        numbers.clear();
        target = nullptr;
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq != std::string::npos) {
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key == "format") {
                if (to_int(value, key) != 1)
                    throw fail("unsupported network format " + value);
                saw_format = true;
            } else if (key == "areas") {
                net.areas = to_int(value, key);
            } else if (key == "generators") {
                net.nG = to_int(value, key);
            } else if (key == "capacitors") {
                net.nC = to_int(value, key);
            } else if (key == "loads") {
                net.nL = to_int(value, key);
            } else if (key == "tie_impedance") {
                const auto parts = split_ws(value);
                if (parts.size() != 2) throw fail("tie_impedance wants R X");
                net.tie_line_impedance = {to_double(parts[0], key),
                                          to_double(parts[1], key)};
            } else if (key == "reference_voltages") {
                const auto parts = split_ws(value);
                net.reference_voltages.resize(static_cast<Eigen::Index>(parts.size()));
                for (std::size_t i = 0; i < parts.size(); ++i)
                    net.reference_voltages[static_cast<Eigen::Index>(i)] =
                        to_double(parts[i], key);
            } else if (key == "block") {
                flush_block();
                if (next_block >= 9) throw fail("too many blocks");
                if (value != kBlockNames[next_block])
                    throw fail("expected block " + std::string(kBlockNames[next_block]) +
                               ", got " + value);
                const int tg = net.total_generators(), tc = net.total_capacitors(),
                          tl = net.total_loads();
                const int rows[9] = {tg, tg, tg, tc, tc, tc, tl, tl, tl};
                const int cols[9] = {tg, tc, tl, tg, tc, tl, tg, tc, tl};
                target = block_by_index(net, next_block);
                target_rows = rows[next_block];
                target_cols = cols[next_block];
                numbers_needed =
                    static_cast<std::size_t>(target_rows) * static_cast<std::size_t>(target_cols);
                ++next_block;
            } else {
                throw fail("unknown key '" + key + "'");
            }
            continue;
        }

        if (!target) throw fail("numeric data outside a block");
        for (const auto& tok : split_ws(line))
            numbers.push_back(to_double(tok, "block data"));
    }
    flush_block();

    if (!saw_format) throw FixtureError(path.string() + ": missing 'format = 1' line");
    if (next_block != 9)
        throw FixtureError(path.string() + ": expected 9 blocks, found " +
                           std::to_string(next_block));
    try {
        net.validate();
    } catch (const std::exception& e) {
        throw FixtureError(path.string() + ": " + e.what());
    }
    return net;
}

void save_network(const NetworkModel& net, const std::filesystem::path& path) {
    net.validate();
    std::ofstream out(path);
    if (!out) throw FixtureError("cannot write " + path.string());

    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };

    out << "format = 1\n";
    out << "areas = " << net.areas << "\n";
    out << "generators = " << net.nG << "\n";
    out << "capacitors = " << net.nC << "\n";
    out << "loads = " << net.nL << "\n";
    out << "tie_impedance = " << num(net.tie_line_impedance.real()) << " "
        << num(net.tie_line_impedance.imag()) << "\n";
    out << "reference_voltages =";
    for (Eigen::Index i = 0; i < net.reference_voltages.size(); ++i)
        out << " " << num(net.reference_voltages[i]);
    out << "\n";

    const Eigen::MatrixXd* blocks[9] = {&net.B_GG, &net.B_GC, &net.B_GL,
                                        &net.B_CG, &net.B_CC, &net.B_CL,
                                        &net.B_LG, &net.B_LC, &net.B_LL};
    for (int b = 0; b < 9; ++b) {
        out << "block = " << kBlockNames[b] << "\n";
        const Eigen::MatrixXd& mat = *blocks[b];
        for (Eigen::Index r = 0; r < mat.rows(); ++r) {
            for (Eigen::Index c = 0; c < mat.cols(); ++c)
                out << (c ? " " : "") << num(mat(r, c));
            out << "\n";
        }
    }
    if (!out) throw FixtureError("write failed for " + path.string());
}

NetworkModel scenario_network(const Scenario& s) {
    if (!s.network_path.empty()) return load_network(s.network_path);
    SyntheticSpec sp;
    sp.seed = s.rng_seed;
    if (s.synthetic) sp = *s.synthetic;
    try {
        return build_synthetic_network(sp.areas, sp.nG, sp.nC, sp.nL, sp.seed,
                                       sp.tie_line_impedance);
    } catch (const std::exception& e) {
        throw FixtureError(e.what());
    }
}

}  // namespace gsvc
