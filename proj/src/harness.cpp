#include "gsvc/harness.hpp"

#include "gsvc/cs_codec.hpp"
#include "gsvc/morphology.hpp"
#include "gsvc/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace gsvc {

namespace {

// Independent random streams derived from the scenario seed.
constexpr std::uint64_t kMatrixStream = 0xA1;
constexpr std::uint64_t kChannelStream = 0xA2;
constexpr std::uint64_t kSensorStream = 0xA3;

// Concatenated state layout: per area [V_G | V_C | V_L | Q_G | Q_C | Q_L],
// areas in ascending order.
struct Layout {
    int areas, nG, nC, nL;
    int span() const { return nG + nC + nL; }
    int per_area() const { return 2 * span(); }
    int total() const { return areas * per_area(); }
    int v_load_row(int area, int j) const {  // row in the PDC concatenation
        return area * per_area() + nG + nC + j;
    }
    int v_load_local(int j) const { return nG + nC + j; }  // row in one area
};

struct Derived {
    Eigen::VectorXd V_C;  // capacitor-bus voltages implied by the block system
    Eigen::VectorXd Q_G;  // generator reactive outputs implied by row one
};

Derived derive_channels(const NetworkModel& net,
                        const Eigen::PartialPivLU<Eigen::MatrixXd>& lu_cc,
                        const PlantState& state, const Scenario& s) {
    const Eigen::VectorXd dVG =
        state.V_G - Eigen::VectorXd::Ones(state.V_G.size());
    const Eigen::VectorXd dVL = state.V_L - net.reference_voltages;
    const Eigen::VectorXd dQC =
        state.Q_C - Eigen::VectorXd::Constant(state.Q_C.size(), s.q_cap);
    Derived d;
    const Eigen::VectorXd dVC =
        lu_cc.solve(dQC - net.B_CG * dVG - net.B_CL * dVL);
    d.V_C = Eigen::VectorXd::Ones(dVC.size()) + dVC;
    d.Q_G = Eigen::VectorXd::Constant(dVG.size(), s.q_gen) + net.B_GG * dVG +
            net.B_GC * dVC + net.B_GL * dVL;
    return d;
}

Eigen::VectorXd area_column(const Layout& lay, int area, const PlantState& state,
                            const Derived& d) {
    Eigen::VectorXd col(lay.per_area());
    col.segment(0, lay.nG) = state.V_G.segment(area * lay.nG, lay.nG);
    col.segment(lay.nG, lay.nC) = d.V_C.segment(area * lay.nC, lay.nC);
    col.segment(lay.nG + lay.nC, lay.nL) = state.V_L.segment(area * lay.nL, lay.nL);
    const int qs = lay.span();
    col.segment(qs, lay.nG) = d.Q_G.segment(area * lay.nG, lay.nG);
    col.segment(qs + lay.nG, lay.nC) = state.Q_C.segment(area * lay.nC, lay.nC);
    col.segment(qs + lay.nG + lay.nC, lay.nL) =
        state.Q_L.segment(area * lay.nL, lay.nL);
    return col;
}

Eigen::VectorXd maybe_noisy(const Eigen::VectorXd& col, const Scenario& s,
                            double t, int area, std::uint64_t tick) {
    if (std::isinf(s.sensor_snr_db) || t < s.sensor_start_s) return col;
    TelemetryWindow one;
    one.area_id = area;
    one.start_time = t;
    one.sample_period = s.sample_period_s;
    one.states = col;
    const std::uint64_t seed =
        mix_seed(mix_seed(s.rng_seed, kSensorStream),
                 (static_cast<std::uint64_t>(area) << 40) | tick);
    return inject_sensor_noise(one, s.sensor_snr_db, seed).states.col(0);
}

double lower_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[(v.size() - 1) / 2];
}

}  // namespace

RunReport run_scenario(const Scenario& s) {
    s.validate();
    const NetworkModel net = scenario_network(s);
    const Layout lay{net.areas, net.nG, net.nC, net.nL};
    const int tg = net.total_generators(), tc = net.total_capacitors(),
              tl = net.total_loads();

    std::vector<int> pilots = s.pilot_buses;
    if (pilots.empty()) {
        pilots.resize(static_cast<std::size_t>(tl));
        std::iota(pilots.begin(), pilots.end(), 0);
    }
    for (int p : pilots)
        if (p >= tl) throw FixtureError("pilot index exceeds the load count");
    for (const auto& e : s.events)
        for (int b : e.buses)
            if (b >= tl) throw FixtureError("event bus exceeds the load count");

    SensitivityModel sens;
    try {
        sens = compute_sensitivities(net, pilots);
    } catch (const std::exception& e) {
        throw FixtureError(e.what());
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu_cc(net.B_CC);

    // Steady state: every load at its reference, controls at their base.
    PlantState state;
    state.V_L = net.reference_voltages;
    state.V_G = Eigen::VectorXd::Ones(tg);
    state.Q_C = Eigen::VectorXd::Constant(tc, s.q_cap);
    state.Q_L = Eigen::VectorXd::Constant(tl, s.q_load);

    const Eigen::VectorXd lower = (Eigen::VectorXd(tg + tc)
                                       << Eigen::VectorXd::Constant(tg, -s.gen_bound),
                                   Eigen::VectorXd::Constant(tc, -s.cap_bound))
                                      .finished();
    const Eigen::VectorXd upper = -lower;
    Eigen::VectorXd u_cum = Eigen::VectorXd::Zero(tg + tc);
    ControlInput pending = ControlInput::zeros(tg, tc, lower, upper);

    const auto w = static_cast<Eigen::Index>(s.detector.window_length);
    const auto steps =
        static_cast<std::uint64_t>(std::llround(s.duration_s / s.sample_period_s));

    // Rolling measurement windows, prefilled with (possibly noisy) history.
    std::vector<Eigen::MatrixXd> windows(static_cast<std::size_t>(lay.areas));
    {
        const Derived d0 = derive_channels(net, lu_cc, state, s);
        for (int a = 0; a < lay.areas; ++a) {
            auto& win = windows[static_cast<std::size_t>(a)];
            win.resize(lay.per_area(), w);
            const Eigen::VectorXd base = area_column(lay, a, state, d0);
            for (Eigen::Index c = 0; c < w; ++c) {
                const double t_hist =
                    (static_cast<double>(c) - static_cast<double>(w - 1)) *
                    s.sample_period_s;
                win.col(c) = maybe_noisy(base, s, t_hist, a,
                                         static_cast<std::uint64_t>(c));
            }
        }
    }

    const int n = lay.total();
    const int m = std::min<int>(
        n, static_cast<int>(std::ceil(static_cast<double>(n) / s.rho)));
    CodecConfig codec;
    codec.n = static_cast<std::size_t>(n);
    codec.m = static_cast<std::size_t>(m);
    codec.matrix_seed = mix_seed(s.rng_seed, kMatrixStream);

    ChannelModel chm = s.channel;
    chm.rng_seed = mix_seed(s.rng_seed, kChannelStream);
    Channel channel(chm);

    const StructuringElement se =
        StructuringElement::flat(s.detector.mmf_se_length);

    RunReport rep;
    rep.n_states = n;
    rep.u_cumulative = u_cum;
    std::vector<bool> alarm_level(static_cast<std::size_t>(tl), false);
    double delay_sum = 0.0;
    std::size_t event_next = 0;
    std::vector<std::size_t> event_steps;

    for (std::uint64_t k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * s.sample_period_s;

        // Load events due at this sample become injection changes.
        Eigen::VectorXd dq_inj = Eigen::VectorXd::Zero(tl);
        while (event_next < s.events.size() &&
               s.events[event_next].time_s <= t + 1e-9) {
            const auto& e = s.events[event_next];
            for (int b : e.buses) dq_inj[b] += -(e.factor - 1.0) * state.Q_L[b];
            state = apply_load_event(state, e.buses, e.factor);
            event_steps.push_back(rep.x_rms_per_step.size());
            ++event_next;
        }

        // Plant: previous sample's control acts now.
        state = plant_response(net, sens, state, dq_inj, pending);
        state.time = t;
        u_cum += pending.clamped();
        for (Eigen::Index i = 0; i < u_cum.size(); ++i) {
            if (u_cum[i] < lower[i] - 1e-9 || u_cum[i] > upper[i] + 1e-9)
                throw std::logic_error("accumulated control left its box");
        }
        rep.x_rms_per_step.push_back(
            rms_deviation(state.V_L, net.reference_voltages));

        // Measurement columns, windows, and per-bus detection.
        const Derived d = derive_channels(net, lu_cc, state, s);
        Eigen::VectorXd x(n);
        Eigen::VectorXd entropy(tl);
        std::vector<bool> alarm_now(static_cast<std::size_t>(tl), false);
        for (int a = 0; a < lay.areas; ++a) {
            auto& win = windows[static_cast<std::size_t>(a)];
            const Eigen::VectorXd col = maybe_noisy(
                area_column(lay, a, state, d), s, t, a,
                static_cast<std::uint64_t>(w) + k);
            win.leftCols(w - 1) = win.rightCols(w - 1).eval();
            win.col(w - 1) = col;
            x.segment(a * lay.per_area(), lay.per_area()) = col;

            for (int j = 0; j < lay.nL; ++j) {
                const int bus = a * lay.nL + j;
                Signal raw;
                raw.samples.assign(win.row(lay.v_load_local(j)).begin(),
                                   win.row(lay.v_load_local(j)).end());
                const Signal denoised = mmf(raw, se);
                const EntropyReport er =
                    detect(denoised.samples, s.detector.scales,
                           s.detector.threshold);
                entropy[bus] = er.entropy;
                alarm_now[static_cast<std::size_t>(bus)] = er.alarm;
                if (er.alarm && !alarm_level[static_cast<std::size_t>(bus)])
                    rep.alarms.push_back({bus, t, er.entropy, er.threshold});
            }
        }
        alarm_level = alarm_now;
        rep.telemetry.push_back(x);

        // Encode, cross the channel, decode. rho = 1 ships the raw vector.
        CompressedFrame frame;
        if (m >= n) {
            frame.y = x;
            frame.config = codec;
            frame.timestamp = t;
            frame.area_id = kPdcAreaId;
        } else {
            frame = encode(x, codec, t, kPdcAreaId);
        }
        const TransmitResult tx = channel.transmit(serialize(frame));
        delay_sum += tx.delay_s;
        const CompressedFrame got = deserialize(tx.bytes);
        const Eigen::VectorXd x_hat = m >= n ? got.y : recover(got);
        const double snr = snr_db(x, x_hat);
        rep.step_snr_db.push_back(snr);

        // Controller output is applied at the next sample.
        if (s.control_enabled) {
            Eigen::VectorXd vp(static_cast<Eigen::Index>(pilots.size()));
            Eigen::VectorXd vp_ref(vp.size());
            for (Eigen::Index i = 0; i < vp.size(); ++i) {
                const int bus = pilots[static_cast<std::size_t>(i)];
                vp[i] = x_hat[lay.v_load_row(bus / lay.nL, bus % lay.nL)];
                vp_ref[i] = net.reference_voltages[bus];
            }
            const ControlInput headroom =
                ControlInput::zeros(tg, tc, lower - u_cum, upper - u_cum);
            const ControlResult cr =
                run_control_loop(sens, vp, vp_ref, headroom, s.controller);
            pending = cr.u_star;
            rep.control_steps.push_back({t, cr.iterations, cr.converged});
            rep.all_control_converged = rep.all_control_converged && cr.converged;
        }

        for (int bus = 0; bus < tl; ++bus) {
            CsvRow row;
            row.time_s = t;
            row.area_id = bus / lay.nL;
            row.bus_id = bus;
            row.v_pu = state.V_L[bus];
            row.q_pu = state.Q_L[bus];
            row.entropy_nat = entropy[bus];
            row.alarm = alarm_now[static_cast<std::size_t>(bus)];
            row.rho = s.rho;
            row.snr_db = snr;
            row.delay_s = tx.delay_s;
            rep.rows.push_back(row);
        }
    }

    rep.u_cumulative = u_cum;
    rep.final_x_rms = rep.x_rms_per_step.empty() ? 0.0 : rep.x_rms_per_step.back();
    rep.mean_delay_s = steps == 0 ? 0.0 : delay_sum / static_cast<double>(steps);
    for (std::size_t i = 0; i < event_steps.size(); ++i) {
        const std::size_t at = event_steps[i];
        const std::size_t until = i + 1 < event_steps.size()
                                      ? event_steps[i + 1] - 1
                                      : rep.x_rms_per_step.size() - 1;
        EventOutcome eo;
        eo.time_s = s.events[i].time_s;
        eo.pre_x_rms = rep.x_rms_per_step[at];
        eo.post_x_rms = rep.x_rms_per_step[until];
        rep.event_outcomes.push_back(eo);
    }
    return rep;
}

std::vector<RhoSweepPoint> sweep_compression(const Scenario& s,
                                             const std::vector<double>& rhos) {
    for (double r : rhos)
        if (!(r >= 1.0)) throw FixtureError("rho must be at least 1");
    const RunReport base = run_scenario(s);
    const int n = base.n_states;

    std::vector<RhoSweepPoint> out;
    for (double r : rhos) {
        const int m = std::min<int>(
            n, static_cast<int>(std::ceil(static_cast<double>(n) / r)));
        RhoSweepPoint pt;
        pt.rho = r;
        if (m >= n) {
            pt.median_snr_db = std::numeric_limits<double>::infinity();
        } else {
            CodecConfig cfg;
            cfg.n = static_cast<std::size_t>(n);
            cfg.m = static_cast<std::size_t>(m);
            cfg.matrix_seed = mix_seed(s.rng_seed, kMatrixStream);
            std::vector<double> snrs;
            snrs.reserve(base.telemetry.size());
            for (const auto& x : base.telemetry)
                snrs.push_back(snr_db(x, recover(encode(x, cfg))));
            pt.median_snr_db = lower_median(std::move(snrs));
        }
        out.push_back(pt);
    }
    return out;
}

std::vector<PilotSweepPoint> sweep_pilots(const Scenario& s,
                                          const std::vector<int>& counts) {
    std::vector<PilotSweepPoint> out;
    for (int c : counts) {
        if (c < 1) throw FixtureError("pilot count must be at least 1");
        Scenario run = s;
        run.pilot_buses.resize(static_cast<std::size_t>(c));
        std::iota(run.pilot_buses.begin(), run.pilot_buses.end(), 0);
        out.push_back({c, run_scenario(run).final_x_rms});
    }
    return out;
}

void write_csv(const RunReport& report, std::ostream& out) {
    out << "time_s,area_id,bus_id,v_pu,q_pu,entropy_nat,alarm,rho,snr_db,delay_s\n";
    char buf[256];
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof buf,
                      "%.3f,%d,%d,%.12g,%.12g,%.12g,%d,%.12g,%.12g,%.12g\n",
                      r.time_s, r.area_id, r.bus_id, r.v_pu, r.q_pu,
                      r.entropy_nat, r.alarm ? 1 : 0, r.rho, r.snr_db, r.delay_s);
        out << buf;
    }
}

void write_csv(const RunReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FixtureError("cannot write " + path.string());
    write_csv(report, out);
    if (!out) throw FixtureError("write failed for " + path.string());
}

}  // namespace gsvc
