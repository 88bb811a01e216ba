#include "gsvc/harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

gsvc::Scenario load_with_overrides(const std::string& path,
                                   const std::optional<std::uint64_t>& seed) {
    gsvc::Scenario s = gsvc::load_scenario(path);
    if (seed) s.rng_seed = *seed;
    return s;
}

void print_summary(const gsvc::RunReport& rep) {
    std::printf("states: %d\n", rep.n_states);
    std::printf("final_x_rms: %.9g\n", rep.final_x_rms);
    std::printf("mean_delay_s: %.9g\n", rep.mean_delay_s);
    std::printf("alarms: %zu\n", rep.alarms.size());
    for (const auto& a : rep.alarms)
        std::printf("  alarm bus=%d t=%.3f entropy=%.6g\n", a.bus_id, a.time_s,
                    a.entropy_nat);
    for (const auto& e : rep.event_outcomes)
        std::printf("event t=%.3f pre_x_rms=%.9g post_x_rms=%.9g\n", e.time_s,
                    e.pre_x_rms, e.post_x_rms);
    if (!rep.control_steps.empty()) {
        int worst = 0;
        for (const auto& c : rep.control_steps)
            worst = std::max(worst, c.iterations);
        std::printf("control: %zu invocations, max_iterations=%d, all_converged=%s\n",
                    rep.control_steps.size(), worst,
                    rep.all_control_converged ? "yes" : "no");
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gsvc::FixtureError("cannot write " + path);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid secondary-voltage-control simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_path;
    std::optional<std::uint64_t> seed;
    std::vector<double> rhos{2.0, 4.0, 6.0};
    std::vector<int> counts{1, 2, 3, 4, 5, 6, 7, 8, 9};

    auto* run = app.add_subcommand("run", "Run one scenario end to end");
    run->add_option("--scenario", scenario_path, "Scenario file")->required();
    run->add_option("--out", out_path, "CSV output path");
    run->add_option("--seed", seed, "Override the scenario seed");

    auto* swr = app.add_subcommand("sweep-rho",
                                   "Median recovery SNR per compression ratio");
    swr->add_option("--scenario", scenario_path, "Scenario file")->required();
    swr->add_option("--rhos", rhos, "Compression ratios")->delimiter(',');
    swr->add_option("--out", out_path, "CSV output path");
    swr->add_option("--seed", seed, "Override the scenario seed");

    auto* swp = app.add_subcommand("sweep-pilots",
                                   "Final x_rms per pilot-bus count");
    swp->add_option("--scenario", scenario_path, "Scenario file")->required();
    swp->add_option("--counts", counts, "Pilot counts")->delimiter(',');
    swp->add_option("--out", out_path, "CSV output path");
    swp->add_option("--seed", seed, "Override the scenario seed");

    auto* gen = app.add_subcommand("gen-network", "Write a synthetic fixture");
    int areas = 3, nG = 3, nC = 3, nL = 3;
    std::uint64_t gen_seed = 1;
    double tie_r = 0.02, tie_x = 0.07;
    gen->add_option("--areas", areas, "Area count");
    gen->add_option("--generators", nG, "Generator buses per area");
    gen->add_option("--capacitors", nC, "Capacitor buses per area");
    gen->add_option("--loads", nL, "Load buses per area");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--tie-r", tie_r, "Tie-line resistance, p.u.");
    gen->add_option("--tie-x", tie_x, "Tie-line reactance, p.u.");
    gen->add_option("--out", out_path, "Fixture output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto rep =
                gsvc::run_scenario(load_with_overrides(scenario_path, seed));
            if (!out_path.empty()) gsvc::write_csv(rep, out_path);
            print_summary(rep);
        } else if (swr->parsed()) {
            const auto table = gsvc::sweep_compression(
                load_with_overrides(scenario_path, seed), rhos);
            std::ofstream file;
            std::ostream* os = &std::cout;
            if (!out_path.empty()) {
                file = open_out(out_path);
                os = &file;
            }
            *os << "rho,median_snr_db\n";
            for (const auto& pt : table) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", pt.rho,
                              pt.median_snr_db);
                *os << buf;
            }
        } else if (swp->parsed()) {
            const auto table = gsvc::sweep_pilots(
                load_with_overrides(scenario_path, seed), counts);
            std::ofstream file;
            std::ostream* os = &std::cout;
            if (!out_path.empty()) {
                file = open_out(out_path);
                os = &file;
            }
            *os << "pilots,final_x_rms\n";
            for (const auto& pt : table) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%d,%.12g\n", pt.count,
                              pt.final_x_rms);
                *os << buf;
            }
        } else if (gen->parsed()) {
            gsvc::NetworkModel net;
            try {
                net = gsvc::build_synthetic_network(areas, nG, nC, nL, gen_seed,
                                                    {tie_r, tie_x});
            } catch (const std::invalid_argument& e) {
                throw gsvc::FixtureError(e.what());
            }
            gsvc::save_network(net, out_path);
            std::printf("wrote %s (%d buses)\n", out_path.c_str(),
                        areas * (nG + nC + nL));
        }
    } catch (const gsvc::FixtureError& e) {
        std::cerr << "fixture error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        // Per the CLI contract only fixture problems change the exit code.
        std::cerr << "internal error: " << e.what() << "\n";
    }
    return 0;
}
