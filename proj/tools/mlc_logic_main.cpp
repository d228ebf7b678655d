// mlc-logic: simulate the SC-CNN MLC circuit as a logic element.
//
//   mlc-logic simulate --gate or --bits 0,0,0,1,1,0,1,1 --out run1
//   mlc-logic gate     --gate xor --seed 7
//   mlc-logic sweep    --gate or --axis d --from 0 --to 1 --points 11
//   mlc-logic phase    --gate or
//   mlc-logic latch    --bits 1,0,0,0,0,1
//
// Exit status: 0 success, 1 logic failure, 2 configuration/IO error, 3 divergence.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mlc/config.hpp"
#include "mlc/decode.hpp"
#include "mlc/experiments.hpp"
#include "mlc/integrator.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitLogicFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitDiverged = 3;

struct Overrides {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> gate;
    std::optional<double> bias;
    std::optional<double> forcing;
    std::optional<double> noise;
    std::optional<double> delta;
    std::optional<double> bit_duration;
    std::optional<std::string> bits;
    std::optional<std::size_t> n_bits;
    std::optional<std::size_t> stride;
    std::optional<double> dt;
    // sweep
    std::optional<std::string> axis;
    std::optional<double> from;
    std::optional<double> to;
    std::optional<std::size_t> points;
    std::optional<std::size_t> sets;
    std::optional<std::size_t> runs;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "Flat JSON config file");
    cmd->add_option("--seed", o.seed, "Top-level seed");
    cmd->add_option("--out", o.out, "Output directory (created if missing)");
    cmd->add_option("--gate", o.gate, "or, and, nor, nand, xor, xnor, or3, and3, sr-high, sr-low (sr = sr-low)");
    cmd->add_option("--bias", o.bias, "Bias E (default: gate operating point)");
    cmd->add_option("--forcing", o.forcing, "Forcing amplitude f (default: gate operating point)");
    cmd->add_option("--noise", o.noise, "Noise intensity D");
    cmd->add_option("--delta", o.delta, "Logic input amplitude");
    cmd->add_option("--bit-duration", o.bit_duration, "Duration of one logic bit");
    cmd->add_option("--bits", o.bits, "Flat tuple-major bit list, e.g. 0,0,0,1,1,0,1,1");
    cmd->add_option("--n-bits", o.n_bits, "Length of the random program when --bits is absent");
    cmd->add_option("--stride", o.stride, "Record every N-th integration step");
    cmd->add_option("--dt", o.dt, "Integration step");
}

mlc::RunConfig build_config(const Overrides& o, const std::string& subcommand) {
    mlc::RunConfig c = o.config ? mlc::load_config(*o.config) : mlc::RunConfig{};
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.out = *o.out;
    if (o.gate) c.gate = *o.gate;
    if (o.bias) c.bias = *o.bias;
    if (o.forcing) c.f = *o.forcing;
    if (o.noise) c.noise_d = *o.noise;
    if (o.delta) c.delta = *o.delta;
    if (o.bit_duration) c.bit_duration = *o.bit_duration;
    if (o.bits) c.bits = mlc::parse_bit_list(*o.bits);
    if (o.n_bits) c.n_bits = *o.n_bits;
    if (o.stride) c.sample_stride = *o.stride;
    if (o.dt) c.dt = *o.dt;
    if (o.axis) c.axis = *o.axis;
    if (o.from) c.from = *o.from;
    if (o.to) c.to = *o.to;
    if (o.points) c.points = *o.points;
    if (o.sets) c.n_sets = *o.sets;
    if (o.runs) c.n_runs = *o.runs;

    if (subcommand == "latch") {
        if (!o.gate && !(o.config && mlc::is_latch(c.gate_spec().kind))) {
            c.gate = "sr-low";
        }
        if (!mlc::is_latch(c.gate_spec().kind)) {
            throw std::invalid_argument("latch needs an sr gate, got '" + c.gate + "'");
        }
    }
    c = c.resolved();
    c.validate();
    return c;
}

fs::path prepare_output(const mlc::RunConfig& c) {
    const fs::path dir(c.out);
    fs::create_directories(dir);
    std::ofstream snapshot(dir / "config.json");
    snapshot << mlc::to_json(c).dump(2) << '\n';
    if (!snapshot) {
        throw std::runtime_error("cannot write " + (dir / "config.json").string());
    }
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

int run_simulate(const mlc::RunConfig& c) {
    const fs::path dir = prepare_output(c);
    const mlc::LogicProgram program = c.program();
    const mlc::ExperimentSettings settings = c.experiment_settings();
    const mlc::Trajectory traj = mlc::simulate_program(c.circuit_params(), program, settings, c.noise_seed());
    auto traj_out = open_output(dir / "trajectory.csv");
    mlc::write_trajectory_csv(traj_out, traj);
    auto prog_out = open_output(dir / "program.csv");
    mlc::write_program_csv(prog_out, program);
    std::cout << "wrote " << traj.samples.size() << " samples to " << (dir / "trajectory.csv").string() << '\n';
    return kExitSuccess;
}

int run_gate(const mlc::RunConfig& c) {
    const fs::path dir = prepare_output(c);
    const mlc::LogicProgram program = c.program();
    const mlc::Trajectory traj =
        mlc::simulate_program(c.circuit_params(), program, c.experiment_settings(), c.noise_seed());
    const mlc::TrialOutcome outcome = mlc::score_trial(traj, program, c.gate_spec(), c.experiment_settings().decode);
    auto out = open_output(dir / "outcome.json");
    out << mlc::to_json(outcome).dump(2) << '\n';
    std::size_t matched = 0;
    for (const auto& b : outcome.bits) {
        matched += b.match ? 1 : 0;
    }
    std::cout << c.gate << ": " << matched << "/" << outcome.bits.size() << " bits correct, "
              << (outcome.success ? "success" : "FAILURE") << '\n';
    return outcome.success ? kExitSuccess : kExitLogicFailure;
}

int run_sweep(const mlc::RunConfig& c) {
    const fs::path dir = prepare_output(c);
    const mlc::ExperimentSettings settings = c.experiment_settings();
    const mlc::PLogicReport report = mlc::sweep(c.sweep_grid(), c.gate_spec(), c.circuit_params(), c.seed, settings);
    auto csv = open_output(dir / "report.csv");
    mlc::write_report_csv(csv, report);
    auto json = open_output(dir / "report.json");
    json << mlc::to_json(report, settings).dump(2) << '\n';
    for (const auto& p : report.points) {
        std::cout << mlc::to_string(report.axis) << " = " << p.axis_value << "  P(logic) = " << p.p_logic << "  ("
                  << p.successes << "/" << p.trials << ")\n";
    }
    return kExitSuccess;
}

int run_phase(const mlc::RunConfig& c) {
    const fs::path dir = prepare_output(c);
    const mlc::LogicProgram program = c.program();
    const auto cloud = mlc::export_phase_portrait(c.circuit_params(), program, c.experiment_settings(), c.noise_seed());
    auto out = open_output(dir / "phase.csv");
    mlc::write_phase_csv(out, cloud, program.n_channels());
    std::cout << "wrote " << cloud.size() << " points to " << (dir / "phase.csv").string() << '\n';
    return kExitSuccess;
}

int run_latch(const mlc::RunConfig& c) {
    const fs::path dir = prepare_output(c);
    const mlc::LogicProgram program = c.program();
    const mlc::LatchOutcome latch =
        mlc::run_latch_experiment(c.circuit_params(), program, c.experiment_settings(), c.noise_seed());
    bool complementary = latch.active_high.bits.size() == latch.active_low.bits.size();
    for (std::size_t k = 0; complementary && k < latch.active_high.bits.size(); ++k) {
        const auto& hi = latch.active_high.bits[k].decoded;
        const auto& lo = latch.active_low.bits[k].decoded;
        complementary = hi && lo && *hi != *lo;
    }
    nlohmann::json j = {
        {"active_high", mlc::to_json(latch.active_high)},
        {"active_low", mlc::to_json(latch.active_low)},
        {"complementary", complementary},
    };
    auto out = open_output(dir / "latch.json");
    out << j.dump(2) << '\n';
    const bool ok = latch.active_high.success && latch.active_low.success;
    std::cout << "latch: active-high " << (latch.active_high.success ? "ok" : "FAILED") << ", active-low "
              << (latch.active_low.success ? "ok" : "FAILED") << '\n';
    return ok ? kExitSuccess : kExitLogicFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Logic gates and set/reset latch in the SC-CNN MLC circuit"};
    app.require_subcommand(1);

    Overrides o;
    auto* simulate = app.add_subcommand("simulate", "Write trajectory.csv for one logic program");
    auto* gate = app.add_subcommand("gate", "Score one trial against a gate; exit 0 iff every bit is correct");
    auto* sweep = app.add_subcommand("sweep", "P(logic) over a forcing or noise grid");
    auto* phase = app.add_subcommand("phase", "Write the (x1, x2) cloud labelled by active inputs");
    auto* latch = app.add_subcommand("latch", "Score a set/reset program on both latch outputs");
    for (auto* cmd : {simulate, gate, sweep, phase, latch}) {
        add_common_flags(cmd, o);
    }
    sweep->add_option("--axis", o.axis, "f or d");
    sweep->add_option("--from", o.from, "First grid value");
    sweep->add_option("--to", o.to, "Last grid value");
    sweep->add_option("--points", o.points, "Number of grid points");
    sweep->add_option("--sets", o.sets, "Random programs per point");
    sweep->add_option("--runs", o.runs, "Noise realizations per program");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const mlc::RunConfig config = build_config(o, name);
        if (name == "simulate") return run_simulate(config);
        if (name == "gate") return run_gate(config);
        if (name == "sweep") return run_sweep(config);
        if (name == "phase") return run_phase(config);
        return run_latch(config);
    } catch (const mlc::Diverged& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const mlc::ForbiddenInput& e) {
        std::cerr << "error: ForbiddenInput: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
}
