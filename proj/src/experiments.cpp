#include "mlc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include "mlc/seeds.hpp"

namespace mlc {

namespace {

/// Runs body(i) for i in [0, n) on a fixed pool of threads. Results must be
/// written by index; the first exception is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

nlohmann::json params_json(const CircuitParams& p) {
    return {{"a", p.a},         {"b", p.b},       {"nu", p.nu},           {"beta", p.beta}, {"omega", p.omega},
            {"f", p.f},         {"bias", p.bias}, {"noise_d", p.noise_d}, {"delta", p.delta}};
}

} // namespace

CircuitParams at_operating_point(CircuitParams params, const GateSpec& gate) noexcept {
    params.bias = gate.operating_bias;
    params.f = gate.operating_f;
    return params;
}

Trajectory simulate_program(const CircuitParams& params, const LogicProgram& program,
                            const ExperimentSettings& settings, std::uint64_t noise_seed) {
    params.validate();
    program.validate(settings.integrator.dt);
    IntegratorConfig config = settings.integrator;
    config.seed = noise_seed;
    const double t_end = program.end_time();
    if (!(t_end > settings.initial.t)) {
        const SystemState& s = settings.initial;
        const double i_now = sample_I(program, s.t);
        return Trajectory{{{s.t, s.x1, s.x2, i_now, deterministic_drive(params, i_now, s.z)}}, settings.sample_stride};
    }
    return integrate(
        settings.initial, params, [&program](double t) { return sample_I(program, t); }, t_end, config,
        settings.sample_stride);
}

TrialResult run_trial(const GateSpec& gate, const CircuitParams& params, const LogicProgram& program,
                      const ExperimentSettings& settings, std::uint64_t noise_seed) {
    TrialResult result;
    try {
        const Trajectory traj = simulate_program(params, program, settings, noise_seed);
        result.outcome = score_trial(traj, program, gate, settings.decode);
    } catch (const Diverged& e) {
        result.diverged = true;
        result.diverged_at = e.time();
    }
    return result;
}

LogicProgram program_for_gate(const GateSpec& gate, std::size_t n_bits, std::uint64_t seed,
                              const ProgramTiming& timing) {
    return random_program(n_bits, arity(gate.combiner), gate.combiner, seed, timing, is_latch(gate.kind));
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) {
        return {0.0, 1.0};
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    // Pin the degenerate ends exactly; the formula leaves rounding residue.
    const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

void PLogicProtocol::validate() const {
    if (n_sets < 1 || n_runs_per_set < 1 || bits_per_run < 1) {
        throw std::invalid_argument("n_sets, n_runs_per_set and bits_per_run must all be >= 1");
    }
}

std::uint64_t program_seed(std::uint64_t base_seed, std::size_t set) noexcept {
    return derive_seed(base_seed, "program", set);
}

std::uint64_t noise_seed(std::uint64_t base_seed, std::size_t set, std::size_t run,
                         std::size_t n_runs_per_set) noexcept {
    return derive_seed(base_seed, "noise", set * n_runs_per_set + run);
}

PLogicPoint estimate_plogic(const GateSpec& gate, const CircuitParams& params, const PLogicProtocol& protocol,
                            std::uint64_t base_seed, const ExperimentSettings& settings) {
    protocol.validate();
    params.validate();

    PLogicPoint point;
    std::vector<LogicProgram> programs;
    programs.reserve(protocol.n_sets);
    for (std::size_t s = 0; s < protocol.n_sets; ++s) {
        point.program_seeds.push_back(program_seed(base_seed, s));
        programs.push_back(program_for_gate(gate, protocol.bits_per_run, point.program_seeds.back(),
                                            settings.timing(params)));
    }

    // Without noise every run of a set is the same trajectory; simulate it once.
    const bool deterministic = noise_amplitude(params, settings.integrator) == 0.0;
    const std::size_t runs_simulated = deterministic ? 1 : protocol.n_runs_per_set;
    const std::size_t weight = deterministic ? protocol.n_runs_per_set : 1;

    std::vector<TrialResult> results(protocol.n_sets * runs_simulated);
    parallel_for(results.size(), settings.threads, [&](std::size_t i) {
        const std::size_t set = i / runs_simulated;
        const std::size_t run = i % runs_simulated;
        results[i] = run_trial(gate, params, programs[set], settings,
                               noise_seed(base_seed, set, run, protocol.n_runs_per_set));
    });

    for (const TrialResult& r : results) {
        point.trials += weight;
        point.successes += r.success() ? weight : 0;
        point.diverged += r.diverged ? weight : 0;
    }
    point.p_logic = static_cast<double>(point.successes) / static_cast<double>(point.trials);
    std::tie(point.ci_lo, point.ci_hi) = wilson_interval(point.successes, point.trials);
    return point;
}

std::string_view to_string(SweepAxis axis) noexcept {
    return axis == SweepAxis::f ? "f" : "D";
}

SweepAxis parse_axis(std::string_view name) {
    if (name == "f" || name == "F") {
        return SweepAxis::f;
    }
    if (name == "d" || name == "D") {
        return SweepAxis::D;
    }
    throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "' (expected f or d)");
}

SweepGrid SweepGrid::linspace(SweepAxis axis, double from, double to, std::size_t points,
                              const PLogicProtocol& protocol) {
    SweepGrid grid;
    grid.axis = axis;
    grid.protocol = protocol;
    if (points == 1) {
        grid.values.push_back(from);
        return grid;
    }
    for (std::size_t i = 0; i < points; ++i) {
        // Endpoints exact; interior points from the index to avoid drift.
        const double u = static_cast<double>(i) / static_cast<double>(points - 1);
        grid.values.push_back(i + 1 == points ? to : from + (to - from) * u);
    }
    return grid;
}

void SweepGrid::validate() const {
    if (values.empty()) {
        throw std::invalid_argument("sweep grid is empty");
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) {
            throw std::invalid_argument("sweep grid values must be strictly increasing");
        }
    }
    protocol.validate();
}

PLogicReport sweep(const SweepGrid& grid, const GateSpec& gate, const CircuitParams& params, std::uint64_t base_seed,
                   const ExperimentSettings& settings) {
    grid.validate();
    PLogicReport report;
    report.axis = grid.axis;
    report.gate = gate;
    report.fixed = params;
    report.protocol = grid.protocol;
    report.base_seed = base_seed;
    for (double v : grid.values) {
        CircuitParams p = params;
        (grid.axis == SweepAxis::f ? p.f : p.noise_d) = v;
        PLogicPoint point = estimate_plogic(gate, p, grid.protocol, base_seed, settings);
        point.axis_value = v;
        report.points.push_back(std::move(point));
    }
    return report;
}

void write_report_csv(std::ostream& out, const PLogicReport& report) {
    const auto old_precision = out.precision(17);
    out << "axis_value,trials,successes,p_logic,ci_lo,ci_hi\n";
    for (const PLogicPoint& p : report.points) {
        out << p.axis_value << ',' << p.trials << ',' << p.successes << ',' << p.p_logic << ',' << p.ci_lo << ','
            << p.ci_hi << '\n';
    }
    out.precision(old_precision);
}

nlohmann::json to_json(const PLogicReport& report, const ExperimentSettings& settings) {
    nlohmann::json points = nlohmann::json::array();
    for (const PLogicPoint& p : report.points) {
        points.push_back({
            {"axis_value", p.axis_value},
            {"trials", p.trials},
            {"successes", p.successes},
            {"diverged", p.diverged},
            {"p_logic", p.p_logic},
            {"ci_lo", p.ci_lo},
            {"ci_hi", p.ci_hi},
            {"program_seeds", p.program_seeds},
        });
    }
    const GateSpec& g = report.gate;
    return {
        {"axis", std::string(to_string(report.axis))},
        {"gate",
         {{"kind", std::string(to_string(g.kind))},
          {"decode_var", std::string(to_string(g.decode_var))},
          {"rule", {{"kind", std::string(to_string(g.rule.kind))}, {"lo", g.rule.lo}, {"hi", g.rule.hi}}},
          {"combiner", std::string(to_string(g.combiner))}}},
        {"fixed_params", params_json(report.fixed)},
        {"protocol",
         {{"n_sets", report.protocol.n_sets},
          {"n_runs_per_set", report.protocol.n_runs_per_set},
          {"bits_per_run", report.protocol.bits_per_run}}},
        {"base_seed", report.base_seed},
        {"seed_derivation",
         "program seed = derive_seed(base_seed, \"program\", set); noise seed = derive_seed(base_seed, \"noise\", "
         "set * n_runs_per_set + run); shared by every grid point"},
        {"settings",
         {{"dt", settings.integrator.dt},
          {"scheme", std::string(to_string(settings.integrator.scheme))},
          {"divergence_bound", settings.integrator.divergence_bound},
          {"settle_fraction", settings.decode.settle_fraction},
          {"agreement_threshold", settings.decode.agreement_threshold},
          {"bit_duration", settings.bit_duration},
          {"transient", settings.transient},
          {"sample_stride", settings.sample_stride},
          {"initial", {settings.initial.x1, settings.initial.x2, settings.initial.z}}}},
        {"points", points},
    };
}

std::vector<PhasePoint> export_phase_portrait(const CircuitParams& params, const LogicProgram& program,
                                              const ExperimentSettings& settings, std::uint64_t noise_seed) {
    std::vector<PhasePoint> cloud;
    if (program.n_bits() == 0) {
        return cloud;
    }
    const Trajectory traj = simulate_program(params, program, settings, noise_seed);
    const double end = program.end_time();
    for (const Sample& s : traj.samples) {
        const std::ptrdiff_t k = bit_index_at(program, s.t);
        if (k < 0 || s.t >= end - 1e-9 * program.bit_duration) {
            continue;
        }
        cloud.push_back({s.x1, s.x2, program.bits_at(static_cast<std::size_t>(k))});
    }
    return cloud;
}

void write_phase_csv(std::ostream& out, const std::vector<PhasePoint>& cloud, std::size_t n_channels) {
    const auto old_precision = out.precision(17);
    out << "x1,x2";
    for (std::size_t c = 0; c < n_channels; ++c) {
        out << ",bit_ch" << (c + 1);
    }
    out << '\n';
    for (const PhasePoint& p : cloud) {
        out << p.x1 << ',' << p.x2;
        for (std::uint8_t b : p.bits) {
            out << ',' << static_cast<int>(b);
        }
        out << '\n';
    }
    out.precision(old_precision);
}

LatchOutcome run_latch_experiment(const CircuitParams& params, const LogicProgram& program,
                                  const ExperimentSettings& settings, std::uint64_t noise_seed) {
    if (program.combiner != Combiner::diff2) {
        throw std::invalid_argument("latch experiments need a diff2 program");
    }
    if (program.has_forbidden_pair()) {
        throw ForbiddenInput();
    }
    const Trajectory traj = simulate_program(params, program, settings, noise_seed);
    return {
        score_trial(traj, program, canonical_gate(GateKind::SR_HIGH), settings.decode),
        score_trial(traj, program, canonical_gate(GateKind::SR_LOW), settings.decode),
    };
}

XnorCalibration calibrate_xnor_band(const CircuitParams& params, const std::vector<double>& half_widths,
                                    std::size_t n_programs, std::size_t bits_per_run, std::uint64_t base_seed,
                                    const ExperimentSettings& settings) {
    if (half_widths.empty() || n_programs == 0) {
        throw std::invalid_argument("calibration needs at least one half-width and one program");
    }
    CircuitParams quiet = params;
    quiet.noise_d = 0.0;
    const GateSpec xor_gate = canonical_gate(GateKind::XOR);

    XnorCalibration cal;
    cal.half_widths = half_widths;
    cal.agreement.assign(half_widths.size(), 0.0);
    std::size_t total_bits = 0;
    for (std::size_t n = 0; n < n_programs; ++n) {
        const LogicProgram program =
            program_for_gate(xor_gate, bits_per_run, program_seed(base_seed, n), settings.timing(quiet));
        const Trajectory traj = simulate_program(quiet, program, settings, 0);
        const TrialOutcome from_x1 = score_trial(traj, program, xor_gate, settings.decode);
        for (std::size_t w = 0; w < half_widths.size(); ++w) {
            const TrialOutcome from_x2 =
                score_trial(traj, program, canonical_gate(GateKind::XNOR, half_widths[w]), settings.decode);
            for (std::size_t k = 0; k < program.n_bits(); ++k) {
                const auto& a = from_x1.bits[k].decoded;
                const auto& b = from_x2.bits[k].decoded;
                if (a && b && *a != *b) {
                    cal.agreement[w] += 1.0;
                }
            }
        }
        total_bits += program.n_bits();
    }
    for (double& a : cal.agreement) {
        a /= static_cast<double>(total_bits);
    }

    // Longest contiguous run at the maximum agreement.
    const double best = *std::max_element(cal.agreement.begin(), cal.agreement.end());
    std::size_t run_start = 0, best_start = 0, best_len = 0;
    for (std::size_t w = 0; w <= cal.agreement.size(); ++w) {
        const bool at_best = w < cal.agreement.size() && cal.agreement[w] == best;
        if (!at_best) {
            if (w - run_start > best_len) {
                best_len = w - run_start;
                best_start = run_start;
            }
            run_start = w + 1;
        }
    }
    cal.plateau_lo = half_widths[best_start];
    cal.plateau_hi = half_widths[best_start + best_len - 1];
    cal.chosen = 0.5 * (cal.plateau_lo + cal.plateau_hi);
    return cal;
}

} // namespace mlc
