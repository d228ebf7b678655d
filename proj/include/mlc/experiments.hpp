#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mlc/decode.hpp"
#include "mlc/dynamics.hpp"
#include "mlc/integrator.hpp"
#include "mlc/signal.hpp"

namespace mlc {

/// Everything a trial needs besides the circuit parameters and the program.
struct ExperimentSettings {
    IntegratorConfig integrator;  // integrator.seed is replaced per trial
    DecodeSettings decode;
    double bit_duration = 100.0;
    double transient = 500.0;
    SystemState initial{0.1, 0.1, 0.0, 0.0};
    std::size_t sample_stride = 10;
    unsigned threads = 0; // 0 = hardware concurrency

    /// Program timing with the logic amplitude taken from `params`.
    ProgramTiming timing(const CircuitParams& params) const noexcept {
        return {bit_duration, params.delta, transient};
    }
};

/// Copy of `params` with the gate's bias and forcing amplitude applied.
CircuitParams at_operating_point(CircuitParams params, const GateSpec& gate) noexcept;

/// Runs the program from settings.initial (t = 0) through its last bit.
/// Throws Diverged.
Trajectory simulate_program(const CircuitParams& params, const LogicProgram& program,
                            const ExperimentSettings& settings, std::uint64_t noise_seed);

struct TrialResult {
    std::optional<TrialOutcome> outcome; // empty when the trajectory diverged
    bool diverged = false;
    double diverged_at = 0.0;

    bool success() const noexcept { return outcome && outcome->success; }
};

TrialResult run_trial(const GateSpec& gate, const CircuitParams& params, const LogicProgram& program,
                      const ExperimentSettings& settings, std::uint64_t noise_seed);

/// Random program suited to the gate (latches never contain (1,1)).
LogicProgram program_for_gate(const GateSpec& gate, std::size_t n_bits, std::uint64_t seed,
                              const ProgramTiming& timing);

/// Two-sided Wilson score interval.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct PLogicProtocol {
    std::size_t n_sets = 20;
    std::size_t n_runs_per_set = 5;
    std::size_t bits_per_run = 20;

    void validate() const;
};

struct PLogicPoint {
    double axis_value = 0.0;
    std::size_t trials = 0;
    std::size_t successes = 0;
    std::size_t diverged = 0;
    double p_logic = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::vector<std::uint64_t> program_seeds;
};

/// Program seeds are derive_seed(base, "program", set); noise seeds are
/// derive_seed(base, "noise", set * n_runs_per_set + run).
std::uint64_t program_seed(std::uint64_t base_seed, std::size_t set) noexcept;
std::uint64_t noise_seed(std::uint64_t base_seed, std::size_t set, std::size_t run,
                         std::size_t n_runs_per_set) noexcept;

/// P(logic) at one parameter point. `params` is used as given; apply the
/// gate's operating point beforehand if wanted. Diverged trials count as
/// failures and are also tallied separately.
PLogicPoint estimate_plogic(const GateSpec& gate, const CircuitParams& params, const PLogicProtocol& protocol,
                            std::uint64_t base_seed, const ExperimentSettings& settings);

enum class SweepAxis { f, D };
std::string_view to_string(SweepAxis axis) noexcept;
SweepAxis parse_axis(std::string_view name);

struct SweepGrid {
    SweepAxis axis = SweepAxis::D;
    std::vector<double> values;
    PLogicProtocol protocol;

    /// `points` evenly spaced values from `from` to `to` inclusive.
    static SweepGrid linspace(SweepAxis axis, double from, double to, std::size_t points,
                              const PLogicProtocol& protocol = {});
    void validate() const;
};

struct PLogicReport {
    SweepAxis axis = SweepAxis::D;
    GateSpec gate;
    CircuitParams fixed;
    PLogicProtocol protocol;
    std::uint64_t base_seed = 0;
    std::vector<PLogicPoint> points;
};

/// estimate_plogic at every grid value. All points share base_seed, so every
/// point sees the same programs and noise seeds (common random numbers).
PLogicReport sweep(const SweepGrid& grid, const GateSpec& gate, const CircuitParams& params, std::uint64_t base_seed,
                   const ExperimentSettings& settings);

/// CSV `axis_value,trials,successes,p_logic,ci_lo,ci_hi`.
void write_report_csv(std::ostream& out, const PLogicReport& report);
nlohmann::json to_json(const PLogicReport& report, const ExperimentSettings& settings);

struct PhasePoint {
    double x1;
    double x2;
    std::vector<std::uint8_t> bits;
};

/// Post-transient samples labelled with the input tuple active at their time.
std::vector<PhasePoint> export_phase_portrait(const CircuitParams& params, const LogicProgram& program,
                                              const ExperimentSettings& settings, std::uint64_t noise_seed);

/// CSV `x1,x2,bit_ch1,bit_ch2[,bit_ch3]`.
void write_phase_csv(std::ostream& out, const std::vector<PhasePoint>& cloud, std::size_t n_channels);

struct LatchOutcome {
    TrialOutcome active_high; // SR_HIGH decoded on x2
    TrialOutcome active_low;  // SR_LOW decoded on x1
};

/// Scores one DIFF2 trajectory against both latch oracles. Throws
/// ForbiddenInput on (1,1) and Diverged.
LatchOutcome run_latch_experiment(const CircuitParams& params, const LogicProgram& program,
                                  const ExperimentSettings& settings, std::uint64_t noise_seed);

struct XnorCalibration {
    std::vector<double> half_widths;
    std::vector<double> agreement; // per half-width, fraction of bits agreeing
    double plateau_lo = 0.0;       // edges of the best-agreement run
    double plateau_hi = 0.0;
    double chosen = 0.0;           // middle of that run
};

/// Scan the x2 band half-width for XNOR against NOT(XOR decoded on x1) at
/// D = 0 over `n_programs` random programs.
XnorCalibration calibrate_xnor_band(const CircuitParams& params, const std::vector<double>& half_widths,
                                    std::size_t n_programs, std::size_t bits_per_run, std::uint64_t base_seed,
                                    const ExperimentSettings& settings);

} // namespace mlc
