#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mlc/integrator.hpp"
#include "mlc/signal.hpp"

namespace mlc {

enum class GateKind { OR, AND, NOR, NAND, XOR, XNOR, OR3, AND3, SR_HIGH, SR_LOW };

std::string_view to_string(GateKind kind) noexcept;
/// Accepts or, and, nor, nand, xor, xnor, or3, and3, sr-high, sr-low (any case); "sr" means sr-low.
GateKind parse_gate(std::string_view name);
bool is_latch(GateKind kind) noexcept;
/// OR<->NOR, AND<->NAND, XOR<->XNOR, SR_HIGH<->SR_LOW; three-input gates map to themselves.
GateKind complement(GateKind kind) noexcept;
Combiner combiner_for(GateKind kind) noexcept;

enum class DecodeVar { x1, x2 };
std::string_view to_string(DecodeVar var) noexcept;

struct DecodeRule {
    enum class Kind { sign_pos, sign_neg, band, band_complement };
    Kind kind = Kind::sign_pos;
    double lo = 0.0;
    double hi = 0.0;

    static DecodeRule sign_pos() { return {Kind::sign_pos, 0.0, 0.0}; }
    static DecodeRule sign_neg() { return {Kind::sign_neg, 0.0, 0.0}; }
    static DecodeRule band(double lo, double hi) { return {Kind::band, lo, hi}; }
    static DecodeRule band_complement(double lo, double hi) { return {Kind::band_complement, lo, hi}; }

    /// Whether a single sample reads as logic 1.
    bool holds(double v) const noexcept {
        switch (kind) {
        case Kind::sign_pos:
            return v > 0.0;
        case Kind::sign_neg:
            return v < 0.0;
        case Kind::band:
            return lo <= v && v <= hi;
        case Kind::band_complement:
            return v < lo || v > hi;
        }
        return false;
    }

    void validate() const;
};

std::string_view to_string(DecodeRule::Kind kind) noexcept;

/// Half-width of the x2 band read by the XNOR gate. Calibrated against the
/// complement of the x1 XOR decode at D = 0 (see calibrate_xnor_band).
inline constexpr double kXnorBandHalfWidth = 1.305;
inline constexpr double kXorBandHalfWidth = 1.5;

struct GateSpec {
    GateKind kind = GateKind::OR;
    DecodeVar decode_var = DecodeVar::x1;
    DecodeRule rule;
    double operating_bias = 0.01;
    double operating_f = 0.1;
    Combiner combiner = Combiner::sum2;
};

/// Canonical decode variable, rule and operating point (E, f) of each gate.
GateSpec canonical_gate(GateKind kind, double xnor_half_width = kXnorBandHalfWidth);

class ForbiddenInput : public std::invalid_argument {
public:
    ForbiddenInput() : std::invalid_argument("set/reset input (1,1) is not allowed") {}
};

class EmptySegment : public std::invalid_argument {
public:
    EmptySegment() : std::invalid_argument("no samples left in bit interval after settling") {}
};

/// Truth-table output of `kind` on `bits`. Latches return `prev_q` on (0,0)
/// and throw ForbiddenInput on (1,1). Throws ArityMismatch on wrong width.
/// SR_LOW follows the set/reset table directly (set -> 1); SR_HIGH is its
/// complementary output (set -> 0), so `prev_q` is that kind's own last output.
bool oracle(GateKind kind, std::span<const std::uint8_t> bits, bool prev_q = false);

struct DecodeSettings {
    double settle_fraction = 0.5;
    double agreement_threshold = 0.9;

    void validate() const;
};

struct BitDecode {
    std::optional<bool> value; // nullopt = indeterminate
    double residence = 0.0;    // fraction of retained samples satisfying the rule
};

/// Decode one bit interval. The leading `settle_fraction` of the samples is
/// dropped. Throws EmptySegment.
BitDecode decode_bit(std::span<const double> segment, const DecodeRule& rule, double settle_fraction,
                     double agreement_threshold);

struct BitRecord {
    std::vector<std::uint8_t> inputs;
    bool expected = false;
    std::optional<bool> decoded;
    double residence = 0.0;
    bool match = false;
};

struct TrialOutcome {
    GateKind kind = GateKind::OR;
    std::vector<BitRecord> bits;
    bool success = false;
};

/// Values of `var` for samples with start <= t < end.
std::vector<double> segment_values(const Trajectory& trajectory, DecodeVar var, double start, double end);

/// Decode every bit of `program` from `trajectory` on gate.decode_var and
/// compare against the gate oracle. Latches start from the first decoded bit.
TrialOutcome score_trial(const Trajectory& trajectory, const LogicProgram& program, const GateSpec& gate,
                         const DecodeSettings& settings = {});

nlohmann::json to_json(const TrialOutcome& outcome);

} // namespace mlc
