#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mlc {

/// How encoded channel levels are merged into the drive term I(t).
enum class Combiner {
    sum2,  // I1 + I2
    diff2, // I1 - I2 (set/reset latch)
    sum3,  // I1 + I2 + I3
};

std::string_view to_string(Combiner combiner) noexcept;
Combiner parse_combiner(std::string_view name);
std::size_t arity(Combiner combiner) noexcept;

class ArityMismatch : public std::invalid_argument {
public:
    ArityMismatch(std::size_t expected, std::size_t got);
};

struct ProgramTiming {
    double bit_duration = 100.0;
    double delta = 0.2;
    double transient = 500.0;
};

/// Per-channel bit streams plus the timing that turns them into a waveform.
struct LogicProgram {
    Combiner combiner = Combiner::sum2;
    std::vector<std::vector<std::uint8_t>> channels; // channels[c][k]
    double bit_duration = 100.0;
    double delta = 0.2;
    double transient = 500.0;

    std::size_t n_channels() const noexcept { return channels.size(); }
    std::size_t n_bits() const noexcept { return channels.empty() ? 0 : channels.front().size(); }

    /// Bits of every channel at index k.
    std::vector<std::uint8_t> bits_at(std::size_t k) const;

    /// Drive level of bit k.
    double level_at(std::size_t k) const;

    /// Start of bit k.
    double bit_start(std::size_t k) const noexcept {
        return transient + static_cast<double>(k) * bit_duration;
    }
    double end_time() const noexcept { return bit_start(n_bits()); }

    /// True if any (1,1) pair is present in a DIFF2 program.
    bool has_forbidden_pair() const noexcept;

    /// Throws std::invalid_argument on ragged channels, non-binary bits,
    /// arity mismatch or non-positive timing. When `dt` is given, also checks
    /// that bit_duration and transient are whole multiples of it.
    void validate(double dt = 0.0) const;
};

/// -delta for 0, +delta for 1.
double encode_channel(std::uint8_t bit, double delta);

/// Merge already-encoded channel levels. Throws ArityMismatch.
double combine(std::span<const double> levels, Combiner combiner);

/// Zero-order-hold drive I(t): 0 during the transient, the active bit's level
/// afterwards, the last level past the end of the program.
double sample_I(const LogicProgram& program, double t);

/// Index of the bit active at t, or -1 during the transient.
std::ptrdiff_t bit_index_at(const LogicProgram& program, double t) noexcept;

/// Uniform random bits per channel. With `latch_mode` set on a DIFF2 program,
/// (1,1) pairs are redrawn until none remain.
LogicProgram random_program(std::size_t n_bits, std::size_t channels, Combiner combiner, std::uint64_t seed,
                            const ProgramTiming& timing = {}, bool latch_mode = false);

/// Build a program from a flat, tuple-major bit list (e.g. 0,0,0,1,... for pairs).
LogicProgram program_from_flat_bits(std::span<const std::uint8_t> flat, Combiner combiner,
                                    const ProgramTiming& timing = {});

/// CSV `bit_index,ch1,ch2[,ch3]`.
void write_program_csv(std::ostream& out, const LogicProgram& program);
LogicProgram read_program_csv(std::istream& in, Combiner combiner, const ProgramTiming& timing = {});

} // namespace mlc
