#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "kljn/circuit.hpp"
#include "kljn/noise.hpp"
#include "kljn/random.hpp"

namespace kljn {

/// Statistic the defenders (and the strongest passive attack) compute per
/// exchange; omega is expressed in the active distinguisher's units.
enum class Distinguisher { WireResistance, CrossCorrelation };

/// Closed interval, used for the expected-range guard on |U| and |I|.
struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Full physical/protocol configuration of one simulated link.
struct SystemParams {
  double r0 = 1e3;   // ohms, encodes bit 0
  double r1 = 1e4;   // ohms, encodes bit 1
  NoiseParams noise;
  NonIdealityVector q;
  Distinguisher distinguisher = Distinguisher::WireResistance;
  double omega = std::numeric_limits<double>::infinity();  // discard threshold on delta
  Interval expected_voltage_band;   // on per-sample |U|
  Interval expected_current_band;   // on per-sample |I|
  std::uint64_t master_seed = 1;
  double propagation_speed = 2e8;        // m/s
  std::uint64_t measurement_word_size = 65536;  // M, bits per published measurement word

  /// Noise bandwidth actually in force: q.bandwidth overrides when set.
  double effective_delta_f() const {
    return q.bandwidth > 0.0 ? q.bandwidth : noise.delta_f;
  }
};

/// Throws std::invalid_argument listing every violated parameter rule.
void check_params(const SystemParams& p);

/// Fills expected_voltage_band / expected_current_band (when still unbounded)
/// with 10x the largest per-state RMS level, derived from public parameters.
void apply_default_bands(SystemParams& p);

enum class StateClass { LL, LH, HL, HH };
enum class Decision { Kept, DiscardedInsecureState, DiscardedDelta, DiscardedRange };
enum class FilterDecision { Keep, Discard };

const char* to_string(StateClass s);
const char* to_string(Decision d);

/// Resistor encoding of a bit value: 0 -> R0, 1 -> R1.
double select_resistor(int bit, const SystemParams& p);

/// Classifies the resistor arrangement; LH/HL are the secure states.
/// Throws std::domain_error when a resistance is not in {R0, R1}.
StateClass classify_state(double r_alice, double r_bob, const SystemParams& p);

bool state_secure(StateClass s);

/// Windowed second-order statistics of a loop trace. Mean squares and the
/// cross term are computed over samples at and after `skip`; the range
/// extrema cover the full trace so the guard sees transients and spikes.
struct TraceStats {
  double msq_u_alice = 0.0;
  double msq_u_bob = 0.0;
  double msq_i_alice = 0.0;
  double msq_i_bob = 0.0;
  double msq_u_mid = 0.0;    // end-averaged voltage
  double msq_i_mid = 0.0;    // end-averaged current
  double cross_ui_mid = 0.0; // <U*I> of the end-averaged signals
  double max_abs_u = 0.0;    // over both ends, full trace
  double min_abs_u = 0.0;
  double max_abs_i = 0.0;
  double min_abs_i = 0.0;
  Eigen::Index n_samples = 0;  // samples entering the mean squares
};

TraceStats summarize_trace(const LoopTrace& trace, Eigen::Index skip);

/// One clock period of the protocol.
struct BitExchangeRecord {
  std::uint64_t bit_index = 0;
  int alice_bit = 0;
  int bob_bit = 0;
  StateClass state_class = StateClass::LL;
  TraceStats stats;
  double delta = 0.0;
  Decision decision = Decision::DiscardedInsecureState;
  int alice_inferred_bit = 0;  // Alice's estimate of Bob's bit
  int bob_inferred_bit = 0;    // Bob's estimate of Alice's bit
};

struct KeyPair {
  std::vector<std::uint8_t> alice_key;
  std::vector<std::uint8_t> bob_key;
  std::vector<BitExchangeRecord> records;  // every attempt, kept or not
  std::uint64_t auth_bits_spent = 0;
};

/// The eavesdropper-observable asymmetry magnitude for one exchange.
double compute_delta(const TraceStats& stats, Distinguisher d);

/// Discard iff delta >= omega (boundary inclusive).
FilterDecision threshold_filter(double delta, double omega);

/// Discard iff any per-sample |U| or |I| left its expected band.
FilterDecision range_guard(const TraceStats& stats, const Interval& voltage_band,
                           const Interval& current_band);

/// Hypothesis test on the partner's resistor from own-end mean squares,
/// against the closed-form levels at the nominal temperature. Ties break
/// toward 0.
int infer_partner_bit(double own_r, double measured_msq_u, double measured_msq_i,
                      const SystemParams& p);

/// Active tampering applied to one exchange (see attacks module).
struct Intervention {
  Eigen::ArrayXd injected_current;  // empty = none; amperes at the wire midpoint
  bool clip_measurements = false;   // saturated party front-end: clamp to the bands
};

/**
 * Runs one full clock period: derives both noises, solves the loop under the
 * configured non-idealities, computes statistics, delta, the keep/discard
 * decision, and both parties' bit inferences.
 *
 * `intervention` optionally injects a midpoint current and/or clips the
 * parties' measurements; `eve_trace` optionally receives the unclipped trace
 * as observable on the wire.
 */
BitExchangeRecord run_bit_exchange(const SystemParams& p, std::uint64_t bit_index,
                                   int alice_bit, int bob_bit,
                                   const Intervention* intervention = nullptr,
                                   LoopTrace* eve_trace = nullptr);

/**
 * Repeats bit exchanges with per-party fair coin bits until `target_bits`
 * records are kept. The shared key bit is Alice's resistor bit; Bob's copy is
 * his inferred value. Throws std::runtime_error after `max_attempts`
 * exchanges without reaching the target (0 = automatic limit).
 */
KeyPair run_key_exchange(const SystemParams& p, std::size_t target_bits,
                         std::size_t max_attempts = 0);

/// ceil(log2(M)) authenticated-channel bits per exchange; M >= 2.
std::uint32_t auth_cost(std::uint64_t measurement_word_size);

/**
 * Calibration pre-pass for the default omega. Runs secure-state exchanges at
 * the ideal (all-zero Q) variant of `p` and returns 3x the median delta; when
 * that median is exactly zero (the wire-resistance distinguisher vanishes
 * identically on the ideal loop) the pre-pass is repeated at the operating Q
 * and the median itself is returned, so the filter keeps the half of the
 * bits with the smallest observable asymmetry. Returns +infinity when both
 * medians vanish (nothing to filter).
 */
double calibrate_omega(const SystemParams& p, std::size_t n_calibration = 500);

}  // namespace kljn
