#pragma once

#include <cstdint>

#include "kljn/protocol.hpp"

namespace kljn {

/// What the public channel already gave away.
struct PublicKnowledge {
  double r0 = 0.0;
  double r1 = 0.0;
  double t_eff = 0.0;
  double delta_f = 0.0;
  double omega = 0.0;
};

PublicKnowledge public_knowledge(const SystemParams& p);

/// Eve's view of one exchange: wire-end statistics plus public parameters.
/// She never sees the private resistor choices or generator internals.
struct EveObservation {
  TraceStats stats;
  PublicKnowledge knows;
};

EveObservation observe(const BitExchangeRecord& record, const SystemParams& p);

/// Eve's verdict on a secure-state exchange. `guess` is LH or HL.
struct AttackOutcome {
  StateClass guess = StateClass::LH;
  double delta_seen = 0.0;
  bool correct = false;  // filled by the harness
};

/**
 * Mean-square attack. The closed-form levels are identical under LH and HL,
 * so the decision falls to the auxiliary asymmetric statistic
 * <u_A^2> - <u_B^2> against a mid-threshold of zero; an exact tie (the ideal
 * loop) degenerates to a coin flip from Eve's own stream.
 */
AttackOutcome attack_mean_square(const EveObservation& obs, RandomStream& eve);

/**
 * Voltage-current cross-correlation attack: guesses HL when <U*I> > 0, i.e.
 * net power flows away from Alice. Carries direction information only out of
 * thermal equilibrium; the sign convention assumes the high resistor's
 * generator is the one running hot when temperatures are mismatched.
 */
AttackOutcome attack_cross_correlation(const EveObservation& obs);

/// Wire-resistance attack: reads the end mean-square voltage difference;
/// positive means Alice holds the high resistor. delta_seen equals the
/// defenders' wire-resistance delta for the same exchange.
AttackOutcome attack_wire_resistance(const EveObservation& obs);

/// Monte-Carlo estimate of the directed heating powers between the two
/// resistors, attributed per source through the loop's linearity.
struct PowerFlowEstimate {
  double p_alice_to_bob = 0.0;  // watts delivered into R_B by Alice's source
  double p_bob_to_alice = 0.0;
  double se_alice_to_bob = 0.0;  // standard errors of the two estimates
  double se_bob_to_alice = 0.0;
  Eigen::Index n_samples = 0;
};

PowerFlowEstimate estimate_power_flows(double r_alice, double r_bob, double t_alice,
                                       double t_bob, const NoiseParams& noise,
                                       std::uint64_t seed, Eigen::Index n_samples);

/// Closed form for either direction at equal temperatures:
/// 4*k*T*R0*R1/(R0+R1)^2 * delta_f.
double power_flow_closed_form(double r0, double r1, double t_eff, double delta_f);

/// Blinding attack: one large spike driven onto the wire.
struct BlindingSpec {
  double spike_amplitude = 0.0;  // volts, as seen at the wire node
  Eigen::Index position = 0;     // sample index within the bit period
};

/**
 * Builds the modified exchange inputs for run_bit_exchange: a midpoint
 * current impulse scaled so the node voltage jumps by spike_amplitude at the
 * nominal secure-state parallel resistance. `clip` selects the no-guard mode
 * where the parties' saturated electronics clamp to the expected bands
 * instead of discarding.
 */
Intervention attack_blinding(const SystemParams& p, const BlindingSpec& spike,
                             bool clip = false);

/// Eve's readout during a blinding attack: the injected current splits in
/// inverse proportion to the branch resistances, so the end with the larger
/// current response holds the low resistor.
StateClass blinding_guess(const LoopTrace& wire_trace, const BlindingSpec& spike);

}  // namespace kljn
