#pragma once

#include <Eigen/Dense>

#include "kljn/waveform.hpp"

namespace kljn {

/**
 * Non-ideality strengths. The all-zero vector is the mathematically ideal
 * system; every component is >= 0 and larger means further from ideal.
 */
struct NonIdealityVector {
  double cable_length = 0.0;          // x1, m
  double bandwidth = 0.0;             // x2, Hz; 0 means "use the configured noise bandwidth"
  double resistivity = 0.0;           // x3, ohm*m
  double inverse_diameter = 0.0;      // x4, 1/m
  double capacitance_per_meter = 0.0; // x5, F/m
  double transient_ratio = 0.0;       // x6, propagation time / transient protocol duration
  double temperature_mismatch = 0.0;  // x7, |T_A - T_B| / T_eff

  static constexpr int component_count = 7;

  double component(int index) const;       // index in [0, 7)
  void set_component(int index, double v);
  static const char* component_name(int index);  // "x1".."x7"

  bool is_zero() const;
};

/// Throws std::domain_error if any component is negative or non-finite.
void check_nonideality(const NonIdealityVector& q);

/// Propagation speed and sampling rate needed to discretize the wire.
struct WireGeometry {
  double propagation_speed = 2e8;  // m/s
  double sample_rate = 2e3;        // Hz
};

/// Lumped single-section model of the cable.
struct WireModel {
  double series_resistance = 0.0;   // ohms, split R_w/2 per side
  double shunt_capacitance = 0.0;   // farads, at the wire midpoint
  Eigen::Index delay_samples = 0;   // end-to-end propagation, whole samples
  Eigen::Index transient_skip = 0;  // samples dropped at bit start before statistics

  /// True when the loop solution reduces to the ideal single-node circuit.
  bool is_ideal() const {
    return series_resistance == 0.0 && shunt_capacitance == 0.0 && delay_samples == 0;
  }
};

/// Deterministic mapping from the non-ideality vector to the lumped wire.
WireModel wire_from_q(const NonIdealityVector& q, const WireGeometry& geometry);

/**
 * Voltages and currents at the two cable ends. Sign convention: positive
 * current flows from Alice toward Bob at both ends. In the ideal case both
 * ends carry identical traces.
 */
struct LoopTrace {
  Waveform u_alice_end;  // volts
  Waveform u_bob_end;    // volts
  Waveform i_alice_end;  // amperes
  Waveform i_bob_end;    // amperes
};

/// Kirchhoff solution of the ideal loop: one common node, zero wire.
LoopTrace solve_ideal_loop(const Waveform& u_alice, const Waveform& u_bob,
                           double r_alice, double r_bob);

/**
 * Lumped non-ideal solution: R_w/2 in series on each side, one shunt
 * capacitor at the midpoint integrated by an explicit first-order update,
 * and the far party's contribution delayed by delay_samples. An all-zero
 * wire returns solve_ideal_loop's output bit-exactly.
 *
 * Throws std::runtime_error when the forward-difference update would be
 * unstable (f_s * R_parallel * C_w < 2), naming the offending time constant.
 */
LoopTrace solve_nonideal_loop(const Waveform& u_alice, const Waveform& u_bob,
                              double r_alice, double r_bob, const WireModel& wire);

/// Per-source responses of the loop, for white-box power attribution.
/// from_alice + from_bob reproduces solve_nonideal_loop up to rounding.
struct SourceSplit {
  LoopTrace from_alice;
  LoopTrace from_bob;
};

SourceSplit solve_loop_by_source(const Waveform& u_alice, const Waveform& u_bob,
                                 double r_alice, double r_bob, const WireModel& wire);

/**
 * Loop solution with an extra current injected at the wire midpoint
 * (tampering model). With injection present the two ends generally carry
 * different currents even over an ideal wire, because the injected current
 * splits between the two branches.
 */
LoopTrace solve_loop_with_injection(const Waveform& u_alice, const Waveform& u_bob,
                                    double r_alice, double r_bob, const WireModel& wire,
                                    const Eigen::ArrayXd& injected_current);

}  // namespace kljn
