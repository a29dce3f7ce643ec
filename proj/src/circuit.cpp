#include "kljn/circuit.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace kljn {

double NonIdealityVector::component(int index) const {
  switch (index) {
    case 0: return cable_length;
    case 1: return bandwidth;
    case 2: return resistivity;
    case 3: return inverse_diameter;
    case 4: return capacitance_per_meter;
    case 5: return transient_ratio;
    case 6: return temperature_mismatch;
    default: throw std::out_of_range("NonIdealityVector: component index");
  }
}

void NonIdealityVector::set_component(int index, double v) {
  switch (index) {
    case 0: cable_length = v; break;
    case 1: bandwidth = v; break;
    case 2: resistivity = v; break;
    case 3: inverse_diameter = v; break;
    case 4: capacitance_per_meter = v; break;
    case 5: transient_ratio = v; break;
    case 6: temperature_mismatch = v; break;
    default: throw std::out_of_range("NonIdealityVector: component index");
  }
}

const char* NonIdealityVector::component_name(int index) {
  static const char* names[] = {"x1", "x2", "x3", "x4", "x5", "x6", "x7"};
  if (index < 0 || index >= component_count)
    throw std::out_of_range("NonIdealityVector: component index");
  return names[index];
}

bool NonIdealityVector::is_zero() const {
  for (int i = 0; i < component_count; ++i)
    if (component(i) != 0.0) return false;
  return true;
}

void check_nonideality(const NonIdealityVector& q) {
  for (int i = 0; i < NonIdealityVector::component_count; ++i) {
    const double v = q.component(i);
    if (!(v >= 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-ideality component " << NonIdealityVector::component_name(i)
          << " must be finite and >= 0, got " << v;
      throw std::domain_error(msg.str());
    }
  }
}

WireModel wire_from_q(const NonIdealityVector& q, const WireGeometry& geometry) {
  check_nonideality(q);
  WireModel w;
  if (q.cable_length > 0.0 && q.resistivity > 0.0 && q.inverse_diameter > 0.0) {
    const double radius = 0.5 / q.inverse_diameter;
    w.series_resistance =
        q.resistivity * q.cable_length / (std::numbers::pi * radius * radius);
  }
  w.shunt_capacitance = q.capacitance_per_meter * q.cable_length;
  if (q.cable_length > 0.0) {
    w.delay_samples = static_cast<Eigen::Index>(std::llround(
        q.cable_length / geometry.propagation_speed * geometry.sample_rate));
  }
  if (q.transient_ratio > 0.0 && w.delay_samples > 0) {
    w.transient_skip = static_cast<Eigen::Index>(
        std::ceil(static_cast<double>(w.delay_samples) / q.transient_ratio));
  }
  return w;
}

namespace {

void check_loop_inputs(const Waveform& u_alice, const Waveform& u_bob, double r_alice,
                       double r_bob) {
  check_waveform(u_alice);
  check_waveform(u_bob);
  if (u_alice.samples.size() != u_bob.samples.size())
    throw std::invalid_argument("loop: source waveform lengths differ");
  if (u_alice.sample_rate != u_bob.sample_rate)
    throw std::invalid_argument("loop: source sample rates differ");
  if (!(r_alice > 0.0) || !(r_bob > 0.0))
    throw std::domain_error("loop: terminating resistances must be > 0");
}

void check_capacitor_stability(double r_alice, double r_bob, const WireModel& wire,
                               double sample_rate) {
  if (wire.shunt_capacitance <= 0.0) return;
  const double ra = r_alice + 0.5 * wire.series_resistance;
  const double rb = r_bob + 0.5 * wire.series_resistance;
  const double r_parallel = ra * rb / (ra + rb);
  const double tau = r_parallel * wire.shunt_capacitance;
  if (sample_rate * tau < 2.0) {
    std::ostringstream msg;
    msg << "unstable capacitor update: time constant R_parallel*C_w = " << tau
        << " s needs sample rate >= " << 2.0 / tau << " Hz (f_s = " << sample_rate
        << " Hz); raise oversample or lower the shunt capacitance";
    throw std::runtime_error(msg.str());
  }
}

/**
 * Core lumped solve: sources u_A, u_B behind R_A, R_B, wire split as R_w/2
 * per side with one midpoint capacitor, plus an optional current injected at
 * the midpoint. Explicit forward-difference update for the capacitor.
 * No propagation delay here; callers layer delays on per-source responses.
 */
LoopTrace lumped_solve(const Eigen::ArrayXd& u_a, const Eigen::ArrayXd& u_b,
                       double r_alice, double r_bob, const WireModel& wire,
                       const Eigen::ArrayXd* injected, double sample_rate) {
  const Eigen::Index n = u_a.size();
  const double ra = r_alice + 0.5 * wire.series_resistance;
  const double rb = r_bob + 0.5 * wire.series_resistance;

  Eigen::ArrayXd v_mid(n);
  if (wire.shunt_capacitance <= 0.0) {
    // Algebraic midpoint: parallel combination of the two driven branches.
    const double g = 1.0 / (1.0 / ra + 1.0 / rb);
    if (injected)
      v_mid = (u_a / ra + u_b / rb + *injected) * g;
    else
      v_mid = (u_a / ra + u_b / rb) * g;
  } else {
    const double dt = 1.0 / sample_rate;
    const double inv_c = 1.0 / wire.shunt_capacitance;
    double v = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      v_mid[k] = v;
      double i_node = (u_a[k] - v) / ra + (u_b[k] - v) / rb;
      if (injected) i_node += (*injected)[k];
      v += dt * inv_c * i_node;
    }
  }

  LoopTrace t;
  const double fs = sample_rate;
  Eigen::ArrayXd i_a = (u_a - v_mid) / ra;          // Alice -> midpoint
  Eigen::ArrayXd i_b = (v_mid - u_b) / rb;          // midpoint -> Bob
  t.u_alice_end = {u_a - i_a * r_alice, fs};
  t.u_bob_end = {u_b + i_b * r_bob, fs};
  t.i_alice_end = {std::move(i_a), fs};
  t.i_bob_end = {std::move(i_b), fs};
  return t;
}

LoopTrace add_traces(const LoopTrace& a, const LoopTrace& b) {
  LoopTrace t;
  const double fs = a.u_alice_end.sample_rate;
  t.u_alice_end = {a.u_alice_end.samples + b.u_alice_end.samples, fs};
  t.u_bob_end = {a.u_bob_end.samples + b.u_bob_end.samples, fs};
  t.i_alice_end = {a.i_alice_end.samples + b.i_alice_end.samples, fs};
  t.i_bob_end = {a.i_bob_end.samples + b.i_bob_end.samples, fs};
  return t;
}

/// Delays the far-end observations of a single-source response: the source's
/// own end sees it immediately, the opposite end after the cable transit.
LoopTrace delay_far_end(LoopTrace r, Eigen::Index d, bool source_is_alice) {
  if (d <= 0) return r;
  if (source_is_alice) {
    r.u_bob_end.samples = delayed(r.u_bob_end.samples, d);
    r.i_bob_end.samples = delayed(r.i_bob_end.samples, d);
  } else {
    r.u_alice_end.samples = delayed(r.u_alice_end.samples, d);
    r.i_alice_end.samples = delayed(r.i_alice_end.samples, d);
  }
  return r;
}

}  // namespace

LoopTrace solve_ideal_loop(const Waveform& u_alice, const Waveform& u_bob,
                           double r_alice, double r_bob) {
  check_loop_inputs(u_alice, u_bob, r_alice, r_bob);
  const double fs = u_alice.sample_rate;
  const double r_sum = r_alice + r_bob;
  Eigen::ArrayXd u_c = (u_alice.samples * r_bob + u_bob.samples * r_alice) / r_sum;
  Eigen::ArrayXd i_c = (u_alice.samples - u_bob.samples) / r_sum;
  LoopTrace t;
  t.u_alice_end = {u_c, fs};
  t.u_bob_end = {std::move(u_c), fs};
  t.i_alice_end = {i_c, fs};
  t.i_bob_end = {std::move(i_c), fs};
  return t;
}

LoopTrace solve_nonideal_loop(const Waveform& u_alice, const Waveform& u_bob,
                              double r_alice, double r_bob, const WireModel& wire) {
  if (wire.is_ideal()) return solve_ideal_loop(u_alice, u_bob, r_alice, r_bob);
  check_loop_inputs(u_alice, u_bob, r_alice, r_bob);
  const double fs = u_alice.sample_rate;
  check_capacitor_stability(r_alice, r_bob, wire, fs);

  if (wire.delay_samples == 0) {
    return lumped_solve(u_alice.samples, u_bob.samples, r_alice, r_bob, wire, nullptr, fs);
  }
  const SourceSplit split = solve_loop_by_source(u_alice, u_bob, r_alice, r_bob, wire);
  return add_traces(split.from_alice, split.from_bob);
}

SourceSplit solve_loop_by_source(const Waveform& u_alice, const Waveform& u_bob,
                                 double r_alice, double r_bob, const WireModel& wire) {
  check_loop_inputs(u_alice, u_bob, r_alice, r_bob);
  const double fs = u_alice.sample_rate;
  check_capacitor_stability(r_alice, r_bob, wire, fs);

  const Eigen::ArrayXd zero = Eigen::ArrayXd::Zero(u_alice.samples.size());
  SourceSplit s;
  s.from_alice = delay_far_end(
      lumped_solve(u_alice.samples, zero, r_alice, r_bob, wire, nullptr, fs),
      wire.delay_samples, true);
  s.from_bob = delay_far_end(
      lumped_solve(zero, u_bob.samples, r_alice, r_bob, wire, nullptr, fs),
      wire.delay_samples, false);
  return s;
}

LoopTrace solve_loop_with_injection(const Waveform& u_alice, const Waveform& u_bob,
                                    double r_alice, double r_bob, const WireModel& wire,
                                    const Eigen::ArrayXd& injected_current) {
  check_loop_inputs(u_alice, u_bob, r_alice, r_bob);
  if (injected_current.size() != u_alice.samples.size())
    throw std::invalid_argument("injection: current waveform length mismatch");
  const double fs = u_alice.sample_rate;
  check_capacitor_stability(r_alice, r_bob, wire, fs);

  const Eigen::ArrayXd zero = Eigen::ArrayXd::Zero(u_alice.samples.size());
  LoopTrace sources =
      wire.delay_samples == 0 && !wire.is_ideal()
          ? lumped_solve(u_alice.samples, u_bob.samples, r_alice, r_bob, wire, nullptr, fs)
          : solve_nonideal_loop(u_alice, u_bob, r_alice, r_bob, wire);

  // Injection response travels half the cable to each end.
  LoopTrace inj = lumped_solve(zero, zero, r_alice, r_bob, wire, &injected_current, fs);
  const Eigen::Index half_delay = wire.delay_samples / 2;
  if (half_delay > 0) {
    inj.u_alice_end.samples = delayed(inj.u_alice_end.samples, half_delay);
    inj.i_alice_end.samples = delayed(inj.i_alice_end.samples, half_delay);
    inj.u_bob_end.samples = delayed(inj.u_bob_end.samples, half_delay);
    inj.i_bob_end.samples = delayed(inj.i_bob_end.samples, half_delay);
  }
  return add_traces(sources, inj);
}

}  // namespace kljn
