#include "kljn/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kljn/constants.hpp"

namespace kljn {

namespace {

constexpr std::uint64_t kCoinSaltAlice = 0x6b6c6a6e'636f696eULL;
constexpr std::uint64_t kCoinSaltBob = 0x6b6c6a6e'626f6221ULL;
constexpr std::uint64_t kCalibrationSalt = 0x6b6c6a6e'63616c69ULL;

/// Temperature mismatch x7 rides on the resistor role: the bit-1 resistor's
/// generator runs hot by x7/2, the bit-0 one cold by x7/2, so in every secure
/// state |T_A - T_B| / T_eff = x7.
double temperature_for_resistor(double r, const SystemParams& p) {
  if (p.q.temperature_mismatch == 0.0) return p.noise.t_eff;
  const double half = 0.5 * p.q.temperature_mismatch;
  return r == p.r1 ? p.noise.t_eff * (1.0 + half) : p.noise.t_eff * (1.0 - half);
}

void clip_waveform(Waveform& w, double limit) {
  w.samples = w.samples.min(limit).max(-limit);
}

/// Saturated front-end: values beyond the measurable band pin at the band
/// edge. Only the upper edge clips; hardware saturates at full swing.
void clip_trace(LoopTrace& t, const SystemParams& p) {
  clip_waveform(t.u_alice_end, p.expected_voltage_band.hi);
  clip_waveform(t.u_bob_end, p.expected_voltage_band.hi);
  clip_waveform(t.i_alice_end, p.expected_current_band.hi);
  clip_waveform(t.i_bob_end, p.expected_current_band.hi);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void check_params(const SystemParams& p) {
  std::vector<std::string> problems;
  auto complain = [&problems](const std::string& s) { problems.push_back(s); };

  if (!(p.r0 > 0.0)) complain("R0 must be > 0");
  if (!(p.r1 > 0.0)) complain("R1 must be > 0");
  if (p.r0 == p.r1) complain("R0 must differ from R1 (R0 != R1)");
  if (!(p.noise.t_eff > 0.0)) complain("T_eff must be > 0");
  if (!(p.noise.delta_f > 0.0)) complain("delta_f must be > 0");
  if (p.noise.samples_per_bit < 100) complain("samples_per_bit must be >= 100");
  if (p.noise.oversample < 1) complain("oversample must be >= 1");
  if (!(p.omega >= 0.0)) complain("omega must be >= 0");
  for (int i = 0; i < NonIdealityVector::component_count; ++i) {
    const double v = p.q.component(i);
    if (!(v >= 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-ideality " << NonIdealityVector::component_name(i)
          << " must be finite and >= 0";
      complain(msg.str());
    }
  }
  if (!(p.expected_voltage_band.lo >= 0.0) ||
      p.expected_voltage_band.lo > p.expected_voltage_band.hi)
    complain("voltage band must satisfy 0 <= lo <= hi");
  if (!(p.expected_current_band.lo >= 0.0) ||
      p.expected_current_band.lo > p.expected_current_band.hi)
    complain("current band must satisfy 0 <= lo <= hi");
  if (p.measurement_word_size < 2) complain("measurement_word_size must be >= 2");
  if (!(p.propagation_speed > 0.0)) complain("propagation_speed must be > 0");

  if (!problems.empty()) {
    std::ostringstream msg;
    msg << "invalid system parameters:";
    for (const auto& s : problems) msg << "\n  - " << s;
    throw std::invalid_argument(msg.str());
  }
}

void apply_default_bands(SystemParams& p) {
  const double df = p.effective_delta_f();
  const double t_max = p.noise.t_eff * (1.0 + 0.5 * p.q.temperature_mismatch);
  const double r_hi = std::max(p.r0, p.r1);
  const double r_lo = std::min(p.r0, p.r1);
  const double four_kt = 4.0 * k_boltzmann * t_max * df;
  if (std::isinf(p.expected_voltage_band.hi))
    p.expected_voltage_band.hi = 10.0 * std::sqrt(four_kt * 0.5 * r_hi);
  if (std::isinf(p.expected_current_band.hi))
    p.expected_current_band.hi = 10.0 * std::sqrt(four_kt / (2.0 * r_lo));
}

const char* to_string(StateClass s) {
  switch (s) {
    case StateClass::LL: return "LL";
    case StateClass::LH: return "LH";
    case StateClass::HL: return "HL";
    case StateClass::HH: return "HH";
  }
  return "?";
}

const char* to_string(Decision d) {
  switch (d) {
    case Decision::Kept: return "Kept";
    case Decision::DiscardedInsecureState: return "DiscardedInsecureState";
    case Decision::DiscardedDelta: return "DiscardedDelta";
    case Decision::DiscardedRange: return "DiscardedRange";
  }
  return "?";
}

double select_resistor(int bit, const SystemParams& p) {
  if (bit != 0 && bit != 1) throw std::domain_error("select_resistor: bit must be 0 or 1");
  return bit == 0 ? p.r0 : p.r1;
}

StateClass classify_state(double r_alice, double r_bob, const SystemParams& p) {
  const auto level = [&p](double r) {
    if (r == p.r0) return 0;
    if (r == p.r1) return 1;
    throw std::domain_error("classify_state: resistance not in {R0, R1}");
  };
  const int a = level(r_alice);
  const int b = level(r_bob);
  if (a == 0 && b == 0) return StateClass::LL;
  if (a == 0 && b == 1) return StateClass::LH;
  if (a == 1 && b == 0) return StateClass::HL;
  return StateClass::HH;
}

bool state_secure(StateClass s) { return s == StateClass::LH || s == StateClass::HL; }

TraceStats summarize_trace(const LoopTrace& trace, Eigen::Index skip) {
  const Eigen::Index n = trace.u_alice_end.samples.size();
  if (trace.u_bob_end.samples.size() != n || trace.i_alice_end.samples.size() != n ||
      trace.i_bob_end.samples.size() != n)
    throw std::invalid_argument("summarize_trace: trace length mismatch");
  if (skip < 0) skip = 0;
  if (skip >= n) {
    std::ostringstream msg;
    msg << "transient skip of " << skip << " samples consumes the whole bit period ("
        << n << " samples); lengthen the bit or lower the transient ratio";
    throw std::runtime_error(msg.str());
  }

  const Eigen::Index m = n - skip;
  const auto ua = trace.u_alice_end.samples.tail(m);
  const auto ub = trace.u_bob_end.samples.tail(m);
  const auto ia = trace.i_alice_end.samples.tail(m);
  const auto ib = trace.i_bob_end.samples.tail(m);

  TraceStats s;
  s.n_samples = m;
  s.msq_u_alice = mean_square(ua);
  s.msq_u_bob = mean_square(ub);
  s.msq_i_alice = mean_square(ia);
  s.msq_i_bob = mean_square(ib);
  const Eigen::ArrayXd u_mid = 0.5 * (ua + ub);
  const Eigen::ArrayXd i_mid = 0.5 * (ia + ib);
  s.msq_u_mid = mean_square(u_mid);
  s.msq_i_mid = mean_square(i_mid);
  s.cross_ui_mid = mean_product(u_mid, i_mid);

  // Range extrema over the full trace: the guard must see transients too.
  const Eigen::ArrayXd abs_ua = trace.u_alice_end.samples.abs();
  const Eigen::ArrayXd abs_ub = trace.u_bob_end.samples.abs();
  const Eigen::ArrayXd abs_ia = trace.i_alice_end.samples.abs();
  const Eigen::ArrayXd abs_ib = trace.i_bob_end.samples.abs();
  s.max_abs_u = std::max(abs_ua.maxCoeff(), abs_ub.maxCoeff());
  s.min_abs_u = std::min(abs_ua.minCoeff(), abs_ub.minCoeff());
  s.max_abs_i = std::max(abs_ia.maxCoeff(), abs_ib.maxCoeff());
  s.min_abs_i = std::min(abs_ia.minCoeff(), abs_ib.minCoeff());
  return s;
}

double compute_delta(const TraceStats& stats, Distinguisher d) {
  switch (d) {
    case Distinguisher::WireResistance:
      return std::abs(stats.msq_u_alice - stats.msq_u_bob);
    case Distinguisher::CrossCorrelation: {
      const double denom = std::sqrt(stats.msq_u_mid * stats.msq_i_mid);
      return denom > 0.0 ? std::abs(stats.cross_ui_mid) / denom : 0.0;
    }
  }
  return 0.0;
}

FilterDecision threshold_filter(double delta, double omega) {
  if (!(delta >= 0.0) || !(omega >= 0.0))
    throw std::domain_error("threshold_filter: delta and omega must be >= 0");
  return delta >= omega ? FilterDecision::Discard : FilterDecision::Keep;
}

FilterDecision range_guard(const TraceStats& stats, const Interval& voltage_band,
                           const Interval& current_band) {
  const bool ok = voltage_band.contains(stats.max_abs_u) &&
                  voltage_band.contains(stats.min_abs_u) &&
                  current_band.contains(stats.max_abs_i) &&
                  current_band.contains(stats.min_abs_i);
  return ok ? FilterDecision::Keep : FilterDecision::Discard;
}

int infer_partner_bit(double own_r, double measured_msq_u, double measured_msq_i,
                      const SystemParams& p) {
  const double df = p.effective_delta_f();
  const double four_kt = 4.0 * k_boltzmann * p.noise.t_eff * df;
  const auto score = [&](double partner_r) {
    const double eu = four_kt * own_r * partner_r / (own_r + partner_r);
    const double ei = four_kt / (own_r + partner_r);
    return std::abs(measured_msq_u - eu) / eu + std::abs(measured_msq_i - ei) / ei;
  };
  return score(p.r0) <= score(p.r1) ? 0 : 1;  // ties break toward 0
}

BitExchangeRecord run_bit_exchange(const SystemParams& p, std::uint64_t bit_index,
                                   int alice_bit, int bob_bit,
                                   const Intervention* intervention,
                                   LoopTrace* eve_trace) {
  const double r_a = select_resistor(alice_bit, p);
  const double r_b = select_resistor(bob_bit, p);

  BitExchangeRecord rec;
  rec.bit_index = bit_index;
  rec.alice_bit = alice_bit;
  rec.bob_bit = bob_bit;
  rec.state_class = classify_state(r_a, r_b, p);

  NoiseParams np = p.noise;
  np.delta_f = p.effective_delta_f();

  RandomStream stream_a = derive_stream(p.master_seed, bit_index, Party::Alice);
  RandomStream stream_b = derive_stream(p.master_seed, bit_index, Party::Bob);
  const Waveform u_a =
      band_limited_noise(johnson_psd(r_a, temperature_for_resistor(r_a, p)), np, stream_a);
  const Waveform u_b =
      band_limited_noise(johnson_psd(r_b, temperature_for_resistor(r_b, p)), np, stream_b);

  const WireModel wire = wire_from_q(p.q, {p.propagation_speed, np.sample_rate()});
  LoopTrace trace =
      (intervention && intervention->injected_current.size() > 0)
          ? solve_loop_with_injection(u_a, u_b, r_a, r_b, wire,
                                      intervention->injected_current)
          : solve_nonideal_loop(u_a, u_b, r_a, r_b, wire);
  if (eve_trace) *eve_trace = trace;

  if (intervention && intervention->clip_measurements) clip_trace(trace, p);

  rec.stats = summarize_trace(trace, wire.transient_skip);
  rec.delta = compute_delta(rec.stats, p.distinguisher);

  if (!state_secure(rec.state_class)) {
    rec.decision = Decision::DiscardedInsecureState;
  } else if (range_guard(rec.stats, p.expected_voltage_band, p.expected_current_band) ==
             FilterDecision::Discard) {
    rec.decision = Decision::DiscardedRange;
  } else if (threshold_filter(rec.delta, p.omega) == FilterDecision::Discard) {
    rec.decision = Decision::DiscardedDelta;
  } else {
    rec.decision = Decision::Kept;
  }

  rec.alice_inferred_bit =
      infer_partner_bit(r_a, rec.stats.msq_u_alice, rec.stats.msq_i_alice, p);
  rec.bob_inferred_bit =
      infer_partner_bit(r_b, rec.stats.msq_u_bob, rec.stats.msq_i_bob, p);
  return rec;
}

KeyPair run_key_exchange(const SystemParams& p, std::size_t target_bits,
                         std::size_t max_attempts) {
  check_params(p);
  if (target_bits == 0) throw std::invalid_argument("run_key_exchange: target_bits == 0");
  if (max_attempts == 0)
    max_attempts = std::max<std::size_t>(1024, 64 * target_bits);

  KeyPair kp;
  for (std::uint64_t attempt = 0; kp.alice_key.size() < target_bits; ++attempt) {
    if (attempt >= max_attempts) {
      std::ostringstream msg;
      msg << "run_key_exchange: " << kp.alice_key.size() << "/" << target_bits
          << " bits after " << max_attempts << " attempts; check omega and bands";
      throw std::runtime_error(msg.str());
    }
    const int a =
        derive_stream(p.master_seed ^ kCoinSaltAlice, attempt, Party::Alice).coin() ? 1 : 0;
    const int b =
        derive_stream(p.master_seed ^ kCoinSaltBob, attempt, Party::Bob).coin() ? 1 : 0;
    BitExchangeRecord rec = run_bit_exchange(p, attempt, a, b);
    if (rec.decision == Decision::Kept) {
      if (!state_secure(rec.state_class))
        throw std::logic_error("kept record in insecure state");
      kp.alice_key.push_back(static_cast<std::uint8_t>(rec.alice_bit));
      kp.bob_key.push_back(static_cast<std::uint8_t>(rec.bob_inferred_bit));
    }
    kp.records.push_back(std::move(rec));
  }
  kp.auth_bits_spent = kp.records.size() * auth_cost(p.measurement_word_size);
  return kp;
}

std::uint32_t auth_cost(std::uint64_t measurement_word_size) {
  if (measurement_word_size < 2)
    throw std::domain_error("auth_cost: measurement word size must be >= 2");
  return static_cast<std::uint32_t>(std::bit_width(measurement_word_size - 1));
}

namespace {

std::vector<double> calibration_deltas(const SystemParams& p, std::size_t n) {
  std::vector<double> deltas;
  deltas.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const bool lh =
        derive_stream(p.master_seed ^ kCalibrationSalt, i, Party::Alice).coin();
    SystemParams run = p;
    run.master_seed = mix64(p.master_seed ^ kCalibrationSalt);
    const BitExchangeRecord rec = run_bit_exchange(run, i, lh ? 0 : 1, lh ? 1 : 0);
    deltas.push_back(rec.delta);
  }
  return deltas;
}

}  // namespace

double calibrate_omega(const SystemParams& p, std::size_t n_calibration) {
  if (n_calibration == 0) throw std::invalid_argument("calibrate_omega: zero samples");
  SystemParams ideal = p;
  ideal.q = NonIdealityVector{};
  ideal.omega = std::numeric_limits<double>::infinity();
  const double ideal_median = median(calibration_deltas(ideal, n_calibration));
  if (ideal_median > 0.0) return 3.0 * ideal_median;

  // The wire-resistance delta vanishes identically on the exactly ideal loop,
  // so fall back to the operating-point spread and keep its smaller half.
  SystemParams operating = p;
  operating.omega = std::numeric_limits<double>::infinity();
  const double operating_median = median(calibration_deltas(operating, n_calibration));
  return operating_median > 0.0 ? operating_median
                                : std::numeric_limits<double>::infinity();
}

}  // namespace kljn
