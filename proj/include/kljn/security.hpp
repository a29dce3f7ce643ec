#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kljn/attacks.hpp"
#include "kljn/protocol.hpp"

namespace kljn {

/// Binomial proportion with its 95% Wilson interval.
struct ProbabilityEstimate {
  double p_hat = 0.5;
  double ci_low = 0.0;
  double ci_high = 1.0;
  long n_trials = 0;
  bool degenerate = false;  // no usable trials (e.g. everything filtered out)

  /// Wald standard error sqrt(p(1-p)/n); 0 when degenerate.
  double std_error() const;
};

ProbabilityEstimate wilson_interval(long successes, long trials);

enum class Attack { MeanSquare, CrossCorrelation, WireResistance };

const char* attack_name(Attack a);

AttackOutcome run_attack(Attack a, const EveObservation& obs, RandomStream& eve);

/// Per-trial outcome of one attacked secure-state exchange.
struct TrialResult {
  bool success = false;
  bool kept = false;
  double delta = 0.0;
};

/// Runs n secure-state exchanges (ground truth LH/HL drawn fairly from the
/// master seed) and applies the attack to each. Pure per trial; trials fan
/// out across KLJN_WORKERS threads with a deterministic ordered reduction.
std::vector<TrialResult> run_attack_trials(Attack a, const SystemParams& p, long n_trials);

/**
 * Eve's success probability with 95% Wilson interval over n_trials
 * secure-state exchanges. With filter_on only omega-kept bits count; if the
 * filter removes everything the estimate comes back flagged degenerate.
 * Requires n_trials >= 100.
 */
ProbabilityEstimate estimate_p(Attack a, const SystemParams& p, long n_trials,
                               bool filter_on);

/// Forward finite-difference slope of p-hat along one non-ideality component.
struct SlopeEstimate {
  int component = 0;        // 0-based index into NonIdealityVector
  double step = 0.0;        // h used
  double slope = 0.0;       // (p(h) - p(0)) / h
  double std_error = 0.0;   // propagated from the two estimates
  double slope_refined = 0.0;  // two-point Richardson value (when enabled)
  bool refined = false;
};

using ProbabilityOfQ = std::function<ProbabilityEstimate(const NonIdealityVector&)>;

/// Generic slope estimator against any p(Q) evaluator (tests plant synthetic
/// responses through this hook).
std::vector<SlopeEstimate> sensitivity_slopes(
    const ProbabilityOfQ& p_of_q,
    const std::array<double, NonIdealityVector::component_count>& steps,
    bool richardson = false);

/// Slopes of a real attack's success probability at the ideal point.
std::vector<SlopeEstimate> sensitivity_slopes(
    Attack a, const SystemParams& p,
    const std::array<double, NonIdealityVector::component_count>& steps,
    long n_trials, bool richardson = false);

/// Total variation distance between Eve's extracted-key distribution and the
/// uniform key: (0.5 + q)^N - 0.5^N. Requires q in [0, 0.5], N >= 1.
double tvd_exact(double q, int key_length);

/// Small-q*N approximation 2*N*q*0.5^N.
double tvd_approx(double q, int key_length);

/// Enumeration over all 2^N key sequences with independent per-bit success
/// probability 0.5 + q; the independent oracle for tvd_exact. N <= 16.
double tvd_bruteforce(double q, int key_length);

/// One XOR stage: output bit i = key[2i] ^ key[2i+1], and likewise for Eve's
/// implied guesses. Requires an even key length.
struct AmplifiedKey {
  std::vector<std::uint8_t> key;
  std::vector<std::uint8_t> eve_guesses;
};

AmplifiedKey xor_privacy_amplify(const std::vector<std::uint8_t>& key,
                                 const std::vector<std::uint8_t>& eve_guesses);

/// Security summary for one attack at one operating point.
struct SecurityReport {
  std::string attack;
  ProbabilityEstimate estimate;
  double q_hat = 0.0;  // max(0, p_hat - 0.5)
  std::vector<SlopeEstimate> slopes;
  double tvd_exact_value = 0.0;
  double tvd_approx_value = 0.0;
  int key_length = 0;  // N used for the TVD figures
};

SecurityReport build_security_report(Attack a, const SystemParams& p, long n_trials,
                                     bool filter_on, int key_length);

/// Fixed-field JSON form: attack, p_hat, ci_low, ci_high, n_trials, q_hat,
/// slopes[], tvd_exact, tvd_approx, N.
std::string to_json(const SecurityReport& report);
std::string to_json(const std::vector<SecurityReport>& reports);

}  // namespace kljn
