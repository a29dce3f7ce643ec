#pragma once

#include <Eigen/Dense>

#include "kljn/random.hpp"
#include "kljn/waveform.hpp"

namespace kljn {

/// Configuration of one party's emulated thermal-noise source.
struct NoiseParams {
  double t_eff = 1e9;                  // effective temperature, K
  double delta_f = 1e3;                // noise bandwidth, Hz
  Eigen::Index samples_per_bit = 2000; // retained samples per clock period
  int oversample = 1;                  // sample-rate factor above Nyquist

  /// Effective sample rate f_s = 2 * delta_f * oversample.
  double sample_rate() const { return 2.0 * delta_f * oversample; }
};

/// Throws std::domain_error on out-of-range fields (T_eff > 0, delta_f > 0,
/// samples_per_bit >= 100, oversample >= 1).
void check_noise_params(const NoiseParams& p);

/// One-sided Johnson-noise voltage power spectral density 4*k*T*R, V^2/Hz.
double johnson_psd(double resistance, double t_eff);

/// samples_per_bit i.i.d. zero-mean Gaussian samples with per-sample variance
/// psd * delta_f, at rate sample_rate(). Deterministic given the stream state.
Waveform sample_noise(double psd, const NoiseParams& params, RandomStream& stream);

/// Like sample_noise, but for oversample > 1 the raw sequence is passed
/// through a moving average of width `oversample` (rescaled so the variance
/// stays psd * delta_f), confining the noise to the agreed band. Warm-up
/// samples are generated internally, so all returned samples use a full
/// window. oversample == 1 is byte-identical to sample_noise.
Waveform band_limited_noise(double psd, const NoiseParams& params, RandomStream& stream);

}  // namespace kljn
