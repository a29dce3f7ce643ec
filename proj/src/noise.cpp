#include "kljn/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "kljn/constants.hpp"

namespace kljn {

void check_noise_params(const NoiseParams& p) {
  if (!(p.t_eff > 0.0)) throw std::domain_error("noise: T_eff must be > 0");
  if (!(p.delta_f > 0.0)) throw std::domain_error("noise: delta_f must be > 0");
  if (p.samples_per_bit < 100)
    throw std::domain_error("noise: samples_per_bit must be >= 100");
  if (p.oversample < 1) throw std::domain_error("noise: oversample must be >= 1");
}

double johnson_psd(double resistance, double t_eff) {
  if (resistance < 0.0 || !std::isfinite(resistance))
    throw std::domain_error("johnson_psd: resistance must be >= 0 and finite");
  if (t_eff < 0.0 || !std::isfinite(t_eff))
    throw std::domain_error("johnson_psd: temperature must be >= 0 and finite");
  return 4.0 * k_boltzmann * t_eff * resistance;
}

namespace {

Eigen::ArrayXd gaussian_block(double sigma, Eigen::Index n, RandomStream& stream) {
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = sigma * stream.gaussian();
  return out;
}

}  // namespace

Waveform sample_noise(double psd, const NoiseParams& params, RandomStream& stream) {
  check_noise_params(params);
  if (!std::isfinite(psd) || psd < 0.0)
    throw std::domain_error("sample_noise: psd must be finite and >= 0");
  const double sigma = std::sqrt(psd * params.delta_f);
  return {gaussian_block(sigma, params.samples_per_bit, stream), params.sample_rate()};
}

Waveform band_limited_noise(double psd, const NoiseParams& params, RandomStream& stream) {
  if (params.oversample <= 1) return sample_noise(psd, params, stream);
  check_noise_params(params);
  if (!std::isfinite(psd) || psd < 0.0)
    throw std::domain_error("band_limited_noise: psd must be finite and >= 0");

  const Eigen::Index window = params.oversample;
  const Eigen::Index n = params.samples_per_bit;
  const double sigma = std::sqrt(psd * params.delta_f);
  const Eigen::ArrayXd raw = gaussian_block(sigma, n + window - 1, stream);

  // Moving average over `window` i.i.d. samples has variance sigma^2/window;
  // dividing by sqrt(window) instead of window restores the per-sample
  // variance psd * delta_f.
  const double scale = 1.0 / std::sqrt(static_cast<double>(window));
  Eigen::ArrayXd out(n);
  double acc = raw.head(window).sum();
  out[0] = acc * scale;
  for (Eigen::Index i = 1; i < n; ++i) {
    acc += raw[window - 1 + i] - raw[i - 1];
    out[i] = acc * scale;
  }
  return {out, params.sample_rate()};
}

}  // namespace kljn
