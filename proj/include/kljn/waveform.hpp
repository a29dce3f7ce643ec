#pragma once

#include <Eigen/Dense>

namespace kljn {

/// Uniformly sampled real-valued time series (volts or amperes).
struct Waveform {
  Eigen::ArrayXd samples;
  double sample_rate = 0.0;  // Hz
};

/// Throws std::domain_error unless the waveform is non-empty and finite.
void check_waveform(const Waveform& w);

template <typename Derived>
double mean_square(const Eigen::ArrayBase<Derived>& x) {
  return x.square().mean();
}

template <typename DerivedA, typename DerivedB>
double mean_product(const Eigen::ArrayBase<DerivedA>& a,
                    const Eigen::ArrayBase<DerivedB>& b) {
  return (a * b).mean();
}

/// Fourth standardized moment about the sample mean (3 for a Gaussian).
template <typename Derived>
double kurtosis(const Eigen::ArrayBase<Derived>& x) {
  const Eigen::ArrayXd centered = x - x.mean();
  const double m2 = centered.square().mean();
  if (m2 == 0.0) return 0.0;
  return centered.pow(4).mean() / (m2 * m2);
}

/// x shifted right by `delay` samples, zero-filled at the start.
Eigen::ArrayXd delayed(const Eigen::ArrayXd& x, Eigen::Index delay);

}  // namespace kljn
