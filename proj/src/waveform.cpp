#include "kljn/waveform.hpp"

#include <stdexcept>

namespace kljn {

void check_waveform(const Waveform& w) {
  if (w.samples.size() == 0) throw std::domain_error("waveform: empty sample buffer");
  if (!(w.sample_rate > 0.0)) throw std::domain_error("waveform: sample rate must be positive");
  if (!w.samples.isFinite().all()) throw std::domain_error("waveform: non-finite sample");
}

Eigen::ArrayXd delayed(const Eigen::ArrayXd& x, Eigen::Index delay) {
  if (delay <= 0) return x;
  const Eigen::Index n = x.size();
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
  if (delay < n) out.tail(n - delay) = x.head(n - delay);
  return out;
}

}  // namespace kljn
