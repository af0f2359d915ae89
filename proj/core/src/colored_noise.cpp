#include <cmath>
#include <numbers>

#include "rair/error.hpp"
#include "rair/planner.hpp"

namespace rair {

std::vector<double> sample_colored_noise(double beta, int horizon, int dim, int count, Rng& rng) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error("colored-noise exponent must be non-negative");
  if (horizon < 1 || dim < 1 || count < 0) throw Error("colored-noise shape must be positive");
  const auto H = static_cast<std::size_t>(horizon);
  std::vector<double> out(static_cast<std::size_t>(count) * H * dim);
  if (horizon == 1) {
    for (double& v : out) v = standard_normal(rng);
    return out;
  }

  // Real inverse DFT over bins k = 1..H/2 (DC dropped), amplitude f^(-beta/2).
  const std::size_t bins = H / 2;
  std::vector<double> amp(bins + 1, 0.0);
  for (std::size_t k = 1; k <= bins; ++k) {
    amp[k] = std::pow(static_cast<double>(k) / static_cast<double>(H), -beta / 2.0);
  }
  std::vector<double> cos_t((bins + 1) * H);
  std::vector<double> sin_t((bins + 1) * H);
  for (std::size_t k = 1; k <= bins; ++k) {
    for (std::size_t t = 0; t < H; ++t) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(k * t % H) / static_cast<double>(H);
      cos_t[k * H + t] = std::cos(w);
      sin_t[k * H + t] = std::sin(w);
    }
  }
  const bool has_nyquist = H % 2 == 0;
  // the Nyquist bin is its own mirror image, so it carries half the power
  if (has_nyquist) amp[bins] /= std::numbers::sqrt2;

  std::vector<double> re(bins + 1);
  std::vector<double> im(bins + 1);
  std::vector<double> x(H);
  for (int c = 0; c < count; ++c) {
    for (int d = 0; d < dim; ++d) {
      for (std::size_t k = 1; k <= bins; ++k) {
        const double phase = 2.0 * std::numbers::pi * uniform01(rng);
        re[k] = amp[k] * std::cos(phase);
        im[k] = amp[k] * std::sin(phase);
      }
      // the Nyquist bin of an even-length real sequence has no imaginary part
      if (has_nyquist) im[bins] = 0.0;
      double mean = 0.0;
      for (std::size_t t = 0; t < H; ++t) {
        double v = 0.0;
        for (std::size_t k = 1; k <= bins; ++k) v += re[k] * cos_t[k * H + t] - im[k] * sin_t[k * H + t];
        x[t] = v;
        mean += v;
      }
      mean /= static_cast<double>(H);
      double var = 0.0;
      for (std::size_t t = 0; t < H; ++t) {
        x[t] -= mean;
        var += x[t] * x[t];
      }
      var /= static_cast<double>(H);
      const double inv = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
      for (std::size_t t = 0; t < H; ++t) {
        out[(static_cast<std::size_t>(c) * H + t) * dim + d] = x[t] * inv;
      }
    }
  }
  return out;
}

}  // namespace rair
