#include <cmath>
#include <numbers>
#include <numeric>

#include "printsig/dsp.hpp"
#include "printsig/error.hpp"

namespace printsig {

namespace {

constexpr double kStopbandDb = 60.0;

long whole_hz(double rate, const char *what) {
  long r = std::lround(rate);
  if (r <= 0 || std::abs(rate - static_cast<double>(r)) > 1e-9) {
    throw DspError(std::string("resample: ") + what + " rate must be a positive whole number of Hz");
  }
  return r;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

Resampler::Resampler(double in_rate, double out_rate) : in_rate_(in_rate), out_rate_(out_rate) {
  long in = whole_hz(in_rate, "input");
  long out = whole_hz(out_rate, "output");
  if (in < out) {
    throw DspError("resample: input rate " + std::to_string(in) + " Hz is below the " +
                   std::to_string(out) + " Hz analysis rate");
  }
  long g = std::gcd(in, out);
  up_ = out / g;
  down_ = in / g;
  if (passthrough()) return;

  // Passband to 90% of the output Nyquist, stopband from the Nyquist on.
  const double nyquist = out / 2.0;
  const double transition = 0.1 * nyquist;
  const double cutoff = nyquist - transition / 2.0;
  const double beta = 0.1102 * (kStopbandDb - 8.7);
  const double taps = (kStopbandDb - 8.0) / (2.285 * 2.0 * std::numbers::pi * transition / in);
  half_ = static_cast<long>(std::ceil(taps / 2.0));

  const double norm_cutoff = 2.0 * cutoff / in;
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  phases_.assign(static_cast<std::size_t>(up_), std::vector<double>(static_cast<std::size_t>(2 * half_)));
  for (long r = 0; r < up_; ++r) {
    auto &phase = phases_[static_cast<std::size_t>(r)];
    double sum = 0.0;
    for (long k = 0; k < 2 * half_; ++k) {
      // Tap k reads input q - half + 1 + k, at offset t from the output time.
      double t = static_cast<double>(k - half_ + 1) - static_cast<double>(r) / up_;
      double u = t / half_;
      double w = std::abs(u) <= 1.0 ? std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - u * u)) / i0_beta : 0.0;
      phase[static_cast<std::size_t>(k)] = norm_cutoff * sinc(norm_cutoff * t) * w;
      sum += phase[static_cast<std::size_t>(k)];
    }
    for (double &h : phase) h /= sum;
  }
}

std::size_t Resampler::output_length(std::size_t n_in) const {
  auto up = static_cast<std::size_t>(up_);
  auto down = static_cast<std::size_t>(down_);
  return (n_in * up + down - 1) / down;
}

long Resampler::first_input(std::size_t j) const {
  if (passthrough()) return static_cast<long>(j);
  long q = static_cast<long>(j) * down_ / up_;
  return q - half_ + 1;
}

long Resampler::last_input(std::size_t j) const {
  if (passthrough()) return static_cast<long>(j);
  long q = static_cast<long>(j) * down_ / up_;
  return q + half_;
}

double Resampler::output(std::size_t j, std::span<const double> x) const {
  return output(j, x, 0);
}

double Resampler::output(std::size_t j, std::span<const double> x, long offset) const {
  const long size = static_cast<long>(x.size());
  if (passthrough()) {
    long i = static_cast<long>(j) - offset;
    return i >= 0 && i < size ? x[static_cast<std::size_t>(i)] : 0.0;
  }
  const long jd = static_cast<long>(j) * down_;
  const long q = jd / up_;
  const auto &phase = phases_[static_cast<std::size_t>(jd % up_)];
  const long first = q - half_ + 1 - offset;
  long k0 = std::max(0L, -first);
  long k1 = std::min(2 * half_, size - first);
  double acc = 0.0;
  for (long k = k0; k < k1; ++k) {
    acc += phase[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(first + k)];
  }
  return acc;
}

AudioSignal resample(const AudioSignal &signal, double target_hz) {
  Resampler r(signal.sample_rate, target_hz);
  AudioSignal out;
  out.sample_rate = target_hz;
  if (r.passthrough()) {
    out.samples = signal.samples;
    return out;
  }
  out.samples.resize(r.output_length(signal.samples.size()));
  for (std::size_t j = 0; j < out.samples.size(); ++j) out.samples[j] = r.output(j, signal.samples);
  return out;
}

}  // namespace printsig
