#include <cmath>
#include <algorithm>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <ostream>

#include <fftw3.h>

#include "printsig/dsp.hpp"
#include "printsig/error.hpp"

namespace printsig {

namespace {

// FFTW planning is not thread-safe; execution with distinct buffers is.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FrameAnalyzer::Impl {
  double *in = nullptr;
  fftw_complex *out = nullptr;
  fftw_plan plan = nullptr;
  std::array<double, analysis::kFrameLength> window{};
  double scale = 0.0;

  Impl() {
    constexpr std::size_t n = analysis::kFrameLength;
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / n);
      energy += window[i] * window[i];
    }
    scale = 1.0 / (static_cast<double>(n) * energy);

    std::lock_guard lock(planner_mutex());
    in = static_cast<double *>(fftw_malloc(sizeof(double) * n));
    out = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    if (!in || !out) {
      fftw_free(in);
      fftw_free(out);
      throw DspError("spectrogram: FFT buffer allocation failed");
    }
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    if (!plan) {
      fftw_free(in);
      fftw_free(out);
      throw DspError("spectrogram: FFT planning failed");
    }
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }

  Impl(const Impl &) = delete;
  Impl &operator=(const Impl &) = delete;
};

FrameAnalyzer::FrameAnalyzer() : impl_(std::make_unique<Impl>()) {}
FrameAnalyzer::~FrameAnalyzer() = default;

BandPowers FrameAnalyzer::band_powers(const double *frame) const {
  Impl &im = *impl_;
  for (std::size_t i = 0; i < analysis::kFrameLength; ++i) im.in[i] = frame[i] * im.window[i];
  fftw_execute(im.plan);

  BandPowers bands{};
  for (std::size_t b = 0; b < analysis::kBins; ++b) {
    double sum = 0.0;
    for (std::size_t k = b * analysis::kFftBinsPerBand; k < (b + 1) * analysis::kFftBinsPerBand; ++k) {
      double mag2 = im.out[k][0] * im.out[k][0] + im.out[k][1] * im.out[k][1];
      sum += (k == 0 ? 1.0 : 2.0) * mag2;
    }
    bands[b] = sum * im.scale;
  }
  return bands;
}

BandPowers FrameAnalyzer::log_bands(const double *frame) const {
  BandPowers bands = band_powers(frame);
  for (double &p : bands) p = 10.0 * std::log10(std::max(p, analysis::kPowerFloor));
  return bands;
}

std::size_t spectrogram_frames(std::size_t n_samples) {
  if (n_samples < analysis::kFrameLength) return 0;
  return (n_samples - analysis::kFrameLength) / analysis::kHop + 1;
}

Spectrogram spectrogram(const AudioSignal &signal) {
  if (std::lround(signal.sample_rate) != analysis::kSampleRate) {
    throw DspError("spectrogram: expected a 2000 Hz signal, got " + std::to_string(signal.sample_rate));
  }
  std::size_t frames = spectrogram_frames(signal.samples.size());
  if (frames == 0) throw DspError("spectrogram: signal shorter than one 0.75 s frame");

  Spectrogram spec;
  spec.data.resize(static_cast<Eigen::Index>(frames), analysis::kBins);
  FrameAnalyzer analyzer;
  for (std::size_t t = 0; t < frames; ++t) {
    BandPowers row = analyzer.log_bands(signal.samples.data() + t * analysis::kHop);
    for (std::size_t b = 0; b < analysis::kBins; ++b) {
      spec.data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(b)) = row[b];
    }
  }
  return spec;
}

Spectrogram front_end(const AudioSignal &signal, const MarkerConfig &markers) {
  return spectrogram(resample(trim_by_markers(signal, markers), analysis::kSampleRate));
}

void write_spectrogram_csv(std::ostream &out, const Spectrogram &spec) {
  out << "time_s";
  for (std::size_t b = 0; b < analysis::kBins; ++b) out << ",band_" << b * analysis::kBinWidthHz << "hz";
  out << '\n';
  char buf[32];
  for (Eigen::Index t = 0; t < spec.data.rows(); ++t) {
    std::snprintf(buf, sizeof buf, "%.3f", spec.t0 + static_cast<double>(t) * spec.hop_s);
    out << buf;
    for (Eigen::Index b = 0; b < spec.data.cols(); ++b) {
      std::snprintf(buf, sizeof buf, ",%.6f", spec.data(t, b));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace printsig
