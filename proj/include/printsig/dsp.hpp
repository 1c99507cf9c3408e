#ifndef PRINTSIG_DSP_HPP
#define PRINTSIG_DSP_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "printsig/audio.hpp"

namespace printsig {

// ---------------------------------------------------------------------------
// Marker (beep) detection.

struct MarkerConfig {
  double marker_hz = 440.0;
  double marker_min_s = 0.3;
  double band_hz = 30.0;
  // Sliding analysis frame for the band energy.
  double frame_s = 0.05;
  double hop_s = 0.01;
  // A frame is hot when its band energy exceeds threshold_ratio times the
  // median band energy of the frames within +-median_window_s, and the
  // absolute floor.
  double threshold_ratio = 10.0;
  double median_window_s = 5.0;
  double energy_floor = 1e-9;
};

// Detected beep, in input samples: [begin, end), accurate to about one hop.
struct MarkerRegion {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const MarkerRegion &) const = default;
};

// Incremental marker detector. Feeding a signal in any chunking yields the
// same regions as feeding it at once; decisions lag the input by
// median_window_s.
class MarkerScanner {
 public:
  MarkerScanner(double sample_rate, const MarkerConfig &config = {});

  void feed(std::span<const double> samples);
  // No more input; decides the remaining frames and closes an open run.
  void finish();

  const std::vector<MarkerRegion> &regions() const { return regions_; }
  bool finished() const { return finished_; }
  // No region that is not yet in regions() can begin before this sample.
  std::size_t settled_until() const;
  std::size_t samples_seen() const { return samples_seen_; }

  std::size_t frame_length() const { return frame_len_; }
  std::size_t hop() const { return hop_; }
  const std::vector<double> &band_energies() const { return energies_; }

  double band_energy(const double *frame) const;

 private:
  void compute_frames();
  void decide(bool final);
  void close_run(std::size_t end_frame);

  MarkerConfig config_;
  std::size_t frame_len_ = 0;
  std::size_t hop_ = 0;
  std::size_t median_radius_ = 0;
  std::size_t min_run_ = 0;
  std::vector<std::vector<std::complex<double>>> kernels_;

  std::vector<double> pending_;   // samples from pending_base_ on
  std::size_t pending_base_ = 0;
  std::size_t samples_seen_ = 0;

  std::vector<double> energies_;
  std::size_t decided_ = 0;
  std::optional<std::size_t> run_start_;
  std::vector<MarkerRegion> regions_;
  bool finished_ = false;
};

std::vector<MarkerRegion> find_markers(const AudioSignal &signal, const MarkerConfig &config = {});

// Body span between the end of the first and the start of the last marker.
// Empty (begin == end) when the markers touch. Throws DspError("markers not
// found") with fewer than two markers.
struct SampleSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

SampleSpan marker_span(const std::vector<MarkerRegion> &regions);
AudioSignal trim_by_markers(const AudioSignal &signal, const MarkerConfig &config = {});

// ---------------------------------------------------------------------------
// Rational-rate resampling with a Kaiser-windowed sinc low-pass.

class Resampler {
 public:
  // Rates must be whole numbers of Hz; in_rate >= out_rate.
  Resampler(double in_rate, double out_rate = 2000.0);

  bool passthrough() const { return up_ == 1 && down_ == 1; }
  double in_rate() const { return in_rate_; }
  double out_rate() const { return out_rate_; }

  // Number of outputs for n inputs: outputs land at times j / out_rate that
  // fall inside the input duration.
  std::size_t output_length(std::size_t n_in) const;
  // Input samples output j reads: [first_input(j), last_input(j)].
  long first_input(std::size_t j) const;
  long last_input(std::size_t j) const;

  // Output j for inputs `x` (indices past x.size() read as zero).
  double output(std::size_t j, std::span<const double> x) const;
  // As above with x[i - offset] holding input i.
  double output(std::size_t j, std::span<const double> x, long offset) const;

  std::size_t half_taps() const { return static_cast<std::size_t>(half_); }

 private:
  double in_rate_;
  double out_rate_;
  long up_ = 1;
  long down_ = 1;
  long half_ = 0;
  std::vector<std::vector<double>> phases_;
};

// Low-pass (stopband from 1 kHz for the 2 kHz target) and resample.
AudioSignal resample(const AudioSignal &signal, double target_hz = 2000.0);

// ---------------------------------------------------------------------------
// 50-band log-power spectrogram of a 2 kHz signal.

namespace analysis {
constexpr unsigned kSampleRate = 2000;
constexpr std::size_t kFrameLength = 1500;  // 0.75 s
constexpr std::size_t kHop = 200;           // 0.1 s
constexpr std::size_t kBins = 50;
constexpr unsigned kBinWidthHz = 20;
constexpr std::size_t kFftBinsPerBand = 15;
constexpr double kPowerFloor = 1e-12;
constexpr double kFrameSeconds = 0.75;
constexpr double kHopSeconds = 0.1;
}  // namespace analysis

struct Spectrogram {
  // frames x 50, dB.
  Eigen::MatrixXd data;
  double frame_len_s = analysis::kFrameSeconds;
  double hop_s = analysis::kHopSeconds;
  double bin_width_hz = analysis::kBinWidthHz;
  double t0 = analysis::kFrameSeconds / 2.0;

  std::size_t frames() const { return static_cast<std::size_t>(data.rows()); }
};

// floor((n - 1500) / 200) + 1, or 0 when n < 1500.
std::size_t spectrogram_frames(std::size_t n_samples);

using BandPowers = std::array<double, analysis::kBins>;

// Hann-windowed FFT of one 1500-sample frame, summed into 50 bands of linear
// power (mean-square units). Owns an FFT plan; not copyable.
class FrameAnalyzer {
 public:
  FrameAnalyzer();
  ~FrameAnalyzer();
  FrameAnalyzer(const FrameAnalyzer &) = delete;
  FrameAnalyzer &operator=(const FrameAnalyzer &) = delete;

  BandPowers band_powers(const double *frame) const;
  // 10 log10 of band_powers floored at kPowerFloor.
  BandPowers log_bands(const double *frame) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Throws DspError unless the rate is 2000 Hz and the signal spans >= 0.75 s.
Spectrogram spectrogram(const AudioSignal &signal);

// Trim, resample and spectrogram: the front end shared by generation and
// comparison.
Spectrogram front_end(const AudioSignal &signal, const MarkerConfig &markers = {});

void write_spectrogram_csv(std::ostream &out, const Spectrogram &spec);

}  // namespace printsig

#endif  // PRINTSIG_DSP_HPP
