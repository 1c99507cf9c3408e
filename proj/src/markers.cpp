#include <algorithm>
#include <cmath>
#include <numbers>

#include "printsig/dsp.hpp"
#include "printsig/error.hpp"

namespace printsig {

MarkerScanner::MarkerScanner(double sample_rate, const MarkerConfig &config) : config_(config) {
  if (!(sample_rate > 0.0)) throw DspError("marker scan: sample rate must be positive");
  if (!(config.frame_s > 0.0) || !(config.hop_s > 0.0) || config.marker_min_s < 0.0) {
    throw DspError("marker scan: bad frame configuration");
  }
  frame_len_ = static_cast<std::size_t>(std::max(1LL, std::llround(config.frame_s * sample_rate)));
  hop_ = static_cast<std::size_t>(std::max(1LL, std::llround(config.hop_s * sample_rate)));
  median_radius_ = static_cast<std::size_t>(std::llround(config.median_window_s / config.hop_s));
  min_run_ = static_cast<std::size_t>(std::max(1.0, std::ceil(config.marker_min_s / config.hop_s - 1e-9)));

  // DFT bins of the analysis frame that fall inside the marker band.
  const double spacing = sample_rate / static_cast<double>(frame_len_);
  const int half_band = static_cast<int>(std::floor(config.band_hz / spacing + 1e-9));
  std::vector<double> window(frame_len_);
  double window_sum = 0.0;
  for (std::size_t n = 0; n < frame_len_; ++n) {
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / static_cast<double>(frame_len_));
    window_sum += window[n];
  }
  for (int j = -half_band; j <= half_band; ++j) {
    double hz = config.marker_hz + j * spacing;
    if (hz <= 0.0 || hz >= sample_rate / 2.0) continue;
    std::vector<std::complex<double>> kernel(frame_len_);
    for (std::size_t n = 0; n < frame_len_; ++n) {
      kernel[n] = std::polar(window[n] / window_sum, -2.0 * std::numbers::pi * hz * n / sample_rate);
    }
    kernels_.push_back(std::move(kernel));
  }
  if (kernels_.empty()) throw DspError("marker scan: marker frequency outside the signal band");
}

double MarkerScanner::band_energy(const double *frame) const {
  double energy = 0.0;
  for (const auto &kernel : kernels_) {
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < frame_len_; ++n) {
      re += kernel[n].real() * frame[n];
      im += kernel[n].imag() * frame[n];
    }
    energy += re * re + im * im;
  }
  return energy;
}

void MarkerScanner::feed(std::span<const double> samples) {
  if (finished_) throw DspError("marker scan: feed after finish");
  pending_.insert(pending_.end(), samples.begin(), samples.end());
  samples_seen_ += samples.size();
  compute_frames();
  decide(false);
}

void MarkerScanner::finish() {
  if (finished_) return;
  compute_frames();
  decide(true);
  if (run_start_) {
    std::size_t k = energies_.size();
    close_run(k);
  }
  finished_ = true;
}

void MarkerScanner::compute_frames() {
  for (;;) {
    std::size_t start = energies_.size() * hop_;
    if (start + frame_len_ > samples_seen_) break;
    energies_.push_back(band_energy(pending_.data() + (start - pending_base_)));
  }
  std::size_t keep_from = energies_.size() * hop_;
  if (keep_from > pending_base_) {
    std::size_t drop = std::min(keep_from - pending_base_, pending_.size());
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(drop));
    pending_base_ += drop;
  }
}

void MarkerScanner::decide(bool final) {
  const std::size_t count = energies_.size();
  std::vector<double> scratch;
  while (decided_ < count && (final || decided_ + median_radius_ < count)) {
    std::size_t lo = decided_ >= median_radius_ ? decided_ - median_radius_ : 0;
    std::size_t hi = std::min(count - 1, decided_ + median_radius_);
    scratch.assign(energies_.begin() + static_cast<std::ptrdiff_t>(lo),
                   energies_.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    auto mid = scratch.begin() + static_cast<std::ptrdiff_t>(scratch.size() / 2);
    std::nth_element(scratch.begin(), mid, scratch.end());
    double threshold = std::max(config_.threshold_ratio * *mid, config_.energy_floor);
    bool hot = energies_[decided_] > threshold;

    if (hot && !run_start_) {
      run_start_ = decided_;
    } else if (!hot && run_start_) {
      close_run(decided_);
    }
    ++decided_;
  }
}

// Edges are the centres of the outermost frames holding at least a quarter of
// the run's peak energy, i.e. frames at least half inside the beep. A dip
// below that level inside the run separates two beeps with a short gap.
void MarkerScanner::close_run(std::size_t end_frame) {
  const std::size_t start = *run_start_;
  run_start_.reset();
  if (end_frame - start < min_run_) return;
  const double peak = *std::max_element(energies_.begin() + static_cast<std::ptrdiff_t>(start),
                                        energies_.begin() + static_cast<std::ptrdiff_t>(end_frame));
  const std::size_t min_part = std::max<std::size_t>(1, min_run_ / 2);
  std::size_t k = start;
  while (k < end_frame) {
    while (k < end_frame && energies_[k] < 0.25 * peak) ++k;
    const std::size_t first = k;
    while (k < end_frame && energies_[k] >= 0.25 * peak) ++k;
    if (k > first && k - first >= min_part) {
      regions_.push_back({first * hop_ + frame_len_ / 2, (k - 1) * hop_ + frame_len_ / 2});
    }
  }
}

std::size_t MarkerScanner::settled_until() const {
  if (run_start_) return *run_start_ * hop_;
  return decided_ * hop_;
}

std::vector<MarkerRegion> find_markers(const AudioSignal &signal, const MarkerConfig &config) {
  MarkerScanner scanner(signal.sample_rate, config);
  scanner.feed(signal.samples);
  scanner.finish();
  return scanner.regions();
}

SampleSpan marker_span(const std::vector<MarkerRegion> &regions) {
  if (regions.size() < 2) throw DspError("markers not found");
  SampleSpan span{regions.front().end, regions.back().begin};
  if (span.end <= span.begin) span.end = span.begin;
  return span;
}

AudioSignal trim_by_markers(const AudioSignal &signal, const MarkerConfig &config) {
  SampleSpan span = marker_span(find_markers(signal, config));
  AudioSignal out;
  out.sample_rate = signal.sample_rate;
  span.end = std::min(span.end, signal.samples.size());
  span.begin = std::min(span.begin, span.end);
  out.samples.assign(signal.samples.begin() + static_cast<std::ptrdiff_t>(span.begin),
                     signal.samples.begin() + static_cast<std::ptrdiff_t>(span.end));
  return out;
}

}  // namespace printsig
