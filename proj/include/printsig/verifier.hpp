#ifndef PRINTSIG_VERIFIER_HPP
#define PRINTSIG_VERIFIER_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "printsig/audio.hpp"
#include "printsig/dsp.hpp"
#include "printsig/fingerprint.hpp"

namespace printsig {

// Cosine of two vectors of equal length; 0 when either norm is below 1e-12.
// Clamped to [-1, 1].
double cosine(std::span<const double> u, std::span<const double> v);

// Centered moving average over `span` (odd) samples; windows are truncated at
// the edges.
std::vector<double> smooth(std::span<const double> values, std::size_t span);

struct SimilarityTrace {
  std::vector<double> raw;
  std::vector<double> smoothed;
  double hop_s = analysis::kHopSeconds;
  std::size_t smooth_span = 0;
  std::size_t master_frames = 0;
  std::size_t new_frames = 0;

  std::size_t size() const { return raw.size(); }
  // Recording frames minus master frames.
  long length_mismatch() const {
    return static_cast<long>(new_frames) - static_cast<long>(master_frames);
  }
  bool operator==(const SimilarityTrace &) const = default;
};

constexpr std::size_t kDefaultSmoothSpan = 3;

// Per-frame similarity between a recording's spectrogram and a fingerprint.
// The recording is centered on its own mean and projected on the
// fingerprint's components; frames beyond the shorter series are dropped.
SimilarityTrace similarity_from_spectrogram(const Spectrogram &spec, const Fingerprint &fp,
                                            std::size_t smooth_span = kDefaultSmoothSpan);

// Full pipeline on a raw recording.
SimilarityTrace compare(const AudioSignal &recording, const Fingerprint &fp,
                        const MarkerConfig &markers = {}, std::size_t smooth_span = kDefaultSmoothSpan);

struct IndicatorConfig {
  double window_s = 5.0;
  double drop = 0.4;
  std::size_t consecutive = 4;
  std::size_t smooth_span = kDefaultSmoothSpan;
  // Allowed rise between neighbouring windows of a falling run.
  double monotonic_slack = 0.02;
  std::size_t length_tolerance_frames = 10;

  void validate() const;
};

struct WindowMean {
  std::size_t first_frame = 0;
  double start_s = 0.0;
  double mean = 0.0;
  bool operator==(const WindowMean &) const = default;
};

struct Verdict {
  bool flagged = false;
  std::optional<double> first_deviation_s;
  std::vector<WindowMean> windows;
  double mean_similarity = 0.0;
  long length_mismatch_frames = 0;
  bool length_suspicious = false;

  bool operator==(const Verdict &) const = default;
};

// Splits the smoothed trace into complete windows and flags the earliest run
// of `consecutive` non-increasing window means that falls by at least `drop`.
// Throws VerifyError when fewer than `consecutive` windows fit or the trace
// was smoothed with a different span.
Verdict detect(const SimilarityTrace &trace, const IndicatorConfig &config = {});

// As detect, over windows aligned so the last one ends at the newest frame.
// Used for provisional streaming verdicts.
Verdict detect_trailing(const SimilarityTrace &trace, const IndicatorConfig &config = {});

std::string verdict_json(const Verdict &verdict);
void write_trace_csv(std::ostream &out, const SimilarityTrace &trace);

}  // namespace printsig

#endif  // PRINTSIG_VERIFIER_HPP
