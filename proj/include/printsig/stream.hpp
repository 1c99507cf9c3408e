#ifndef PRINTSIG_STREAM_HPP
#define PRINTSIG_STREAM_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "printsig/dsp.hpp"
#include "printsig/fingerprint.hpp"
#include "printsig/verifier.hpp"

namespace printsig {

// A contiguous run of source-rate samples; start_sample is the index of the
// first sample in the whole recording.
struct AudioChunk {
  std::size_t start_sample = 0;
  double sample_rate = 44100.0;
  std::span<const double> samples;
};

struct StreamUpdate {
  bool started = false;  // start marker seen
  std::size_t first_new_frame = 0;
  // Provisional similarities of frames completed by this chunk.
  std::vector<double> new_similarities;
  std::size_t frames = 0;
  // Sticky: set once a provisional verdict flags the print.
  bool flagged = false;
  std::optional<double> flag_time_s;
  // Over the provisional trace; empty until enough windows have arrived.
  std::optional<Verdict> verdict;
};

struct StreamResult {
  SimilarityTrace trace;
  Verdict verdict;
  // Body time (end of the newest frame) at which the stream first flagged.
  std::optional<double> flag_time_s;
};

// Incremental verifier. Provisional similarities center frames on the mean of
// the frames received so far; finish() recomputes with the batch definitions
// and returns exactly what compare + detect give for the whole recording.
class StreamSession {
 public:
  explicit StreamSession(Fingerprint fingerprint, IndicatorConfig config = {}, MarkerConfig markers = {});

  StreamUpdate feed(const AudioChunk &chunk);
  StreamResult finish();

  std::size_t samples_seen() const { return next_sample_; }
  std::size_t frames() const { return rows_.size(); }
  // Source samples currently buffered.
  std::size_t buffered_samples() const { return raw_.size(); }

 private:
  void init(double sample_rate);
  std::span<const double> body_view(std::size_t end_abs, long &offset) const;
  void compute_outputs(std::size_t limit_abs, std::size_t count, bool eager);
  void compute_frames(std::size_t limit);
  void release_raw();
  Spectrogram current_spectrogram() const;

  Fingerprint fp_;
  IndicatorConfig config_;
  MarkerConfig marker_config_;

  std::optional<double> rate_;
  std::optional<MarkerScanner> scanner_;
  std::optional<Resampler> resampler_;
  FrameAnalyzer analyzer_;

  std::size_t next_sample_ = 0;
  std::vector<double> raw_;
  std::size_t raw_base_ = 0;
  std::optional<std::size_t> body_begin_;
  std::vector<double> resampled_;
  std::vector<BandPowers> rows_;

  bool flagged_ = false;
  std::optional<double> flag_time_s_;
  bool finished_ = false;
};

}  // namespace printsig

#endif  // PRINTSIG_STREAM_HPP
