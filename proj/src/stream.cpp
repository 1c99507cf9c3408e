#include "printsig/stream.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "printsig/error.hpp"

namespace printsig {

StreamSession::StreamSession(Fingerprint fingerprint, IndicatorConfig config, MarkerConfig markers)
    : fp_(std::move(fingerprint)), config_(config), marker_config_(markers) {
  config_.validate();
  if (fp_.meta != DspMetadata{}) throw VerifyError("fingerprint analysis parameters do not match");
}

void StreamSession::init(double sample_rate) {
  scanner_.emplace(sample_rate, marker_config_);
  resampler_.emplace(sample_rate, analysis::kSampleRate);
  rate_ = sample_rate;
}

std::span<const double> StreamSession::body_view(std::size_t end_abs, long &offset) const {
  const std::size_t b0 = *body_begin_;
  const std::size_t from = std::max(b0, raw_base_);
  offset = static_cast<long>(from - b0);
  if (end_abs <= from) return {};
  return std::span<const double>(raw_).subspan(from - raw_base_, end_abs - from);
}

void StreamSession::compute_outputs(std::size_t limit_abs, std::size_t count, bool eager) {
  const Resampler &r = *resampler_;
  const std::size_t b0 = *body_begin_;
  long offset = 0;
  std::span<const double> view = body_view(limit_abs, offset);
  for (std::size_t j = resampled_.size(); j < count; ++j) {
    long first = std::max(0L, r.first_input(j));
    if (b0 + static_cast<std::size_t>(first) < raw_base_) {
      throw SessionError("stream: source samples released before use");
    }
    if (eager && b0 + static_cast<std::size_t>(r.last_input(j)) >= limit_abs) break;
    resampled_.push_back(r.output(j, view, offset));
  }
}

void StreamSession::compute_frames(std::size_t limit) {
  for (;;) {
    std::size_t t = rows_.size();
    if (t * analysis::kHop + analysis::kFrameLength > limit) break;
    rows_.push_back(analyzer_.log_bands(resampled_.data() + t * analysis::kHop));
  }
}

void StreamSession::release_raw() {
  const std::size_t settled = scanner_->settled_until();
  std::size_t keep = settled;
  if (body_begin_) {
    long next = std::max(0L, resampler_->first_input(resampled_.size()));
    keep = std::min(keep, *body_begin_ + static_cast<std::size_t>(next));
  }
  // Samples the last marker could still cut into; outputs reading them are
  // recomputed at the end.
  std::size_t end_candidate = settled;
  const auto &regions = scanner_->regions();
  if (regions.size() >= 2) end_candidate = std::min(end_candidate, regions.back().begin);
  const std::size_t reach = 2 * resampler_->half_taps() + 2;
  end_candidate = end_candidate > reach ? end_candidate - reach : 0;
  keep = std::min(keep, end_candidate);

  if (keep > raw_base_) {
    std::size_t drop = std::min(keep - raw_base_, raw_.size());
    raw_.erase(raw_.begin(), raw_.begin() + static_cast<std::ptrdiff_t>(drop));
    raw_base_ += drop;
  }
}

Spectrogram StreamSession::current_spectrogram() const {
  Spectrogram spec;
  spec.data.resize(static_cast<Eigen::Index>(rows_.size()), analysis::kBins);
  for (std::size_t t = 0; t < rows_.size(); ++t) {
    for (std::size_t b = 0; b < analysis::kBins; ++b) {
      spec.data(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(b)) = rows_[t][b];
    }
  }
  return spec;
}

StreamUpdate StreamSession::feed(const AudioChunk &chunk) {
  if (finished_) throw SessionError("stream: session already finished");
  if (!rate_) {
    init(chunk.sample_rate);
  } else if (chunk.sample_rate != *rate_) {
    throw SessionError("stream: chunk sample rate differs from the session rate");
  }
  if (chunk.start_sample != next_sample_) {
    throw SessionError("stream: out-of-order or overlapping chunk (expected sample " + std::to_string(next_sample_) +
                       ", got " + std::to_string(chunk.start_sample) + ")");
  }
  raw_.insert(raw_.end(), chunk.samples.begin(), chunk.samples.end());
  next_sample_ += chunk.samples.size();
  scanner_->feed(chunk.samples);
  if (!body_begin_ && !scanner_->regions().empty()) body_begin_ = scanner_->regions().front().end;

  StreamUpdate update;
  const std::size_t old_frames = rows_.size();
  if (body_begin_) {
    compute_outputs(next_sample_, std::numeric_limits<std::size_t>::max(), true);
    compute_frames(resampled_.size());
  }
  release_raw();

  update.started = body_begin_.has_value();
  update.first_new_frame = old_frames;
  update.frames = rows_.size();
  if (rows_.size() > old_frames) {
    SimilarityTrace trace = similarity_from_spectrogram(current_spectrogram(), fp_, config_.smooth_span);
    for (std::size_t t = old_frames; t < trace.size(); ++t) update.new_similarities.push_back(trace.raw[t]);
    const auto window = static_cast<std::size_t>(std::max(1L, std::lround(config_.window_s / trace.hop_s)));
    if (trace.size() / window >= config_.consecutive) {
      update.verdict = detect_trailing(trace, config_);
      if (update.verdict->flagged && !flagged_) {
        flagged_ = true;
        flag_time_s_ = static_cast<double>(rows_.size() - 1) * analysis::kHopSeconds + analysis::kFrameSeconds;
      }
    }
  }
  update.flagged = flagged_;
  update.flag_time_s = flag_time_s_;
  return update;
}

StreamResult StreamSession::finish() {
  if (finished_) throw SessionError("stream: session already finished");
  if (!rate_) init(analysis::kSampleRate);
  scanner_->finish();
  finished_ = true;

  SampleSpan span = marker_span(scanner_->regions());
  span.end = std::min(span.end, next_sample_);
  span.begin = std::min(span.begin, span.end);
  body_begin_ = span.begin;

  // Outputs whose filter reached past the end marker saw real samples where
  // the trimmed signal has zeros; recompute them and the frames they feed.
  const Resampler &r = *resampler_;
  const std::size_t body = span.size();
  const std::size_t outputs = r.output_length(body);
  std::size_t keep = std::min(resampled_.size(), outputs);
  while (keep > 0 && r.last_input(keep - 1) >= static_cast<long>(body)) --keep;
  resampled_.resize(keep);
  rows_.resize(std::min(rows_.size(), spectrogram_frames(keep)));
  compute_outputs(span.end, outputs, false);
  compute_frames(resampled_.size());
  if (rows_.empty()) throw DspError("spectrogram: signal shorter than one 0.75 s frame");

  StreamResult result;
  result.trace = similarity_from_spectrogram(current_spectrogram(), fp_, config_.smooth_span);
  result.verdict = detect(result.trace, config_);
  result.flag_time_s = flag_time_s_;
  return result;
}

}  // namespace printsig
