#include "printsig/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "printsig/error.hpp"

namespace printsig {

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw VerifyError("cosine: length mismatch");
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  double nu = std::sqrt(uu), nv = std::sqrt(vv);
  if (nu < 1e-12 || nv < 1e-12) return 0.0;
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

std::vector<double> smooth(std::span<const double> values, std::size_t span) {
  if (span == 0 || span % 2 == 0) throw VerifyError("smooth: span must be odd");
  const std::size_t half = span / 2;
  const std::size_t n = values.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= half ? i - half : 0;
    std::size_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += values[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

SimilarityTrace similarity_from_spectrogram(const Spectrogram &spec, const Fingerprint &fp,
                                            std::size_t smooth_span) {
  if (fp.meta != DspMetadata{}) throw VerifyError("fingerprint analysis parameters do not match");
  if (fp.components.rows() != spec.data.cols()) throw VerifyError("fingerprint bin count mismatch");
  if (fp.mfts.cols() != fp.components.cols()) throw VerifyError("fingerprint component count mismatch");

  Eigen::MatrixXd projected = center_columns(spec.data) * fp.components;
  SimilarityTrace trace;
  trace.master_frames = fp.frames();
  trace.new_frames = spec.frames();
  const std::size_t n = std::min(trace.master_frames, trace.new_frames);
  const auto k = static_cast<std::size_t>(fp.components.cols());
  trace.raw.resize(n);
  std::vector<double> a(k), b(k);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t c = 0; c < k; ++c) {
      a[c] = fp.mfts(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c));
      b[c] = projected(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c));
    }
    trace.raw[t] = cosine(a, b);
  }
  trace.smoothed = smooth(trace.raw, smooth_span);
  trace.smooth_span = smooth_span;
  return trace;
}

SimilarityTrace compare(const AudioSignal &recording, const Fingerprint &fp, const MarkerConfig &markers,
                        std::size_t smooth_span) {
  return similarity_from_spectrogram(front_end(recording, markers), fp, smooth_span);
}

void IndicatorConfig::validate() const {
  if (!(window_s > 0.0)) throw VerifyError("window_s must be positive");
  if (!(drop > 0.0) || drop > 2.0) throw VerifyError("drop must be in (0, 2]");
  if (consecutive < 2) throw VerifyError("consecutive must be at least 2");
  if (smooth_span == 0 || smooth_span % 2 == 0) throw VerifyError("smooth_span must be odd");
  if (monotonic_slack < 0.0) throw VerifyError("monotonic_slack must be non-negative");
}

namespace {

Verdict detect_from(const SimilarityTrace &trace, const IndicatorConfig &config, bool trailing) {
  config.validate();
  if (trace.smooth_span != config.smooth_span) throw VerifyError("trace smoothed with a different span");
  const auto window = static_cast<std::size_t>(std::max(1L, std::lround(config.window_s / trace.hop_s)));
  const std::size_t frames = trace.smoothed.size();
  const std::size_t count = frames / window;
  if (count < config.consecutive) throw VerifyError("trace too short");

  Verdict verdict;
  verdict.length_mismatch_frames = trace.length_mismatch();
  verdict.length_suspicious =
      static_cast<std::size_t>(std::abs(verdict.length_mismatch_frames)) > config.length_tolerance_frames;
  double total = 0.0;
  for (double s : trace.raw) total += s;
  verdict.mean_similarity = trace.raw.empty() ? 0.0 : total / static_cast<double>(trace.raw.size());

  const std::size_t offset = trailing ? frames - count * window : 0;
  for (std::size_t w = 0; w < count; ++w) {
    std::size_t first = offset + w * window;
    double sum = 0.0;
    for (std::size_t t = first; t < first + window; ++t) sum += trace.smoothed[t];
    verdict.windows.push_back({first, static_cast<double>(first) * trace.hop_s, sum / static_cast<double>(window)});
  }

  const auto &m = verdict.windows;
  for (std::size_t s = 0; s + config.consecutive <= count; ++s) {
    bool falling = true;
    for (std::size_t j = s; j + 1 < s + config.consecutive && falling; ++j) {
      falling = m[j + 1].mean <= m[j].mean + config.monotonic_slack;
    }
    if (!falling || m[s].mean - m[s + config.consecutive - 1].mean < config.drop) continue;

    verdict.flagged = true;
    const double threshold = m[s].mean - config.drop / 2.0;
    const std::size_t end = m[s].first_frame + config.consecutive * window;
    for (std::size_t t = m[s].first_frame; t < end; ++t) {
      if (trace.smoothed[t] < threshold) {
        verdict.first_deviation_s = static_cast<double>(t) * trace.hop_s;
        break;
      }
    }
    break;
  }
  return verdict;
}

}  // namespace

Verdict detect(const SimilarityTrace &trace, const IndicatorConfig &config) {
  return detect_from(trace, config, false);
}

Verdict detect_trailing(const SimilarityTrace &trace, const IndicatorConfig &config) {
  return detect_from(trace, config, true);
}

std::string verdict_json(const Verdict &verdict) {
  nlohmann::ordered_json j;
  j["flagged"] = verdict.flagged;
  j["first_deviation_s"] = verdict.first_deviation_s ? nlohmann::ordered_json(*verdict.first_deviation_s)
                                                     : nlohmann::ordered_json(nullptr);
  auto windows = nlohmann::ordered_json::array();
  for (const WindowMean &w : verdict.windows) {
    windows.push_back({{"start_s", w.start_s}, {"mean", w.mean}});
  }
  j["window_means"] = std::move(windows);
  j["length_mismatch_frames"] = verdict.length_mismatch_frames;
  j["length_suspicious"] = verdict.length_suspicious;
  j["mean_similarity"] = verdict.mean_similarity;
  return j.dump(2);
}

void write_trace_csv(std::ostream &out, const SimilarityTrace &trace) {
  out << "time_s,cosine_raw,cosine_smoothed\n";
  char buf[96];
  for (std::size_t t = 0; t < trace.raw.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%.3f,%.9f,%.9f\n", static_cast<double>(t) * trace.hop_s,
                  trace.raw[t], trace.smoothed[t]);
    out << buf;
  }
}

}  // namespace printsig
