#ifndef PRINTSIG_FINGERPRINT_HPP
#define PRINTSIG_FINGERPRINT_HPP

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "printsig/audio.hpp"
#include "printsig/dsp.hpp"

namespace printsig {

// Analysis parameters a fingerprint was produced with; comparison requires an
// exact match.
struct DspMetadata {
  std::uint32_t sample_rate = analysis::kSampleRate;
  std::uint32_t frame_ms = 750;
  std::uint32_t hop_ms = 100;
  std::uint16_t bins = analysis::kBins;
  bool operator==(const DspMetadata &) const = default;
};

constexpr std::size_t kDefaultComponents = 3;

struct Fingerprint {
  Eigen::MatrixXd components;   // 50 x k, orthonormal columns
  Eigen::MatrixXd mfts;         // T x k principal-component time series
  Eigen::VectorXd eigenvalues;  // k, descending
  DspMetadata meta;

  std::size_t k() const { return static_cast<std::size_t>(components.cols()); }
  std::size_t frames() const { return static_cast<std::size_t>(mfts.rows()); }
  // Exact, element by element.
  bool operator==(const Fingerprint &other) const;
};

struct PcaResult {
  Eigen::MatrixXd components;       // bins x k
  Eigen::VectorXd eigenvalues;      // k, descending
  Eigen::VectorXd all_eigenvalues;  // bins, descending, clamped at zero
};

// Column means of a frames x bins matrix.
Eigen::RowVectorXd column_means(const Eigen::MatrixXd &data);
Eigen::MatrixXd center_columns(const Eigen::MatrixXd &data);

struct CenteredSpectrogram {
  Eigen::MatrixXd data;  // frames x bins, zero column means
  Eigen::RowVectorXd mean;
};

// Removes the mean spectrum. Throws FingerprintError with fewer than two
// frames.
CenteredSpectrogram center(const Spectrogram &spec);

// Top-k eigenpairs of X^T X for centered X. Each eigenvector is signed so its
// first entry of largest magnitude is positive; equal eigenvalues are ordered
// by comparing their vectors lexicographically, larger first.
PcaResult principal_components(const Eigen::MatrixXd &centered, std::size_t k = kDefaultComponents);

// PCA of a spectrogram, frames as observations.
Fingerprint fingerprint_from_spectrogram(const Spectrogram &spec, std::size_t k = kDefaultComponents);

// Full pipeline: trim at markers, resample, spectrogram, PCA.
Fingerprint generate_fingerprint(const AudioSignal &signal, const MarkerConfig &markers = {},
                                 std::size_t k = kDefaultComponents);

// Cumulative fraction of the total for descending, non-negative eigenvalues.
// Throws FingerprintError if they are all zero or any is negative.
Eigen::VectorXd cumulative_explained_variance(const Eigen::VectorXd &eigenvalues);

struct FingerprintReport {
  Fingerprint fingerprint;
  Eigen::VectorXd all_eigenvalues;
  // Fraction of total variance per kept component.
  Eigen::VectorXd explained_variance;
  // Over all bins; empty for a recording with no variance.
  Eigen::VectorXd cumulative_variance;
  std::size_t frames = 0;
};

FingerprintReport generate_fingerprint_report(const AudioSignal &signal, const MarkerConfig &markers = {},
                                              std::size_t k = kDefaultComponents);

}  // namespace printsig

#endif  // PRINTSIG_FINGERPRINT_HPP
