#include "printsig/fingerprint.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "printsig/error.hpp"

namespace printsig {

bool Fingerprint::operator==(const Fingerprint &other) const {
  auto same = [](const auto &a, const auto &b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
  };
  return meta == other.meta && same(components, other.components) && same(mfts, other.mfts) &&
         same(eigenvalues, other.eigenvalues);
}

Eigen::RowVectorXd column_means(const Eigen::MatrixXd &data) {
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(data.cols());
  for (Eigen::Index t = 0; t < data.rows(); ++t) mean += data.row(t);
  if (data.rows() > 0) mean /= static_cast<double>(data.rows());
  return mean;
}

Eigen::MatrixXd center_columns(const Eigen::MatrixXd &data) {
  return data.rowwise() - column_means(data);
}

CenteredSpectrogram center(const Spectrogram &spec) {
  if (spec.data.rows() < 2) throw FingerprintError("center: need at least two frames");
  CenteredSpectrogram out;
  out.mean = column_means(spec.data);
  out.data = spec.data.rowwise() - out.mean;
  return out;
}

Eigen::VectorXd cumulative_explained_variance(const Eigen::VectorXd &eigenvalues) {
  if ((eigenvalues.array() < 0.0).any()) throw FingerprintError("explained variance: negative eigenvalue");
  const double total = eigenvalues.sum();
  if (!(total > 0.0)) throw FingerprintError("explained variance: all eigenvalues are zero");
  Eigen::VectorXd out(eigenvalues.size());
  double running = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    running += eigenvalues(i);
    out(i) = running / total;
  }
  if (out.size() > 0) out(out.size() - 1) = 1.0;
  return out;
}

PcaResult principal_components(const Eigen::MatrixXd &centered, std::size_t k) {
  const auto bins = static_cast<std::size_t>(centered.cols());
  if (k == 0 || k > bins) throw FingerprintError("pca: component count out of range");
  if (centered.rows() < 2) throw FingerprintError("pca: need at least two frames");

  Eigen::MatrixXd cov = centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw FingerprintError("pca: eigen decomposition failed");

  Eigen::MatrixXd vectors = solver.eigenvectors();
  Eigen::VectorXd values = solver.eigenvalues().cwiseMax(0.0);
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index pivot = 0;
    for (Eigen::Index r = 1; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) > std::abs(vectors(pivot, c))) pivot = r;
    }
    if (vectors(pivot, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }

  std::vector<Eigen::Index> order(bins);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (values(a) != values(b)) return values(a) > values(b);
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      if (vectors(r, a) != vectors(r, b)) return vectors(r, a) > vectors(r, b);
    }
    return false;
  });

  PcaResult result;
  result.components.resize(centered.cols(), static_cast<Eigen::Index>(k));
  result.eigenvalues.resize(static_cast<Eigen::Index>(k));
  result.all_eigenvalues.resize(centered.cols());
  for (std::size_t i = 0; i < bins; ++i) {
    auto src = order[i];
    result.all_eigenvalues(static_cast<Eigen::Index>(i)) = values(src);
    if (i < k) {
      result.components.col(static_cast<Eigen::Index>(i)) = vectors.col(src);
      result.eigenvalues(static_cast<Eigen::Index>(i)) = values(src);
    }
  }
  return result;
}

Fingerprint fingerprint_from_spectrogram(const Spectrogram &spec, std::size_t k) {
  if (spec.data.cols() != static_cast<Eigen::Index>(analysis::kBins)) {
    throw FingerprintError("fingerprint: expected 50 frequency bins");
  }
  Eigen::MatrixXd centered = center(spec).data;
  PcaResult pca = principal_components(centered, k);
  Fingerprint fp;
  fp.mfts = centered * pca.components;
  fp.components = std::move(pca.components);
  fp.eigenvalues = std::move(pca.eigenvalues);
  return fp;
}

Fingerprint generate_fingerprint(const AudioSignal &signal, const MarkerConfig &markers, std::size_t k) {
  return generate_fingerprint_report(signal, markers, k).fingerprint;
}

FingerprintReport generate_fingerprint_report(const AudioSignal &signal, const MarkerConfig &markers,
                                              std::size_t k) {
  Spectrogram spec = front_end(signal, markers);
  Eigen::MatrixXd centered = center(spec).data;
  PcaResult pca = principal_components(centered, k);

  FingerprintReport report;
  report.frames = spec.frames();
  report.fingerprint.mfts = centered * pca.components;
  report.fingerprint.components = pca.components;
  report.fingerprint.eigenvalues = pca.eigenvalues;
  report.all_eigenvalues = pca.all_eigenvalues;
  double total = pca.all_eigenvalues.sum();
  report.explained_variance =
      total > 0.0 ? Eigen::VectorXd(pca.eigenvalues / total) : Eigen::VectorXd::Zero(pca.eigenvalues.size());
  if (total > 0.0) report.cumulative_variance = cumulative_explained_variance(pca.all_eigenvalues);
  return report;
}

}  // namespace printsig
