#include "app/embeddings.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "error.hpp"

namespace gradphon {

std::vector<std::array<double, 2>> pca2(std::span<const double> table, std::size_t rows, std::size_t cols) {
  if (rows < 2) fail(ErrorKind::Config, "PCA projection needs at least 2 morphemes");
  if (cols < 2) fail(ErrorKind::Config, "PCA projection needs embeddings of dimension >= 2");
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMatrix x = Eigen::Map<const RowMatrix>(table.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  x.rowwise() -= x.colwise().mean();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(rows - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) fail(ErrorKind::Numeric, "eigendecomposition failed");

  // Eigenvalues come in ascending order.
  Eigen::MatrixXd axes(cols, 2);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(cols) - 1 - c);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    axes.col(c) = v;
  }
  const Eigen::MatrixXd projected = x * axes;
  std::vector<std::array<double, 2>> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = {projected(static_cast<Eigen::Index>(r), 0), projected(static_cast<Eigen::Index>(r), 1)};
  }
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::Dimension, "cosine similarity of vectors with different lengths");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) fail(ErrorKind::Numeric, "cosine similarity of a zero vector");
  return dot / std::sqrt(na * nb);
}

}  // namespace gradphon
