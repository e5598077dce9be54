#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace specband {

// Orthonormal Laplacian eigenbasis. Eigenvalues ascend; column k of basis()
// is the k-th eigenvector; arm v's feature vector is row v of basis().
// After truncation the column count is smaller than the node count.
class SpectralBasis {
 public:
  SpectralBasis(Eigen::VectorXd eigenvalues, Eigen::MatrixXd basis)
      : eigenvalues_(std::move(eigenvalues)), q_(std::move(basis)) {
    if (eigenvalues_.size() != q_.cols())
      throw std::invalid_argument("spectral basis: eigenvalue/column mismatch");
  }

  int num_nodes() const { return static_cast<int>(q_.rows()); }
  int dim() const { return static_cast<int>(q_.cols()); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& basis() const { return q_; }
  auto arm_feature(int v) const { return q_.row(v).transpose(); }

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd q_;
};

// Dense symmetric eigendecomposition of a Laplacian. The eigenvector sign is
// fixed so the largest-magnitude entry of each column is positive (first such
// entry on ties), making the basis deterministic. Eigenvalues in [-1e-8, 0)
// are clamped to 0.
inline SpectralBasis eigendecompose(const Eigen::MatrixXd& laplacian) {
  if (laplacian.rows() != laplacian.cols())
    throw std::invalid_argument("eigendecompose: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: eigensolver failed to converge");
  Eigen::VectorXd evals = solver.eigenvalues();
  Eigen::MatrixXd q = solver.eigenvectors();
  for (int k = 0; k < evals.size(); ++k) {
    if (evals[k] < 0.0) {
      if (evals[k] < -1e-8)
        throw std::invalid_argument(
            "eigendecompose: matrix is not positive semi-definite");
      evals[k] = 0.0;
    }
    int pivot = 0;
    q.col(k).cwiseAbs().maxCoeff(&pivot);
    if (q(pivot, k) < 0.0) q.col(k) = -q.col(k);
  }
  return SpectralBasis(std::move(evals), std::move(q));
}

// Diagonal of Lambda = Lambda_L + lambda*I. diag[0] == lambda_reg since the
// first Laplacian eigenvalue is zero.
struct RegularizedSpectrum {
  double lambda_reg = 0.0;
  Eigen::VectorXd diag;

  int dim() const { return static_cast<int>(diag.size()); }

  // lambda * I: the flat spectrum that specializes the spectral algorithms
  // to LinUCB / LinearEliminator.
  static RegularizedSpectrum flat(int n, double lambda_reg) {
    if (!(lambda_reg > 0.0))
      throw std::invalid_argument("flat spectrum: lambda_reg must be > 0");
    return {lambda_reg, Eigen::VectorXd::Constant(n, lambda_reg)};
  }
};

inline RegularizedSpectrum regularize(const SpectralBasis& basis,
                                      double lambda_reg) {
  if (!(lambda_reg > 0.0))
    throw std::invalid_argument("regularize: lambda_reg must be > 0");
  return {lambda_reg, basis.eigenvalues().array() + lambda_reg};
}

struct EffectiveDimension {
  int d = 1;
  long long horizon = 0;
  double threshold = 0.0;  // T / log(1 + T/lambda)
};

// Largest d in [1, n] with (d-1) * lambda_d <= T / log(1 + T/lambda), where
// lambda_d is the d-th smallest entry of the regularized spectrum (so the
// 1-based lambda_d is diag[d-1]). (d-1)*lambda_d is nondecreasing in d, so a
// forward scan that stops at the first violation finds the maximum.
inline EffectiveDimension effective_dimension(const RegularizedSpectrum& spec,
                                              long long t_horizon) {
  if (t_horizon < 1)
    throw std::invalid_argument("effective_dimension: horizon must be >= 1");
  const double t = static_cast<double>(t_horizon);
  const double threshold = t / std::log1p(t / spec.lambda_reg);
  int d = 1;
  for (int k = 2; k <= spec.dim(); ++k) {
    if (static_cast<double>(k - 1) * spec.diag[k - 1] <= threshold)
      d = k;
    else
      break;
  }
  return {d, t_horizon, threshold};
}

// First l_keep eigenpairs; arm features become l_keep-dimensional rows with
// norm at most 1.
inline SpectralBasis truncate_basis(const SpectralBasis& basis, int l_keep) {
  if (l_keep < 1 || l_keep > basis.dim())
    throw std::invalid_argument("truncate_basis: l_keep out of range");
  return SpectralBasis(basis.eigenvalues().head(l_keep),
                       basis.basis().leftCols(l_keep));
}

// ||alpha||_Lambda = sqrt(sum_k diag[k] * alpha[k]^2).
inline double lambda_norm(const Eigen::VectorXd& alpha,
                          const RegularizedSpectrum& spec) {
  if (alpha.size() != spec.diag.size())
    throw std::invalid_argument("lambda_norm: dimension mismatch");
  return std::sqrt(spec.diag.dot(alpha.cwiseAbs2()));
}

// --- basis cache ------------------------------------------------------------
// Text serialization of (eigenvalues, Q) keyed by the edge-list content hash.
// Load verifies the key and the orthonormality of the stored basis.

inline void save_basis_cache(const std::string& path, std::uint64_t key,
                             const SpectralBasis& basis) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_basis_cache: cannot open " + path);
  out << "specband-basis 1\n";
  out << "key " << std::hex << key << std::dec << "\n";
  out << "size " << basis.num_nodes() << " " << basis.dim() << "\n";
  out << std::setprecision(17);
  for (int k = 0; k < basis.dim(); ++k)
    out << basis.eigenvalues()[k] << (k + 1 < basis.dim() ? ' ' : '\n');
  for (int v = 0; v < basis.num_nodes(); ++v)
    for (int k = 0; k < basis.dim(); ++k)
      out << basis.basis()(v, k) << (k + 1 < basis.dim() ? ' ' : '\n');
}

// nullopt when the file is absent or keyed to a different graph; throws on a
// corrupt or non-orthonormal cache.
inline std::optional<SpectralBasis> load_basis_cache(const std::string& path,
                                                     std::uint64_t expected_key) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "specband-basis" || version != 1)
    throw std::runtime_error("load_basis_cache: unrecognized header");
  std::string tag;
  std::uint64_t key = 0;
  in >> tag >> std::hex >> key >> std::dec;
  if (tag != "key" || in.fail())
    throw std::runtime_error("load_basis_cache: malformed key line");
  if (key != expected_key) return std::nullopt;
  int n = 0, l = 0;
  in >> tag >> n >> l;
  if (tag != "size" || in.fail() || n < 0 || l < 0 || l > n)
    throw std::runtime_error("load_basis_cache: malformed size line");
  Eigen::VectorXd evals(l);
  for (int k = 0; k < l; ++k) in >> evals[k];
  Eigen::MatrixXd q(n, l);
  for (int v = 0; v < n; ++v)
    for (int k = 0; k < l; ++k) in >> q(v, k);
  if (in.fail()) throw std::runtime_error("load_basis_cache: truncated data");
  const Eigen::MatrixXd gram = q.transpose() * q;
  if ((gram - Eigen::MatrixXd::Identity(l, l)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::runtime_error("load_basis_cache: basis is not orthonormal");
  return SpectralBasis(std::move(evals), std::move(q));
}

}  // namespace specband
