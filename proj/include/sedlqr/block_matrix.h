#pragma once

#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sedlqr/topology.h"

namespace sedlqr {

/// Dense matrix with row and column block partitions, addressable as [X]_ij.
class BlockMatrix {
 public:
  BlockMatrix(Eigen::MatrixXd data, std::vector<int> row_partition,
              std::vector<int> col_partition);

  /// Partition taken from a topology's state or input block sizes.
  BlockMatrix(Eigen::MatrixXd data, const Topology& topology, Space rows,
              Space cols);

  const Eigen::MatrixXd& data() const { return data_; }
  const std::vector<int>& row_partition() const { return row_sizes_; }
  const std::vector<int>& col_partition() const { return col_sizes_; }
  int block_rows() const { return static_cast<int>(row_sizes_.size()); }
  int block_cols() const { return static_cast<int>(col_sizes_.size()); }

  Eigen::MatrixXd block(int i, int j) const;
  void set_block(int i, int j, const Eigen::Ref<const Eigen::MatrixXd>& value);

  /// Matrix of spectral norms ||[X]_ij||, block_rows x block_cols.
  Eigen::MatrixXd BlockNorms() const;

 private:
  Eigen::Block<const Eigen::MatrixXd> View(int i, int j) const;

  Eigen::MatrixXd data_;
  std::vector<int> row_sizes_, col_sizes_;
  std::vector<int> row_offsets_, col_offsets_;
};

/// Reassembles a matrix from a row-major grid of blocks.
Eigen::MatrixXd Reassemble(const std::vector<std::vector<Eigen::MatrixXd>>& blocks);

/// Largest singular value. Throws numeric-error on non-finite input.
double SpectralNorm(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Spectral radius (largest eigenvalue modulus) of a square matrix.
double SpectralRadius(const Eigen::Ref<const Eigen::MatrixXd>& m);

struct ProfileEntry {
  int distance = 0;
  double norm = 0.0;
};

/// For every realized distance d, the largest ||[X]_ij|| over pairs with
/// dist(i,j) = d; sorted by distance. Unreachable pairs are skipped.
std::vector<ProfileEntry> BlockNormProfile(const BlockMatrix& x,
                                           const Topology& topology);

enum class FitMode { kEnvelope, kRegression };
std::string_view FitModeName(FitMode mode);

/// (c, gamma) pair with ||[X]_ij|| <= c exp(-gamma dist(i,j)) up to the
/// recorded largest relative excess.
struct SedCertificate {
  /// Reported decay rates are capped here; a capped fit is support-limited.
  static constexpr double kGammaCap = 50.0;

  double c = 0.0;
  double gamma = 0.0;
  double max_violation = 0.0;
  FitMode mode = FitMode::kEnvelope;
  bool support_limited = false;
  /// All-zero matrix: c = 0 and gamma = +inf.
  bool degenerate = false;

  double Bound(int distance) const;
};

/// Envelope: c is the largest profile entry (the d = 0 entry whenever that
/// dominates) and gamma the largest rate with zero violations, by bisection to
/// 1e-6. Regression: least squares of log(profile) against distance over
/// entries above 1e-14. Throws invalid-topology on disconnected topologies.
SedCertificate FitSed(const BlockMatrix& x, const Topology& topology,
                      FitMode mode);

/// Smallest c making (c, gamma) a zero-violation certificate.
SedCertificate CertificateAtRate(const BlockMatrix& x, const Topology& topology,
                                 double gamma);

/// Largest relative excess of any block of `x` over `cert`'s bound.
double MaxViolation(const BlockMatrix& x, const Topology& topology,
                    const SedCertificate& cert);

/// Checks ||[XY]_ij|| <= N x y exp(-gamma dist(i,j)) for every block. The two
/// certificates must share gamma (invalid-input otherwise).
bool SedProductCheck(const BlockMatrix& x, const BlockMatrix& y,
                     const SedCertificate& cert_x, const SedCertificate& cert_y,
                     const Topology& topology);

/// max_k sum_m ||X_km||, an upper bound on every eigenvalue modulus.
double LambdaMaxBlockBound(const BlockMatrix& x);

/// "name,c,gamma,max_violation,mode"
void WriteCertificateCsvHeader(std::ostream& out);
void WriteCertificateCsvRow(std::ostream& out, std::string_view name,
                            const SedCertificate& cert);

}  // namespace sedlqr
