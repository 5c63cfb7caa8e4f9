#include "sedlqr/block_matrix.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/SVD>

#include "sedlqr/error.h"

namespace sedlqr {

namespace {

std::vector<int> Offsets(const std::vector<int>& sizes) {
  std::vector<int> offsets(sizes.size());
  std::exclusive_scan(sizes.begin(), sizes.end(), offsets.begin(), 0);
  return offsets;
}

int Total(const std::vector<int>& sizes) {
  return std::accumulate(sizes.begin(), sizes.end(), 0);
}

void RequirePartitionMatches(const BlockMatrix& x, const Topology& topology) {
  const auto matches = [&](const std::vector<int>& p) {
    return p == topology.state_dims() || p == topology.input_dims();
  };
  if (!matches(x.row_partition()) || !matches(x.col_partition())) {
    throw Error(ErrorKind::kShapeError,
                "block partition does not match the topology's dims");
  }
}

void RequireConnected(const Topology& topology) {
  if (!topology.connected()) {
    throw Error(ErrorKind::kInvalidTopology,
                "decay certificates need a connected topology");
  }
}

}  // namespace

BlockMatrix::BlockMatrix(Eigen::MatrixXd data, std::vector<int> row_partition,
                         std::vector<int> col_partition)
    : data_(std::move(data)),
      row_sizes_(std::move(row_partition)),
      col_sizes_(std::move(col_partition)) {
  if (Total(row_sizes_) != data_.rows() || Total(col_sizes_) != data_.cols()) {
    throw Error(ErrorKind::kShapeError,
                "partition sums do not match matrix shape");
  }
  row_offsets_ = Offsets(row_sizes_);
  col_offsets_ = Offsets(col_sizes_);
}

BlockMatrix::BlockMatrix(Eigen::MatrixXd data, const Topology& topology,
                         Space rows, Space cols)
    : BlockMatrix(std::move(data), topology.dims(rows), topology.dims(cols)) {}

Eigen::Block<const Eigen::MatrixXd> BlockMatrix::View(int i, int j) const {
  if (i < 0 || i >= block_rows() || j < 0 || j >= block_cols()) {
    throw Error(ErrorKind::kInvalidIndex, "block index out of range");
  }
  return data_.block(row_offsets_[i], col_offsets_[j], row_sizes_[i],
                     col_sizes_[j]);
}

Eigen::MatrixXd BlockMatrix::block(int i, int j) const { return View(i, j); }

void BlockMatrix::set_block(int i, int j,
                            const Eigen::Ref<const Eigen::MatrixXd>& value) {
  if (i < 0 || i >= block_rows() || j < 0 || j >= block_cols()) {
    throw Error(ErrorKind::kInvalidIndex, "block index out of range");
  }
  if (value.rows() != row_sizes_[i] || value.cols() != col_sizes_[j]) {
    throw Error(ErrorKind::kShapeError, "block value has the wrong shape");
  }
  data_.block(row_offsets_[i], col_offsets_[j], row_sizes_[i], col_sizes_[j]) =
      value;
}

Eigen::MatrixXd BlockMatrix::BlockNorms() const {
  Eigen::MatrixXd norms(block_rows(), block_cols());
  for (int i = 0; i < block_rows(); ++i) {
    for (int j = 0; j < block_cols(); ++j) norms(i, j) = SpectralNorm(View(i, j));
  }
  return norms;
}

Eigen::MatrixXd Reassemble(
    const std::vector<std::vector<Eigen::MatrixXd>>& blocks) {
  if (blocks.empty()) return {};
  int rows = 0, cols = 0;
  for (const auto& row : blocks) rows += row.front().rows();
  for (const auto& b : blocks.front()) cols += b.cols();
  Eigen::MatrixXd out(rows, cols);
  int r = 0;
  for (const auto& row : blocks) {
    int c = 0;
    for (const auto& b : row) {
      out.block(r, c, b.rows(), b.cols()) = b;
      c += b.cols();
    }
    r += row.front().rows();
  }
  return out;
}

double SpectralNorm(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::kNumericError, "non-finite matrix entries");
  }
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double SpectralRadius(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::kShapeError, "spectral radius of non-square matrix");
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::kNumericError, "non-finite matrix entries");
  }
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumericError, "eigenvalue iteration failed");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<ProfileEntry> BlockNormProfile(const BlockMatrix& x,
                                           const Topology& topology) {
  RequirePartitionMatches(x, topology);
  const Eigen::MatrixXd norms = x.BlockNorms();
  std::map<int, double> by_distance;
  for (int i = 0; i < norms.rows(); ++i) {
    for (int j = 0; j < norms.cols(); ++j) {
      const int d = topology.distance(i, j);
      if (d == Topology::kUnreachable) continue;
      auto [it, inserted] = by_distance.try_emplace(d, norms(i, j));
      if (!inserted) it->second = std::max(it->second, norms(i, j));
    }
  }
  std::vector<ProfileEntry> profile;
  profile.reserve(by_distance.size());
  for (const auto& [d, v] : by_distance) profile.push_back({d, v});
  return profile;
}

std::string_view FitModeName(FitMode mode) {
  return mode == FitMode::kEnvelope ? "envelope" : "regression";
}

double SedCertificate::Bound(int distance) const {
  if (degenerate) return 0.0;
  return c * std::exp(-gamma * distance);
}

namespace {

double ProfileViolation(const std::vector<ProfileEntry>& profile,
                        const SedCertificate& cert) {
  double worst = 0.0;
  for (const auto& [d, v] : profile) {
    const double bound = cert.Bound(d);
    if (v <= bound) continue;
    worst = std::max(worst, bound > 0.0
                                ? (v - bound) / bound
                                : std::numeric_limits<double>::infinity());
  }
  return worst;
}

bool EnvelopeFeasible(const std::vector<ProfileEntry>& profile, double c,
                      double gamma) {
  for (const auto& [d, v] : profile) {
    if (v > c * std::exp(-gamma * d)) return false;
  }
  return true;
}

}  // namespace

SedCertificate FitSed(const BlockMatrix& x, const Topology& topology,
                      FitMode mode) {
  RequireConnected(topology);
  const auto profile = BlockNormProfile(x, topology);
  SedCertificate cert;
  cert.mode = mode;
  double peak = 0.0;
  for (const auto& e : profile) peak = std::max(peak, e.norm);
  if (peak == 0.0) {
    cert.degenerate = true;
    cert.gamma = std::numeric_limits<double>::infinity();
    return cert;
  }

  if (mode == FitMode::kEnvelope) {
    cert.c = peak;
    if (EnvelopeFeasible(profile, peak, SedCertificate::kGammaCap)) {
      cert.gamma = SedCertificate::kGammaCap;
      cert.support_limited = true;
    } else {
      double lo = 0.0, hi = SedCertificate::kGammaCap;
      while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        (EnvelopeFeasible(profile, peak, mid) ? lo : hi) = mid;
      }
      cert.gamma = lo;
    }
  } else {
    double n = 0, sd = 0, sy = 0, sdd = 0, sdy = 0;
    double y0 = 0.0;
    for (const auto& [d, v] : profile) {
      if (v <= 1e-14) continue;
      const double y = std::log(v);
      if (n == 0) y0 = y;
      n += 1, sd += d, sy += y, sdd += double(d) * d, sdy += d * y;
    }
    const double denom = n * sdd - sd * sd;
    if (n < 2 || denom <= 0.0) {
      cert.c = std::exp(y0);
      cert.gamma = SedCertificate::kGammaCap;
      cert.support_limited = true;
    } else {
      const double slope = (n * sdy - sd * sy) / denom;
      const double intercept = (sy - slope * sd) / n;
      cert.gamma = -slope;
      cert.c = std::exp(intercept);
      if (cert.gamma > SedCertificate::kGammaCap) {
        cert.gamma = SedCertificate::kGammaCap;
        cert.support_limited = true;
      }
    }
  }
  cert.max_violation = ProfileViolation(profile, cert);
  return cert;
}

SedCertificate CertificateAtRate(const BlockMatrix& x, const Topology& topology,
                                 double gamma) {
  RequireConnected(topology);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorKind::kInvalidInput, "rate must be finite and >= 0");
  }
  const auto profile = BlockNormProfile(x, topology);
  SedCertificate cert;
  cert.gamma = gamma;
  for (const auto& [d, v] : profile) {
    if (v > 0.0) cert.c = std::max(cert.c, v * std::exp(gamma * d));
  }
  if (cert.c == 0.0) {
    cert.degenerate = true;
    return cert;
  }
  // exp(gamma d) exp(-gamma d) can round below one.
  const double excess = ProfileViolation(profile, cert);
  if (excess > 0.0) cert.c *= (1.0 + excess) * (1.0 + 4e-16);
  cert.max_violation = ProfileViolation(profile, cert);
  return cert;
}

double MaxViolation(const BlockMatrix& x, const Topology& topology,
                    const SedCertificate& cert) {
  return ProfileViolation(BlockNormProfile(x, topology), cert);
}

bool SedProductCheck(const BlockMatrix& x, const BlockMatrix& y,
                     const SedCertificate& cert_x, const SedCertificate& cert_y,
                     const Topology& topology) {
  RequireConnected(topology);
  const double gx = cert_x.degenerate ? cert_y.gamma : cert_x.gamma;
  const double gy = cert_y.degenerate ? cert_x.gamma : cert_y.gamma;
  if (std::abs(gx - gy) > 1e-12 * std::max(1.0, std::abs(gx))) {
    throw Error(ErrorKind::kInvalidInput,
                "certificates must share gamma; weaken to the smaller rate");
  }
  if (x.col_partition() != y.row_partition()) {
    throw Error(ErrorKind::kShapeError, "inner partitions differ");
  }
  const BlockMatrix product(x.data() * y.data(), x.row_partition(),
                            y.col_partition());
  RequirePartitionMatches(product, topology);
  const Eigen::MatrixXd norms = product.BlockNorms();
  const double scale = topology.agent_count() * cert_x.c * cert_y.c;
  for (int i = 0; i < norms.rows(); ++i) {
    for (int j = 0; j < norms.cols(); ++j) {
      const double bound = scale * std::exp(-gx * topology.distance(i, j));
      if (norms(i, j) > bound * (1.0 + 1e-12)) return false;
    }
  }
  return true;
}

double LambdaMaxBlockBound(const BlockMatrix& x) {
  if (x.row_partition() != x.col_partition()) {
    throw Error(ErrorKind::kShapeError, "block bound needs a square partition");
  }
  const Eigen::MatrixXd norms = x.BlockNorms();
  return norms.size() == 0 ? 0.0 : norms.rowwise().sum().maxCoeff();
}

void WriteCertificateCsvHeader(std::ostream& out) {
  out << "name,c,gamma,max_violation,mode\n";
}

void WriteCertificateCsvRow(std::ostream& out, std::string_view name,
                            const SedCertificate& cert) {
  const auto old = out.precision(17);
  out << name << "," << cert.c << "," << cert.gamma << ","
      << cert.max_violation << "," << FitModeName(cert.mode) << "\n";
  out.precision(old);
}

}  // namespace sedlqr
