#include "enso/causal.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "enso/parallel.hpp"
#include "enso/rng.hpp"
#include "enso/stats.hpp"

namespace enso {

namespace {

constexpr double kRidgeFactor = 1e-8;
constexpr double kClipTol = 1e-12;
constexpr int kLengthFloorPerColumn = 50;

// Joint covariance of [derivative columns | design columns], ridge-
// regularized. All entropy submatrices are taken from this one matrix so
// the regularization is consistent across terms.
struct JointCov {
  Matrix cov;   // (n + M) x (n + M)
  double ridge = 0.0;
  int n = 0;    // derivative columns (first block)
  int M = 0;    // design columns
};

Matrix sample_covariance(const Matrix& A) {
  const double N = static_cast<double>(A.rows());
  Vector mean = A.colwise().mean();
  Matrix cov = (A.transpose() * A) / N;
  cov.noalias() -= mean * mean.transpose();
  return cov;
}

JointCov joint_covariance(const DerivativeSeries& derivs, const DesignMatrix& design) {
  if (derivs.n_samples() != design.n_samples())
    throw DimensionError("derivative and design rows are not aligned");
  const int n = static_cast<int>(derivs.values.cols());
  const int M = design.library.size();
  const double N = static_cast<double>(design.n_samples());

  JointCov jc;
  jc.n = n;
  jc.M = M;
  jc.cov.resize(n + M, n + M);

  Vector mu_d = derivs.values.colwise().mean();
  Vector mu_f = design.values.colwise().mean();

  jc.cov.topLeftCorner(n, n).noalias() = derivs.values.transpose() * derivs.values / N;
  jc.cov.topLeftCorner(n, n).noalias() -= mu_d * mu_d.transpose();
  jc.cov.topRightCorner(n, M).noalias() = derivs.values.transpose() * design.values / N;
  jc.cov.topRightCorner(n, M).noalias() -= mu_d * mu_f.transpose();
  jc.cov.bottomLeftCorner(M, n) = jc.cov.topRightCorner(n, M).transpose();
  jc.cov.bottomRightCorner(M, M).noalias() = design.values.transpose() * design.values / N;
  jc.cov.bottomRightCorner(M, M).noalias() -= mu_f * mu_f.transpose();

  jc.ridge = kRidgeFactor * jc.cov.trace() / static_cast<double>(n + M);
  if (!(jc.ridge > 0.0)) jc.ridge = kRidgeFactor;
  jc.cov.diagonal().array() += jc.ridge;
  return jc;
}

Matrix extract(const Matrix& cov, const std::vector<int>& idx) {
  Matrix out(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = cov(idx[a], idx[b]);
  return out;
}

double logdet_spd(const Matrix& m, const std::function<std::vector<std::string>()>& columns) {
  if (m.rows() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    std::vector<std::string> cols = columns ? columns() : std::vector<std::string>{};
    std::ostringstream os;
    os << "covariance not positive definite after regularization";
    if (!cols.empty()) {
      os << "; columns:";
      for (const auto& c : cols) os << " " << c;
    }
    throw ConditioningError(os.str(), cols);
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double clip_entropy(double c, int* clipped) {
  if (c < 0.0) {
    if (c < -kClipTol && clipped) ++*clipped;
    return 0.0;
  }
  return c;
}

}  // namespace

double gaussian_causation_entropy(const Vector& x, const Matrix& Y, const Vector& z) {
  const long N = x.size();
  const int q = static_cast<int>(Y.cols());
  if (z.size() != N || (q > 0 && Y.rows() != N))
    throw DimensionError("columns passed to causation entropy differ in length");
  if (N < static_cast<long>(kLengthFloorPerColumn) * (q + 2))
    throw DataLengthError("record too short for causation entropy: " +
                          std::to_string(N) + " samples for " + std::to_string(q + 2) +
                          " columns");

  Matrix joint(N, q + 2);
  joint.col(0) = x;
  if (q > 0) joint.middleCols(1, q) = Y;
  joint.col(q + 1) = z;

  Matrix cov = sample_covariance(joint);
  double ridge = kRidgeFactor * cov.trace() / static_cast<double>(q + 2);
  if (!(ridge > 0.0)) ridge = kRidgeFactor;
  cov.diagonal().array() += ridge;

  std::vector<int> idx_y(q), idx_xy(q + 1), idx_yz(q + 1), idx_xyz(q + 2);
  std::iota(idx_y.begin(), idx_y.end(), 1);
  idx_xy[0] = 0;
  std::iota(idx_xy.begin() + 1, idx_xy.end(), 1);
  std::iota(idx_yz.begin(), idx_yz.end(), 1);
  std::iota(idx_xyz.begin(), idx_xyz.end(), 0);

  auto no_names = std::function<std::vector<std::string>()>{};
  const double ld_xy = logdet_spd(extract(cov, idx_xy), no_names);
  const double ld_y = logdet_spd(extract(cov, idx_y), no_names);
  const double ld_xyz = logdet_spd(extract(cov, idx_xyz), no_names);
  const double ld_yz = logdet_spd(extract(cov, idx_yz), no_names);

  return clip_entropy(0.5 * (ld_xy - ld_y - ld_xyz + ld_yz), nullptr);
}

CausationEntropyMatrix causation_entropy_matrix(const DerivativeSeries& derivs,
                                                const DesignMatrix& design) {
  const int M = design.library.size();
  const int n = static_cast<int>(derivs.values.cols());
  const long N = design.n_samples();
  if (N < static_cast<long>(kLengthFloorPerColumn) * M)
    throw DataLengthError("record too short for causation entropy matrix: " +
                          std::to_string(N) + " samples for M = " + std::to_string(M));

  const JointCov jc = joint_covariance(derivs, design);

  auto lib_labels = [&](const std::vector<int>& lib_idx) {
    std::vector<std::string> out;
    for (int m : lib_idx) out.push_back(design.library.label(m));
    return out;
  };

  // log det of cov(design) and of cov(design minus column m)
  std::vector<int> all_f(M);
  std::iota(all_f.begin(), all_f.end(), 0);
  std::vector<int> all_f_joint(M);
  std::iota(all_f_joint.begin(), all_f_joint.end(), n);
  const double ld_f = logdet_spd(extract(jc.cov, all_f_joint),
                                 [&] { return lib_labels(all_f); });

  std::vector<double> ld_y(M);
  parallel_for(M, [&](std::size_t m) {
    std::vector<int> idx;
    idx.reserve(M - 1);
    for (int j = 0; j < M; ++j)
      if (j != static_cast<int>(m)) idx.push_back(n + j);
    std::vector<int> lib_idx;
    for (int j = 0; j < M; ++j)
      if (j != static_cast<int>(m)) lib_idx.push_back(j);
    ld_y[m] = logdet_spd(extract(jc.cov, idx), [&] { return lib_labels(lib_idx); });
  });

  // log det of cov([deriv_i, design])
  std::vector<double> ld_full(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> idx(1, i);
    for (int j = 0; j < M; ++j) idx.push_back(n + j);
    ld_full[i] = logdet_spd(extract(jc.cov, idx), [&] { return lib_labels(all_f); });
  }

  CausationEntropyMatrix cem;
  cem.values.resize(n, M);
  cem.library = design.library;
  cem.equation_names = derivs.vars.names();

  std::vector<int> clip_counts(n, 0);
  parallel_for(static_cast<std::size_t>(n) * M, [&](std::size_t k) {
    const int i = static_cast<int>(k / M);
    const int m = static_cast<int>(k % M);
    std::vector<int> idx(1, i);
    for (int j = 0; j < M; ++j)
      if (j != m) idx.push_back(n + j);
    const double ld_xy = logdet_spd(extract(jc.cov, idx), [&] {
      std::vector<int> lib_idx;
      for (int j = 0; j < M; ++j)
        if (j != m) lib_idx.push_back(j);
      auto names = lib_labels(lib_idx);
      names.insert(names.begin(), "d(" + derivs.vars.name(i) + ")/dt");
      return names;
    });
    const double c = 0.5 * (ld_xy - ld_y[m] - ld_full[i] + ld_f);
    cem.values(i, m) = clip_entropy(c, &clip_counts[i]);
  });
  cem.negatives_clipped = std::accumulate(clip_counts.begin(), clip_counts.end(), 0);
  return cem;
}

// ---------------------------------------------------------------------------
// Bootstrap null
// ---------------------------------------------------------------------------

namespace {

// Permutes whole blocks of `z` (the tail shorter block included) so the
// surrogate keeps the short-range autocorrelation of the original column.
void block_shuffle(const Eigen::Ref<const Vector>& z, int block_len, Rng& rng,
                   Vector& out) {
  const long N = z.size();
  const long n_blocks = (N + block_len - 1) / block_len;
  std::vector<long> order(n_blocks);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  long pos = 0;
  for (long b = 0; b < n_blocks; ++b) {
    const long src = order[b] * block_len;
    const long len = std::min<long>(block_len, N - src);
    out.segment(pos, len) = z.segment(src, len);
    pos += len;
  }
}

}  // namespace

Matrix bootstrap_null_thresholds(const DerivativeSeries& derivs,
                                 const DesignMatrix& design,
                                 const BootstrapPolicy& policy) {
  if (policy.n_shuffles < 2) throw ConfigError("bootstrap needs n_shuffles >= 2");
  if (policy.block_len < 1) throw ConfigError("bootstrap block_len must be >= 1");
  if (!(policy.quantile > 0.0 && policy.quantile < 1.0))
    throw ConfigError("bootstrap quantile must lie in (0, 1)");

  const int M = design.library.size();
  const int n = static_cast<int>(derivs.values.cols());
  const long N = design.n_samples();
  const double Nd = static_cast<double>(N);

  const JointCov jc = joint_covariance(derivs, design);
  const Matrix R = jc.cov.bottomRightCorner(M, M);  // regularized library cov
  Eigen::LLT<Matrix> lltR(R);
  if (lltR.info() != Eigen::Success)
    throw ConditioningError("library covariance not positive definite", {});
  const Matrix Omega = lltR.solve(Matrix::Identity(M, M));

  const Vector mu_f = design.values.colwise().mean();
  const Vector mu_d = derivs.values.colwise().mean();

  // Solve R_Y a = v_Y (Y = library minus column m) through the downdated
  // inverse; entry m of the returned vector is meaningless and zeroed.
  auto solve_minus = [&](int m, const Vector& v_with_zero_at_m) {
    Vector a = Omega * v_with_zero_at_m;
    a -= Omega.col(m) * (a[m] / Omega(m, m));
    a[m] = 0.0;
    return a;
  };

  Matrix thresholds(n, M);

  parallel_for(M, [&](std::size_t mm) {
    const int m = static_cast<int>(mm);
    const double var_z = jc.cov(n + m, n + m);  // regularized; shuffle-invariant

    // Conditional variance of each derivative given Y, and the regression
    // weights used for conditional covariances against surrogates.
    Matrix w(M, n);  // column i: R_Y^{-1} cov(Y, x_i), zero at row m
    Vector var_x_given_y(n);
    for (int i = 0; i < n; ++i) {
      Vector r = jc.cov.block(n, 0, M, n).col(i);
      r[m] = 0.0;
      w.col(i) = solve_minus(m, r);
      var_x_given_y[i] = jc.cov(i, i) - r.dot(w.col(i));
    }

    Matrix nulls(policy.n_shuffles, n);
    const int chunk = 16;
    Matrix shuffled(N, chunk);
    Vector buf(N);
    for (int s0 = 0; s0 < policy.n_shuffles; s0 += chunk) {
      const int B = std::min(chunk, policy.n_shuffles - s0);
      for (int b = 0; b < B; ++b) {
        Rng rng(policy.seed, 0x9e37ULL + 131071ULL * m + (s0 + b));
        block_shuffle(design.values.col(m), policy.block_len, rng, buf);
        shuffled.col(b) = buf;
      }
      // cov(surrogate, library) and cov(surrogate, derivatives); the
      // surrogate mean equals the column mean, being a permutation.
      Matrix cf = design.values.transpose() * shuffled.leftCols(B) / Nd;
      cf.noalias() -= mu_f * (Vector::Constant(B, mu_f[m])).transpose();
      Matrix cd = derivs.values.transpose() * shuffled.leftCols(B) / Nd;
      cd.noalias() -= mu_d * (Vector::Constant(B, mu_f[m])).transpose();

      for (int b = 0; b < B; ++b) {
        Vector c = cf.col(b);
        c[m] = 0.0;
        const Vector a = solve_minus(m, c);
        const double var_z_given_y = std::max(var_z - c.dot(a), 1e-300);
        for (int i = 0; i < n; ++i) {
          const double cross = cd(i, b) - w.col(i).dot(c);
          double rho2 = cross * cross / (var_z_given_y * var_x_given_y[i]);
          rho2 = std::min(rho2, 1.0 - 1e-15);
          nulls(s0 + b, i) = std::max(0.0, -0.5 * std::log1p(-rho2));
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      std::vector<double> v(nulls.col(i).data(), nulls.col(i).data() + policy.n_shuffles);
      thresholds(i, m) = percentile(v, policy.quantile * 100.0);
    }
  });

  return thresholds;
}

StructurePattern select_structure(const CausationEntropyMatrix& cem,
                                  const SelectionPolicy& policy) {
  StructurePattern pattern;
  if (const auto* abs = std::get_if<AbsolutePolicy>(&policy)) {
    if (!std::isfinite(abs->threshold)) throw ConfigError("absolute threshold must be finite");
    pattern.mask = cem.values.array() >= abs->threshold;
    return pattern;
  }
  const auto& boot = std::get<BootstrapPolicy>(policy);
  if (!(boot.quantile > 0.0 && boot.quantile < 1.0))
    throw ConfigError("bootstrap quantile must lie in (0, 1)");
  if (!cem.null_thresholds)
    throw ConfigError("bootstrap selection requires null thresholds; use learn_structure");
  pattern.mask = cem.values.array() > cem.null_thresholds->array();
  return pattern;
}

LearnedStructure learn_structure(const DerivativeSeries& derivs,
                                 const DesignMatrix& design,
                                 const SelectionPolicy& policy,
                                 bool always_keep_constant) {
  LearnedStructure out;
  out.cem = causation_entropy_matrix(derivs, design);
  if (const auto* boot = std::get_if<BootstrapPolicy>(&policy))
    out.cem.null_thresholds = bootstrap_null_thresholds(derivs, design, *boot);
  out.pattern = select_structure(out.cem, policy);
  if (always_keep_constant) {
    const int c = design.library.find(Monomial(), Seasonal::Constant);
    if (c >= 0) out.pattern.mask.col(c).setConstant(true);
  }
  return out;
}

}  // namespace enso
