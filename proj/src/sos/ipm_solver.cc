// Primal-dual path-following interior-point method for
//
//   min  cᵀw              s.t.  A_f w + Σ_b ⟨A_b, X_b⟩ = b,  X_b ⪰ 0,  w free
//   max  bᵀy              s.t.  A_fᵀ y = c,  Z_b = −A_bᵀ(y) ⪰ 0
//
// using the HKM search direction with Mehrotra predictor-corrector steps.
// Free variables enter the Schur system as a saddle-point block, which is
// reduced with an augmented-Lagrangian shift so that only positive definite
// factorisations are needed.

#include "rroa/sos/ipm_solver.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rroa {
namespace sos {

using Eigen::LLT;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Entries of one block grouped by row, with the column support of each row
// precomputed for the Schur-complement kernel.
struct BlockData {
  int n{0};
  std::vector<int> rows;   // distinct rows touching this block, ascending
  std::vector<int> start;  // entries[start[g] .. start[g+1]) belong to rows[g]
  std::vector<BlockEntry> entries;
  // cols[g]: distinct matrix columns referenced by group g.
  std::vector<std::vector<int>> cols;
};

class ScaledProblem {
 public:
  ScaledProblem(const SDPProblem& sdp) : m(sdp.num_rows), p(sdp.num_free) {
    Af = MatrixXd::Zero(m, p);
    for (const auto& e : sdp.free_entries) Af(e.row, e.col) += e.value;
    b = Eigen::Map<const VectorXd>(sdp.rhs.data(), m);
    c = p > 0 ? VectorXd(Eigen::Map<const VectorXd>(sdp.c_free.data(), p))
              : VectorXd();

    // Row normalisation to unit max-abs coefficient.
    row_scale = VectorXd::Zero(m);
    for (int r = 0; r < m; ++r) {
      if (p > 0) row_scale[r] = Af.row(r).cwiseAbs().maxCoeff();
    }
    for (const auto& blk : sdp.block_entries) {
      for (const auto& e : blk) {
        row_scale[e.row] = std::max(row_scale[e.row], std::abs(e.value));
      }
    }
    for (int r = 0; r < m; ++r) {
      row_scale[r] = row_scale[r] > 0 ? 1.0 / row_scale[r] : 1.0;
    }
    Af = row_scale.asDiagonal() * Af;
    b = b.cwiseProduct(row_scale);
    obj_scale = p > 0 ? std::max(1.0, c.cwiseAbs().maxCoeff()) : 1.0;
    if (p > 0) c /= obj_scale;

    for (std::size_t k = 0; k < sdp.block_sizes.size(); ++k) {
      BlockData bd;
      bd.n = sdp.block_sizes[k];
      bd.entries = sdp.block_entries[k];
      std::stable_sort(bd.entries.begin(), bd.entries.end(),
                       [](const BlockEntry& a, const BlockEntry& b) {
                         return a.row < b.row;
                       });
      for (auto& e : bd.entries) e.value *= row_scale[e.row];
      for (std::size_t i = 0; i < bd.entries.size(); ++i) {
        if (bd.rows.empty() || bd.rows.back() != bd.entries[i].row) {
          bd.rows.push_back(bd.entries[i].row);
          bd.start.push_back(static_cast<int>(i));
        }
      }
      bd.start.push_back(static_cast<int>(bd.entries.size()));
      bd.cols.resize(bd.rows.size());
      for (std::size_t g = 0; g < bd.rows.size(); ++g) {
        auto& cs = bd.cols[g];
        for (int i = bd.start[g]; i < bd.start[g + 1]; ++i) {
          cs.push_back(bd.entries[i].i);
          cs.push_back(bd.entries[i].j);
        }
        std::sort(cs.begin(), cs.end());
        cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
      }
      blocks.push_back(std::move(bd));
    }
  }

  // 𝒜(X) restricted to PSD blocks.
  VectorXd Apply(const std::vector<MatrixXd>& X) const {
    VectorXd v = VectorXd::Zero(m);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      for (const auto& e : blocks[k].entries) {
        v[e.row] += e.value * (e.i == e.j ? X[k](e.i, e.i) : 2.0 * X[k](e.i, e.j));
      }
    }
    return v;
  }

  // 𝒜_kᵀ(y) = Σ_r y_r A_{r,k}.
  MatrixXd Adjoint(std::size_t k, const VectorXd& y) const {
    const auto& bd = blocks[k];
    MatrixXd S = MatrixXd::Zero(bd.n, bd.n);
    for (const auto& e : bd.entries) {
      const double v = y[e.row] * e.value;
      S(e.i, e.j) += v;
      if (e.i != e.j) S(e.j, e.i) += v;
    }
    return S;
  }

  int m;
  int p;
  MatrixXd Af;
  VectorXd b;
  VectorXd c;
  VectorXd row_scale;
  double obj_scale{1.0};
  std::vector<BlockData> blocks;
};

// M_ij += tr(A_i X A_j W) for all rows touching the block (upper triangle).
void AccumulateSchur(const BlockData& bd, const MatrixXd& X, const MatrixXd& W,
                     MatrixXd& M) {
  const int n = bd.n;
  const std::size_t ngroups = bd.rows.size();
  MatrixXd U;
  MatrixXd WC;
  MatrixXd G(n, n);
  std::vector<int> local(n, -1);
  for (std::size_t g = 0; g < ngroups; ++g) {
    const auto& cs = bd.cols[g];
    const int nc = static_cast<int>(cs.size());
    for (int k = 0; k < nc; ++k) local[cs[k]] = k;
    // U = columns `cs` of X·A_i.
    U.setZero(n, nc);
    for (int t = bd.start[g]; t < bd.start[g + 1]; ++t) {
      const auto& e = bd.entries[t];
      U.col(local[e.j]).noalias() += e.value * X.col(e.i);
      if (e.i != e.j) U.col(local[e.i]).noalias() += e.value * X.col(e.j);
    }
    WC.resize(nc, n);
    for (int k = 0; k < nc; ++k) WC.row(k) = W.row(cs[k]);
    G.noalias() = U * WC;
    for (int k = 0; k < nc; ++k) local[cs[k]] = -1;

    const int ri = bd.rows[g];
    for (std::size_t h = g; h < ngroups; ++h) {
      double s = 0.0;
      for (int t = bd.start[h]; t < bd.start[h + 1]; ++t) {
        const auto& e = bd.entries[t];
        s += e.i == e.j ? e.value * G(e.i, e.i)
                        : e.value * (G(e.j, e.i) + G(e.i, e.j));
      }
      const int rj = bd.rows[h];
      M(std::min(ri, rj), std::max(ri, rj)) += s;
    }
  }
}

// Largest α with M + α D ⪰ 0 (∞ if none), given the Cholesky factor of M.
double MaxStep(const MatrixXd& L, const MatrixXd& D) {
  const auto tri = L.triangularView<Eigen::Lower>();
  MatrixXd T = tri.solve(D);
  T = tri.solve(T.transpose()).transpose();
  T = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(T, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

double MinEigenvalue(const MatrixXd& A) {
  if (A.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double Dot(const std::vector<MatrixXd>& A, const std::vector<MatrixXd>& B) {
  double s = 0.0;
  for (std::size_t k = 0; k < A.size(); ++k) s += A[k].cwiseProduct(B[k]).sum();
  return s;
}

// Newton system M dy + Af dw = r1, Afᵀ dy = r2. The saddle matrix is
// factored whole with partial-pivot LU; eliminating the free block through
// M loses too many digits once X approaches the boundary.
class NewtonSystem {
 public:
  bool Factor(MatrixXd M, const MatrixXd& Af) {
    const int m = static_cast<int>(M.rows());
    const int p = static_cast<int>(Af.cols());
    M.triangularView<Eigen::StrictlyLower>() =
        M.triangularView<Eigen::StrictlyUpper>().transpose();
    m_ = m;
    K_ = MatrixXd::Zero(m + p, m + p);
    K_.topLeftCorner(m, m) = M;
    if (p > 0) {
      K_.topRightCorner(m, p) = Af;
      K_.bottomLeftCorner(p, m) = Af.transpose();
    }
    lu_.compute(K_);
    return lu_.rcond() > 1e-300 && std::isfinite(lu_.rcond());
  }

  void Solve(const VectorXd& r1, const VectorXd& r2, VectorXd& dy,
             VectorXd& dw) const {
    const int p = static_cast<int>(K_.rows()) - m_;
    VectorXd r(m_ + p);
    r.head(m_) = r1;
    if (p > 0) r.tail(p) = r2;
    VectorXd z = lu_.solve(r);
    double prev = std::numeric_limits<double>::infinity();
    for (int round = 0; round < 3; ++round) {
      const VectorXd e = r - K_ * z;
      const double err = e.lpNorm<Eigen::Infinity>();
      if (err >= 0.5 * prev) break;
      prev = err;
      z += lu_.solve(e);
    }
    dy = z.head(m_);
    dw = z.tail(p);
  }

 private:
  int m_{0};
  MatrixXd K_;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

struct Iterate {
  std::vector<MatrixXd> X, Z;
  VectorXd y, w;
};

}  // namespace

std::string InteriorPointSolver::name() const { return "ipm"; }

// A Aᵀ for the stacked equality operator (free columns included), with a tiny
// diagonal shift. Used to project directions and iterates back onto the
// affine constraint set.
MatrixXd ConstraintGram(const ScaledProblem& P) {
  const int m = P.m;
  const int p = P.p;
  MatrixXd G = MatrixXd::Zero(m, m);
  if (p > 0) G.noalias() += P.Af * P.Af.transpose();
  for (const auto& bd : P.blocks) {
    // Entries sharing a matrix position couple their rows.
    std::vector<std::vector<std::pair<int, double>>> at(
        static_cast<std::size_t>(bd.n) * bd.n);
    for (const auto& e : bd.entries) {
      at[static_cast<std::size_t>(e.i) * bd.n + e.j].emplace_back(e.row,
                                                                  e.value);
    }
    for (int i = 0; i < bd.n; ++i) {
      for (int j = i; j < bd.n; ++j) {
        const auto& list = at[static_cast<std::size_t>(i) * bd.n + j];
        const double wgt = i == j ? 1.0 : 2.0;
        for (const auto& [r1, v1] : list) {
          for (const auto& [r2, v2] : list) G(r1, r2) += wgt * v1 * v2;
        }
      }
    }
  }
  G.diagonal().array() += 1e-14 * std::max(1.0, G.diagonal().maxCoeff());
  return G;
}

SDPSolution InteriorPointSolver::Solve(const SDPProblem& sdp,
                                       const SolverSettings& settings) const {
  SDPSolution sol;
  sol.backend = name();
  const ScaledProblem P(sdp);
  const int m = P.m;
  const int p = P.p;
  const std::size_t nb = P.blocks.size();

  auto finish_unscaled = [&](const Iterate& it) {
    sol.free_values.assign(it.w.data(), it.w.data() + it.w.size());
    sol.blocks = it.X;
    sol.dual.resize(m);
    for (int r = 0; r < m; ++r) sol.dual[r] = it.y[r] * P.row_scale[r] * P.obj_scale;
    sol.primal_objective = 0.0;
    for (int j = 0; j < p; ++j) sol.primal_objective += sdp.c_free[j] * it.w[j];
    sol.dual_objective = 0.0;
    for (int r = 0; r < m; ++r) sol.dual_objective += sdp.rhs[r] * sol.dual[r];
    sol.primal_residual = PrimalResidual(sdp, sol.free_values, sol.blocks);
    sol.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const auto& X : sol.blocks) {
      sol.min_eigenvalue = std::min(sol.min_eigenvalue, MinEigenvalue(X));
    }
    if (sol.blocks.empty()) sol.min_eigenvalue = 0.0;
  };

  // Rows without any variable: 0 = b_r.
  {
    std::vector<bool> has_var(m, false);
    for (int r = 0; r < m; ++r) {
      if (p > 0 && P.Af.row(r).cwiseAbs().maxCoeff() > 0) has_var[r] = true;
    }
    for (const auto& bd : P.blocks) {
      for (int r : bd.rows) has_var[r] = true;
    }
    for (int r = 0; r < m; ++r) {
      if (!has_var[r] && std::abs(sdp.rhs[r]) > 0) {
        sol.status = SolveStatus::kInfeasible;
        sol.message = "row " + std::to_string(r) + " reads 0 = " +
                      std::to_string(sdp.rhs[r]);
        return sol;
      }
    }
  }

  const double bnorm = P.b.norm();
  const double cnorm = p > 0 ? P.c.norm() : 0.0;
  int N = 0;
  for (const auto& bd : P.blocks) N += bd.n;

  // Initial point.
  Iterate it;
  it.y = VectorXd::Zero(m);
  it.w = VectorXd::Zero(p);
  for (const auto& bd : P.blocks) {
    double amax = 0.0;
    std::vector<double> anorm(m, 0.0);
    for (const auto& e : bd.entries) {
      anorm[e.row] += e.value * e.value * (e.i == e.j ? 1.0 : 2.0);
    }
    double xi = std::max(10.0, std::sqrt(static_cast<double>(bd.n)));
    for (int r : bd.rows) {
      const double an = std::sqrt(anorm[r]);
      amax = std::max(amax, an);
      xi = std::max(xi, bd.n * (1.0 + std::abs(P.b[r])) / (1.0 + an));
    }
    const double eta = std::max({10.0, std::sqrt(static_cast<double>(bd.n)), amax});
    it.X.push_back(xi * MatrixXd::Identity(bd.n, bd.n));
    it.Z.push_back(eta * MatrixXd::Identity(bd.n, bd.n));
  }

  LLT<MatrixXd> lg(ConstraintGram(P));
  const bool gram_ok = lg.info() == Eigen::Success;

  Iterate best = it;
  double best_merit = std::numeric_limits<double>::infinity();
  bool converged = false;
  int stalls = 0;
  int last_progress = 0;
  // Merit when progress was last recorded; a slow steady decrease still
  // counts once it adds up to 30%.
  double progress_merit = std::numeric_limits<double>::infinity();
  double best_relp = 0, best_reld = 0, best_gap = 0;
  const double tol = settings.feasibility_tol;

  std::vector<MatrixXd> W(nb), Rd(nb), LX(nb), LZ(nb);
  double relp = 0, reld = 0, relgap = 0;

  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    sol.iterations = iter;
    // Residuals and measures.
    VectorXd rp = P.b - P.Apply(it.X);
    if (p > 0) rp -= P.Af * it.w;
    VectorXd rf = p > 0 ? VectorXd(P.c - P.Af.transpose() * it.y) : VectorXd();
    double rd2 = 0.0;
    bool factor_ok = true;
    for (std::size_t k = 0; k < nb; ++k) {
      Rd[k] = -P.Adjoint(k, it.y) - it.Z[k];
      rd2 += Rd[k].squaredNorm();
      LLT<MatrixXd> lz(it.Z[k]);
      LLT<MatrixXd> lx(it.X[k]);
      if (lz.info() != Eigen::Success || lx.info() != Eigen::Success) {
        factor_ok = false;
        break;
      }
      LZ[k] = lz.matrixL();
      LX[k] = lx.matrixL();
      W[k] = lz.solve(MatrixXd::Identity(P.blocks[k].n, P.blocks[k].n));
    }
    if (!factor_ok) {
      sol.message = "lost positive definiteness";
      break;
    }
    const double pobj = p > 0 ? P.c.dot(it.w) : 0.0;
    const double dobj = P.b.dot(it.y);
    const double compl_gap = Dot(it.X, it.Z);
    const double mu = N > 0 ? compl_gap / N : 0.0;
    const double rfn = p > 0 ? rf.norm() : 0.0;
    relp = rp.norm() / (1.0 + bnorm);
    reld = (std::sqrt(rd2) + rfn) / (1.0 + cnorm);
    relgap = std::max(std::abs(pobj - dobj), compl_gap) /
             (1.0 + std::abs(pobj) + std::abs(dobj));
    if (settings.verbose) {
      std::fprintf(stderr,
                   "ipm %3d pobj %+.9e dobj %+.9e relp %.2e reld %.2e gap %.2e "
                   "mu %.2e\n",
                   iter, pobj * P.obj_scale, dobj * P.obj_scale, relp, reld,
                   relgap, mu);
    }
    const double merit = std::max({relp, reld, relgap});
    if (merit < 0.7 * progress_merit) {
      last_progress = iter;
      progress_merit = merit;
    }
    if (merit < best_merit) {
      best_merit = merit;
      best = it;
      best_relp = relp;
      best_reld = reld;
      best_gap = relgap;
    }
    if (iter - last_progress >= 15) {
      sol.message = "no progress";
      break;
    }
    if (relp <= tol && reld <= tol && relgap <= settings.gap_tol) {
      converged = true;
      break;
    }
    // Infeasibility certificates.
    if (dobj > 0 && (cnorm + std::sqrt(rd2) + rfn) / dobj < 1e-8) {
      sol.status = SolveStatus::kInfeasible;
      sol.message = "primal infeasible (dual ray found)";
      finish_unscaled(it);
      return sol;
    }
    if (pobj < 0 && (bnorm + rp.norm()) / -pobj < 1e-8) {
      sol.status = SolveStatus::kUnknown;
      sol.message = "dual infeasible (primal unbounded)";
      finish_unscaled(it);
      return sol;
    }

    // Schur complement.
    MatrixXd M = MatrixXd::Zero(m, m);
    for (std::size_t k = 0; k < nb; ++k) AccumulateSchur(P.blocks[k], it.X[k], W[k], M);
    NewtonSystem sys;
    if (!sys.Factor(std::move(M), P.Af)) {
      sol.message = "Newton system factorisation failed";
      break;
    }

    std::vector<MatrixXd> dX(nb), dZ(nb), H(nb);
    VectorXd dy, dw;
    auto direction = [&](double target, const std::vector<MatrixXd>* corr) {
      for (std::size_t k = 0; k < nb; ++k) {
        H[k] = target * W[k] - it.X[k] - it.X[k] * Rd[k] * W[k];
        if (corr != nullptr) H[k] -= (*corr)[k];
      }
      std::vector<MatrixXd> Hs(nb);
      for (std::size_t k = 0; k < nb; ++k) Hs[k] = 0.5 * (H[k] + H[k].transpose());
      VectorXd r1 = rp - P.Apply(Hs);
      sys.Solve(r1, rf, dy, dw);
      for (std::size_t k = 0; k < nb; ++k) {
        const MatrixXd Ady = P.Adjoint(k, dy);
        dZ[k] = Rd[k] - Ady;
        MatrixXd d = H[k] + it.X[k] * Ady * W[k];
        dX[k] = 0.5 * (d + d.transpose());
      }
      // The Schur solve loses accuracy as X becomes singular; restore
      // A(dX) + Af dw = rp exactly so the primal residual keeps shrinking.
      if (gram_ok) {
        VectorXd e = rp - P.Apply(dX);
        if (p > 0) e -= P.Af * dw;
        const VectorXd lambda = lg.solve(e);
        for (std::size_t k = 0; k < nb; ++k) dX[k] += P.Adjoint(k, lambda);
        if (p > 0) dw += P.Af.transpose() * lambda;
      }
    };
    auto step_lengths = [&](double& ap, double& ad) {
      ap = 1.0;
      ad = 1.0;
      for (std::size_t k = 0; k < nb; ++k) {
        ap = std::min(ap, MaxStep(LX[k], dX[k]));
        ad = std::min(ad, MaxStep(LZ[k], dZ[k]));
      }
    };

    // Predictor.
    direction(0.0, nullptr);
    double ap, ad;
    step_lengths(ap, ad);
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      mu_aff += (it.X[k] + ap * dX[k]).cwiseProduct(it.Z[k] + ad * dZ[k]).sum();
    }
    mu_aff = N > 0 ? mu_aff / N : 0.0;
    const double sigma =
        mu > 0 ? std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0)
               : 0.0;
    const double gamma = 0.9 + 0.09 * std::min(ap, ad);

    // Corrector.
    std::vector<MatrixXd> corr(nb);
    for (std::size_t k = 0; k < nb; ++k) corr[k] = dX[k] * dZ[k] * W[k];
    direction(sigma * mu, &corr);
    step_lengths(ap, ad);
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (settings.verbose) {
      std::fprintf(stderr, "    step %.3f %.3f sigma %.2e\n", ap, ad, sigma);
    }

    for (std::size_t k = 0; k < nb; ++k) {
      it.X[k] += ap * dX[k];
      it.Z[k] += ad * dZ[k];
    }
    if (p > 0) it.w += ap * dw;
    it.y += ad * dy;

    if (!it.y.allFinite() || (p > 0 && !it.w.allFinite())) {
      sol.message = "non-finite iterate";
      it = best;
      break;
    }
    stalls = std::max(ap, ad) < 1e-8 ? stalls + 1 : 0;
    if (stalls >= 3) {
      sol.message = "step length stalled";
      break;
    }
  }

  if (converged) {
    sol.status = SolveStatus::kOptimal;
  } else {
    it = best;
    relp = best_relp;
    reld = best_reld;
    relgap = best_gap;
    if (best_relp <= 100 * tol && best_reld <= 100 * tol &&
        best_gap <= settings.near_optimal_gap) {
      sol.status = SolveStatus::kNearOptimal;
    } else {
      sol.status = SolveStatus::kUnknown;
    }
    if (sol.message.empty()) sol.message = "iteration limit";
  }
  sol.relative_gap = relgap;
  sol.dual_residual = reld;

  // Minimal-norm projection onto the equality constraints.
  if (settings.polish && (sol.status == SolveStatus::kOptimal ||
                          sol.status == SolveStatus::kNearOptimal)) {
    VectorXd rp = P.b - P.Apply(it.X);
    if (p > 0) rp -= P.Af * it.w;
    if (gram_ok) {
      const VectorXd lambda = lg.solve(rp);
      Iterate polished = it;
      if (p > 0) polished.w += P.Af.transpose() * lambda;
      double lmin = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < nb; ++k) {
        polished.X[k] += P.Adjoint(k, lambda);
        lmin = std::min(lmin, MinEigenvalue(polished.X[k]));
      }
      if (nb == 0 || lmin >= -settings.eig_tol) it = std::move(polished);
    }
  }

  finish_unscaled(it);
  return sol;
}

}  // namespace sos
}  // namespace rroa
