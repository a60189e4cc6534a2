#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "parasos/sdp.hpp"

// Reference SDP solver: primal-dual path-following interior-point method
// with Nesterov-Todd scaling and a Mehrotra corrector.
//
// Feasibility is decided through a phase-1 embedding. With S_j = X_j + t I,
// the problem  min t  s.t.  A(S) - t A(I) + B u = b, S >= 0  is always
// strictly feasible, so the method needs no homogeneous embedding:
//   * a primal iterate with t < 0 that projects onto the equalities within
//     tolerance certifies feasibility of the original problem;
//   * a nearly dual-feasible y with b'y > 0 certifies infeasibility by weak
//     duality (t* >= b'y for every dual-feasible y).
// Anything else within the iteration budget is reported "inaccurate", which
// callers treat as infeasible.

namespace parasos {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct BlockCoef {
  int blk;
  int i, j;  // packed, i <= j
  double v;  // LinExpr coefficient; off-diagonal symmetric halves are v/2
};

struct SolverRow {
  std::vector<BlockCoef> mat;
  std::vector<std::pair<int, double>> free_terms;  // (free slot, coeff)
  double trace = 0.0;  // sum of diagonal coefficients; t column is -trace
  double rhs = 0.0;
};

struct Layout {
  std::vector<int> block_dims;
  // var id -> (block, i, j) or free slot
  struct Loc {
    int blk = -1, i = 0, j = 0, free_slot = -1;
  };
  std::vector<Loc> locs;
  int n_free = 0;  // user scalars (t handled separately)
};

double row_dot(const SolverRow& a, const SolverRow& b) {
  double s = 0.0;
  size_t i = 0, j = 0;
  const auto key = [](const BlockCoef& c) {
    return (int64_t(c.blk) << 40) | (int64_t(c.i) << 20) | int64_t(c.j);
  };
  while (i < a.mat.size() && j < b.mat.size()) {
    const int64_t ka = key(a.mat[i]), kb = key(b.mat[j]);
    if (ka < kb) ++i;
    else if (kb < ka) ++j;
    else s += a.mat[i++].v * b.mat[j++].v;
  }
  i = j = 0;
  while (i < a.free_terms.size() && j < b.free_terms.size()) {
    if (a.free_terms[i].first < b.free_terms[j].first) ++i;
    else if (b.free_terms[j].first < a.free_terms[i].first) ++j;
    else s += a.free_terms[i++].second * b.free_terms[j++].second;
  }
  return s;
}

// A_k as a dense symmetric matrix restricted to one block.
void add_block_matrix(const SolverRow& row, int blk, double scale, MatrixXd& out) {
  for (const auto& c : row.mat) {
    if (c.blk != blk) continue;
    if (c.i == c.j) out(c.i, c.i) += scale * c.v;
    else {
      out(c.i, c.j) += 0.5 * scale * c.v;
      out(c.j, c.i) += 0.5 * scale * c.v;
    }
  }
}

double block_inner(const SolverRow& row, int blk, const MatrixXd& T) {
  double s = 0.0;
  for (const auto& c : row.mat) {
    if (c.blk != blk) continue;
    s += c.v * T(c.i, c.j);
  }
  return s;
}

double apply_row(const SolverRow& row, const std::vector<MatrixXd>& X,
                 const VectorXd& u) {
  double s = 0.0;
  for (const auto& c : row.mat) s += c.v * X[c.blk](c.i, c.j);
  for (const auto& [slot, v] : row.free_terms) s += v * u[slot];
  return s;
}

// Largest step alpha with S + alpha dS staying positive definite.
double max_step(const MatrixXd& S, const MatrixXd& dS) {
  Eigen::LLT<MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) return 0.0;
  const MatrixXd L = llt.matrixL();
  MatrixXd A = L.triangularView<Eigen::Lower>().solve(dS);
  A = L.triangularView<Eigen::Lower>().solve(A.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (A + A.transpose()),
                                             Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return 1e16;
  return -1.0 / lmin;
}

struct NtScaling {
  MatrixXd W, R, Rinv;
  VectorXd sigma;  // scaled-space eigenvalues (lambda is diag(sigma))
};

NtScaling nt_scaling(const MatrixXd& S, const MatrixXd& Z) {
  NtScaling nt;
  Eigen::LLT<MatrixXd> lltS(S), lltZ(Z);
  if (lltS.info() != Eigen::Success || lltZ.info() != Eigen::Success)
    throw std::runtime_error("sdp: iterate left the cone");
  const MatrixXd Lx = lltS.matrixL();
  const MatrixXd Lz = lltZ.matrixL();
  Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Lx,
                                 Eigen::ComputeFullU | Eigen::ComputeFullV);
  nt.sigma = svd.singularValues();
  const VectorXd si = nt.sigma.cwiseSqrt().cwiseInverse();
  nt.R = Lx * svd.matrixV() * si.asDiagonal();
  // Rinv = sqrt(sigma) V' Lx^{-1}
  MatrixXd LxInv = MatrixXd::Identity(S.rows(), S.cols());
  Lx.triangularView<Eigen::Lower>().solveInPlace(LxInv);
  nt.Rinv = nt.sigma.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * LxInv;
  nt.W = nt.R * nt.R.transpose();
  return nt;
}

struct Presolved {
  Layout layout;
  std::vector<SolverRow> rows;       // kept, scaled, independent
  Eigen::LLT<MatrixXd> gram_llt;     // Gram of kept rows
  bool inconsistent = false;
  std::string detail;
};

}  // namespace

static Presolved presolve(const SdpProblem& p, const SolverOptions& opts) {
  Presolved out;
  Layout& L = out.layout;

  for (const auto& mv : p.matrix_vars()) {
    if (mv.dim > opts.max_block_dim) {
      std::ostringstream os;
      os << "sdp: Gram block '" << mv.name << "' has dimension " << mv.dim
         << " > " << opts.max_block_dim << "; reduce the polynomial degrees d1/d2";
      throw std::invalid_argument(os.str());
    }
  }

  L.locs.resize(p.num_vars());
  for (size_t h = 0; h < p.matrix_vars().size(); ++h) {
    const auto& mv = p.matrix_vars()[h];
    L.block_dims.push_back(mv.dim);
    for (int j = 0; j < mv.dim; ++j)
      for (int i = 0; i <= j; ++i)
        L.locs[mv.first_id + j * (j + 1) / 2 + i] = {int(h), i, j, -1};
  }
  for (int id : p.scalar_vars()) L.locs[id] = {-1, 0, 0, L.n_free++};

  std::vector<SolverRow> rows;
  const auto push_row = [&](const LinExpr& e, double rhs, int slack_blk) {
    SolverRow r;
    r.rhs = rhs - e.constant();
    for (const auto& [id, v] : e.terms()) {
      const auto& loc = L.locs[id];
      if (loc.free_slot >= 0) r.free_terms.push_back({loc.free_slot, v});
      else r.mat.push_back({loc.blk, loc.i, loc.j, v});
    }
    if (slack_blk >= 0) r.mat.push_back({slack_blk, 0, 0, 1.0});
    std::sort(r.mat.begin(), r.mat.end(), [](const BlockCoef& a, const BlockCoef& b) {
      return std::tie(a.blk, a.i, a.j) < std::tie(b.blk, b.i, b.j);
    });
    std::sort(r.free_terms.begin(), r.free_terms.end());
    double nrm = 0.0;
    for (const auto& c : r.mat) nrm = std::max(nrm, std::fabs(c.v));
    for (const auto& f : r.free_terms) nrm = std::max(nrm, std::fabs(f.second));
    if (nrm == 0.0) {
      if (std::fabs(r.rhs) > 1e-9) {
        out.inconsistent = true;
        out.detail = "constant equality with nonzero right-hand side";
      }
      return;
    }
    const double inv = 1.0 / nrm;
    for (auto& c : r.mat) c.v *= inv;
    for (auto& f : r.free_terms) f.second *= inv;
    r.rhs *= inv;
    for (const auto& c : r.mat)
      if (c.i == c.j) r.trace += c.v;
    rows.push_back(std::move(r));
  };

  for (const auto& [e, rhs] : p.equalities()) push_row(e, rhs, -1);
  int slack_blk = static_cast<int>(p.matrix_vars().size());
  for (const auto& e : p.inequalities()) {
    L.block_dims.push_back(1);
    push_row(e, 0.0, slack_blk++);
  }
  if (out.inconsistent) return out;

  // Exact duplicate removal.
  {
    std::map<std::string, int> seen;
    std::vector<SolverRow> kept;
    for (auto& r : rows) {
      std::ostringstream os;
      for (const auto& c : r.mat) os << c.blk << ',' << c.i << ',' << c.j << ',' << c.v << ';';
      os << '|';
      for (const auto& f : r.free_terms) os << f.first << ',' << f.second << ';';
      os << '|' << r.rhs;
      if (seen.emplace(os.str(), 1).second) kept.push_back(std::move(r));
    }
    rows = std::move(kept);
  }

  // Rank reduction: pivoted Cholesky on the row Gram matrix.
  const int m = static_cast<int>(rows.size());
  MatrixXd G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) G(i, j) = G(j, i) = row_dot(rows[i], rows[j]);

  std::vector<int> selected;
  {
    VectorXd d = G.diagonal();
    const VectorXd d0 = d;
    std::vector<bool> used(m, false);
    MatrixXd Lfac(m, m);  // columns of the pivoted factor, selected order
    for (int step = 0; step < m; ++step) {
      int q = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i)
        if (!used[i] && d[i] > best) {
          best = d[i];
          q = i;
        }
      if (q < 0 || best <= 1e-13 * std::max(1.0, d0.maxCoeff())) break;
      used[q] = true;
      VectorXd col = G.col(q);
      for (size_t s = 0; s < selected.size(); ++s)
        col -= Lfac.col(s) * Lfac(q, s);
      col /= std::sqrt(best);
      Lfac.col(selected.size()) = col;
      for (int i = 0; i < m; ++i)
        if (!used[i]) d[i] = std::max(0.0, d[i] - col[i] * col[i]);
      selected.push_back(q);
    }
  }
  std::sort(selected.begin(), selected.end());

  std::vector<SolverRow> kept;
  kept.reserve(selected.size());
  for (int idx : selected) kept.push_back(rows[idx]);
  const int mk = static_cast<int>(kept.size());
  MatrixXd Gk(mk, mk);
  for (int i = 0; i < mk; ++i)
    for (int j = 0; j <= i; ++j) Gk(i, j) = Gk(j, i) = row_dot(kept[i], kept[j]);
  // Tiny ridge keeps the projection solve stable for nearly dependent rows.
  Gk.diagonal().array() += 1e-12 * std::max(1.0, Gk.diagonal().maxCoeff());
  out.gram_llt.compute(Gk);
  if (out.gram_llt.info() != Eigen::Success) {
    out.inconsistent = true;
    out.detail = "equality Gram factorization failed";
    return out;
  }
  out.rows = std::move(kept);
  return out;
}

SdpSolution solve(const SdpProblem& p, const SolverOptions& opts) {
  if (!opts.dump_sdpa_path.empty()) write_sdpa(p, opts.dump_sdpa_path);

  SdpSolution sol;
  sol.assignments.assign(p.num_vars(), 0.0);

  Presolved ps = presolve(p, opts);
  if (ps.inconsistent) {
    sol.status = SdpSolution::Status::kInfeasible;
    sol.detail = ps.detail;
    return sol;
  }
  const Layout& L = ps.layout;
  const auto& rows = ps.rows;
  const int m = static_cast<int>(rows.size());
  const int nb = static_cast<int>(L.block_dims.size());
  const int nf = L.n_free;  // user free scalars; t has index nf

  // Adds the min-norm least-squares correction for the kept equalities.
  const auto project = [&](std::vector<MatrixXd>& X, VectorXd& u) {
    VectorXd r(m);
    for (int k = 0; k < m; ++k) r[k] = rows[k].rhs - apply_row(rows[k], X, u);
    const VectorXd z = ps.gram_llt.solve(r);
    for (int k = 0; k < m; ++k) {
      const double zk = z[k];
      if (zk == 0.0) continue;
      for (const auto& c : rows[k].mat) {
        if (c.i == c.j) X[c.blk](c.i, c.i) += zk * c.v;
        else {
          X[c.blk](c.i, c.j) += 0.5 * zk * c.v;
          X[c.blk](c.j, c.i) += 0.5 * zk * c.v;
        }
      }
      for (const auto& [slot, v] : rows[k].free_terms) u[slot] += zk * v;
    }
  };

  const auto fill_solution = [&](const std::vector<MatrixXd>& X, const VectorXd& u) {
    for (size_t h = 0; h < p.matrix_vars().size(); ++h) {
      const auto& mv = p.matrix_vars()[h];
      for (int j = 0; j < mv.dim; ++j)
        for (int i = 0; i <= j; ++i)
          sol.assignments[mv.first_id + j * (j + 1) / 2 + i] = X[h](i, j);
    }
    for (size_t k = 0; k < p.scalar_vars().size(); ++k)
      sol.assignments[p.scalar_vars()[k]] = u[k];
    double maxres = 0.0;
    for (const auto& [e, rhs] : p.equalities())
      maxres = std::max(maxres, std::fabs(sol.eval(e) - rhs));
    sol.max_eq_residual = maxres;
    double mineig = std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(p.matrix_vars().size()); ++j) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(X[j], Eigen::EigenvaluesOnly);
      mineig = std::min(mineig, es.eigenvalues().minCoeff());
    }
    for (int j = static_cast<int>(p.matrix_vars().size()); j < nb; ++j)
      mineig = std::min(mineig, X[j](0, 0));
    for (const auto& e : p.inequalities()) mineig = std::min(mineig, -sol.eval(e));
    sol.min_psd_eig = std::isfinite(mineig) ? mineig : 0.0;
  };

  // Initial point: min-norm solution of the equalities, shifted into the cone.
  std::vector<MatrixXd> X(nb), Z(nb);
  for (int j = 0; j < nb; ++j) X[j] = MatrixXd::Zero(L.block_dims[j], L.block_dims[j]);
  VectorXd u = VectorXd::Zero(nf);
  project(X, u);

  {  // consistency of the full system at the least-squares point
    double res = 0.0;
    for (const auto& [e, rhs] : p.equalities()) {
      double v = e.constant();
      for (const auto& [id, c] : e.terms()) {
        const auto& loc = L.locs[id];
        v += c * (loc.free_slot >= 0 ? u[loc.free_slot] : X[loc.blk](loc.i, loc.j));
      }
      res = std::max(res, std::fabs(v - rhs));
    }
    if (res > 1e-6) {
      sol.status = SdpSolution::Status::kInfeasible;
      std::ostringstream os;
      os << "equalities inconsistent (least-squares residual " << res << ")";
      sol.detail = os.str();
      fill_solution(X, u);
      return sol;
    }
  }

  double t = 1.0;
  for (int j = 0; j < nb; ++j) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(X[j], Eigen::EigenvaluesOnly);
    t = std::max(t, -1.2 * es.eigenvalues().minCoeff() + 0.5);
  }
  std::vector<MatrixXd> S(nb);
  int total_dim = 0;
  for (int j = 0; j < nb; ++j) {
    S[j] = X[j] + t * MatrixXd::Identity(L.block_dims[j], L.block_dims[j]);
    Z[j] = MatrixXd::Identity(L.block_dims[j], L.block_dims[j]);
    total_dim += L.block_dims[j];
  }
  VectorXd y = VectorXd::Zero(m);

  VectorXd bvec(m);
  for (int k = 0; k < m; ++k) bvec[k] = rows[k].rhs;
  const double bnorm = m ? bvec.cwiseAbs().maxCoeff() : 0.0;

  // Free-column matrix: user scalars then the phase-1 variable t.
  MatrixXd B = MatrixXd::Zero(m, nf + 1);
  for (int k = 0; k < m; ++k) {
    for (const auto& [slot, v] : rows[k].free_terms) B(k, slot) = v;
    B(k, nf) = -rows[k].trace;
  }
  VectorXd c = VectorXd::Zero(nf + 1);
  c[nf] = 1.0;

  // Rows grouped by block for Schur assembly.
  std::vector<std::vector<int>> rows_of_block(nb);
  for (int k = 0; k < m; ++k) {
    int last = -1;
    for (const auto& bc : rows[k].mat)
      if (bc.blk != last) {
        rows_of_block[bc.blk].push_back(k);
        last = bc.blk;
      }
  }

  const auto try_extract = [&]() -> bool {
    std::vector<MatrixXd> Xc(nb);
    for (int j = 0; j < nb; ++j)
      Xc[j] = S[j] - t * MatrixXd::Identity(L.block_dims[j], L.block_dims[j]);
    VectorXd uc = u;
    project(Xc, uc);
    for (int j = 0; j < nb; ++j) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(Xc[j], Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -opts.psd_tol) return false;
    }
    fill_solution(Xc, uc);
    if (sol.max_eq_residual > opts.eq_tol) return false;
    sol.status = SdpSolution::Status::kFeasible;
    sol.phase1_margin = t;
    return true;
  };

  std::vector<MatrixXd> Rd(nb), Rc(nb), dS(nb), dZ(nb), dSa(nb), dZa(nb);
  double mu_prev = std::numeric_limits<double>::infinity();
  int stall = 0;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    sol.iterations = iter;

    // Residuals.
    VectorXd ut(nf + 1);
    ut.head(nf) = u;
    ut[nf] = t;
    VectorXd rp = bvec;
    for (int k = 0; k < m; ++k) rp[k] -= apply_row(rows[k], S, u) - rows[k].trace * t;
    double rd_norm = 0.0;
    for (int j = 0; j < nb; ++j) {
      Rd[j] = -Z[j];
      for (int k : rows_of_block[j]) add_block_matrix(rows[k], j, -y[k], Rd[j]);
      rd_norm = std::max(rd_norm, Rd[j].cwiseAbs().maxCoeff());
    }
    VectorXd rg = c - B.transpose() * y;
    double mu = 0.0;
    for (int j = 0; j < nb; ++j) mu += (S[j].array() * Z[j].array()).sum();
    mu /= total_dim;

    const double relp = rp.cwiseAbs().maxCoeff() / (1.0 + bnorm);
    const double dobj = bvec.dot(y);

    // Primal certificate: t negative and the shifted point verifies.
    if (t < -10.0 * opts.feas_margin && relp < 1e-8) {
      if (try_extract()) {
        std::ostringstream os;
        os << "phase-1 margin " << t << " after " << iter << " iterations";
        sol.detail = os.str();
        return sol;
      }
    }
    // Dual certificate: t* >= b'y > 0 for any dual-feasible y.
    if (rd_norm < 1e-9 * (1.0 + std::fabs(dobj)) &&
        rg.cwiseAbs().maxCoeff() < 1e-9 && dobj > opts.feas_margin) {
      sol.status = SdpSolution::Status::kInfeasible;
      std::ostringstream os;
      os << "phase-1 optimum bounded below by " << dobj << " after " << iter
         << " iterations";
      sol.detail = os.str();
      sol.phase1_margin = dobj;
      fill_solution(X, u);
      return sol;
    }
    // Converged to a boundary value of the phase-1 problem.
    const double relgap = std::fabs(t - dobj) / (1.0 + std::fabs(t) + std::fabs(dobj));
    if (relp < opts.convergence_tol && rd_norm < opts.convergence_tol &&
        rg.cwiseAbs().maxCoeff() < opts.convergence_tol && relgap < 1e-7) {
      if (t < -opts.feas_margin && try_extract()) return sol;
      sol.status = SdpSolution::Status::kInaccurate;
      std::ostringstream os;
      os << "phase-1 optimum " << t << " within margin " << opts.feas_margin;
      sol.detail = os.str();
      sol.phase1_margin = t;
      fill_solution(X, u);
      return sol;
    }
    if (mu > 0.9999 * mu_prev) ++stall;
    else stall = 0;
    mu_prev = mu;
    if (stall > 20) break;

    // NT scalings and Schur complement.
    std::vector<NtScaling> nt(nb);
    for (int j = 0; j < nb; ++j) nt[j] = nt_scaling(S[j], Z[j]);

    MatrixXd M = MatrixXd::Zero(m, m);
    for (int j = 0; j < nb; ++j) {
      const auto& rj = rows_of_block[j];
      const int n = L.block_dims[j];
      for (size_t a = 0; a < rj.size(); ++a) {
        const int l = rj[a];
        MatrixXd Al = MatrixXd::Zero(n, n);
        add_block_matrix(rows[l], j, 1.0, Al);
        const MatrixXd T = nt[j].W * Al * nt[j].W;
        for (size_t bidx = a; bidx < rj.size(); ++bidx) {
          const int k = rj[bidx];
          M(k, l) += block_inner(rows[k], j, T);
        }
      }
    }
    M = M.selfadjointView<Eigen::Lower>();

    const int dim_kkt = m + nf + 1;
    MatrixXd KKT = MatrixXd::Zero(dim_kkt, dim_kkt);
    KKT.topLeftCorner(m, m) = M;
    KKT.topRightCorner(m, nf + 1) = B;
    KKT.bottomLeftCorner(nf + 1, m) = B.transpose();
    const double reg = 1e-11 * std::max(1.0, M.diagonal().maxCoeff());
    KKT.topLeftCorner(m, m).diagonal().array() += reg;
    KKT.bottomRightCorner(nf + 1, nf + 1).diagonal().array() -= reg;
    Eigen::PartialPivLU<MatrixXd> kkt_lu(KKT);

    const auto solve_direction =
        [&](const std::vector<MatrixXd>& RcIn, std::vector<MatrixXd>& dSout,
            std::vector<MatrixXd>& dZout, VectorXd& dy, VectorXd& du) {
          VectorXd h = rp;
          for (int j = 0; j < nb; ++j) {
            const MatrixXd T = RcIn[j] - nt[j].W * Rd[j] * nt[j].W;
            for (int k : rows_of_block[j]) h[k] -= block_inner(rows[k], j, T);
          }
          VectorXd rhs(dim_kkt);
          rhs.head(m) = h;
          rhs.tail(nf + 1) = rg;
          VectorXd d = kkt_lu.solve(rhs);
          dy = d.head(m);
          du = d.tail(nf + 1);
          for (int j = 0; j < nb; ++j) {
            dZout[j] = Rd[j];
            for (int k : rows_of_block[j]) add_block_matrix(rows[k], j, -dy[k], dZout[j]);
            dSout[j] = RcIn[j] - nt[j].W * dZout[j] * nt[j].W;
          }
        };

    // Predictor.
    for (int j = 0; j < nb; ++j) Rc[j] = -S[j];
    VectorXd dy(m), du(nf + 1);
    solve_direction(Rc, dSa, dZa, dy, du);
    double ap = 1e16, ad = 1e16;
    for (int j = 0; j < nb; ++j) {
      ap = std::min(ap, max_step(S[j], dSa[j]));
      ad = std::min(ad, max_step(Z[j], dZa[j]));
    }
    ap = std::min(1.0, 0.98 * ap);
    ad = std::min(1.0, 0.98 * ad);
    double mu_aff = 0.0;
    for (int j = 0; j < nb; ++j)
      mu_aff += ((S[j] + ap * dSa[j]).array() * (Z[j] + ad * dZa[j]).array()).sum();
    mu_aff /= total_dim;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 1e-10, 0.99);

    // Corrector: centering plus the Mehrotra term in the scaled space where
    // lambda = diag(sigma_nt) and the Jordan inverse is entrywise.
    for (int j = 0; j < nb; ++j) {
      const int n = L.block_dims[j];
      const MatrixXd dSt = nt[j].Rinv * dSa[j] * nt[j].Rinv.transpose();
      const MatrixXd dZt = nt[j].R.transpose() * dZa[j] * nt[j].R;
      MatrixXd D = -0.5 * (dSt * dZt + dZt * dSt);
      D.diagonal().array() += sigma * mu;
      for (int r = 0; r < n; ++r)
        for (int cc = 0; cc < n; ++cc)
          D(r, cc) *= 2.0 / (nt[j].sigma[r] + nt[j].sigma[cc]);
      Rc[j] = nt[j].R * D * nt[j].R.transpose() - S[j];
    }
    solve_direction(Rc, dS, dZ, dy, du);
    ap = 1e16;
    ad = 1e16;
    for (int j = 0; j < nb; ++j) {
      ap = std::min(ap, max_step(S[j], dS[j]));
      ad = std::min(ad, max_step(Z[j], dZ[j]));
    }
    ap = std::min(1.0, 0.98 * ap);
    ad = std::min(1.0, 0.98 * ad);

    for (int j = 0; j < nb; ++j) {
      S[j] += ap * dS[j];
      Z[j] += ad * dZ[j];
      S[j] = 0.5 * (S[j] + S[j].transpose()).eval();
      Z[j] = 0.5 * (Z[j] + Z[j].transpose()).eval();
    }
    u += ap * du.head(nf);
    t += ap * du[nf];
    y += ad * dy;
  }

  // Iteration budget exhausted.
  if (t < -10.0 * opts.feas_margin && try_extract()) {
    sol.detail = "feasible after projection at iteration limit";
    return sol;
  }
  sol.status = SdpSolution::Status::kInaccurate;
  std::ostringstream os;
  os << "no certificate within " << opts.max_iterations
     << " iterations (phase-1 value " << t << ")";
  sol.detail = os.str();
  sol.phase1_margin = t;
  for (int j = 0; j < nb; ++j)
    X[j] = S[j] - t * MatrixXd::Identity(L.block_dims[j], L.block_dims[j]);
  fill_solution(X, u);
  return sol;
}

}  // namespace parasos
