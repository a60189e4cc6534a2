#include "parasos/sdp.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace parasos {

int SdpProblem::add_matrix_var(const std::string& name, int dim, double eps_shift) {
  if (dim <= 0) throw std::invalid_argument("add_matrix_var: dim must be positive");
  MatrixVar mv;
  mv.name = name;
  mv.dim = dim;
  mv.first_id = next_id_;
  if (eps_shift != 0.0) {
    mv.shift = Eigen::MatrixXd::Zero(dim, dim);
    mv.shift(0, 0) = eps_shift;
  }
  next_id_ += tri_size(dim);
  mats_.push_back(std::move(mv));
  return static_cast<int>(mats_.size()) - 1;
}

int SdpProblem::add_scalar_var(const std::string& name) {
  (void)name;
  scalars_.push_back(next_id_);
  return next_id_++;
}

LinExpr SdpProblem::entry(int h, int i, int j) const {
  const MatrixVar& mv = mats_.at(h);
  if (i < 0 || j < 0 || i >= mv.dim || j >= mv.dim)
    throw std::out_of_range("SdpProblem::entry: index out of range");
  if (i > j) std::swap(i, j);
  const int offset = j * (j + 1) / 2 + i;
  LinExpr e = LinExpr::variable(mv.first_id + offset);
  if (mv.shift.size() > 0 && mv.shift(i, j) != 0.0) e += LinExpr(mv.shift(i, j));
  return e;
}

void SdpProblem::add_equality(const LinExpr& expr, double rhs) {
  eqs_.emplace_back(expr, rhs);
}

void SdpProblem::add_inequality(const LinExpr& expr) { ineqs_.push_back(expr); }

Eigen::MatrixXd SdpSolution::matrix_value(const SdpProblem& p, int h) const {
  const auto& mv = p.matrix_vars().at(h);
  Eigen::MatrixXd M(mv.dim, mv.dim);
  for (int j = 0; j < mv.dim; ++j)
    for (int i = 0; i <= j; ++i) {
      const int offset = j * (j + 1) / 2 + i;
      double v = assignments[mv.first_id + offset];
      if (mv.shift.size() > 0) v += mv.shift(i, j);
      M(i, j) = M(j, i) = v;
    }
  return M;
}

double max_feasible_scalar(const std::function<SdpProblem(double)>& builder,
                           double lo, double hi, double tol,
                           const SolverOptions& opts) {
  if (tol <= 0.0) throw std::invalid_argument("max_feasible_scalar: tol must be positive");
  if (!solve(builder(lo), opts).feasible())
    throw std::runtime_error("max_feasible_scalar: lower bracket infeasible");
  if (solve(builder(hi), opts).feasible()) return hi;  // saturated bracket
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (solve(builder(mid), opts).feasible()) lo = mid;
    else hi = mid;
    if (!(lo < hi)) throw std::logic_error("max_feasible_scalar: bracket collapsed");
  }
  return lo;
}

double maximize_scalar(const SdpProblem& p, int var_id, double lo, double hi,
                       double tol, const SolverOptions& opts) {
  auto builder = [&](double v) {
    SdpProblem q = p;
    q.add_inequality(LinExpr(v) - LinExpr::variable(var_id));  // var >= v
    return q;
  };
  return max_feasible_scalar(builder, lo, hi, tol, opts);
}

namespace {

// Assembles the row in block-symmetric form: entry coefficient gamma on the
// packed (i<=j) variable becomes A_ij = A_ji = gamma/2 off-diagonal so that
// <A, X>_F reproduces the LinExpr value.
struct BlockEntry {
  int block, i, j;
  double value;
};

}  // namespace

void write_sdpa(const SdpProblem& p, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_sdpa: cannot open " + path);

  const auto& mats = p.matrix_vars();
  const int nfree = static_cast<int>(p.scalar_vars().size());
  const int nineq = static_cast<int>(p.inequalities().size());
  // block list: matrix vars, one 1x1 slack per inequality, two 1x1 blocks per
  // free scalar (x = x+ - x-).
  std::vector<int> block_dims;
  for (const auto& mv : mats) block_dims.push_back(mv.dim);
  for (int i = 0; i < nineq; ++i) block_dims.push_back(1);
  for (int i = 0; i < 2 * nfree; ++i) block_dims.push_back(1);

  // variable id -> (block, i, j) for matrix entries
  struct Loc { int block, i, j; };
  std::vector<Loc> locs(p.num_vars(), Loc{-1, 0, 0});
  for (size_t h = 0; h < mats.size(); ++h) {
    const auto& mv = mats[h];
    for (int j = 0; j < mv.dim; ++j)
      for (int i = 0; i <= j; ++i)
        locs[mv.first_id + j * (j + 1) / 2 + i] = Loc{static_cast<int>(h), i, j};
  }
  std::vector<int> free_slot(p.num_vars(), -1);
  for (size_t k = 0; k < p.scalar_vars().size(); ++k)
    free_slot[p.scalar_vars()[k]] = static_cast<int>(k);

  const int mdim = static_cast<int>(p.equalities().size() + p.inequalities().size());
  os << mdim << "\n" << block_dims.size() << "\n";
  for (size_t i = 0; i < block_dims.size(); ++i) os << block_dims[i] << (i + 1 < block_dims.size() ? " " : "\n");

  const auto emit_row = [&](int k, const LinExpr& e, double rhs, int slack_block) {
    (void)rhs;
    for (const auto& [id, coeff] : e.terms()) {
      if (free_slot[id] >= 0) {
        const int base = static_cast<int>(mats.size()) + nineq + 2 * free_slot[id];
        os << k << " " << base + 1 << " 1 1 " << coeff << "\n";
        os << k << " " << base + 2 << " 1 1 " << -coeff << "\n";
        continue;
      }
      const Loc& l = locs[id];
      const double v = (l.i == l.j) ? coeff : 0.5 * coeff;
      os << k << " " << l.block + 1 << " " << l.i + 1 << " " << l.j + 1 << " " << v << "\n";
    }
    if (slack_block >= 0) os << k << " " << slack_block + 1 << " 1 1 1\n";
  };

  // rhs vector: shift constants move to the right-hand side
  for (size_t k = 0; k < p.equalities().size(); ++k) {
    const auto& [e, rhs] = p.equalities()[k];
    os << (rhs - e.constant()) << " ";
  }
  for (const auto& e : p.inequalities()) os << -e.constant() << " ";
  os << "\n";

  int k = 1;
  for (const auto& [e, rhs] : p.equalities()) emit_row(k++, e, rhs, -1);
  for (size_t q = 0; q < p.inequalities().size(); ++q)
    emit_row(k++, p.inequalities()[q], 0.0, static_cast<int>(mats.size() + q));
}

}  // namespace parasos
