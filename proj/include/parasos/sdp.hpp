#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "parasos/linexpr.hpp"

namespace parasos {

// Semidefinite feasibility problems: symmetric matrix variables (optionally
// with a constant PSD shift, i.e. the declared variable P satisfies
// P - shift >= 0), free scalar variables, linear equalities and scalar
// affine inequalities. Entries are addressed through LinExpr handles so the
// modelling layers stay agnostic of variable numbering.
class SdpProblem {
 public:
  struct MatrixVar {
    std::string name;
    int dim = 0;
    int first_id = 0;  // variable id of entry (0,0)
    Eigen::MatrixXd shift;  // dim x dim constant, may be empty (= zero)
  };

  // Declares a dim x dim symmetric PSD variable. If eps_shift != 0 the
  // declared variable P satisfies P - eps_shift * e1 e1^T >= 0.
  int add_matrix_var(const std::string& name, int dim, double eps_shift = 0.0);
  int add_scalar_var(const std::string& name);

  // Affine handle for entry (i, j) of matrix var h, shift included.
  LinExpr entry(int h, int i, int j) const;
  LinExpr scalar(int var_id) const { return LinExpr::variable(var_id); }

  void add_equality(const LinExpr& expr, double rhs = 0.0);
  void add_inequality(const LinExpr& expr);  // expr <= 0

  const std::vector<MatrixVar>& matrix_vars() const { return mats_; }
  const std::vector<int>& scalar_vars() const { return scalars_; }
  const std::vector<std::pair<LinExpr, double>>& equalities() const { return eqs_; }
  const std::vector<LinExpr>& inequalities() const { return ineqs_; }
  int num_vars() const { return next_id_; }

  static int tri_size(int dim) { return dim * (dim + 1) / 2; }

 private:
  std::vector<MatrixVar> mats_;
  std::vector<int> scalars_;
  std::vector<std::pair<LinExpr, double>> eqs_;
  std::vector<LinExpr> ineqs_;
  int next_id_ = 0;
};

struct SdpSolution {
  enum class Status { kFeasible, kInfeasible, kInaccurate };
  Status status = Status::kInaccurate;
  std::vector<double> assignments;  // value per variable id
  double max_eq_residual = 0.0;
  double min_psd_eig = 0.0;  // over the shifted variables, i.e. P - shift
  int iterations = 0;
  double phase1_margin = 0.0;  // optimal/last value of the feasibility slack
  std::string detail;

  bool feasible() const { return status == Status::kFeasible; }
  double eval(const LinExpr& e) const {
    double v = e.constant();
    for (const auto& [id, c] : e.terms()) v += c * assignments[id];
    return v;
  }
  // Value of matrix var h (shift included).
  Eigen::MatrixXd matrix_value(const SdpProblem& p, int h) const;
};

struct SolverOptions {
  int max_iterations = 200;
  double eq_tol = 1e-7;        // feasible point contract
  double psd_tol = 1e-9;       // accepted eigenvalue slack (after shift)
  double convergence_tol = 1e-9;
  double feas_margin = 1e-7;   // |phase-1 optimum| below this => inaccurate
  int max_block_dim = 2000;
  std::string dump_sdpa_path;  // when set, write the problem before solving
};

SdpSolution solve(const SdpProblem& p, const SolverOptions& opts = {});

// Largest v in [lo, hi] with builder(v) feasible, assuming the down-set
// property (feasible at v implies feasible below v). "inaccurate" counts as
// infeasible. Throws if builder(lo) is infeasible.
double max_feasible_scalar(const std::function<SdpProblem(double)>& builder,
                           double lo, double hi, double tol,
                           const SolverOptions& opts = {});

// Largest value of a declared scalar variable for which the problem stays
// feasible; bisection on var >= v.
double maximize_scalar(const SdpProblem& p, int var_id, double lo, double hi,
                       double tol, const SolverOptions& opts = {});

// Sparse SDPA (.dat-s) export of the feasibility problem for cross-checking
// with external solvers.
void write_sdpa(const SdpProblem& p, const std::string& path);

}  // namespace parasos
