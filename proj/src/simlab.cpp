#include "parasos/simlab.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace parasos {

double Discretization::state_norm(const Eigen::VectorXd& w, double boundary) const {
  double s = trap_boundary * boundary * boundary;
  for (int i = 0; i < m; ++i) s += trap[i] * w[i] * w[i];
  return std::sqrt(std::max(0.0, s));
}

Discretization discretize(const PdeModel& model, int m, GridKind grid, BcMode bc,
                          double log_decades) {
  if (m < 8) throw std::invalid_argument("discretize: need m >= 8");
  Discretization d;
  d.model = model;
  d.m = m;
  d.grid = grid;
  d.bc = bc;
  d.nodes.resize(m);
  if (grid == GridKind::kUniform) {
    const double h = 1.0 / (m + 1);
    for (int i = 0; i < m; ++i) d.nodes[i] = (i + 1) * h;
  } else {
    for (int i = 0; i < m; ++i)
      d.nodes[i] = std::pow(10.0, -log_decades + log_decades * double(i) / (m));
  }

  // one-sided second-order differentiation weights for w_x(1) on
  // (1, x_m, x_{m-1})
  {
    const double z0 = 1.0, z1 = d.nodes[m - 1], z2 = d.nodes[m - 2];
    d.flux_d0 = 1.0 / (z0 - z1) + 1.0 / (z0 - z2);
    d.flux_d1 = (z0 - z2) / ((z1 - z0) * (z1 - z2));
    d.flux_d2 = (z0 - z1) / ((z2 - z0) * (z2 - z1));
  }

  d.A0 = Eigen::MatrixXd::Zero(m, m);
  d.svec = Eigen::VectorXd::Zero(m);
  const Poly1 c = model.c();
  for (int i = 0; i < m; ++i) {
    const double x = d.nodes[i];
    const double xm = (i == 0) ? 0.0 : d.nodes[i - 1];
    const double xp = (i == m - 1) ? 1.0 : d.nodes[i + 1];
    const double h1 = x - xm, h2 = xp - x;
    const double ai = model.a.eval(x), bi = model.b.eval(x), ci = c.eval(x);
    // second derivative: nonuniform three-point stencil
    const double wl = 2.0 / (h1 * (h1 + h2));
    const double wc = -2.0 / (h1 * h2);
    const double wr = 2.0 / (h2 * (h1 + h2));
    // first derivative: second-order nonuniform central weights
    const double dl = -h2 / (h1 * (h1 + h2));
    const double dc = (h2 - h1) / (h1 * h2);
    const double dr = h1 / (h2 * (h1 + h2));

    d.A0(i, i) += ai * wc + bi * dc + ci;
    if (i > 0) d.A0(i, i - 1) += ai * wl + bi * dl;
    if (i < m - 1) d.A0(i, i + 1) += ai * wr + bi * dr;
    else d.svec[i] += ai * wr + bi * dr;
  }

  // autonomous closure: w(1) = -(flux_d1 w_m + flux_d2 w_{m-1}) / flux_d0
  d.A = d.A0;
  d.A.col(m - 1) -= d.svec * (d.flux_d1 / d.flux_d0);
  d.A.col(m - 2) -= d.svec * (d.flux_d2 / d.flux_d0);
  d.Bvec = d.svec / d.flux_d0;

  d.trap.resize(m);
  for (int i = 0; i < m; ++i) {
    const double xm = (i == 0) ? 0.0 : d.nodes[i - 1];
    const double xp = (i == m - 1) ? 1.0 : d.nodes[i + 1];
    d.trap[i] = 0.5 * (xp - xm);
  }
  d.trap_boundary = 0.5 * (1.0 - d.nodes[m - 1]);
  return d;
}

StateFeedback sample_state_feedback(const Discretization& d, double R1,
                                    const std::function<double(double)>& R2) {
  StateFeedback fb;
  fb.R1 = R1;
  fb.R2_nodes.resize(d.m);
  for (int i = 0; i < d.m; ++i) fb.R2_nodes[i] = R2(d.nodes[i]);
  fb.R2_at_1 = R2(1.0);
  return fb;
}

StateFeedback sample_state_feedback(const Discretization& d, double R1, const Poly1& R2) {
  return sample_state_feedback(d, R1, [&](double x) { return R2.eval(x); });
}

OutputFeedback sample_output_feedback(const Discretization& d, double R1, const Poly1& R2,
                                      const Poly1& L1, double L2) {
  OutputFeedback ofb;
  ofb.fb = sample_state_feedback(d, R1, R2);
  ofb.L1_nodes.resize(d.m);
  for (int i = 0; i < d.m; ++i) ofb.L1_nodes[i] = L1.eval(d.nodes[i]);
  ofb.L2 = L2;
  return ofb;
}

Eigen::VectorXd sample_profile(const Discretization& d, const std::function<double(double)>& w0) {
  Eigen::VectorXd v(d.m);
  for (int i = 0; i < d.m; ++i) v[i] = w0(d.nodes[i]);
  return v;
}

namespace {

// Crank-Nicolson stepping of x' = M x, recording everything through callbacks.
// observer_boundary_of is null for uncoupled runs.
Trajectory run_cn(const Discretization& d, const Eigen::MatrixXd& M,
                  const Eigen::VectorXd& x0, double T, double dt,
                  const std::function<double(const Eigen::VectorXd&)>& input_of,
                  const std::function<double(const Eigen::VectorXd&)>& boundary_of,
                  const std::function<double(const Eigen::VectorXd&)>& observer_boundary_of) {
  const int n = static_cast<int>(M.rows());
  const int steps = static_cast<int>(std::llround(T / dt));
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - 0.5 * dt * M;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(n, n) + 0.5 * dt * M;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);

  Trajectory tr;
  tr.nodes = d.nodes;
  tr.times.reserve(steps + 1);
  Eigen::VectorXd x = x0;
  for (int k = 0; k <= steps; ++k) {
    if (k > 0) x = lu.solve(rhs * x);
    tr.times.push_back(k * dt);
    const double u = input_of(x);
    const double bv = boundary_of(x);
    const Eigen::VectorXd w = x.head(d.m);
    tr.states.push_back(w);
    tr.inputs.push_back(u);
    tr.boundary_values.push_back(bv);
    tr.norms.push_back(d.state_norm(w, bv));
    if (observer_boundary_of) {
      const Eigen::VectorXd what = x.tail(d.m);
      tr.observer_states.push_back(what);
      const Eigen::VectorXd e = what - w;
      tr.observer_error_norms.push_back(d.state_norm(e, observer_boundary_of(x) - bv));
    }
  }
  return tr;
}

}  // namespace

Trajectory simulate(const Discretization& d, const Eigen::VectorXd& w0, double T, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("simulate: dt must be positive");
  const auto input = [](const Eigen::VectorXd&) { return 0.0; };
  const auto boundary = [&](const Eigen::VectorXd& w) { return d.boundary_value(w, 0.0); };
  return run_cn(d, d.A, w0, T, dt, input, boundary, nullptr);
}

Trajectory simulate(const Discretization& d, const StateFeedback& fb,
                    const Eigen::VectorXd& w0, double T, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("simulate: dt must be positive");
  const int m = d.m;
  // u = (R1 + qV) w(1) + q'w with w(1) = (u - d1 w_m - d2 w_{m-1})/d0
  Eigen::VectorXd q = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) q[i] = d.trap[i] * fb.R2_nodes[i];
  const double qV = d.trap_boundary * fb.R2_at_1;
  const double r = fb.R1 + qV;
  const double denom = 1.0 - r / d.flux_d0;
  if (std::fabs(denom) < 1e-10)
    throw std::runtime_error("simulate: boundary feedback is singular at this grid size");
  Eigen::VectorXd krow = q;
  krow[m - 1] -= r * d.flux_d1 / d.flux_d0;
  krow[m - 2] -= r * d.flux_d2 / d.flux_d0;
  krow /= denom;  // u = krow' w

  Eigen::VectorXd vrow = krow / d.flux_d0;  // w(1) = vrow' w
  vrow[m - 1] -= d.flux_d1 / d.flux_d0;
  vrow[m - 2] -= d.flux_d2 / d.flux_d0;

  Eigen::MatrixXd M = d.A0 + d.svec * vrow.transpose();
  const auto input = [=](const Eigen::VectorXd& w) { return krow.dot(w); };
  const auto boundary = [=](const Eigen::VectorXd& w) { return vrow.dot(w); };
  return run_cn(d, M, w0, T, dt, input, boundary, nullptr);
}

Trajectory simulate(const Discretization& d, const OutputFeedback& ofb,
                    const Eigen::VectorXd& w0, double T, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("simulate: dt must be positive");
  const int m = d.m;
  // unknowns (V, Vhat, u) given the stacked state [w; what]:
  //   d0 V               = u - d1 w_m - d2 w_{m-1}
  //   d0 Vhat            = u + L2 (Vhat - V) - d1 what_m - d2 what_{m-1}
  //   u                  = (R1 + qV) Vhat + q' what
  Eigen::VectorXd q = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) q[i] = d.trap[i] * ofb.fb.R2_nodes[i];
  const double qV = d.trap_boundary * ofb.fb.R2_at_1;
  const double r = ofb.fb.R1 + qV;

  Eigen::Matrix3d S;
  S << d.flux_d0, 0.0, -1.0,
       ofb.L2, d.flux_d0 - ofb.L2, -1.0,
       0.0, -r, 1.0;
  Eigen::Matrix<double, 3, Eigen::Dynamic> rhs(3, 2 * m);
  rhs.setZero();
  rhs(0, m - 1) = -d.flux_d1;
  rhs(0, m - 2) = -d.flux_d2;
  rhs(1, m + m - 1) = -d.flux_d1;
  rhs(1, m + m - 2) = -d.flux_d2;
  for (int i = 0; i < m; ++i) rhs(2, m + i) = q[i];
  const Eigen::Matrix<double, 3, Eigen::Dynamic> sol = S.partialPivLu().solve(rhs);
  const Eigen::VectorXd vrow = sol.row(0);     // V
  const Eigen::VectorXd vhrow = sol.row(1);    // Vhat
  const Eigen::VectorXd urow = sol.row(2);     // u

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  M.topLeftCorner(m, m) = d.A0;
  M.bottomRightCorner(m, m) = d.A0;
  M.topRows(m) += d.svec * vrow.transpose();
  M.bottomRows(m) += d.svec * vhrow.transpose();
  Eigen::VectorXd l1 = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) l1[i] = ofb.L1_nodes[i];
  M.bottomRows(m) += l1 * (vhrow - vrow).transpose();

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2 * m);
  x0.head(m) = w0;  // observer starts at the zero profile

  const auto input = [=](const Eigen::VectorXd& x) { return urow.dot(x); };
  const auto boundary = [=](const Eigen::VectorXd& x) { return vrow.dot(x); };
  const auto obs_boundary = [=](const Eigen::VectorXd& x) { return vhrow.dot(x); };
  return run_cn(d, M, x0, T, dt, input, boundary, obs_boundary);
}

double estimate_decay_rate(const Trajectory& t, double window_fraction) {
  const size_t n = t.norms.size();
  if (n < 4) throw std::invalid_argument("estimate_decay_rate: trajectory too short");
  const size_t start = static_cast<size_t>(n * (1.0 - window_fraction));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t cnt = 0;
  for (size_t k = start; k < n; ++k) {
    if (t.norms[k] <= 1e-300) return std::numeric_limits<double>::infinity();
    const double x = t.times[k], y = std::log(t.norms[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  const double denom = cnt * sxx - sx * sx;
  if (denom <= 0.0) throw std::runtime_error("estimate_decay_rate: degenerate window");
  return -(cnt * sxy - sx * sy) / denom;
}

StabilityMarginResult empirical_stability_margin(const PdeModel& base, double lo, double hi,
                                                 double tol, int m, double T, double dt) {
  const auto rate_at = [&](double lambda) {
    const Discretization d = discretize(base.with_lambda(lambda), m);
    const Eigen::VectorXd w0 =
        sample_profile(d, [](double x) { return std::sin(0.5 * kPi * x); });
    return estimate_decay_rate(simulate(d, w0, T, dt));
  };
  if (!(rate_at(lo) > 0.0))
    throw std::invalid_argument("empirical_stability_margin: lower bracket is unstable");
  if (!(rate_at(hi) < 0.0))
    throw std::invalid_argument("empirical_stability_margin: upper bracket is stable");
  double a = lo, b = hi;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    (rate_at(mid) > 0.0 ? a : b) = mid;
  }
  StabilityMarginResult res;
  res.lo = a;
  res.hi = b;
  res.margin = 0.5 * (a + b);
  res.ambiguous = std::fabs(rate_at(res.margin)) < 1e-3 && b - a > tol;
  return res;
}

LyapunovCheckReport lyapunov_derivative_check(const XiCertificate& cert, const Trajectory& t,
                                              double rate, int stride) {
  LyapunovCheckReport rep;
  if (t.states.empty()) return rep;
  const int m = static_cast<int>(t.nodes.size());
  std::vector<double> trap(m);
  for (int i = 0; i < m; ++i) {
    const double xm = (i == 0) ? 0.0 : t.nodes[i - 1];
    const double xp = (i == m - 1) ? 1.0 : t.nodes[i + 1];
    trap[i] = 0.5 * (xp - xm);
  }
  const double trap_b = 0.5 * (1.0 - t.nodes[m - 1]);
  const auto& tr = cert.triple;

  // profile includes the x = 1 boundary value as a trailing virtual node
  const auto lyap = [&](const Eigen::VectorXd& w, double bv) {
    std::vector<double> xs(t.nodes);
    xs.push_back(1.0);
    std::vector<double> ws(w.data(), w.data() + m);
    ws.push_back(bv);
    std::vector<double> tw(trap);
    tw.push_back(trap_b);
    double V = 0.0;
    const int n = m + 1;
    for (int i = 0; i < n; ++i) {
      double inner = tr.M.eval(xs[i]) * ws[i];
      for (int j = 0; j < n; ++j) {
        const double k = (xs[j] < xs[i])   ? tr.K1.eval(xs[i], xs[j])
                         : (xs[j] > xs[i]) ? tr.K2.eval(xs[i], xs[j])
                                           : tr.K1.eval(xs[i], xs[i]);
        inner += tw[j] * k * ws[j];
      }
      V += tw[i] * ws[i] * inner;
    }
    return V;
  };

  std::vector<size_t> idx;
  for (size_t k = 0; k < t.states.size(); k += stride) idx.push_back(k);
  rep.values.reserve(idx.size());
  for (size_t k : idx) rep.values.push_back(lyap(t.states[k], t.boundary_values[k]));
  const double V0 = rep.values.front();
  for (size_t s = 1; s < idx.size(); ++s) {
    const double dtk = t.times[idx[s]] - t.times[idx[s - 1]];
    const double bound = rep.values[s - 1] * std::exp(-2.0 * rate * dtk) + 1e-6 * std::fabs(V0);
    const double viol = rep.values[s] - bound;
    if (viol > rep.worst_violation) {
      rep.worst_violation = viol;
      rep.worst_index = static_cast<int>(s);
      rep.pass = false;
    }
  }
  return rep;
}

double least_stable_eigenvalue(const Discretization& d) {
  const Eigen::EigenSolver<Eigen::MatrixXd> es(d.A);
  return es.eigenvalues().real().maxCoeff();
}

void trajectory_to_csv(const Trajectory& t, const std::string& path, int stride) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("trajectory_to_csv: cannot open " + path);
  os.precision(17);
  os << "t,0";
  for (double x : t.nodes) os << "," << x;
  os << ",1\n";
  for (size_t k = 0; k < t.states.size(); k += stride) {
    os << t.times[k] << ",0";
    for (int i = 0; i < t.states[k].size(); ++i) os << "," << t.states[k][i];
    os << "," << t.boundary_values[k] << "\n";
  }
}

}  // namespace parasos
