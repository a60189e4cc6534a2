#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <string>

#include "parasos/baselines.hpp"
#include "parasos/opinverse.hpp"
#include "parasos/pipeline.hpp"
#include "parasos/simlab.hpp"

using nlohmann::json;
using namespace parasos;

namespace {

json default_config() {
  return json{
      {"model", {{"a_coeffs", {1.0}}, {"b_coeffs", json::array()}, {"c0_coeffs", json::array()}, {"lambda", 0.0}}},
      {"task", ""},
      {"degrees", {{"d1", 5}, {"d2", 5}, {"dhat1", -1}, {"dhat2", -1}}},
      {"rates", {{"eps", 0.001}, {"delta", 0.001}, {"mu", 0.001}, {"slack", 0.5}}},
      {"sweep", {{"mode", "stability"}, {"lo", 0.0}, {"hi", 50.0}, {"tol", 0.01}, {"d_list", {3, 4, 5}}}},
      {"sim", {{"m", 128}, {"dt", 1e-3}, {"T", 5.0}, {"w0", "first-mode"}, {"controller", "auto"}, {"gains_file", ""}, {"stride", 10}}},
      {"solver", {{"max_iterations", 200}, {"dump_sdpa", ""}}},
      {"inversion", {{"picard_n", 6}, {"cheb_deg", 6}, {"n_max", 6}, {"synthetic", true}, {"seed", 7}}},
      {"restrict_diag", false},
      {"output_dir", "."},
  };
}

void deep_merge(json& base, const json& over) {
  if (!over.is_object()) {
    base = over;
    return;
  }
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() && it.value().is_object())
      deep_merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

void apply_override(json& cfg, const std::string& spec) {
  std::string s = spec;
  if (s.rfind("--", 0) == 0) s = s.substr(2);
  const auto eq = s.find('=');
  if (eq == std::string::npos)
    throw std::runtime_error("override '" + spec + "' is not of the form key=value");
  std::string path = "/" + s.substr(0, eq);
  for (auto& c : path)
    if (c == '.') c = '/';
  const std::string value = s.substr(eq + 1);
  json v;
  try {
    v = json::parse(value);
  } catch (...) {
    v = value;
  }
  cfg[json::json_pointer(path)] = v;
}

Poly1 poly_from(const json& a) {
  std::vector<double> c;
  for (const auto& v : a) c.push_back(v.get<double>());
  return Poly1(std::move(c));
}

json poly_to(const Poly1& p) {
  json a = json::array();
  for (int i = 0; i <= p.degree(); ++i) a.push_back(p.coeff(i));
  return a;
}

Poly2 poly2_from(const json& a) {
  Poly2 p;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j)
      if (a[i][j].get<double>() != 0.0) p.set_coeff(int(i), int(j), a[i][j].get<double>());
  return p;
}

json poly2_to(const Poly2& p) {
  json rows = json::array();
  for (int i = 0; i <= p.deg1(); ++i) {
    json row = json::array();
    for (int j = 0; j <= p.deg2(); ++j) row.push_back(p.coeff(i, j));
    rows.push_back(row);
  }
  return rows;
}

json matrix_to(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

PdeModel model_from(const json& cfg) {
  return PdeModel(poly_from(cfg["model"]["a_coeffs"]), poly_from(cfg["model"]["b_coeffs"]),
                  poly_from(cfg["model"]["c0_coeffs"]), cfg["model"]["lambda"].get<double>());
}

PipelineOptions options_from(const json& cfg) {
  PipelineOptions opts;
  opts.hat_override = {cfg["degrees"]["dhat1"].get<int>(), cfg["degrees"]["dhat2"].get<int>()};
  opts.slack = cfg["rates"]["slack"].get<double>();
  opts.restrict_diag = cfg["restrict_diag"].get<bool>();
  opts.picard_n = cfg["inversion"]["picard_n"].get<int>();
  opts.cheb_deg = cfg["inversion"]["cheb_deg"].get<int>();
  opts.solver.max_iterations = cfg["solver"]["max_iterations"].get<int>();
  opts.solver.dump_sdpa_path = cfg["solver"]["dump_sdpa"].get<std::string>();
  return opts;
}

json cert_to(const XiCertificate& c) {
  return json{{"d1", c.d1},
              {"d2", c.d2},
              {"eps", c.eps},
              {"restrict_diag", c.restrict_diag},
              {"theta", c.theta},
              {"P", matrix_to(c.P)},
              {"M_coeffs", poly_to(c.triple.M)},
              {"K1_coeffs", poly2_to(c.triple.K1)},
              {"K2_coeffs", poly2_to(c.triple.K2)}};
}

json inverse_to(const InverseTriple& inv) {
  return json{{"Minv_coeffs", poly_to(inv.Minv)},
              {"K1inv_coeffs", poly2_to(inv.K1inv)},
              {"K2inv_coeffs", poly2_to(inv.K2inv)},
              {"n_picard", inv.n_picard},
              {"cheb_deg", inv.cheb_deg},
              {"residual_bound", inv.residual_bound},
              {"cheb_sup_error", inv.cheb_sup_error}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << j.dump(2) << "\n";
}

Eigen::VectorXd initial_profile(const Discretization& d, const json& w0) {
  if (w0.is_array()) {
    const Poly1 p = poly_from(w0);
    return sample_profile(d, [&](double x) { return p.eval(x); });
  }
  const std::string name = w0.get<std::string>();
  if (name == "first-mode")
    return sample_profile(d, [](double x) { return std::sin(0.5 * kPi * x); });
  if (name == "gauss-diff")
    return sample_profile(d, [](double x) {
      const double s = 2.0 * 0.07 * 0.07;
      return std::exp(-(x - 0.3) * (x - 0.3) / s) - std::exp(-(x - 0.7) * (x - 0.7) / s);
    });
  throw std::runtime_error("unknown initial profile '" + name + "'");
}

int run_analyze(const json& cfg) {
  const PdeModel model = model_from(cfg);
  const auto out = analyze_stability(model, cfg["degrees"]["d1"], cfg["degrees"]["d2"],
                                     cfg["rates"]["eps"], cfg["rates"]["delta"], options_from(cfg));
  if (!out.ok()) {
    std::cerr << "infeasible: " << out.detail << "\n";
    return 2;
  }
  json j{{"task", "analyze"},
         {"config", cfg},
         {"delta", out->delta},
         {"gamma", out->gamma},
         {"certificate", cert_to(out->certificate)},
         {"hat_certificate", cert_to(out->hat_certificate)}};
  const std::string path = cfg["output_dir"].get<std::string>() + "/certificate.json";
  write_json(path, j);
  std::cout << "certificate written to " << path << " (gamma = " << out->gamma << ")\n";
  return 0;
}

json controller_to(const ControllerGains& g) {
  return json{{"R1", g.R1},          {"R2_coeffs", poly_to(g.R2)},
              {"Y1", g.Y1},          {"Y2_coeffs", poly_to(g.Y2)},
              {"mu", g.mu},          {"certificate", cert_to(g.certificate)},
              {"hat_certificate", cert_to(g.hat_certificate)}, {"inverse", inverse_to(g.inverse)}};
}

json observer_to(const ObserverGains& g) {
  return json{{"L1_coeffs", poly_to(g.L1)}, {"L2", g.L2},
              {"T1_coeffs", poly_to(g.T1)}, {"T2", g.T2},
              {"T3_coeffs", poly_to(g.T3)}, {"delta", g.delta},
              {"certificate", cert_to(g.certificate)},
              {"hat_certificate", cert_to(g.hat_certificate)}, {"inverse", inverse_to(g.inverse)}};
}

int run_synth(const json& cfg, const std::string& task) {
  const PdeModel model = model_from(cfg);
  const PipelineOptions opts = options_from(cfg);
  const int d1 = cfg["degrees"]["d1"], d2 = cfg["degrees"]["d2"];
  const double eps = cfg["rates"]["eps"], mu = cfg["rates"]["mu"], delta = cfg["rates"]["delta"];
  json j{{"task", task}, {"config", cfg}};
  if (task == "synth-state") {
    const auto out = synth_state_feedback(model, d1, d2, eps, mu, opts);
    if (!out.ok()) {
      std::cerr << "infeasible: " << out.detail << "\n";
      return 2;
    }
    j["controller"] = controller_to(*out.value);
  } else if (task == "synth-observer") {
    const auto out = synth_observer(model, d1, d2, eps, delta, opts);
    if (!out.ok()) {
      std::cerr << "infeasible: " << out.detail << "\n";
      return 2;
    }
    j["observer"] = observer_to(*out.value);
  } else {
    const auto out = synth_output_feedback(model, {d1, d2}, {d1, d2}, eps, mu, delta, opts);
    if (!out.ok()) {
      std::cerr << "infeasible: " << out.detail << "\n";
      return 2;
    }
    j["controller"] = controller_to(out->controller);
    j["observer"] = observer_to(out->observer);
    j["kappa"] = out->kappa;
  }
  const std::string path = cfg["output_dir"].get<std::string>() + "/gains.json";
  write_json(path, j);
  std::cout << "gains written to " << path << "\n";
  return 0;
}

int run_simulate(const json& cfg) {
  const PdeModel model = model_from(cfg);
  const auto& sim = cfg["sim"];
  const Discretization d =
      discretize(model, sim["m"].get<int>(), GridKind::kUniform, BcMode::kControlled);
  const Eigen::VectorXd w0 = initial_profile(d, sim["w0"]);
  const double T = sim["T"], dt = sim["dt"];
  const int stride = sim["stride"];

  std::string mode = sim["controller"].get<std::string>();
  json gains;
  const std::string gains_file = sim["gains_file"].get<std::string>();
  if (!gains_file.empty()) {
    std::ifstream is(gains_file);
    if (!is) throw std::runtime_error("cannot open gains file " + gains_file);
    is >> gains;
    if (mode == "auto") mode = gains.contains("observer") ? "output-fb" : "state-fb";
  } else if (mode == "auto") {
    mode = "none";
  }

  Trajectory tr;
  if (mode == "none") {
    tr = simulate(d, w0, T, dt);
  } else if (mode == "state-fb") {
    const auto& c = gains["controller"];
    tr = simulate(d, sample_state_feedback(d, c["R1"], poly_from(c["R2_coeffs"])), w0, T, dt);
  } else if (mode == "output-fb") {
    const auto& c = gains["controller"];
    const auto& o = gains["observer"];
    tr = simulate(d,
                  sample_output_feedback(d, c["R1"], poly_from(c["R2_coeffs"]),
                                         poly_from(o["L1_coeffs"]), o["L2"]),
                  w0, T, dt);
  } else {
    throw std::runtime_error("unknown controller mode '" + mode + "'");
  }

  const std::string dir = cfg["output_dir"].get<std::string>();
  trajectory_to_csv(tr, dir + "/trajectory.csv", stride);
  if (!tr.observer_states.empty()) {
    Trajectory obs = tr;
    obs.states = tr.observer_states;
    trajectory_to_csv(obs, dir + "/trajectory_observer.csv", stride);
  }
  {
    std::ofstream os(dir + "/inputs.csv");
    os.precision(17);
    os << "t,u,norm" << (tr.observer_error_norms.empty() ? "" : ",error_norm") << "\n";
    for (size_t k = 0; k < tr.times.size(); k += stride) {
      os << tr.times[k] << "," << tr.inputs[k] << "," << tr.norms[k];
      if (!tr.observer_error_norms.empty()) os << "," << tr.observer_error_norms[k];
      os << "\n";
    }
  }
  json j{{"task", "simulate"},
         {"config", cfg},
         {"controller", mode},
         {"initial_norm", tr.norms.front()},
         {"final_norm", tr.norms.back()},
         {"decay_rate_estimate", estimate_decay_rate(tr)}};
  write_json(dir + "/simulate.json", j);
  std::cout << "trajectory written (final norm " << tr.norms.back() << ")\n";
  return 0;
}

int run_sweep(const json& cfg) {
  const PdeModel model = model_from(cfg);
  const auto& sw = cfg["sweep"];
  const std::string mode_name = sw["mode"].get<std::string>();
  SweepMode mode;
  double rate;
  if (mode_name == "stability") {
    mode = SweepMode::kStability;
    rate = cfg["rates"]["delta"];
  } else if (mode_name == "state_fb") {
    mode = SweepMode::kStateFeedback;
    rate = cfg["rates"]["mu"];
  } else if (mode_name == "observer") {
    mode = SweepMode::kObserver;
    rate = cfg["rates"]["delta"];
  } else if (mode_name == "output_fb") {
    mode = SweepMode::kOutputFeedback;
    rate = std::min(cfg["rates"]["mu"].get<double>(), cfg["rates"]["delta"].get<double>());
  } else {
    throw std::runtime_error("unknown sweep mode '" + mode_name + "'");
  }
  std::vector<int> d_list;
  for (const auto& v : sw["d_list"]) d_list.push_back(v.get<int>());
  int threads = 0;
  if (const char* env = std::getenv("PARASOS_THREADS")) threads = std::atoi(env);

  const SweepResult res =
      sweep_max_lambda(mode, model, d_list, cfg["rates"]["eps"], rate, sw["lo"], sw["hi"],
                       sw["tol"], options_from(cfg), threads);

  const std::string dir = cfg["output_dir"].get<std::string>();
  {
    std::ofstream os(dir + "/sweep.csv");
    os.precision(17);
    os << "d,lambda_star\n";
    for (const auto& row : res.rows) os << row.d << "," << row.lambda_star << "\n";
  }
  json rows = json::array();
  for (const auto& row : res.rows) rows.push_back({{"d", row.d}, {"lambda_star", row.lambda_star}});
  write_json(dir + "/sweep.json", json{{"task", "sweep"}, {"config", cfg}, {"rows", rows}});
  std::cout << "sweep written to " << dir << "/sweep.csv\n";
  return 0;
}

int run_invert_check(const json& cfg) {
  const auto& ic = cfg["inversion"];
  KernelTriple triple;
  if (ic["synthetic"].get<bool>()) {
    const int d1 = 1, d2 = 1;
    const int n = xi_gram_size(d1, d2);
    std::mt19937 rng(ic["seed"].get<unsigned>());
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = unif(rng);
    Eigen::MatrixXd P = A * A.transpose() / n;
    P(0, 0) += 1.0;  // eps = 1 shift
    triple = gram_to_triple(P, d1, d2);
  } else {
    const PdeModel model = model_from(cfg);
    const auto out = analyze_stability(model, cfg["degrees"]["d1"], cfg["degrees"]["d2"],
                                       cfg["rates"]["eps"], cfg["rates"]["delta"], options_from(cfg));
    if (!out.ok()) {
      std::cerr << "infeasible: " << out.detail << "\n";
      return 2;
    }
    triple = out->certificate.triple;
  }
  const Poly1 w = Poly1({0.0, 1.0}) * Poly1({-0.4, 1.0}) * Poly1({-1.0, 1.0});
  const std::string dir = cfg["output_dir"].get<std::string>();
  std::ofstream os(dir + "/invert_check.csv");
  os.precision(17);
  os << "n,residual\n";
  json rows = json::array();
  for (int n = 2; n <= ic["n_max"].get<int>(); ++n) {
    const InverseTriple inv = invert_operator(triple, n, ic["cheb_deg"].get<int>());
    const double r = inversion_residual(triple, inv, w);
    os << n << "," << r << "\n";
    rows.push_back({{"n", n}, {"residual", r}});
    std::cout << "n = " << n << ": residual " << r << "\n";
  }
  write_json(dir + "/invert_check.json", json{{"task", "invert-check"}, {"config", cfg}, {"rows", rows}});
  return 0;
}

int run_baseline(const json& cfg) {
  const PdeModel model = model_from(cfg);
  const SturmLiouvilleBound sl = sturm_liouville_bound(model);
  json j{{"task", "baseline"},
         {"config", cfg},
         {"sturm_liouville",
          {{"p0", sl.p0}, {"q1", sl.q1}, {"sigma1", sl.sigma1}, {"mu1cc", sl.mu1cc},
           {"lambda_threshold", sl.lambda_threshold}}}};
  const double lambda = cfg["model"]["lambda"].get<double>();
  if (lambda > 0.0) {
    const BacksteppingController bc = backstepping_controller(lambda);
    j["backstepping"] = {{"lambda", lambda},
                         {"R1", bc.R1},
                         {"inverse_pair_residual", backstepping_inverse_pair_residual(lambda)}};
  }
  json ctrl = json::array();
  for (int m : {5, 10, 20}) {
    const auto rep = controllability_condition(m);
    ctrl.push_back({{"m", m}, {"condition", rep.condition}, {"rank", rep.numerical_rank}});
  }
  j["controllability"] = ctrl;
  const std::string path = cfg["output_dir"].get<std::string>() + "/baseline.json";
  write_json(path, j);
  std::cout << "baseline report written to " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified stability analysis and boundary controller synthesis for "
               "scalar parabolic PDEs"};
  app.require_subcommand(1);
  const std::vector<std::string> tasks = {"analyze",  "synth-state", "synth-observer",
                                          "synth-output", "simulate", "sweep",
                                          "invert-check", "baseline"};
  std::map<std::string, CLI::App*> subs;
  std::string config_path;
  for (const auto& t : tasks) {
    auto* sub = app.add_subcommand(t);
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->allow_extras();
    subs[t] = sub;
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const std::string task = app.get_subcommands().front()->get_name();
    json cfg = default_config();
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw std::runtime_error("cannot open config file " + config_path);
      json user;
      is >> user;
      deep_merge(cfg, user);
    }
    for (const auto& extra : app.get_subcommands().front()->remaining())
      apply_override(cfg, extra);
    cfg["task"] = task;

    if (!cfg["task"].is_string()) throw std::runtime_error("config field 'task' must be a string");
    if (task == "analyze") return run_analyze(cfg);
    if (task == "synth-state" || task == "synth-observer" || task == "synth-output")
      return run_synth(cfg, task);
    if (task == "simulate") return run_simulate(cfg);
    if (task == "sweep") return run_sweep(cfg);
    if (task == "invert-check") return run_invert_check(cfg);
    if (task == "baseline") return run_baseline(cfg);
    std::cerr << "unknown task " << task << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
