#include "sbs/baselines.hpp"
#include "sbs/data.hpp"
#include "sbs/miqo.hpp"
#include "sbs/regress.hpp"
#include "sbs/sarima.hpp"
#include "sbs/simlab.hpp"
#include "sbs/sps2.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace sbs;

namespace {

PanelDataset make_panel(std::vector<VectorXd> responses, std::vector<MatrixXd> predictors,
                        std::vector<std::string> predictor_names,
                        std::vector<std::string> response_names) {
  PanelDataset d;
  d.responses = std::move(responses);
  d.predictors = std::move(predictors);
  if (predictor_names.empty() && !d.predictors.empty())
    for (int p = 0; p < d.predictors[0].cols(); ++p)
      predictor_names.push_back("x" + std::to_string(p + 1));
  if (response_names.empty())
    for (size_t m = 0; m < d.responses.size(); ++m)
      response_names.push_back("y" + std::to_string(m + 1));
  d.predictor_names = std::move(predictor_names);
  d.response_names = std::move(response_names);
  return d;
}

Criterion criterion_from(const std::string& name) {
  if (name == "AIC" || name == "aic") return Criterion::AIC;
  if (name == "BIC" || name == "bic") return Criterion::BIC;
  throw Error("criterion must be AIC or BIC");
}

SignMap signs_for(const ConstraintSet& cs, int P) {
  ConstraintSet copy = cs;
  copy.validate(P);
  return SignMap::from_constraints(copy, P);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simultaneous best-subset selection for systems of regression models";

  py::register_exception<Error>(m, "SbsError");

  py::class_<PanelDataset>(m, "PanelDataset")
      .def(py::init(&make_panel), py::arg("responses"), py::arg("predictors"),
           py::arg("predictor_names") = std::vector<std::string>{},
           py::arg("response_names") = std::vector<std::string>{})
      .def_readwrite("responses", &PanelDataset::responses)
      .def_readwrite("predictors", &PanelDataset::predictors)
      .def_readwrite("predictor_names", &PanelDataset::predictor_names)
      .def_readwrite("response_names", &PanelDataset::response_names)
      .def_property_readonly("M", &PanelDataset::n_models)
      .def_property_readonly("T", &PanelDataset::n_obs)
      .def_property_readonly("P", &PanelDataset::n_predictors);

  py::class_<ConstraintSet>(m, "ConstraintSet")
      .def(py::init<>())
      .def_readwrite("sparsity_k", &ConstraintSet::sparsity_k)
      .def_readwrite("must_include", &ConstraintSet::must_include)
      .def_readwrite("positive_signs", &ConstraintSet::positive_signs)
      .def_readwrite("negative_signs", &ConstraintSet::negative_signs)
      .def_readwrite("corr_threshold", &ConstraintSet::corr_threshold)
      .def_readwrite("exclusion_pairs", &ConstraintSet::exclusion_pairs)
      .def_readwrite("groups", &ConstraintSet::groups)
      .def_readwrite("shrink_lambda", &ConstraintSet::shrink_lambda)
      .def_readwrite("equality_sparsity", &ConstraintSet::equality_sparsity)
      .def_readwrite("time_limit", &ConstraintSet::time_limit)
      .def("validate", &ConstraintSet::validate, py::arg("P"));

  py::class_<SbsSolution>(m, "SbsSolution")
      .def_readonly("support", &SbsSolution::support)
      .def_readonly("betas", &SbsSolution::betas)
      .def_readonly("consensus", &SbsSolution::consensus)
      .def_readonly("objective", &SbsSolution::objective)
      .def_readonly("best_bound", &SbsSolution::best_bound)
      .def_readonly("nodes", &SbsSolution::nodes)
      .def_property_readonly("status",
                             [](const SbsSolution& s) { return to_string(s.status); })
      .def("selected", &SbsSolution::selected);

  py::class_<SbsProblem>(m, "SbsProblem")
      .def(py::init<PanelDataset, ConstraintSet>(), py::arg("data"),
           py::arg("constraints"));

  py::class_<Feasibility>(m, "Feasibility")
      .def_readonly("feasible", &Feasibility::feasible)
      .def_readonly("reason", &Feasibility::reason)
      .def_readonly("k_max", &Feasibility::k_max)
      .def_readonly("k_max_exact", &Feasibility::k_max_exact);

  m.def("validate_dataset", &validate_dataset, py::arg("data"));
  m.def("build_hc_set", &build_hc_set, py::arg("data"), py::arg("rho"));
  m.def("exp_smooth", &exp_smooth, py::arg("series"), py::arg("alpha"));
  m.def("expand_transform_grid", &expand_transform_grid, py::arg("data"),
        py::arg("base_predictor"), py::arg("alphas"));

  m.def(
      "ols",
      [](const MatrixXd& X, const VectorXd& y) {
        const auto fit = ols(X, y);
        return py::make_tuple(fit.beta, fit.rss);
      },
      py::arg("X"), py::arg("y"), "Minimum-norm least squares; returns (beta, rss)");

  m.def(
      "check_feasible",
      [](ConstraintSet cs, int P) {
        cs.validate(P);
        return check_feasible(cs);
      },
      py::arg("constraints"), py::arg("P"));

  m.def(
      "solve_sbs",
      [](const SbsProblem& problem, int k, const SbsSolution* warm) {
        return solve_sbs(problem, k, warm);
      },
      py::arg("problem"), py::arg("k"), py::arg("warm") = nullptr,
      py::call_guard<py::gil_scoped_release>());
  m.def("solve_path", &solve_path, py::arg("problem"), py::arg("k_range"),
        py::call_guard<py::gil_scoped_release>());
  m.def("lambda_grid", &lambda_grid, py::arg("g_k"), py::arg("n"));

  m.def(
      "joint_penalized_ls",
      [](const PanelDataset& data, const IndexSet& support, double lambda,
         ConstraintSet cs) {
        const auto fit =
            joint_penalized_ls(data, support, lambda, signs_for(cs, data.n_predictors()));
        return py::make_tuple(fit.betas, fit.consensus, fit.objective);
      },
      py::arg("data"), py::arg("support"), py::arg("lambda"),
      py::arg("constraints") = ConstraintSet{});

  py::class_<SarimaOrder>(m, "SarimaOrder")
      .def(py::init<>())
      .def(py::init([](int p, int d, int q, int P, int D, int Q, int s) {
             return SarimaOrder{p, d, q, P, D, Q, s};
           }),
           py::arg("p"), py::arg("d"), py::arg("q"), py::arg("P") = 0, py::arg("D") = 0,
           py::arg("Q") = 0, py::arg("s") = 1)
      .def(py::init(&SarimaOrder::parse))
      .def_readwrite("p", &SarimaOrder::p)
      .def_readwrite("d", &SarimaOrder::d)
      .def_readwrite("q", &SarimaOrder::q)
      .def_readwrite("P", &SarimaOrder::P)
      .def_readwrite("D", &SarimaOrder::D)
      .def_readwrite("Q", &SarimaOrder::Q)
      .def_readwrite("s", &SarimaOrder::s)
      .def("__eq__", [](const SarimaOrder& a, const SarimaOrder& b) { return a == b; })
      .def("__repr__", &SarimaOrder::str);

  py::class_<SarimaFit>(m, "SarimaFit")
      .def_readonly("order", &SarimaFit::order)
      .def_readonly("phi", &SarimaFit::phi)
      .def_readonly("theta", &SarimaFit::theta)
      .def_readonly("Phi", &SarimaFit::Phi)
      .def_readonly("Theta", &SarimaFit::Theta)
      .def_readonly("sigma2", &SarimaFit::sigma2)
      .def_readonly("loglik", &SarimaFit::loglik)
      .def_readonly("aic", &SarimaFit::aic)
      .def_readonly("bic", &SarimaFit::bic);

  py::enum_<Criterion>(m, "Criterion")
      .value("AIC", Criterion::AIC)
      .value("BIC", Criterion::BIC);

  m.def("seasonal_difference", &seasonal_difference, py::arg("series"), py::arg("d"),
        py::arg("D"), py::arg("s"));
  m.def("css_loglik", &css_loglik, py::arg("series"), py::arg("order"), py::arg("params"));
  m.def("fit_sarima", &fit_sarima, py::arg("series"), py::arg("order"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "select_sarima",
      [](const VectorXd& series, const std::vector<SarimaOrder>& candidates,
         const std::string& criterion) {
        return select_sarima(series, candidates, criterion_from(criterion));
      },
      py::arg("series"), py::arg("candidates"), py::arg("criterion") = "BIC",
      py::call_guard<py::gil_scoped_release>());
  m.def("whiten", &whiten, py::arg("series"), py::arg("fit"));
  m.def("filter_panel", &filter_panel, py::arg("data"), py::arg("fits"));

  py::class_<AcfPacf>(m, "AcfPacf")
      .def_readonly("acf", &AcfPacf::acf)
      .def_readonly("pacf", &AcfPacf::pacf);
  m.def("acf_pacf", &acf_pacf, py::arg("series"), py::arg("max_lag"));

  py::class_<Sps2Config>(m, "Sps2Config")
      .def(py::init<>())
      .def_readwrite("k_range", &Sps2Config::k_range)
      .def_readwrite("candidate_orders", &Sps2Config::candidate_orders)
      .def_readwrite("maxiter", &Sps2Config::maxiter)
      .def_readwrite("beta_tol", &Sps2Config::beta_tol)
      .def_readwrite("criterion", &Sps2Config::criterion)
      .def_readwrite("constraints", &Sps2Config::constraints);

  py::class_<Sps2Iteration>(m, "Sps2Iteration")
      .def_readonly("support", &Sps2Iteration::support)
      .def_readonly("betas", &Sps2Iteration::betas)
      .def_readonly("orders", &Sps2Iteration::orders)
      .def_readonly("objective", &Sps2Iteration::objective);

  py::class_<Sps2Result>(m, "Sps2Result")
      .def_readonly("k", &Sps2Result::k)
      .def_readonly("iterations", &Sps2Result::iterations)
      .def_readonly("converged", &Sps2Result::converged)
      .def_readonly("iterations_used", &Sps2Result::iterations_used)
      .def_readonly("final_solution", &Sps2Result::final_solution)
      .def_readonly("final_fits", &Sps2Result::final_fits);

  m.def("run_sps2", &run_sps2, py::arg("data"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("has_converged", &has_converged, py::arg("prev"), py::arg("curr"),
        py::arg("beta_tol"));

  py::class_<StepwiseFit>(m, "StepwiseFit")
      .def_readonly("support", &StepwiseFit::support)
      .def_readonly("intercept", &StepwiseFit::intercept)
      .def_readonly("beta", &StepwiseFit::beta)
      .def_readonly("rss_path", &StepwiseFit::rss_path)
      .def_readonly("aic_path", &StepwiseFit::aic_path);
  m.def("forward_stepwise", &forward_stepwise, py::arg("X"), py::arg("y"));

  py::class_<SvsSolution>(m, "SvsSolution")
      .def_readonly("betas", &SvsSolution::betas)
      .def_readonly("t_value", &SvsSolution::t_value)
      .def_readonly("active_set", &SvsSolution::active_set)
      .def_readonly("thresholded_betas", &SvsSolution::thresholded_betas)
      .def_readonly("objective", &SvsSolution::objective)
      .def_readonly("kkt_residual", &SvsSolution::kkt_residual);
  m.def("svs_m_solve", &svs_m_solve, py::arg("data"), py::arg("t"),
        py::arg("nonneg") = false, py::call_guard<py::gil_scoped_release>());
  m.def("svs_m_path", &svs_m_path, py::arg("data"), py::arg("n_t"),
        py::arg("nonneg") = false, py::call_guard<py::gil_scoped_release>());

  py::class_<SimDesign> sim(m, "SimDesign");
  sim.def(py::init<>())
      .def_readwrite("M", &SimDesign::M)
      .def_readwrite("T", &SimDesign::T)
      .def_readwrite("P", &SimDesign::P)
      .def_readwrite("rho", &SimDesign::rho)
      .def_readwrite("sigma2_eta", &SimDesign::sigma2_eta)
      .def_readwrite("beta_spec", &SimDesign::beta_spec)
      .def_readwrite("ar1_phi", &SimDesign::ar1_phi)
      .def_readwrite("block_spec", &SimDesign::block_spec)
      .def_readwrite("seed", &SimDesign::seed)
      .def_property(
          "residual_model",
          [](const SimDesign& d) {
            return d.residual_model == SimDesign::Residuals::IID ? "IID" : "AR1";
          },
          [](SimDesign& d, const std::string& v) {
            if (v == "IID") d.residual_model = SimDesign::Residuals::IID;
            else if (v == "AR1") d.residual_model = SimDesign::Residuals::AR1;
            else throw Error("residual_model must be IID or AR1");
          });

  py::class_<SystemTruth>(m, "SystemTruth")
      .def_readonly("support", &SystemTruth::support)
      .def_readonly("betas", &SystemTruth::betas);

  py::class_<SelectionMetrics>(m, "SelectionMetrics")
      .def_readonly("mse_beta", &SelectionMetrics::mse_beta)
      .def_readonly("exact_recovery", &SelectionMetrics::exact_recovery)
      .def_readonly("sparsity", &SelectionMetrics::sparsity)
      .def_readonly("n_negative", &SelectionMetrics::n_negative);

  m.def("gen_ar_corr_mvn",
        py::overload_cast<int, double, int, std::uint64_t>(&gen_ar_corr_mvn),
        py::arg("P"), py::arg("rho"), py::arg("T"), py::arg("seed"));
  m.def("gen_system", &gen_system, py::arg("design"));
  m.def("metrics",
        py::overload_cast<const SystemTruth&, const MatrixXd&>(&metrics),
        py::arg("truth"), py::arg("betas_hat"));
  m.def("pred_mse",
        py::overload_cast<const MatrixXd&, const PanelDataset&>(&pred_mse),
        py::arg("betas"), py::arg("holdout"));

  m.def(
      "run_experiment",
      [](const std::string& name, py::kwargs kwargs) {
        Overrides ov;
        for (auto item : kwargs) {
          const std::string key = py::str(item.first);
          if (key == "n_reps") ov.n_reps = item.second.cast<int>();
          else if (key == "T") ov.T = item.second.cast<int>();
          else if (key == "seed") ov.seed = item.second.cast<std::uint64_t>();
          else if (key == "sigma2") ov.sigma2 = item.second.cast<double>();
          else if (key == "rho") ov.rho = item.second.cast<double>();
          else if (key == "rho_grid") ov.rho_grid = item.second.cast<std::vector<double>>();
          else if (key == "m_grid") ov.m_grid = item.second.cast<std::vector<int>>();
          else if (key == "p_grid") ov.p_grid = item.second.cast<std::vector<int>>();
          else if (key == "lambda_n") ov.lambda_n = item.second.cast<int>();
          else if (key == "n_t") ov.n_t = item.second.cast<int>();
          else if (key == "repeats") ov.repeats = item.second.cast<int>();
          else if (key == "threads") ov.threads = item.second.cast<int>();
          else throw Error("unknown override '" + key + "'");
        }
        const ResultTable table = run_experiment(parse_experiment(name), ov);
        py::list rows;
        for (const auto& r : table.rows)
          rows.append(py::make_tuple(r.experiment, r.condition, r.replicate, r.method,
                                     r.metric, r.value));
        return rows;
      },
      py::arg("name"));

  m.attr("__version__") = "0.1.0";
}
