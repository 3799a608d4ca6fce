#pragma once

#include "sbs/rng.hpp"
#include "sbs/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sbs {

/// One synthetic data-generating configuration.
struct SimDesign {
  int M = 1;
  int T = 500;
  int P = 35;
  double rho = 0.5;          // within-block predictor correlation
  double sigma2_eta = 1.0;   // residual (innovation) variance
  std::vector<std::pair<int, double>> beta_spec;  // (0-based index, value)
  enum class Residuals { IID, AR1 };
  Residuals residual_model = Residuals::IID;
  double ar1_phi = 0.9;
  std::vector<int> block_spec;  // block sizes; empty means one block of size P
  std::uint64_t seed = 0;
};

/// T iid rows from MVN(0, Sigma) with Sigma_{ij} = rho^|i-j|, generated by
/// the closed-form triangular factor of the AR(1) correlation.
MatrixXd gen_ar_corr_mvn(int P, double rho, int T, std::uint64_t seed);
MatrixXd gen_ar_corr_mvn(int P, double rho, int T, Philox& rng);

struct SystemTruth {
  IndexSet support;
  MatrixXd betas;  // M x P generating coefficients
};

std::pair<PanelDataset, SystemTruth> gen_system(const SimDesign& design);

struct SelectionMetrics {
  double mse_beta = 0.0;
  bool exact_recovery = false;
  int sparsity = 0;
  int n_negative = 0;
};

/// Compares an estimate against the generating truth. The support defaults
/// to the set of columns with a nonzero coefficient in any model.
SelectionMetrics metrics(const SystemTruth& truth, const MatrixXd& betas_hat);
SelectionMetrics metrics(const SystemTruth& truth, const MatrixXd& betas_hat,
                         const IndexSet& support);

/// Mean squared prediction error averaged over the panel's models.
double pred_mse(const MatrixXd& betas, const PanelDataset& holdout);
double pred_mse(const MatrixXd& betas, const VectorXd& intercepts,
                const PanelDataset& holdout);

enum class Experiment { E1_corr, E2_shrink, E3_serial, E4_compare, EB_runtime };

Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

struct Overrides {
  std::optional<int> n_reps;
  std::optional<int> T;
  std::optional<std::uint64_t> seed;
  std::optional<double> sigma2;
  std::optional<double> rho;
  std::optional<std::vector<double>> rho_grid;
  std::optional<std::vector<int>> m_grid;
  std::optional<std::vector<int>> p_grid;
  std::optional<int> lambda_n;
  std::optional<int> n_t;
  std::optional<int> repeats;
  std::optional<int> threads;
};

struct ResultRow {
  std::string experiment;
  std::string condition;
  int replicate = 0;
  std::string method;
  std::string metric;
  double value = 0.0;
};

struct ResultTable {
  std::vector<ResultRow> rows;

  /// Mean and standard deviation per (condition, method, metric).
  struct Summary {
    std::string condition, method, metric;
    int n = 0;
    double mean = 0.0, sd = 0.0;
  };
  std::vector<Summary> summarise() const;
};

/// Runs one of the named experiments at desk scale; every row is a pure
/// function of (design, seed, replicate), so output is independent of the
/// thread count.
ResultTable run_experiment(Experiment experiment, const Overrides& overrides = {});

/// Slices of a panel used by the experiments.
PanelDataset panel_head_models(const PanelDataset& data, int M);
std::pair<PanelDataset, PanelDataset> panel_split_rows(const PanelDataset& data,
                                                       int first_rows);
PanelDataset panel_first_rows(const PanelDataset& data, int rows);

}  // namespace sbs
