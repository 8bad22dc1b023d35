#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "nelp/features.hpp"
#include "nelp/graph.hpp"
#include "nelp/sampling.hpp"

namespace nelp::solver {

using features::RowMatrix;

enum class KernelKind { Linear, Rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::Linear;
  /// RBF bandwidth sigma in exp(-|x - x'|^2 / (2 sigma^2)).
  double bandwidth = 1.0;

  void validate() const;
  double operator()(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b) const;
};

std::string_view to_string(KernelKind k);
KernelKind kernel_from_string(std::string_view s);

/// Gram matrix over the rows of x.
Eigen::MatrixXd gram(const RowMatrix& x, const KernelSpec& kernel);
/// K(a_r, b_c) for every row pair.
Eigen::MatrixXd cross_gram(const RowMatrix& a, const RowMatrix& b, const KernelSpec& kernel);

/// Balance-theory coupling over a sample list and its graph Laplacian.
struct BalanceRegularizer {
  Eigen::SparseMatrix<double> coupling;
  Eigen::SparseMatrix<double> laplacian;
  Eigen::VectorXd degree;

  Eigen::Index size() const { return laplacian.rows(); }
  static BalanceRegularizer empty(Eigen::Index n);
};

/// B[h][l] = 1 iff samples h = (u_i, u_k) and l = (u_j, u_k) share their
/// second endpoint, u_i and u_j are positively linked in either direction,
/// and neither u_i nor u_j is positively linked to u_k. Throws on duplicate
/// samples.
BalanceRegularizer build_balance_matrix(std::span<const Pair> samples, const PositiveNetwork& g_p);

/// Pairs (i, k) at directed distance exactly 2, not in `labeled`, not linked
/// either way, and able to couple with some labeled or distance-2 pair. Pairs
/// coupled to a labeled pair come first; each tier is subsampled with `seed`
/// when more than `limit` pairs qualify. Sorted.
std::vector<Pair> regularizer_candidates(const PositiveNetwork& g_p, std::span<const Pair> labeled,
                                         std::size_t limit, std::uint64_t seed);

/// l labeled rows followed by mu unlabeled rows.
struct TrainingProblem {
  RowMatrix x;
  std::vector<int> labels;
  /// Per-sample box bound s_i.
  std::vector<double> costs;
  double balance_weight = 0.0;
  KernelSpec kernel;

  std::size_t labeled() const { return labels.size(); }
  std::size_t unlabeled() const { return static_cast<std::size_t>(x.rows()) - labels.size(); }
  void validate() const;
};

struct SolverOptions {
  enum class Route { Auto, Dense };
  /// Stopping bound on the maximal KKT violation.
  double tolerance = 1e-5;
  /// A sweep is `l` pair updates.
  std::size_t max_sweeps = 10000;
  /// Auto uses the feature-space route for the linear kernel.
  Route route = Route::Auto;
  /// Budget for cached columns of Q.
  std::size_t cache_bytes = std::size_t{256} << 20;
  /// Drops bounded rows that cannot re-enter the working set, restoring them
  /// before the final optimality check.
  bool shrinking = true;
  bool record_trace = false;
};

struct DualSolution {
  Eigen::VectorXd beta;
  /// Expansion coefficients over all l + mu rows.
  Eigen::VectorXd alpha;
  /// Primal weights sum_k alpha_k x_k (linear kernel only).
  Eigen::VectorXd weights;
  double bias = 0.0;
  double objective = 0.0;
  /// Largest violation of the margin conditions at (beta, bias).
  double kkt_residual = 0.0;
  /// Maximal violating-pair gap at exit.
  double gap = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t free_support_vectors = 0;
  /// Dual objective after each sweep, when requested.
  std::vector<double> objective_trace;
};

/// Maximizes sum(beta) - beta' Q beta / 2 subject to y' beta = 0 and
/// 0 <= beta_i <= s_i with Q = Y J K (I + C_b L K)^-1 J' Y, by two-coordinate
/// ascent on the maximal violating pair.
DualSolution solve_dual(const TrainingProblem& problem, const BalanceRegularizer& reg, const SolverOptions& options = {});

/// Dense Q (l x l), for verification and small problems.
Eigen::MatrixXd dual_hessian(const TrainingProblem& problem, const BalanceRegularizer& reg);

double dual_objective(const Eigen::MatrixXd& q, const Eigen::VectorXd& beta);

struct Hyperparameters {
  double positive_cost = 1.0;
  double negative_cost = 0.5;
  double balance_weight = 0.1;
  sampling::WeightMode weight_mode = sampling::WeightMode::Reliability;
};

Hyperparameters ablation_config(double negative_cost, sampling::WeightMode weight_mode, double balance_weight,
                                double positive_cost = 1.0);

struct AblationVariant {
  std::string name;
  Hyperparameters hyper;
};

/// Full model, then C_n = 1, c_j = 1, C_b = 0, and all three removed.
std::vector<AblationVariant> ablation_variants(const Hyperparameters& full);

struct Model {
  std::string schema_version{features::kSchemaVersion};
  KernelSpec kernel;
  features::Standardization standardization;
  /// Linear kernel: decision = weights' x + bias.
  Eigen::VectorXd weights;
  /// RBF kernel: decision = sum_k coef_k K(row_k, x) + bias.
  RowMatrix expansion_rows;
  Eigen::VectorXd expansion_coef;
  double bias = 0.0;
  Hyperparameters hyper;

  std::size_t dimension() const { return static_cast<std::size_t>(standardization.mean.size()); }
};

Model make_model(const TrainingProblem& problem, const DualSolution& solution, features::Standardization stats,
                 const Hyperparameters& hyper);

struct Prediction {
  double decision = 0.0;
  /// -1 (negative link) iff decision < 0.
  int label = 1;
};

/// `x` must already be standardized with the model statistics.
Prediction predict(const Model& model, const Eigen::VectorXd& x);
/// Standardizes raw feature rows, then predicts each.
std::vector<Prediction> predict_raw(const Model& model, const RowMatrix& raw, std::string_view schema_version,
                                    unsigned threads = 1);

std::string to_json(const Model& model);
Model model_from_json(std::string_view text);

}  // namespace nelp::solver
