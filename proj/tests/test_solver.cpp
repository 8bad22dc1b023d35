#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nelp/solver.hpp"
#include "oracles.hpp"

using namespace nelp;
using namespace nelp::solver;

namespace {

RowMatrix random_rows(Eigen::Index n, Eigen::Index d, Rng& rng) {
  RowMatrix x(n, d);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < d; ++c) x(r, c) = 2 * uniform_real(rng) - 1;
  return x;
}

TrainingProblem random_problem(std::size_t l, std::size_t mu, Rng& rng, KernelKind kind, bool uniform_costs) {
  TrainingProblem p;
  p.x = random_rows(static_cast<Eigen::Index>(l + mu), 4, rng);
  for (std::size_t k = 0; k < l; ++k) {
    // Both classes always present.
    p.labels.push_back(k == 0 ? 1 : k == 1 ? -1 : (oracle::coin(rng, 0.5) ? 1 : -1));
    p.costs.push_back(uniform_costs ? 1.0 : 0.1 + 0.9 * uniform_real(rng));
  }
  // Shift the classes apart a little so some margins are met.
  for (std::size_t k = 0; k < l; ++k) p.x(static_cast<Eigen::Index>(k), 0) += 0.5 * p.labels[k];
  p.kernel.kind = kind;
  p.kernel.bandwidth = 1.2;
  return p;
}

Eigen::VectorXd labels(const TrainingProblem& p) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(p.labeled()));
  for (std::size_t k = 0; k < p.labeled(); ++k) y(static_cast<Eigen::Index>(k)) = p.labels[k];
  return y;
}

Eigen::VectorXd costs(const TrainingProblem& p) {
  return Eigen::Map<const Eigen::VectorXd>(p.costs.data(), static_cast<Eigen::Index>(p.costs.size()));
}

/// Decision values on the labeled rows from an expansion over all rows.
Eigen::VectorXd decisions(const TrainingProblem& p, const Eigen::VectorXd& alpha, double bias) {
  Eigen::MatrixXd k = gram(p.x, p.kernel);
  return k.topRows(static_cast<Eigen::Index>(p.labeled())) * alpha + Eigen::VectorXd::Constant(static_cast<Eigen::Index>(p.labeled()), bias);
}

/// Samples over a small random graph plus a regularizer built from them.
struct Coupled {
  TrainingProblem problem;
  BalanceRegularizer reg;
  Eigen::MatrixXd laplacian;
};

Coupled coupled_problem(std::size_t l, double c_b, Rng& rng, KernelKind kind) {
  const int n = 10;
  oracle::SignedInstance g;
  Coupled out;
  std::vector<Pair> samples;
  // Retry until the coupling has some edges.
  for (;;) {
    g = oracle::random_signed(n, 0.25, 0.0, rng);
    std::set<Pair> chosen;
    while (chosen.size() < l + 8) {
      const auto a = static_cast<UserId>(uniform_index(rng, n)), b = static_cast<UserId>(uniform_index(rng, n));
      if (a != b && g.sign[a][b] == 0) chosen.insert({a, b});
    }
    samples.assign(chosen.begin(), chosen.end());
    if (oracle::coupling(samples, g.sign).sum() >= 4) break;
  }
  out.problem = random_problem(l, samples.size() - l, rng, kind, false);
  out.problem.balance_weight = c_b;
  out.reg = build_balance_matrix(samples, PositiveNetwork(n, g.positive));
  Eigen::MatrixXd b = oracle::coupling(samples, g.sign);
  out.laplacian = Eigen::MatrixXd(b.rowwise().sum().asDiagonal()) - b;
  return out;
}

}  // namespace

TEST_CASE("unregularized solutions match projected gradient on 10 instances") {
  Rng rng(1001);
  SolverOptions tight;
  tight.tolerance = 1e-10;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t l = 6 + uniform_index(rng, 15);
    auto p = random_problem(l, 0, rng, KernelKind::Rbf, true);
    auto reg = BalanceRegularizer::empty(p.x.rows());
    auto sol = solve_dual(p, reg, tight);
    REQUIRE(sol.converged);

    const Eigen::VectorXd y = labels(p), s = costs(p);
    Eigen::MatrixXd q = oracle::dual_hessian(gram(p.x, p.kernel), Eigen::MatrixXd::Zero(p.x.rows(), p.x.rows()), y, 0.0);
    Eigen::VectorXd beta = oracle::projected_gradient_qp(q, y, s);
    const double want = beta.sum() - 0.5 * beta.dot(q * beta);
    CHECK(std::abs(sol.objective - want) <= 1e-6 * std::max(1.0, std::abs(want)));

    Eigen::VectorXd f0 = gram(p.x, p.kernel) * y.cwiseProduct(beta);
    const double b = oracle::bias(beta, y, s, f0, 1e-7);
    Eigen::VectorXd want_f = f0 + Eigen::VectorXd::Constant(f0.size(), b);
    Eigen::VectorXd got_f = decisions(p, sol.alpha, sol.bias);
    CHECK((got_f - want_f).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("regularized solutions match the dense QP oracle") {
  Rng rng(2002);
  for (double c_b : {0.01, 0.1}) {
    for (int trial = 0; trial < 4; ++trial) {
      const std::size_t l = 8 + uniform_index(rng, 10);
      auto c = coupled_problem(l, c_b, rng, trial % 2 ? KernelKind::Linear : KernelKind::Rbf);
      SolverOptions opt;
      opt.tolerance = 1e-9;
      auto sol = solve_dual(c.problem, c.reg, opt);
      REQUIRE(sol.converged);

      const Eigen::VectorXd y = labels(c.problem), s = costs(c.problem);
      Eigen::MatrixXd q = oracle::dual_hessian(gram(c.problem.x, c.problem.kernel), c.laplacian, y, c_b);
      Eigen::VectorXd beta = oracle::projected_gradient_qp(q, y, s);
      const double want = beta.sum() - 0.5 * beta.dot(q * beta);
      CHECK(std::abs(dual_objective(q, sol.beta) - want) <= 1e-4);
      CHECK((dual_hessian(c.problem, c.reg) - q).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
  }
}

TEST_CASE("KKT and complementary slackness on 100 training runs") {
  Rng rng(3003);
  for (int run = 0; run < 100; ++run) {
    const std::size_t l = 10 + uniform_index(rng, 30);
    const double c_b = run % 3 == 0 ? 0.0 : run % 3 == 1 ? 0.01 : 0.1;
    const auto kind = run % 2 ? KernelKind::Linear : KernelKind::Rbf;
    auto c = coupled_problem(l, c_b, rng, kind);
    auto sol = solve_dual(c.problem, c.reg);
    REQUIRE(sol.converged);
    CHECK(sol.kkt_residual <= 1e-4);

    const Eigen::VectorXd y = labels(c.problem), s = costs(c.problem);
    CHECK(std::abs(y.dot(sol.beta)) <= 1e-9);
    Eigen::VectorXd f = decisions(c.problem, sol.alpha, sol.bias);
    const double tol = 1e-4, eps = 1e-8;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      const double margin = y(k) * f(k);
      CHECK(sol.beta(k) >= -eps);
      CHECK(sol.beta(k) <= s(k) + eps);
      if (sol.beta(k) <= eps)
        CHECK(margin >= 1 - tol);
      else if (sol.beta(k) >= s(k) - eps)
        CHECK(margin <= 1 + tol);
      else
        CHECK(std::abs(margin - 1) <= tol);
    }
  }
}

TEST_CASE("without the regularizer alpha is Y beta on the labeled rows") {
  Rng rng(7);
  auto p = random_problem(12, 5, rng, KernelKind::Rbf, false);
  auto sol = solve_dual(p, BalanceRegularizer::empty(p.x.rows()));
  const Eigen::VectorXd y = labels(p);
  CHECK((sol.alpha.head(12) - y.cwiseProduct(sol.beta)).norm() == doctest::Approx(0.0));
  CHECK(sol.alpha.tail(5).isZero());
}

TEST_CASE("the feature-space route agrees with the dense route") {
  Rng rng(8);
  auto c = coupled_problem(15, 0.1, rng, KernelKind::Linear);
  SolverOptions a, b;
  a.tolerance = b.tolerance = 1e-9;
  b.route = SolverOptions::Route::Dense;
  auto fast = solve_dual(c.problem, c.reg, a);
  auto dense = solve_dual(c.problem, c.reg, b);
  CHECK(fast.objective == doctest::Approx(dense.objective).epsilon(1e-7));
  CHECK((fast.alpha - dense.alpha).lpNorm<Eigen::Infinity>() <= 1e-5);
  CHECK(fast.weights.size() == 4);
}

TEST_CASE("dual Hessian and Gram are symmetric and positive semidefinite") {
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    auto c = coupled_problem(12, 0.1, rng, trial % 2 ? KernelKind::Linear : KernelKind::Rbf);
    for (const Eigen::MatrixXd& m : {dual_hessian(c.problem, c.reg), gram(c.problem.x, c.problem.kernel)}) {
      CHECK((m - m.transpose()).lpNorm<Eigen::Infinity>() <= 1e-10);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
    }
  }
}

TEST_CASE("Laplacian quadratic form is the coupled difference sum") {
  Rng rng(10);
  auto c = coupled_problem(10, 0.1, rng, KernelKind::Linear);
  Eigen::MatrixXd b(c.reg.coupling), lap(c.reg.laplacian);
  CHECK((lap - c.laplacian).lpNorm<Eigen::Infinity>() == 0.0);
  Eigen::VectorXd f = Eigen::VectorXd::Random(lap.rows());
  double sum = 0.0;
  for (Eigen::Index h = 0; h < b.rows(); ++h)
    for (Eigen::Index l = 0; l < b.cols(); ++l) sum += b(h, l) * (f(h) - f(l)) * (f(h) - f(l));
  CHECK(f.dot(lap * f) == doctest::Approx(0.5 * sum));
}

TEST_CASE("balance coupling on a hand-built graph") {
  // 0 and 1 are friends; both are strangers to 2.
  PositiveNetwork g(4, std::vector<Pair>{{0, 1}, {3, 2}});
  std::vector<Pair> samples{{0, 2}, {1, 2}, {3, 1}};
  auto reg = build_balance_matrix(samples, g);
  Eigen::MatrixXd b(reg.coupling);
  CHECK(b(0, 1) == 1.0);
  CHECK(b(1, 0) == 1.0);
  CHECK(b.sum() == 2.0);
  CHECK(reg.degree(2) == 0.0);
  std::vector<Pair> dup{{0, 2}, {0, 2}};
  CHECK_THROWS(build_balance_matrix(dup, g));
}

TEST_CASE("regularizer candidates sit exactly two hops out") {
  Rng rng(11);
  auto edges = oracle::random_edges(30, 0.06, rng);
  PositiveNetwork g(30, edges);
  auto cand = regularizer_candidates(g, {}, 1000, 1);
  auto dist = oracle::floyd_warshall(30, edges, true);
  for (const auto& p : cand) {
    CHECK(dist[p.src][p.dst] == 2);
    CHECK_FALSE(g.linked(p.src, p.dst));
  }
  CHECK(std::is_sorted(cand.begin(), cand.end()));
  auto few = regularizer_candidates(g, {}, 5, 1);
  CHECK(few.size() <= 5);
  CHECK(few == regularizer_candidates(g, {}, 5, 1));
}

TEST_CASE("a zero decision predicts a positive link") {
  Model m;
  m.standardization.mean = Eigen::VectorXd::Zero(2);
  m.standardization.stdev = Eigen::VectorXd::Ones(2);
  m.weights = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
  CHECK(predict(m, x).label == 1);
  m.bias = -1e-12;
  CHECK(predict(m, x).label == -1);
  CHECK_THROWS(predict(m, Eigen::VectorXd::Ones(3)));
}

TEST_CASE("model JSON round trip") {
  Rng rng(12);
  for (auto kind : {KernelKind::Linear, KernelKind::Rbf}) {
    auto p = random_problem(10, 0, rng, kind, false);
    auto sol = solve_dual(p, BalanceRegularizer::empty(p.x.rows()));
    features::Standardization st;
    st.mean = Eigen::VectorXd::Zero(4);
    st.stdev = Eigen::VectorXd::Ones(4);
    auto m = make_model(p, sol, st, {1.0, 0.5, 0.0, sampling::WeightMode::Reliability});
    auto text = to_json(m);
    auto back = model_from_json(text);
    CHECK(to_json(back) == text);
    for (Eigen::Index r = 0; r < p.x.rows(); ++r) {
      Eigen::VectorXd x = p.x.row(r).transpose();
      CHECK(predict(back, x).decision == predict(m, x).decision);
    }
  }
  CHECK_THROWS(model_from_json("{}"));
}

TEST_CASE("ablation variants") {
  Hyperparameters full{1.0, 0.5, 0.1, sampling::WeightMode::Reliability};
  auto v = ablation_variants(full);
  REQUIRE(v.size() == 5);
  CHECK(v[0].name == "full");
  CHECK(v[1].hyper.negative_cost == 1.0);
  CHECK(v[1].hyper.balance_weight == 0.1);
  CHECK(v[2].hyper.weight_mode == sampling::WeightMode::Uniform);
  CHECK(v[2].hyper.negative_cost == 0.5);
  CHECK(v[3].hyper.balance_weight == 0.0);
  CHECK(v[4].hyper.negative_cost == 1.0);
  CHECK(v[4].hyper.weight_mode == sampling::WeightMode::Uniform);
  CHECK(v[4].hyper.balance_weight == 0.0);
  CHECK_THROWS(ablation_config(-1, sampling::WeightMode::Uniform, 0));
}

TEST_CASE("bad problems are rejected") {
  Rng rng(13);
  auto p = random_problem(6, 0, rng, KernelKind::Rbf, true);
  p.costs[0] = -1;
  CHECK_THROWS(p.validate());
  p.costs[0] = 1;
  p.labels[0] = 0;
  CHECK_THROWS(p.validate());
  KernelSpec k;
  k.kind = KernelKind::Rbf;
  k.bandwidth = 0;
  CHECK_THROWS(k.validate());
}
