#include "nelp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "nelp/util.hpp"

namespace nelp::solver {

void KernelSpec::validate() const {
  if (kind == KernelKind::Rbf && !(bandwidth > 0.0)) throw std::invalid_argument("rbf bandwidth must be > 0");
}

double KernelSpec::operator()(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                              const Eigen::Ref<const Eigen::RowVectorXd>& b) const {
  if (kind == KernelKind::Linear) return a.dot(b);
  return std::exp(-(a - b).squaredNorm() / (2.0 * bandwidth * bandwidth));
}

std::string_view to_string(KernelKind k) { return k == KernelKind::Linear ? "linear" : "rbf"; }

KernelKind kernel_from_string(std::string_view s) {
  if (s == "linear") return KernelKind::Linear;
  if (s == "rbf") return KernelKind::Rbf;
  throw std::invalid_argument("unknown kernel: " + std::string(s));
}

Eigen::MatrixXd cross_gram(const RowMatrix& a, const RowMatrix& b, const KernelSpec& kernel) {
  kernel.validate();
  if (a.cols() != b.cols()) throw std::invalid_argument("cross_gram: dimension mismatch");
  Eigen::MatrixXd k = a * b.transpose();
  if (kernel.kind == KernelKind::Rbf) {
    Eigen::VectorXd na = a.rowwise().squaredNorm();
    Eigen::VectorXd nb = b.rowwise().squaredNorm();
    const double scale = -1.0 / (2.0 * kernel.bandwidth * kernel.bandwidth);
    for (Eigen::Index r = 0; r < k.rows(); ++r)
      for (Eigen::Index c = 0; c < k.cols(); ++c)
        k(r, c) = std::exp(scale * std::max(0.0, na(r) + nb(c) - 2.0 * k(r, c)));
  }
  return k;
}

Eigen::MatrixXd gram(const RowMatrix& x, const KernelSpec& kernel) {
  Eigen::MatrixXd k = cross_gram(x, x, kernel);
  if (kernel.kind == KernelKind::Rbf) k.diagonal().setOnes();
  return 0.5 * (k + k.transpose());
}

BalanceRegularizer BalanceRegularizer::empty(Eigen::Index n) {
  BalanceRegularizer r;
  r.coupling.resize(n, n);
  r.laplacian.resize(n, n);
  r.degree = Eigen::VectorXd::Zero(n);
  return r;
}

BalanceRegularizer build_balance_matrix(std::span<const Pair> samples, const PositiveNetwork& g_p) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  std::unordered_map<Pair, Eigen::Index, PairHash> index;
  index.reserve(samples.size());
  for (Eigen::Index h = 0; h < n; ++h) {
    const auto& p = samples[static_cast<std::size_t>(h)];
    g_p.check_user(p.src);
    g_p.check_user(p.dst);
    if (!index.emplace(p, h).second) throw std::invalid_argument("build_balance_matrix: duplicate sample pair");
  }
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
  for (Eigen::Index h = 0; h < n; ++h) {
    const auto [i, k] = samples[static_cast<std::size_t>(h)];
    if (g_p.linked(i, k)) continue;
    for (auto j : g_p.neighbors(i)) {
      if (j == k || g_p.linked(j, k)) continue;
      auto it = index.find({j, k});
      if (it == index.end()) continue;
      entries.emplace_back(h, it->second, 1.0);
      degree(h) += 1.0;
    }
  }
  BalanceRegularizer reg;
  reg.coupling.resize(n, n);
  reg.coupling.setFromTriplets(entries.begin(), entries.end());
  reg.degree = degree;
  std::vector<Eigen::Triplet<double>> lap;
  lap.reserve(entries.size() + static_cast<std::size_t>(n));
  for (const auto& t : entries) lap.emplace_back(t.row(), t.col(), -1.0);
  for (Eigen::Index h = 0; h < n; ++h)
    if (degree(h) != 0.0) lap.emplace_back(h, h, degree(h));
  reg.laplacian.resize(n, n);
  reg.laplacian.setFromTriplets(lap.begin(), lap.end());
  return reg;
}

std::vector<Pair> regularizer_candidates(const PositiveNetwork& g_p, std::span<const Pair> labeled, std::size_t limit,
                                         std::uint64_t seed) {
  std::unordered_set<Pair, PairHash> labeled_set(labeled.begin(), labeled.end());
  std::vector<Pair> d2;
  std::vector<int> mark(static_cast<std::size_t>(g_p.num_users()), -1);
  for (UserId i = 0; i < g_p.num_users(); ++i) {
    mark[static_cast<std::size_t>(i)] = i;
    for (auto a : g_p.out(i)) mark[static_cast<std::size_t>(a)] = i;
    for (auto a : g_p.out(i))
      for (auto k : g_p.out(a)) {
        if (mark[static_cast<std::size_t>(k)] == i) continue;
        mark[static_cast<std::size_t>(k)] = i;
        if (g_p.linked(i, k) || labeled_set.contains({i, k})) continue;
        d2.push_back({i, k});
      }
  }
  std::unordered_set<Pair, PairHash> d2_set(d2.begin(), d2.end());
  std::vector<Pair> anchored, loose;
  for (const auto& p : d2) {
    bool to_labeled = false, to_any = false;
    for (auto j : g_p.neighbors(p.src)) {
      if (j == p.dst || g_p.linked(j, p.dst)) continue;
      if (labeled_set.contains({j, p.dst})) {
        to_labeled = true;
        break;
      }
      if (d2_set.contains({j, p.dst})) to_any = true;
    }
    if (to_labeled)
      anchored.push_back(p);
    else if (to_any)
      loose.push_back(p);
  }
  Rng rng(seed);
  auto take = [&](std::vector<Pair>& tier, std::size_t budget) {
    std::sort(tier.begin(), tier.end());
    if (tier.size() <= budget) return;
    for (std::size_t t = 0; t < budget; ++t) std::swap(tier[t], tier[t + uniform_index(rng, tier.size() - t)]);
    tier.resize(budget);
  };
  take(anchored, limit);
  take(loose, limit - anchored.size());
  anchored.insert(anchored.end(), loose.begin(), loose.end());
  std::sort(anchored.begin(), anchored.end());
  return anchored;
}

void TrainingProblem::validate() const {
  kernel.validate();
  const auto l = labels.size();
  if (l < 2) throw std::invalid_argument("training problem needs at least 2 labeled rows");
  if (costs.size() != l) throw std::invalid_argument("one cost per labeled row required");
  if (static_cast<std::size_t>(x.rows()) < l) throw std::invalid_argument("fewer feature rows than labels");
  bool pos = false, neg = false;
  for (auto y : labels) {
    if (y == 1)
      pos = true;
    else if (y == -1)
      neg = true;
    else
      throw std::invalid_argument("labels must be +1 or -1");
  }
  if (!pos || !neg) throw std::invalid_argument("training problem needs both classes");
  for (auto c : costs)
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("costs must be finite and > 0");
  if (!(balance_weight >= 0.0)) throw std::invalid_argument("balance weight must be >= 0");
}

namespace {

// Access to Q: full column i, and a full recomputation g = Q beta - 1.
struct QOperator {
  std::function<void(std::size_t, Eigen::VectorXd&)> column;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> gradient;
};

// Least-recently-used columns of Q.
class ColumnCache {
 public:
  ColumnCache(std::size_t rows, std::size_t bytes)
      : rows_(rows), capacity_(std::max<std::size_t>(2, bytes / (sizeof(double) * std::max<std::size_t>(rows, 1)))) {}

  const Eigen::VectorXd& get(std::size_t i, const QOperator& q) {
    ++clock_;
    if (auto it = slot_of_.find(i); it != slot_of_.end()) {
      slots_[it->second].used = clock_;
      return slots_[it->second].values;
    }
    std::size_t k = slots_.size();
    if (k < capacity_) {
      slots_.push_back({i, 0, Eigen::VectorXd(static_cast<Eigen::Index>(rows_))});
    } else {
      k = 0;
      for (std::size_t s = 1; s < slots_.size(); ++s)
        if (slots_[s].used < slots_[k].used) k = s;
      slot_of_.erase(slots_[k].index);
      slots_[k].index = i;
    }
    slots_[k].used = clock_;
    slot_of_[i] = k;
    q.column(i, slots_[k].values);
    return slots_[k].values;
  }

 private:
  struct Slot {
    std::size_t index;
    std::uint64_t used;
    Eigen::VectorXd values;
  };
  std::size_t rows_;
  std::size_t capacity_;
  std::uint64_t clock_ = 0;
  std::vector<Slot> slots_;
  std::unordered_map<std::size_t, std::size_t> slot_of_;
};

struct SmoResult {
  Eigen::VectorXd beta;
  Eigen::VectorXd gradient;
  double gap = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> trace;
};

double objective_from_gradient(const Eigen::VectorXd& beta, const Eigen::VectorXd& grad) {
  // grad = Q beta - 1, so beta' Q beta = beta' (grad + 1).
  return beta.sum() - 0.5 * (beta.dot(grad) + beta.sum());
}

// Minimizes beta' Q beta / 2 - sum(beta) s.t. y' beta = 0, 0 <= beta <= s,
// where Q already carries the label signs. Bounded rows that cannot re-enter
// the working set are shrunk away as in libsvm and restored before the final
// optimality check.
SmoResult smo(const std::vector<int>& y, const std::vector<double>& upper, const Eigen::VectorXd& diag,
              const QOperator& q, const SolverOptions& options) {
  const std::size_t l = y.size();
  SmoResult res;
  res.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(l));
  res.gradient = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(l), -1.0);
  auto& a = res.beta;
  auto& g = res.gradient;
  constexpr double tau = 1e-12;
  const std::size_t max_iter = options.max_sweeps * std::max<std::size_t>(l, 1);
  const std::size_t shrink_every = std::clamp<std::size_t>(l, 1, 1000);

  auto at = [&](std::size_t t) { return a(static_cast<Eigen::Index>(t)); };
  auto at_upper = [&](std::size_t t) { return at(t) >= upper[t]; };
  auto at_lower = [&](std::size_t t) { return at(t) <= 0.0; };
  auto in_up = [&](std::size_t t) { return y[t] == 1 ? !at_upper(t) : !at_lower(t); };
  auto in_low = [&](std::size_t t) { return y[t] == 1 ? !at_lower(t) : !at_upper(t); };
  auto v = [&](std::size_t t) { return -y[t] * g(static_cast<Eigen::Index>(t)); };

  std::vector<std::size_t> active(l);
  std::iota(active.begin(), active.end(), std::size_t{0});
  ColumnCache cache(l, options.cache_bytes);
  auto restore = [&] {
    if (active.size() == l) return;
    q.gradient(a, g);
    active.resize(l);
    std::iota(active.begin(), active.end(), std::size_t{0});
  };
  bool restored_once = false;
  auto shrink = [&] {
    double up = -std::numeric_limits<double>::infinity(), low = -std::numeric_limits<double>::infinity();
    for (auto t : active) {
      if (in_up(t)) up = std::max(up, v(t));
      if (in_low(t)) low = std::max(low, -v(t));
    }
    if (!restored_once && up + low <= 10.0 * options.tolerance) {
      restored_once = true;
      restore();
    }
    std::erase_if(active, [&](std::size_t t) {
      const double gt = g(static_cast<Eigen::Index>(t));
      if (at_upper(t)) return y[t] == 1 ? -gt > up : -gt > low;
      if (at_lower(t)) return y[t] == 1 ? gt > low : gt > up;
      return false;
    });
  };

  std::size_t countdown = shrink_every;
  Eigen::VectorXd scratch;
  while (true) {
    if (options.shrinking && --countdown == 0) {
      countdown = shrink_every;
      shrink();
    }
    // Second-order working set selection: i maximizes the violation, j the
    // guaranteed decrease of the objective along the pair direction.
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = l, j = l;
    for (auto t : active) {
      if (in_up(t) && v(t) > gmax) {
        gmax = v(t);
        i = t;
      }
    }
    const Eigen::VectorXd* column_i = i == l ? nullptr : &cache.get(i, q);
    double best = std::numeric_limits<double>::infinity();
    for (auto t : active) {
      if (!in_low(t)) continue;
      const double vt = v(t);
      gmin = std::min(gmin, vt);
      const double b = gmax - vt;
      if (i == l || b <= 0) continue;
      const auto tt = static_cast<Eigen::Index>(t);
      double curv = diag(static_cast<Eigen::Index>(i)) + diag(tt) - 2.0 * y[i] * y[t] * (*column_i)(tt);
      if (curv <= 0) curv = tau;
      if (-b * b / curv < best) {
        best = -b * b / curv;
        j = t;
      }
    }
    res.gap = (i == l || j == l) ? 0.0 : gmax - gmin;
    if (i == l || j == l || res.gap <= options.tolerance) {
      if (active.size() < l) {
        restore();
        countdown = 2;  // recheck the full set before shrinking again
        continue;
      }
      res.converged = true;
      break;
    }
    if (res.iterations >= max_iter) break;

    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    const Eigen::VectorXd& qi = *column_i;
    const Eigen::VectorXd& qj = cache.get(j, q);
    const double qij = qi(jj);
    const double ci = upper[i], cj = upper[j];
    const double old_ai = a(ii), old_aj = a(jj);
    if (y[i] != y[j]) {
      double quad = diag(ii) + diag(jj) + 2.0 * qij;
      if (quad <= 0) quad = tau;
      const double delta = (-g(ii) - g(jj)) / quad;
      const double diff = a(ii) - a(jj);
      a(ii) += delta;
      a(jj) += delta;
      if (diff > 0) {
        if (a(jj) < 0) {
          a(jj) = 0;
          a(ii) = diff;
        }
      } else if (a(ii) < 0) {
        a(ii) = 0;
        a(jj) = -diff;
      }
      if (diff > ci - cj) {
        if (a(ii) > ci) {
          a(ii) = ci;
          a(jj) = ci - diff;
        }
      } else if (a(jj) > cj) {
        a(jj) = cj;
        a(ii) = cj + diff;
      }
    } else {
      double quad = diag(ii) + diag(jj) - 2.0 * qij;
      if (quad <= 0) quad = tau;
      const double delta = (g(ii) - g(jj)) / quad;
      const double sum = a(ii) + a(jj);
      a(ii) -= delta;
      a(jj) += delta;
      if (sum > ci) {
        if (a(ii) > ci) {
          a(ii) = ci;
          a(jj) = sum - ci;
        }
      } else if (a(jj) < 0) {
        a(jj) = 0;
        a(ii) = sum;
      }
      if (sum > cj) {
        if (a(jj) > cj) {
          a(jj) = cj;
          a(ii) = sum - cj;
        }
      } else if (a(ii) < 0) {
        a(ii) = 0;
        a(jj) = sum;
      }
    }
    const double di = a(ii) - old_ai, dj = a(jj) - old_aj;
    for (auto t : active) {
      const auto tt = static_cast<Eigen::Index>(t);
      g(tt) += di * qi(tt) + dj * qj(tt);
    }
    ++res.iterations;
    if (options.record_trace && res.iterations % l == 0) {
      q.gradient(a, scratch);
      res.trace.push_back(objective_from_gradient(a, scratch));
    }
  }
  restore();
  if (options.record_trace) res.trace.push_back(objective_from_gradient(a, g));
  return res;
}

// Bias from the margin conditions, given f0_i = sum_k alpha_k K(x_k, x_i).
double recover_bias(const std::vector<int>& y, const std::vector<double>& upper, const Eigen::VectorXd& beta,
                    const Eigen::VectorXd& f0, std::size_t& free_count) {
  std::vector<double> free_values;
  double lower = -std::numeric_limits<double>::infinity();
  double higher = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < y.size(); ++t) {
    const auto tt = static_cast<Eigen::Index>(t);
    const double target = y[t] - f0(tt);
    if (beta(tt) > 0.0 && beta(tt) < upper[t]) {
      free_values.push_back(target);
    } else if (beta(tt) <= 0.0) {
      // y f >= 1
      if (y[t] == 1)
        lower = std::max(lower, target);
      else
        higher = std::min(higher, target);
    } else {
      // y f <= 1
      if (y[t] == 1)
        higher = std::min(higher, target);
      else
        lower = std::max(lower, target);
    }
  }
  free_count = free_values.size();
  if (!free_values.empty()) {
    auto mid = free_values.begin() + static_cast<std::ptrdiff_t>(free_values.size() / 2);
    std::nth_element(free_values.begin(), mid, free_values.end());
    if (free_values.size() % 2 == 1) return *mid;
    double upper_mid = *mid;
    double lower_mid = *std::max_element(free_values.begin(), mid);
    return 0.5 * (lower_mid + upper_mid);
  }
  if (std::isfinite(lower) && std::isfinite(higher)) return 0.5 * (lower + higher);
  if (std::isfinite(lower)) return lower;
  if (std::isfinite(higher)) return higher;
  return 0.0;
}

double margin_residual(const std::vector<int>& y, const std::vector<double>& upper, const Eigen::VectorXd& beta,
                       const Eigen::VectorXd& f0, double bias) {
  double worst = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const auto tt = static_cast<Eigen::Index>(t);
    const double margin = y[t] * (f0(tt) + bias);
    double v;
    if (beta(tt) <= 0.0)
      v = std::max(0.0, 1.0 - margin);
    else if (beta(tt) >= upper[t])
      v = std::max(0.0, margin - 1.0);
    else
      v = std::abs(margin - 1.0);
    worst = std::max(worst, v);
  }
  return worst;
}

struct DenseParts {
  Eigen::MatrixXd k;  // n x n
  Eigen::MatrixXd s;  // (I + C_b L K)^-1 J', n x l
  Eigen::MatrixXd q;  // l x l
};

DenseParts dense_parts(const TrainingProblem& problem, const BalanceRegularizer& reg) {
  const auto n = problem.x.rows();
  const auto l = static_cast<Eigen::Index>(problem.labeled());
  DenseParts parts;
  parts.k = gram(problem.x, problem.kernel);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  if (problem.balance_weight > 0.0) a.noalias() += problem.balance_weight * (reg.laplacian * parts.k);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (!(lu.rcond() > 1e-14)) {
    a.diagonal().array() += 1e-10;
    lu.compute(a);
  }
  parts.s = lu.solve(Eigen::MatrixXd::Identity(n, l));
  Eigen::VectorXd y(l);
  for (Eigen::Index t = 0; t < l; ++t) y(t) = problem.labels[static_cast<std::size_t>(t)];
  Eigen::MatrixXd kq = parts.k.topRows(l) * parts.s;
  parts.q = y.asDiagonal() * kq * y.asDiagonal();
  parts.q = 0.5 * (parts.q + parts.q.transpose()).eval();
  return parts;
}

void check_shapes(const TrainingProblem& problem, const BalanceRegularizer& reg) {
  problem.validate();
  if (reg.size() != problem.x.rows()) throw std::invalid_argument("regularizer size differs from sample count");
}

}  // namespace

Eigen::MatrixXd dual_hessian(const TrainingProblem& problem, const BalanceRegularizer& reg) {
  check_shapes(problem, reg);
  return dense_parts(problem, reg).q;
}

double dual_objective(const Eigen::MatrixXd& q, const Eigen::VectorXd& beta) {
  return beta.sum() - 0.5 * beta.dot(q * beta);
}

DualSolution solve_dual(const TrainingProblem& problem, const BalanceRegularizer& reg, const SolverOptions& options) {
  check_shapes(problem, reg);
  const auto l = problem.labeled();
  const auto li = static_cast<Eigen::Index>(l);
  const auto d = problem.x.cols();
  const auto& y = problem.labels;
  Eigen::VectorXd yv(li);
  for (Eigen::Index t = 0; t < li; ++t) yv(t) = y[static_cast<std::size_t>(t)];
  DualSolution sol;

  const bool linear_route = problem.kernel.kind == KernelKind::Linear && options.route == SolverOptions::Route::Auto;
  if (linear_route) {
    // Q = Y X_l M^-1 X_l' Y with M = I + C_b X' L X, factored as R R'.
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
    if (problem.balance_weight > 0.0) {
      Eigen::MatrixXd lx = reg.laplacian * problem.x;
      m.noalias() += problem.balance_weight * (problem.x.transpose() * lx);
      m = 0.5 * (m + m.transpose()).eval();
    }
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
      m.diagonal().array() += 1e-10;
      llt.compute(m);
    }
    RowMatrix z = llt.matrixL().solve(problem.x.topRows(li).transpose()).transpose();
    Eigen::VectorXd diag = z.rowwise().squaredNorm();
    // Q = Y Z Z' Y is never formed; a column is one product with Z.
    QOperator q{[&](std::size_t i, Eigen::VectorXd& out) {
                  const auto ii = static_cast<Eigen::Index>(i);
                  out.noalias() = z * z.row(ii).transpose();
                  out.array() *= yv(ii) * yv.array();
                },
                [&](const Eigen::VectorXd& beta, Eigen::VectorXd& g) {
                  Eigen::VectorXd w = z.transpose() * yv.cwiseProduct(beta);
                  g = yv.cwiseProduct(z * w).array() - 1.0;
                }};
    auto res = smo(y, problem.costs, diag, q, options);
    sol.beta = res.beta;
    sol.gap = res.gap;
    sol.converged = res.converged;
    sol.iterations = res.iterations;
    sol.objective_trace = std::move(res.trace);
    sol.objective = objective_from_gradient(res.beta, res.gradient);

    Eigen::VectorXd yb = yv.cwiseProduct(sol.beta);
    Eigen::VectorXd v = problem.x.topRows(li).transpose() * yb;
    sol.weights = llt.solve(v);
    // alpha = J'Y beta - C_b L X w.
    sol.alpha = Eigen::VectorXd::Zero(problem.x.rows());
    sol.alpha.head(li) = yb;
    if (problem.balance_weight > 0.0) sol.alpha -= problem.balance_weight * (reg.laplacian * (problem.x * sol.weights));
    Eigen::VectorXd f0 = problem.x.topRows(li) * sol.weights;
    sol.bias = recover_bias(y, problem.costs, sol.beta, f0, sol.free_support_vectors);
    sol.kkt_residual = margin_residual(y, problem.costs, sol.beta, f0, sol.bias);
    return sol;
  }

  auto parts = dense_parts(problem, reg);
  Eigen::VectorXd diag = parts.q.diagonal();
  QOperator q{[&](std::size_t i, Eigen::VectorXd& out) { out = parts.q.col(static_cast<Eigen::Index>(i)); },
              [&](const Eigen::VectorXd& beta, Eigen::VectorXd& g) { g = (parts.q * beta).array() - 1.0; }};
  auto res = smo(y, problem.costs, diag, q, options);
  sol.beta = res.beta;
  sol.gap = res.gap;
  sol.converged = res.converged;
  sol.iterations = res.iterations;
  sol.objective_trace = std::move(res.trace);
  sol.objective = objective_from_gradient(res.beta, res.gradient);
  Eigen::VectorXd yb = yv.cwiseProduct(sol.beta);
  sol.alpha = parts.s * yb;
  if (problem.kernel.kind == KernelKind::Linear) sol.weights = problem.x.transpose() * sol.alpha;
  Eigen::VectorXd f0 = parts.k.topRows(li) * sol.alpha;
  sol.bias = recover_bias(y, problem.costs, sol.beta, f0, sol.free_support_vectors);
  sol.kkt_residual = margin_residual(y, problem.costs, sol.beta, f0, sol.bias);
  return sol;
}

Hyperparameters ablation_config(double negative_cost, sampling::WeightMode weight_mode, double balance_weight,
                                double positive_cost) {
  if (negative_cost < 0 || balance_weight < 0 || positive_cost < 0)
    throw std::invalid_argument("ablation parameters must be nonnegative");
  return {positive_cost, negative_cost, balance_weight, weight_mode};
}

std::vector<AblationVariant> ablation_variants(const Hyperparameters& full) {
  using sampling::WeightMode;
  return {
      {"full", full},
      {"C_n=1", ablation_config(1.0, full.weight_mode, full.balance_weight, full.positive_cost)},
      {"c_j=1", ablation_config(full.negative_cost, WeightMode::Uniform, full.balance_weight, full.positive_cost)},
      {"C_b=0", ablation_config(full.negative_cost, full.weight_mode, 0.0, full.positive_cost)},
      {"all-off", ablation_config(1.0, WeightMode::Uniform, 0.0, full.positive_cost)},
  };
}

Model make_model(const TrainingProblem& problem, const DualSolution& solution, features::Standardization stats,
                 const Hyperparameters& hyper) {
  Model model;
  model.kernel = problem.kernel;
  model.standardization = std::move(stats);
  model.bias = solution.bias;
  model.hyper = hyper;
  if (problem.kernel.kind == KernelKind::Linear) {
    model.weights = solution.weights;
  } else {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < solution.alpha.size(); ++k)
      if (solution.alpha(k) != 0.0) keep.push_back(k);
    model.expansion_rows.resize(static_cast<Eigen::Index>(keep.size()), problem.x.cols());
    model.expansion_coef.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t r = 0; r < keep.size(); ++r) {
      model.expansion_rows.row(static_cast<Eigen::Index>(r)) = problem.x.row(keep[r]);
      model.expansion_coef(static_cast<Eigen::Index>(r)) = solution.alpha(keep[r]);
    }
  }
  return model;
}

Prediction predict(const Model& model, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != model.dimension())
    throw std::invalid_argument("predict: feature dimension does not match the model schema");
  double decision = model.bias;
  if (model.kernel.kind == KernelKind::Linear) {
    decision += model.weights.dot(x);
  } else {
    for (Eigen::Index k = 0; k < model.expansion_rows.rows(); ++k)
      decision += model.expansion_coef(k) * model.kernel(model.expansion_rows.row(k), x.transpose());
  }
  return {decision, decision < 0.0 ? -1 : 1};
}

std::vector<Prediction> predict_raw(const Model& model, const RowMatrix& raw, std::string_view schema_version,
                                    unsigned threads) {
  if (schema_version != model.schema_version)
    throw std::invalid_argument("predict: schema " + std::string(schema_version) + " does not match model schema " +
                                model.schema_version);
  if (static_cast<std::size_t>(raw.cols()) != model.dimension())
    throw std::invalid_argument("predict: feature dimension does not match the model schema");
  RowMatrix z = model.standardization.apply(raw);
  std::vector<Prediction> out(static_cast<std::size_t>(raw.rows()));
  parallel_for(out.size(), threads, [&](std::size_t r) {
    out[r] = predict(model, z.row(static_cast<Eigen::Index>(r)).transpose());
  });
  return out;
}

namespace {

using Json = nlohmann::ordered_json;

Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

Eigen::VectorXd vec_from(const Json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) v(static_cast<Eigen::Index>(k)) = a[k].get<double>();
  return v;
}

}  // namespace

std::string to_json(const Model& model) {
  Json j;
  j["format"] = "nelp-model";
  j["format_version"] = 1;
  j["schema_version"] = model.schema_version;
  j["kernel"] = {{"kind", to_string(model.kernel.kind)}, {"bandwidth", model.kernel.bandwidth}};
  j["hyperparameters"] = {{"C_p", model.hyper.positive_cost},
                          {"C_n", model.hyper.negative_cost},
                          {"C_b", model.hyper.balance_weight},
                          {"weight_mode", model.hyper.weight_mode == sampling::WeightMode::Uniform ? "uniform"
                                                                                                  : "reliability"}};
  j["standardization"] = {{"mean", vec_json(model.standardization.mean)},
                          {"stdev", vec_json(model.standardization.stdev)},
                          {"clip", model.standardization.clip}};
  j["bias"] = model.bias;
  j["weights"] = vec_json(model.weights);
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < model.expansion_rows.rows(); ++r)
    rows.push_back(vec_json(model.expansion_rows.row(r).transpose()));
  j["expansion_rows"] = rows;
  j["expansion_coef"] = vec_json(model.expansion_coef);
  return j.dump(1);
}

Model model_from_json(std::string_view text) {
  auto j = Json::parse(text);
  if (j.value("format", "") != "nelp-model") throw std::invalid_argument("not a model file");
  if (j.at("format_version").get<int>() != 1) throw std::invalid_argument("unsupported model format version");
  Model m;
  m.schema_version = j.at("schema_version").get<std::string>();
  m.kernel.kind = kernel_from_string(j.at("kernel").at("kind").get<std::string>());
  m.kernel.bandwidth = j.at("kernel").at("bandwidth").get<double>();
  const auto& h = j.at("hyperparameters");
  m.hyper.positive_cost = h.at("C_p").get<double>();
  m.hyper.negative_cost = h.at("C_n").get<double>();
  m.hyper.balance_weight = h.at("C_b").get<double>();
  m.hyper.weight_mode =
      h.at("weight_mode").get<std::string>() == "uniform" ? sampling::WeightMode::Uniform : sampling::WeightMode::Reliability;
  m.standardization.mean = vec_from(j.at("standardization").at("mean"));
  m.standardization.stdev = vec_from(j.at("standardization").at("stdev"));
  m.standardization.clip = j.at("standardization").at("clip").get<double>();
  m.bias = j.at("bias").get<double>();
  m.weights = vec_from(j.at("weights"));
  const auto& rows = j.at("expansion_rows");
  m.expansion_coef = vec_from(j.at("expansion_coef"));
  m.expansion_rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m.dimension()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    m.expansion_rows.row(static_cast<Eigen::Index>(r)) = vec_from(rows[r]).transpose();
  return m;
}

}  // namespace nelp::solver
