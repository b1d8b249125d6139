#include "tcrobust/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "tcrobust/cps.hpp"
#include "tcrobust/errors.hpp"

namespace tcr {

namespace {

[[noreturn]] void nonpositive_wealth(const std::string& model, const std::string& scenario,
                                     double v) {
  std::ostringstream msg;
  msg << "robust_value: terminal liquidation value " << v << " <= 0 under model " << model
      << " in scenario " << scenario;
  throw DomainError(msg.str());
}

RobustValue finish(std::vector<double> per_model) {
  RobustValue out;
  out.per_model = std::move(per_model);
  out.value = out.per_model.front();
  for (std::size_t th = 1; th < out.per_model.size(); ++th) {
    if (out.per_model[th] < out.value) {
      out.value = out.per_model[th];
      out.argmin = th;
    }
  }
  return out;
}

// A constant integrand is returned as is, so no-trade values equal U(x) exactly.
double expectation(const ScenarioTree& tree, const std::vector<double>& u) {
  if (std::all_of(u.begin(), u.end(), [&](double v) { return v == u.front(); })) return u.front();
  double e = 0.0;
  for (std::size_t w = 0; w < u.size(); ++w) e += tree.probability(w) * u[w];
  return e;
}

}  // namespace

RobustValue robust_value(const Strategy& strategy, const ModelFamily& family, const Utility& U) {
  const auto& tree = family.tree();
  std::vector<double> per(family.num_models(), 0.0), u(tree.num_scenarios());
  for (std::size_t th = 0; th < family.num_models(); ++th) {
    for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
      const double v = liquidation_value(strategy, family, th, w, tree.horizon());
      if (!(v > 0.0)) nonpositive_wealth(family.models()[th].label, tree.labels()[w], v);
      u[w] = U.value(v);
    }
    per[th] = expectation(tree, u);
  }
  return finish(std::move(per));
}

RobustValue robust_value(const LinearLedger& ledger, const ScenarioTree& tree, const Utility& U,
                         double x, std::span<const double> z) {
  std::vector<double> per(ledger.num_models(), 0.0), u(tree.num_scenarios());
  for (std::size_t th = 0; th < ledger.num_models(); ++th) {
    for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
      const double v = ledger.liquidation(th, w, ledger.terminal(), x, z);
      if (!(v > 0.0)) nonpositive_wealth(std::to_string(th), tree.labels()[w], v);
      u[w] = U.value(v);
    }
    per[th] = expectation(tree, u);
  }
  return finish(std::move(per));
}

namespace {

// Epigraph problem in v = [z, w, m]; every constraint is g_i(v) > 0 with g
// either affine (rows of G plus h) or E[U(w_theta)] - m.
class BarrierProblem {
 public:
  BarrierProblem(const LinearLedger& ledger, const ScenarioTree& tree, const Utility& U, double x)
      : tree_(tree), U_(U), nz_(ledger.num_vars()), nmod_(ledger.num_models()),
        nsc_(tree.num_scenarios()) {
    n_ = nz_ + nmod_ * nsc_ + 1;
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> consts;
    auto unit = [&](std::size_t i) {
      Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
      r(static_cast<Eigen::Index>(i)) = 1.0;
      rows.push_back(std::move(r));
      consts.push_back(0.0);
    };
    for (std::size_t i = 0; i < nz_; ++i) unit(i);
    for (std::size_t k = 0; k < nmod_ * nsc_; ++k) unit(nz_ + k);
    const double lam = ledger.lambda();
    for (std::size_t th = 0; th < nmod_; ++th) {
      for (std::size_t w = 0; w < nsc_; ++w) {
        for (std::size_t c = 1; c < ledger.checkpoints().size(); ++c) {
          const auto a = ledger.cash_coef(th, w, c);
          const auto b = ledger.share_coef(w, c);
          const double S = ledger.price(th, w, c);
          for (const double p : {(1.0 - lam) * S, S}) {
            Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
            bool any = false;
            for (std::size_t i = 0; i < nz_; ++i) {
              r(static_cast<Eigen::Index>(i)) = a[i] + p * b[i];
              any = any || r(static_cast<Eigen::Index>(i)) != 0.0;
            }
            const bool terminal = c == ledger.terminal();
            if (terminal) r(static_cast<Eigen::Index>(w_index(th, w))) = -1.0;
            if (!any && !terminal) continue;
            rows.push_back(std::move(r));
            consts.push_back(x);
          }
        }
      }
    }
    G_.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_));
    h_.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      G_.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      h_(static_cast<Eigen::Index>(i)) = consts[i];
    }
  }

  std::size_t dim() const { return n_; }
  std::size_t num_constraints() const { return static_cast<std::size_t>(G_.rows()) + nmod_; }
  std::size_t w_index(std::size_t th, std::size_t w) const { return nz_ + th * nsc_ + w; }
  std::size_t m_index() const { return n_ - 1; }

  // Utility slack per model; NaN-free only when every w > 0.
  double utility_slack(const Eigen::VectorXd& v, std::size_t th) const {
    double s = 0.0;
    for (std::size_t w = 0; w < nsc_; ++w) {
      s += tree_.probability(w) * U_.value(v(static_cast<Eigen::Index>(w_index(th, w))));
    }
    return s - v(static_cast<Eigen::Index>(m_index()));
  }

  // Barrier objective t * (-m) - sum log g_i, +inf outside the domain.
  double objective(const Eigen::VectorXd& v, double t) const {
    const Eigen::VectorXd g = G_ * v + h_;
    if ((g.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
    double f = -t * v(static_cast<Eigen::Index>(m_index())) - g.array().log().sum();
    for (std::size_t th = 0; th < nmod_; ++th) {
      const double s = utility_slack(v, th);
      if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
      f -= std::log(s);
    }
    return f;
  }

  void derivatives(const Eigen::VectorXd& v, double t, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const {
    const Eigen::VectorXd g = G_ * v + h_;
    const Eigen::VectorXd inv = g.cwiseInverse();
    grad = -G_.transpose() * inv;
    hess = G_.transpose() * inv.cwiseAbs2().asDiagonal() * G_;
    const auto mi = static_cast<Eigen::Index>(m_index());
    grad(mi) -= t;
    for (std::size_t th = 0; th < nmod_; ++th) {
      const double s = utility_slack(v, th);
      Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
      d(mi) = -1.0;
      for (std::size_t w = 0; w < nsc_; ++w) {
        const auto wi = static_cast<Eigen::Index>(w_index(th, w));
        const double p = tree_.probability(w);
        d(wi) = p * U_.derivative(v(wi));
        hess(wi, wi) -= p * U_.second_derivative(v(wi)) / s;
      }
      grad -= d / s;
      hess += d * d.transpose() / (s * s);
    }
  }

 private:
  const ScenarioTree& tree_;
  const Utility& U_;
  std::size_t nz_, nmod_, nsc_, n_ = 0;
  Eigen::MatrixXd G_;
  Eigen::VectorXd h_;
};

double max_price(const ModelFamily& family) {
  double s = 0.0;
  for (const auto& m : family.models()) {
    for (const auto& p : m.paths) {
      s = std::max({s, p.initial_value(), p.terminal_value()});
      for (std::size_t i = 0; i < p.events().size(); ++i) {
        const auto& kv = p.event_knot(i);
        s = std::max({s, kv.left, kv.value, kv.right});
      }
    }
  }
  return s;
}

}  // namespace

RobustSolution solve_robust(const ModelFamily& family, const Utility& U, double x,
                            const SolveOptions& options) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("solve_robust: x must be positive");
  const double lam = family.lambda();
  const double lam_prime = options.lambda_prime.value_or(family.lambda_prime().value_or(lam / 2));
  if (!(lam_prime > 0.0 && lam_prime < lam)) {
    throw DomainError("solve_robust: lambda' must lie in (0, lambda)");
  }

  SolveReport report;
  report.lambda_prime = lam_prime;
  bool found = false;
  for (std::size_t th = 0; th < family.num_models() && !found; ++th) {
    if (find_cps(family, th, lam_prime)) {
      report.hypothesis_model = th;
      found = true;
    }
  }
  if (!found) {
    std::ostringstream msg;
    msg << "no model admits a consistent price system at lambda' = " << lam_prime
        << "; the existence hypothesis of the robust problem is not met";
    throw HypothesisError(msg.str());
  }

  const auto& tree = family.tree();
  auto layout = std::make_shared<const StrategyLayout>(tree);
  const LinearLedger ledger(family, layout);
  const BarrierProblem prob(ledger, tree, U, x);
  const std::size_t nz = ledger.num_vars();
  const auto n = static_cast<Eigen::Index>(prob.dim());

  // Interior start: small jittered trades, w inside (0, V^liq_T), m below the objective.
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> jitter(0.5, 1.5);
  const double base = 1e-4 * x / std::max(1e-12, max_price(family));
  for (std::size_t i = 0; i < nz; ++i) v(static_cast<Eigen::Index>(i)) = base * jitter(rng);
  {
    std::vector<double> z(v.data(), v.data() + nz);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t th = 0; th < family.num_models(); ++th) {
      double eu = 0.0;
      for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
        const double wealth = 0.5 * ledger.liquidation(th, w, ledger.terminal(), x, z);
        v(static_cast<Eigen::Index>(prob.w_index(th, w))) = wealth;
        eu += tree.probability(w) * U.value(wealth);
      }
      worst = std::min(worst, eu);
    }
    v(static_cast<Eigen::Index>(prob.m_index())) = worst - std::max(1.0, std::abs(worst));
  }
  if (!std::isfinite(prob.objective(v, 1.0))) {
    throw std::runtime_error("solve_robust: interior starting point is not strictly feasible");
  }

  const double M = static_cast<double>(prob.num_constraints());
  double t = 1.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  bool stalled = false;
  while (true) {
    ++report.barrier_rounds;
    for (std::size_t inner = 0; inner < 200; ++inner) {
      if (report.iterations >= options.max_iters) break;
      prob.derivatives(v, t, grad, hess);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      Eigen::VectorXd step = ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        hess.diagonal().array() += 1e-12 * hess.diagonal().cwiseAbs().maxCoeff();
        step = hess.colPivHouseholderQr().solve(-grad);
      }
      const double decrement = -grad.dot(step);
      if (!(decrement > 1e-12)) break;
      const double f0 = prob.objective(v, t);
      double s = 1.0;
      bool moved = false;
      while (s > 1e-16) {
        const Eigen::VectorXd trial = v + s * step;
        if (prob.objective(trial, t) <= f0 - 0.25 * s * decrement) {
          v = trial;
          moved = true;
          break;
        }
        s *= 0.5;
      }
      ++report.iterations;
      if (!moved) {
        stalled = true;
        break;
      }
    }
    report.gap_bound = M / t;
    if (report.gap_bound <= options.tol) {
      report.certified = !stalled && report.iterations < options.max_iters;
      break;
    }
    if (report.iterations >= options.max_iters || stalled) break;
    t *= 10.0;
  }

  // Polish: net simultaneous buys and sells, then drop dust trades when that
  // does not lower the objective.
  std::vector<double> z(v.data(), v.data() + nz);
  const std::size_t slots = nz / 2;
  for (double& zi : z) zi = std::max(0.0, zi);
  for (std::size_t i = 0; i < slots; ++i) {
    const double both = std::min(z[i], z[slots + i]);
    z[i] -= both;
    z[slots + i] -= both;
  }
  double best = robust_value(ledger, tree, U, x, z).value;
  {
    const double dust = 1e-6 * x / std::max(1e-12, max_price(family));
    std::vector<double> clean = z;
    bool changed = false;
    for (double& zi : clean) {
      if (zi > 0.0 && zi < dust) {
        zi = 0.0;
        changed = true;
      }
    }
    if (changed) {
      const double cv = robust_value(ledger, tree, U, x, clean).value;
      if (cv >= best) {
        z = std::move(clean);
        best = cv;
      }
    }
  }

  Strategy strategy = Strategy::from_increments(layout, x, z);
  while (!is_admissible(strategy, family).admissible) {
    if (++report.shrink_steps > 200) {
      throw std::runtime_error("solve_robust: polished strategy could not be made admissible");
    }
    for (double& zi : z) zi *= 1.0 - 1e-6 * std::pow(2.0, static_cast<double>(report.shrink_steps));
    strategy = Strategy::from_increments(layout, x, z);
  }

  auto value = robust_value(strategy, family, U);
  std::ostringstream msg;
  msg << (report.certified ? "converged" : (stalled ? "line search stalled" : "iteration budget exhausted"))
      << "; barrier gap bound " << report.gap_bound;
  report.message = msg.str();
  return {std::move(strategy), std::move(value), report};
}

}  // namespace tcr
