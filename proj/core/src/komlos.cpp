#include "tcrobust/komlos.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "tcrobust/errors.hpp"
#include "tcrobust/integration.hpp"
#include "tcrobust/ledger.hpp"

namespace tcr {

std::vector<double> nearest_in_hull(std::span<const std::vector<double>> points,
                                    std::span<const double> target) {
  const std::size_t m = points.size();
  if (m == 0) throw ContractViolation("nearest_in_hull: no points");
  const auto d = static_cast<Eigen::Index>(target.size());
  Eigen::MatrixXd P(d, static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    if (points[i].size() != target.size()) throw ContractViolation("nearest_in_hull: dimension mismatch");
    for (Eigen::Index r = 0; r < d; ++r) {
      P(r, static_cast<Eigen::Index>(i)) = points[i][static_cast<std::size_t>(r)] -
                                           target[static_cast<std::size_t>(r)];
    }
  }
  const Eigen::VectorXd norms = P.colwise().squaredNorm();
  const double scale = std::max(norms.maxCoeff(), 1e-300);
  const double eps = 1e-14 * scale;

  Eigen::Index start = 0;
  norms.minCoeff(&start);
  std::vector<Eigen::Index> active{start};
  std::vector<double> lam{1.0};
  Eigen::VectorXd x = P.col(start);

  for (std::size_t major = 0; major < 10 * m + 100; ++major) {
    const Eigen::VectorXd dots = P.transpose() * x;
    Eigen::Index j = 0;
    dots.minCoeff(&j);
    if (x.squaredNorm() - dots(j) <= eps) break;
    if (std::find(active.begin(), active.end(), j) != active.end()) break;
    active.push_back(j);
    lam.push_back(0.0);

    for (std::size_t minor = 0; minor < 10 * m + 100; ++minor) {
      // Affine minimum-norm point of the active set.
      const auto k = static_cast<Eigen::Index>(active.size());
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k + 1, k + 1);
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
          A(a, b) = P.col(active[static_cast<std::size_t>(a)]).dot(P.col(active[static_cast<std::size_t>(b)]));
        }
        A(a, k) = 1.0;
        A(k, a) = 1.0;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
      rhs(k) = 1.0;
      const Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(rhs);
      bool interior = true;
      for (Eigen::Index a = 0; a < k; ++a) interior = interior && sol(a) > 1e-12;
      if (interior) {
        for (Eigen::Index a = 0; a < k; ++a) lam[static_cast<std::size_t>(a)] = sol(a);
        break;
      }
      double theta = 1.0;
      for (Eigen::Index a = 0; a < k; ++a) {
        const double la = lam[static_cast<std::size_t>(a)];
        if (sol(a) <= 1e-12 && la - sol(a) > 0.0) theta = std::min(theta, la / (la - sol(a)));
      }
      for (Eigen::Index a = 0; a < k; ++a) {
        auto& la = lam[static_cast<std::size_t>(a)];
        la += theta * (sol(a) - la);
      }
      std::vector<Eigen::Index> keep_idx;
      std::vector<double> keep_lam;
      for (std::size_t a = 0; a < active.size(); ++a) {
        if (lam[a] > 1e-15) {
          keep_idx.push_back(active[a]);
          keep_lam.push_back(lam[a]);
        }
      }
      if (keep_idx.size() == active.size()) {
        // No progress possible; drop the smallest weight.
        const auto it = std::min_element(keep_lam.begin(), keep_lam.end());
        const auto pos = it - keep_lam.begin();
        keep_idx.erase(keep_idx.begin() + pos);
        keep_lam.erase(keep_lam.begin() + pos);
      }
      active = std::move(keep_idx);
      lam = std::move(keep_lam);
      double total = 0.0;
      for (double l : lam) total += l;
      for (double& l : lam) l /= total;
    }
    x.setZero();
    for (std::size_t a = 0; a < active.size(); ++a) x += lam[a] * P.col(active[a]);
  }

  std::vector<double> weights(m, 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < active.size(); ++a) {
    weights[static_cast<std::size_t>(active[a])] = std::max(0.0, lam[a]);
    total += weights[static_cast<std::size_t>(active[a])];
  }
  for (double& w : weights) w /= total;
  return weights;
}

KomlosResult komlos_stabilize(std::span<const Strategy> strategies, const ModelFamily& family,
                              const KomlosOptions& options) {
  if (strategies.empty()) throw ContractViolation("komlos_stabilize: empty sequence");
  const auto& first = strategies.front();
  const auto& tree = family.tree();
  for (std::size_t n = 0; n < strategies.size(); ++n) {
    const auto& s = strategies[n];
    if (!s.layout().same_shape(first.layout()) || s.x() != first.x()) {
      throw ContractViolation("komlos_stabilize: strategies must share layout and endowment");
    }
    if (!is_admissible(s, family, options.tol).admissible) {
      throw ContractViolation("komlos_stabilize: input " + std::to_string(n) + " is not admissible");
    }
    if (options.variation_cap) {
      for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
        const double v = total_variation(s.shares(w));
        if (v > *options.variation_cap) {
          std::ostringstream msg;
          msg << "komlos_stabilize: input " << n << " has terminal share variation " << v
              << " above the cap " << *options.variation_cap
              << "; the construction needs bounded terminal variations, which a consistent "
                 "price system at a smaller cost level guarantees";
          throw DomainError(msg.str());
        }
      }
    }
  }

  const std::size_t N = strategies.size();
  std::vector<std::vector<double>> f;
  f.reserve(N);
  for (const auto& s : strategies) f.push_back(s.increments());
  std::vector<double> mean(f.front().size(), 0.0);
  for (const auto& v : f) {
    for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i] / static_cast<double>(N);
  }

  KomlosResult out;
  const std::size_t K = (N + 1) / 2;
  for (std::size_t n = 0; n < K; ++n) {
    const std::span<const std::vector<double>> tail(f.data() + n, N - n);
    auto w = nearest_in_hull(tail, mean);
    out.combinations.push_back(convex_combination(strategies.subspan(n), w));
    out.weights.push_back(std::move(w));
  }
  out.limit = out.combinations.back();
  out.limit_admissible = is_admissible(*out.limit, family, options.tol).admissible;
  return out;
}

ConvergenceTable convergence_demo(std::span<const LadlagPath> sequence, const LadlagPath& limit,
                                  const LadlagPath& S, std::span<const double> grid,
                                  const ConvergenceOptions& options) {
  if (sequence.empty()) throw ContractViolation("convergence_demo: empty sequence");
  const double T = limit.horizon();
  if (S.horizon() != T) throw ContractViolation("convergence_demo: horizon mismatch");
  for (const auto& h : sequence) {
    if (h.horizon() != T) throw ContractViolation("convergence_demo: horizon mismatch");
  }

  ConvergenceTable table;
  std::set<double> inspect{0.0, T};
  auto add_events = [&](const LadlagPath& p) {
    for (const auto& e : p.events()) inspect.insert(e.time);
  };
  add_events(limit);
  add_events(S);
  for (const auto& h : sequence) add_events(h);
  for (double t : grid) {
    if (t >= 0.0 && t <= T) inspect.insert(t);
  }
  for (double t : inspect) {
    for (const LimitKind kind : {LimitKind::Left, LimitKind::Value, LimitKind::Right}) {
      if ((kind == LimitKind::Left && t == 0.0) || (kind == LimitKind::Right && t == T)) continue;
      const double target = limit.at(t, kind);
      double worst = 0.0;
      double last = 0.0;
      for (const auto& h : sequence) {
        last = std::abs(h.at(t, kind) - target);
        worst = std::max(worst, last);
      }
      const bool ok = last <= options.abs_tol * std::max(1.0, std::abs(target)) ||
                      last <= options.decay * worst;
      if (!ok && table.pointwise_convergent) {
        table.pointwise_convergent = false;
        table.offending_time = t;
        table.offending_kind = kind;
      }
    }
  }

  for (double t : grid) {
    if (t > 0.0 && t <= T) table.times.push_back(t);
  }
  std::sort(table.times.begin(), table.times.end());
  table.times.erase(std::unique(table.times.begin(), table.times.end()), table.times.end());
  std::vector<double> reference;
  for (double t : table.times) reference.push_back(integrate_signed(S, limit, 0.0, t));
  for (const auto& h : sequence) {
    std::vector<double> row;
    for (std::size_t j = 0; j < table.times.size(); ++j) {
      row.push_back(std::abs(integrate_signed(S, h, 0.0, table.times[j]) - reference[j]));
    }
    table.errors.push_back(std::move(row));
  }
  std::size_t from = sequence.size();
  while (from > 0) {
    const auto& row = table.errors[from - 1];
    if (std::any_of(row.begin(), row.end(), [&](double e) { return e >= options.threshold; })) break;
    --from;
  }
  table.stable_from = from < sequence.size() ? from : ConvergenceTable::npos;
  return table;
}

}  // namespace tcr
