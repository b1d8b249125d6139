#include "tcrobust/cps.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "tcrobust/errors.hpp"

namespace tcr {

double ConsistentPriceSystem::z0_at(const ScenarioTree& tree, std::size_t layer,
                                    std::size_t omega) const {
  return z0.at(layer).at(tree.layer_cell(layer, omega));
}

double ConsistentPriceSystem::z1_at(const ScenarioTree& tree, std::size_t layer,
                                    std::size_t omega) const {
  return z1.at(layer).at(tree.layer_cell(layer, omega));
}

double ConsistentPriceSystem::shadow_price(const ScenarioTree& tree, std::size_t layer,
                                           std::size_t omega) const {
  const double d = z0_at(tree, layer, omega);
  if (!(d > 0.0)) throw DomainError("shadow_price: Z0 is not positive");
  return z1_at(tree, layer, omega) / d;
}

std::vector<double> ConsistentPriceSystem::terminal_density(const ScenarioTree& tree) const {
  const std::size_t last = tree.num_layers() - 1;
  std::vector<double> out(tree.num_scenarios());
  for (std::size_t w = 0; w < out.size(); ++w) out[w] = z0_at(tree, last, w);
  return out;
}

std::vector<double> ConsistentPriceSystem::measure(const ScenarioTree& tree) const {
  auto q = terminal_density(tree);
  for (std::size_t w = 0; w < q.size(); ++w) q[w] *= tree.probability(w);
  return q;
}

namespace {

double layer_time(const ScenarioTree& tree, std::size_t k) {
  return k == 0 ? 0.0 : tree.events()[k - 1].time;
}

// Prices a layer's Z must straddle: the value at the layer start and the
// left limit at the next event (or the value at T when T is not an event).
struct SpreadPoint {
  std::size_t layer;
  std::size_t cell;
  double price;
  bool operator<(const SpreadPoint& o) const {
    return std::tie(layer, cell, price) < std::tie(o.layer, o.cell, o.price);
  }
};

std::vector<SpreadPoint> spread_points(const ModelFamily& family, std::size_t theta) {
  const auto& tree = family.tree();
  const std::size_t n = tree.num_events();
  std::set<SpreadPoint> pts;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = layer_time(tree, k);
    for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
      const auto& S = family.price(theta, w);
      const std::size_t c = tree.layer_cell(k, w);
      pts.insert({k, c, S.value_at(t)});
      if (k < n) {
        pts.insert({k, c, S.left_limit_at(tree.events()[k].time)});
      } else if (!tree.event_at_horizon()) {
        pts.insert({k, c, S.value_at(tree.horizon())});
      }
    }
  }
  return {pts.begin(), pts.end()};
}

class CpsVariables {
 public:
  explicit CpsVariables(const ScenarioTree& tree) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < tree.num_layers(); ++k) {
      offset_.push_back(off);
      off += tree.layer(k).size();
    }
    per_process_ = off;
  }
  std::size_t z0(std::size_t k, std::size_t c) const { return offset_[k] + c; }
  std::size_t z1(std::size_t k, std::size_t c) const { return per_process_ + offset_[k] + c; }
  std::size_t count() const { return 2 * per_process_; }

  ConsistentPriceSystem extract(const ScenarioTree& tree, const std::vector<double>& x,
                                std::size_t theta, double lambda) const {
    ConsistentPriceSystem cps;
    cps.theta = theta;
    cps.lambda = lambda;
    for (std::size_t k = 0; k < tree.num_layers(); ++k) {
      const std::size_t m = tree.layer(k).size();
      cps.z0.emplace_back(m);
      cps.z1.emplace_back(m);
      for (std::size_t c = 0; c < m; ++c) {
        cps.z0[k][c] = x[z0(k, c)];
        cps.z1[k][c] = x[z1(k, c)];
      }
    }
    return cps;
  }

 private:
  std::vector<std::size_t> offset_;
  std::size_t per_process_ = 0;
};

// Normalization and martingale rows shared by both programs.
void add_structure(LinearProgram& lp, const ScenarioTree& tree, const CpsVariables& v) {
  const std::size_t nv = lp.num_vars();
  {
    std::vector<double> row(nv, 0.0);
    const auto& root = tree.root();
    for (std::size_t c = 0; c < root.size(); ++c) row[v.z0(0, c)] = tree.cell_probability(root[c]);
    lp.add_row(std::move(row), RowSense::Equal, 1.0);
  }
  for (std::size_t k = 1; k < tree.num_layers(); ++k) {
    for (const auto& cell : tree.events()[k - 1].pre) {
      const std::size_t prev = tree.layer_cell(k - 1, cell.front());
      const double pc = tree.cell_probability(cell);
      for (int proc = 0; proc < 2; ++proc) {
        std::vector<double> row(nv, 0.0);
        auto var = [&](std::size_t layer, std::size_t c) {
          return proc == 0 ? v.z0(layer, c) : v.z1(layer, c);
        };
        for (std::size_t w : cell) row[var(k, tree.layer_cell(k, w))] += tree.probability(w);
        row[var(k - 1, prev)] -= pc;
        lp.add_row(std::move(row), RowSense::Equal, 0.0);
      }
    }
  }
}

void require_theta(const ModelFamily& family, std::size_t theta) {
  if (theta >= family.num_models()) throw ContractViolation("cps: model index out of range");
}

}  // namespace

CpsSearch search_cps(const ModelFamily& family, std::size_t theta, double lambda_check,
                     const CpsOptions& options) {
  require_theta(family, theta);
  if (!(lambda_check > 0.0 && lambda_check < 1.0)) {
    throw DomainError("find_cps: lambda must lie in (0, 1)");
  }
  if (!(options.delta > 0.0)) throw DomainError("find_cps: delta must be positive");
  const auto& tree = family.tree();
  const CpsVariables v(tree);
  const std::size_t s = v.count();
  LinearProgram lp(s + 1);
  lp.free[s] = true;
  lp.objective[s] = 1.0;
  add_structure(lp, tree, v);
  for (const auto& p : spread_points(family, theta)) {
    // (1 - lambda) S Z0 - Z1 + s <= 0 and Z1 - S Z0 + s <= 0.
    std::vector<double> lo(s + 1, 0.0), hi(s + 1, 0.0);
    lo[v.z0(p.layer, p.cell)] = (1.0 - lambda_check) * p.price;
    lo[v.z1(p.layer, p.cell)] = -1.0;
    lo[s] = 1.0;
    hi[v.z1(p.layer, p.cell)] = 1.0;
    hi[v.z0(p.layer, p.cell)] = -p.price;
    hi[s] = 1.0;
    lp.add_row(std::move(lo), RowSense::LessEqual, 0.0);
    lp.add_row(std::move(hi), RowSense::LessEqual, 0.0);
  }
  for (std::size_t k = 0; k < tree.num_layers(); ++k) {
    for (std::size_t c = 0; c < tree.layer(k).size(); ++c) {
      std::vector<double> row(s + 1, 0.0);
      row[v.z0(k, c)] = 1.0;
      lp.add_row(std::move(row), RowSense::GreaterEqual, options.delta);
    }
  }

  constexpr double kDecisive = 1e-7;
  CpsSearch out;
  auto accept = [&](const LpSolution& sol, bool exact) {
    out.min_slack = sol.objective;
    out.exact = exact;
    if (sol.objective < 0.0) return;
    auto cps = v.extract(tree, sol.x, theta, lambda_check);
    out.cps = std::move(cps);
  };

  const auto approx = solve_lp(lp, LpArithmetic::Double);
  if (approx.status == LpStatus::Optimal && std::abs(approx.objective) > kDecisive) {
    accept(approx, false);
    if (!out.cps || verify_cps(*out.cps, family, theta, lambda_check)) return out;
    out.cps.reset();
  }
  if (!options.exact_fallback) {
    if (approx.status == LpStatus::Optimal) accept(approx, false);
    return out;
  }
  const auto exact = solve_lp(lp, LpArithmetic::Exact);
  if (exact.status != LpStatus::Optimal) {
    throw std::runtime_error("find_cps: exact solve ended with status " +
                             std::string(to_string(exact.status)));
  }
  accept(exact, true);
  return out;
}

std::optional<ConsistentPriceSystem> find_cps(const ModelFamily& family, std::size_t theta,
                                              double lambda_check, double delta) {
  CpsOptions opt;
  opt.delta = delta;
  return search_cps(family, theta, lambda_check, opt).cps;
}

bool verify_cps(const ConsistentPriceSystem& cps, const ModelFamily& family, std::size_t theta,
                double lambda_check, const CpsCheckOptions& options) {
  if (theta >= family.num_models()) return false;
  const auto& tree = family.tree();
  const double tol = options.tol;
  if (cps.z0.size() != tree.num_layers() || cps.z1.size() != tree.num_layers()) return false;
  for (std::size_t k = 0; k < tree.num_layers(); ++k) {
    const std::size_t m = tree.layer(k).size();
    if (cps.z0[k].size() != m || cps.z1[k].size() != m) return false;
    for (std::size_t c = 0; c < m; ++c) {
      const double a = cps.z0[k][c];
      const double b = cps.z1[k][c];
      if (!std::isfinite(a) || !std::isfinite(b)) return false;
      if (options.allow_boundary ? a < -tol : !(a > 0.0)) return false;
    }
  }

  double mass = 0.0;
  for (std::size_t c = 0; c < tree.root().size(); ++c) {
    mass += tree.cell_probability(tree.root()[c]) * cps.z0[0][c];
  }
  if (std::abs(mass - 1.0) > tol) return false;

  for (std::size_t k = 1; k < tree.num_layers(); ++k) {
    for (const auto& cell : tree.events()[k - 1].pre) {
      const std::size_t prev = tree.layer_cell(k - 1, cell.front());
      const double pc = tree.cell_probability(cell);
      for (const auto* z : {&cps.z0, &cps.z1}) {
        double next = 0.0;
        for (std::size_t w : cell) next += tree.probability(w) * (*z)[k][tree.layer_cell(k, w)];
        const double here = pc * (*z)[k - 1][prev];
        if (std::abs(next - here) > tol * std::max(1.0, std::abs(here))) return false;
      }
    }
  }

  for (const auto& p : spread_points(family, theta)) {
    const double a = cps.z0[p.layer][p.cell];
    const double b = cps.z1[p.layer][p.cell];
    const double slack = tol * std::max(1.0, p.price * std::abs(a));
    if ((1.0 - lambda_check) * p.price * a - b > slack) return false;
    if (b - p.price * a > slack) return false;
  }
  return true;
}

ExtremalCps extremal_cps(const ModelFamily& family, std::size_t theta, double lambda,
                         const std::vector<double>& claim, LpArithmetic arithmetic) {
  require_theta(family, theta);
  const auto& tree = family.tree();
  if (claim.size() != tree.num_scenarios()) {
    throw ContractViolation("extremal_cps: claim has wrong length");
  }
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("extremal_cps: lambda must lie in (0, 1)");
  const CpsVariables v(tree);
  const std::size_t nv = v.count();
  LinearProgram lp(nv);
  const std::size_t last = tree.num_layers() - 1;
  for (std::size_t w = 0; w < tree.num_scenarios(); ++w) {
    lp.objective[v.z0(last, tree.layer_cell(last, w))] += tree.probability(w) * claim[w];
  }
  add_structure(lp, tree, v);
  for (const auto& p : spread_points(family, theta)) {
    std::vector<double> lo(nv, 0.0), hi(nv, 0.0);
    lo[v.z0(p.layer, p.cell)] = (1.0 - lambda) * p.price;
    lo[v.z1(p.layer, p.cell)] = -1.0;
    hi[v.z1(p.layer, p.cell)] = 1.0;
    hi[v.z0(p.layer, p.cell)] = -p.price;
    lp.add_row(std::move(lo), RowSense::LessEqual, 0.0);
    lp.add_row(std::move(hi), RowSense::LessEqual, 0.0);
  }
  const auto sol = solve_lp(lp, arithmetic);
  ExtremalCps out;
  out.status = sol.status;
  if (sol.status != LpStatus::Optimal) return out;
  out.value = sol.objective;
  out.cps = v.extract(tree, sol.x, theta, lambda);
  return out;
}

}  // namespace tcr
