// SPDX-License-Identifier: Apache-2.0
#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "iscap/errors.hpp"

namespace iscap::oracle {

RVec fd_gradient(const ScalarFunction& f, const RVec& x, const FdSpec& spec) {
  if (!(spec.step > 0.0) || !(spec.rel_tol > 0.0)) throw ConfigError("FdSpec needs step > 0 and rel_tol > 0");
  RVec g(x.size());
  RVec probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + spec.step;
    const double up = f(probe);
    probe(i) = x(i) - spec.step;
    const double down = f(probe);
    probe(i) = x(i);
    if (!std::isfinite(up) || !std::isfinite(down))
      throw NonFiniteEvaluation("function not finite next to coordinate " + std::to_string(i));
    g(i) = (up - down) / (2.0 * spec.step);
  }
  return g;
}

double max_rel_error(const RVec& a, const RVec& b, double floor) {
  if (a.size() != b.size()) throw DimensionMismatch("vectors differ in length");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a(i)), std::abs(b(i)), floor});
    worst = std::max(worst, std::abs(a(i) - b(i)) / scale);
  }
  return worst;
}

namespace {

// h_k^H p_j written out.
cplx inner(const CMat& h, int k, const CMat& p, int j) {
  cplx acc = 0.0;
  for (Eigen::Index n = 0; n < h.rows(); ++n) acc += std::conj(h(n, k)) * p(n, j);
  return acc;
}

double abs2(cplx z) { return z.real() * z.real() + z.imag() * z.imag(); }

struct Denoms {
  std::vector<double> common;  // T_c: all streams plus noise
  std::vector<double> priv;    // T_p: private streams plus noise
};

Denoms denominators(const CMat& p, const CMat& h, const RVec& noise) {
  const int k_users = static_cast<int>(h.cols());
  Denoms d;
  for (int k = 0; k < k_users; ++k) {
    double t = noise(k);
    for (int j = 1; j <= k_users; ++j) t += abs2(inner(h, k, p, j));
    d.priv.push_back(t);
    d.common.push_back(t + abs2(inner(h, k, p, 0)));
  }
  return d;
}

// Surrogate rates g_pk and g_ck by loops.
void surrogate_by_loops(const CMat& p, const SubproblemContext& ctx, std::vector<double>& gp,
                        std::vector<double>& gc) {
  const int k_users = static_cast<int>(ctx.ir_channels.cols());
  const Denoms d = denominators(p, ctx.ir_channels, ctx.noise_comm);
  gp.assign(k_users, 0.0);
  gc.assign(k_users, 0.0);
  for (int k = 0; k < k_users; ++k) {
    const double tp = ctx.aux.theta_p(k);
    const double tc = ctx.aux.theta_c(k);
    const cplx fp = ctx.aux.phi_p(k);
    const cplx fc = ctx.aux.phi_c(k);
    gp[k] = std::log(1.0 + tp) - tp + 2.0 * std::sqrt(1.0 + tp) * (std::conj(fp) * inner(ctx.ir_channels, k, p, k + 1)).real() -
            abs2(fp) * d.priv[k];
    gc[k] = std::log(1.0 + tc) - tc + 2.0 * std::sqrt(1.0 + tc) * (std::conj(fc) * inner(ctx.ir_channels, k, p, 0)).real() -
            abs2(fc) * d.common[k];
  }
}

double sensing_by_loops(const CMat& p, const SubproblemContext& ctx) {
  const Eigen::Index n = p.rows();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index col = 0; col < p.cols(); ++col) {
      cplx q = 0.0;
      for (Eigen::Index m = 0; m < n; ++m) q += ctx.lambda_mat(i, m) * ctx.anchor(m, col);
      acc += 2.0 * (std::conj(p(i, col)) * q).real();
    }
  return acc;
}

// Linearised received power at every ER.
std::vector<double> eh_by_loops(const CMat& p, const SubproblemContext& ctx) {
  std::vector<double> u;
  for (Eigen::Index l = 0; l < ctx.er_channels.cols(); ++l) {
    double acc = 0.0;
    for (Eigen::Index col = 0; col < p.cols(); ++col) {
      const cplx a = inner(ctx.er_channels, static_cast<int>(l), ctx.anchor, static_cast<int>(col));
      const cplx b = inner(ctx.er_channels, static_cast<int>(l), p, static_cast<int>(col));
      acc += 2.0 * (std::conj(a) * b).real() - abs2(a);
    }
    u.push_back(acc);
  }
  return u;
}

}  // namespace

std::pair<RVec, RVec> sinr_by_loops(const CMat& precoders, const Scenario& s) {
  const int k_users = s.n_users();
  const Denoms d = denominators(precoders, s.ir_channels, s.noise_comm);
  RVec common(k_users), priv(k_users);
  for (int k = 0; k < k_users; ++k) {
    const double own = abs2(inner(s.ir_channels, k, precoders, k + 1));
    common(k) = abs2(inner(s.ir_channels, k, precoders, 0)) / d.priv[k];
    priv(k) = own / (d.priv[k] - own);
  }
  return {common, priv};
}

double power_by_loops(const CMat& precoders) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < precoders.rows(); ++i)
    for (Eigen::Index j = 0; j < precoders.cols(); ++j) acc += abs2(precoders(i, j));
  return acc;
}

std::pair<CVec, CVec> phi_by_loops(const CMat& precoders, const Scenario& s, const RVec& theta_c,
                                   const RVec& theta_p) {
  const int k_users = s.n_users();
  const Denoms d = denominators(precoders, s.ir_channels, s.noise_comm);
  CVec fc(k_users), fp(k_users);
  for (int k = 0; k < k_users; ++k) {
    fc(k) = std::sqrt(1.0 + theta_c(k)) * inner(s.ir_channels, k, precoders, 0) / d.common[k];
    fp(k) = std::sqrt(1.0 + theta_p(k)) * inner(s.ir_channels, k, precoders, k + 1) / d.priv[k];
  }
  return {fc, fp};
}

double lagrangian_by_loops(const VIPoint& point, const SubproblemContext& ctx) {
  const CMat& p = point.primal.precoders;
  const DualState& z = point.dual;
  const int k_users = static_cast<int>(ctx.ir_channels.cols());
  std::vector<double> gp, gc;
  surrogate_by_loops(p, ctx, gp, gc);

  const double r = point.primal.mmf_aux;
  double c_sum = 0.0;
  for (int k = 0; k < k_users; ++k) c_sum += point.primal.common_alloc(k);

  double value = r + ctx.tradeoff * sensing_by_loops(p, ctx);
  for (int k = 0; k < k_users; ++k) {
    const double c = point.primal.common_alloc(k);
    value -= z.beta(k) * (r - c - gp[k]);
    value -= z.rho(k) * (c_sum - gc[k]);
    value += z.mu(k) * c;
  }
  value -= z.omega * (power_by_loops(p) - ctx.power_budget);
  const std::vector<double> u = eh_by_loops(p, ctx);
  for (std::size_t l = 0; l < u.size(); ++l) value += z.eta(static_cast<Eigen::Index>(l)) * (u[l] - ctx.eh_targets(static_cast<Eigen::Index>(l)));
  return value;
}

Mat3 fim_by_definition(const CMat& precoders, const Scenario& s) {
  const int n_tx = s.n_tx();
  const int n_rx = s.n_rx;
  const double st = std::sin(s.theta);
  const double ct = std::cos(s.theta);
  // Entry (r, t) of a_r a_t^H is exp(j pi (m_r - m_t) sin theta) with
  // centred element indices; its angle derivative follows by the chain rule.
  CMat a(n_rx, n_tx), da(n_rx, n_tx);
  for (int r = 0; r < n_rx; ++r)
    for (int t = 0; t < n_tx; ++t) {
      const double d = (r - 0.5 * (n_rx - 1)) - (t - 0.5 * (n_tx - 1));
      const cplx e = std::exp(cplx(0.0, kPi * d * st));
      a(r, t) = e;
      da(r, t) = cplx(0.0, kPi * d * ct) * e;
    }

  Mat3 f = Mat3::Zero();
  for (Eigen::Index col = 0; col < precoders.cols(); ++col) {
    // Jacobian of the echo alpha A p with respect to (theta, Re alpha, Im alpha).
    Eigen::Matrix<cplx, Eigen::Dynamic, 3> jac(n_rx, 3);
    for (int r = 0; r < n_rx; ++r) {
      cplx ap = 0.0, dap = 0.0;
      for (int t = 0; t < n_tx; ++t) {
        ap += a(r, t) * precoders(t, col);
        dap += da(r, t) * precoders(t, col);
      }
      jac(r, 0) = s.alpha * dap;
      jac(r, 1) = ap;
      jac(r, 2) = cplx(0.0, 1.0) * ap;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        cplx acc = 0.0;
        for (int r = 0; r < n_rx; ++r) acc += std::conj(jac(r, i)) * jac(r, j);
        f(i, j) += (2.0 / s.noise_sense) * acc.real();
      }
  }
  return f;
}

Mat3 inverse_by_cofactors(const Mat3& f) {
  Mat3 cof;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int rows[2], cols[2];
      for (int a = 0, n = 0; a < 3; ++a)
        if (a != i) rows[n++] = a;
      for (int b = 0, n = 0; b < 3; ++b)
        if (b != j) cols[n++] = b;
      const double minor = f(rows[0], cols[0]) * f(rows[1], cols[1]) - f(rows[0], cols[1]) * f(rows[1], cols[0]);
      cof(i, j) = ((i + j) % 2 ? -1.0 : 1.0) * minor;
    }
  double det = 0.0;
  for (int j = 0; j < 3; ++j) det += f(0, j) * cof(0, j);
  if (det == 0.0) throw SingularFim("cofactor inverse of a singular matrix");
  return cof.transpose() / det;
}

double trace_product(const Mat3& a, const Mat3& b) {
  double acc = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) acc += a(i, j) * b(j, i);
  return acc;
}

double max_min_er_power(const CMat& er_channels, double power) {
  const Eigen::Index n_ers = er_channels.cols();
  if (n_ers == 0) return std::numeric_limits<double>::infinity();
  if (n_ers == 1) return power * er_channels.col(0).squaredNorm();
  if (n_ers > 2) throw ConfigError("max_min_er_power supports at most two ERs");
  const CVec g1 = er_channels.col(0);
  const CVec g2 = er_channels.col(1);
  auto dual = [&](double mu) {
    const CMat q = mu * g1 * g1.adjoint() + (1.0 - mu) * g2 * g2.adjoint();
    Eigen::SelfAdjointEigenSolver<CMat> eig(q, Eigen::EigenvaluesOnly);
    return power * eig.eigenvalues().maxCoeff();
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = dual(x1), f2 = dual(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = dual(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = dual(x2);
    }
  }
  return std::min({f1, f2, dual(0.0), dual(1.0)});
}

bool subproblem_objective_by_loops(const CMat& precoders, const SubproblemContext& ctx, double& value,
                                   RVec* common_alloc, double* mmf_aux) {
  const int k_users = static_cast<int>(ctx.ir_channels.cols());
  const bool rsma = ctx.mode == AccessMode::rsma;
  if (power_by_loops(precoders) > ctx.power_budget * (1.0 + 1e-12)) return false;
  if (!rsma) {
    for (Eigen::Index i = 0; i < precoders.rows(); ++i)
      if (precoders(i, 0) != 0.0) return false;
  }
  const std::vector<double> u = eh_by_loops(precoders, ctx);
  for (std::size_t l = 0; l < u.size(); ++l)
    if (u[l] < ctx.eh_targets(static_cast<Eigen::Index>(l))) return false;

  std::vector<double> gp, gc;
  surrogate_by_loops(precoders, ctx, gp, gc);
  double capacity = 0.0;
  if (rsma) {
    capacity = *std::min_element(gc.begin(), gc.end());
    if (capacity < 0.0) return false;
  }
  // Largest level r with sum_k max(0, r - g_pk) <= capacity.
  const double g_min = *std::min_element(gp.begin(), gp.end());
  const double g_max = *std::max_element(gp.begin(), gp.end());
  double lo = g_min, hi = g_max + capacity;
  auto used = [&](double r) {
    double acc = 0.0;
    for (double g : gp) acc += std::max(0.0, r - g);
    return acc;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (used(mid) <= capacity ? lo : hi) = mid;
  }
  const double r = lo;
  value = r + ctx.tradeoff * sensing_by_loops(precoders, ctx);
  if (common_alloc) {
    common_alloc->resize(k_users);
    for (int k = 0; k < k_users; ++k) (*common_alloc)(k) = rsma ? std::max(0.0, r - gp[k]) : 0.0;
  }
  if (mmf_aux) *mmf_aux = r;
  return true;
}

RandomSearchResult subproblem_random_search(const SubproblemContext& ctx, int budget, std::uint64_t seed) {
  const Eigen::Index n = ctx.ir_channels.rows();
  const Eigen::Index cols = ctx.ir_channels.cols() + 1;
  if (cols - 1 > 2 || n > 3 || ctx.er_channels.cols() > 1)
    throw ConfigError("random search is limited to K <= 2, N_t <= 3, L <= 1");
  const bool rsma = ctx.mode == AccessMode::rsma;
  const Eigen::Index first = rsma ? 0 : 1;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RandomSearchResult best;
  best.value = -std::numeric_limits<double>::infinity();
  CMat p(n, cols);
  for (int b = 0; b < budget; ++b) {
    p.setZero();
    for (Eigen::Index j = first; j < cols; ++j)
      for (Eigen::Index i = 0; i < n; ++i) p(i, j) = cplx(normal(rng), normal(rng));
    p *= std::sqrt(ctx.power_budget / power_by_loops(p));
    double v = 0.0;
    if (!subproblem_objective_by_loops(p, ctx, v)) continue;
    ++best.feasible_samples;
    if (v > best.value) {
      best.value = v;
      best.precoders = p;
    }
  }
  if (best.feasible_samples == 0) throw NoFeasibleSample("no feasible sample within the budget");

  // Coordinate descent over the real and imaginary parts, halving the step
  // whenever a full sweep makes no progress. Trials leaving the power ball
  // are pulled back radially so the search can slide along its boundary.
  p = best.precoders;
  double step = 0.1 * std::sqrt(ctx.power_budget);
  for (int sweep = 0; sweep < 20000 && step > 1e-9; ++sweep) {
    bool improved = false;
    for (Eigen::Index j = first; j < cols; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        for (int part = 0; part < 2; ++part)
          for (double sign : {1.0, -1.0}) {
            CMat trial = p;
            trial(i, j) += part == 0 ? cplx(sign * step, 0.0) : cplx(0.0, sign * step);
            const double pw = power_by_loops(trial);
            if (pw > ctx.power_budget) trial *= std::sqrt(ctx.power_budget / pw);
            double v = 0.0;
            if (subproblem_objective_by_loops(trial, ctx, v) && v > best.value) {
              best.value = v;
              p = trial;
              improved = true;
            }
          }
    if (!improved) step *= 0.5;
  }
  best.precoders = p;
  subproblem_objective_by_loops(p, ctx, best.value, &best.common_alloc, &best.mmf_aux);
  return best;
}

}  // namespace iscap::oracle
