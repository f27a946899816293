#include "gconvex/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/LU>

#include "gconvex/errors.hpp"

namespace gcx {

EpsilonNet build_epsilon_net(const Box& box, double epsilon, double lipschitz, std::size_t max_centers) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be positive and finite");
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    throw InputError("lipschitz constant must be positive and finite");
  }
  const std::size_t n = box.dim();
  EpsilonNet net{{}, epsilon / (2.0 * lipschitz), box, std::vector<std::size_t>(n, 1)};
  if (box.diameter() / 2.0 <= net.radius) {
    net.centers.push_back(box.midpoint());
    return net;
  }
  const double spacing = 2.0 * net.radius / std::sqrt(static_cast<double>(n));
  double total = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double len = box.upper()[static_cast<Eigen::Index>(j)] - box.lower()[static_cast<Eigen::Index>(j)];
    const double cells = std::ceil(len / spacing * (1.0 - 1e-12));
    total *= std::max(cells, 1.0);
    if (total > static_cast<double>(max_centers)) {
      throw ResourceError("epsilon net would need more than " + std::to_string(max_centers) + " centres");
    }
    net.per_axis[j] = static_cast<std::size_t>(std::max(cells, 1.0));
  }
  const auto count = static_cast<std::size_t>(total);
  net.centers.reserve(count);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t c = 0; c < count; ++c) {
    Point p(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
      const auto e = static_cast<Eigen::Index>(j);
      const double lo = box.lower()[e];
      const double len = box.upper()[e] - lo;
      p[e] = lo + (static_cast<double>(idx[j]) + 0.5) * len / static_cast<double>(net.per_axis[j]);
    }
    net.centers.push_back(std::move(p));
    for (std::size_t j = n; j-- > 0;) {
      if (++idx[j] < net.per_axis[j]) break;
      idx[j] = 0;
    }
  }
  return net;
}

double oracle_transform(const PointSet& support, const Eigen::VectorXd& potentials, const Kernel& kernel,
                        const Point& x) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double v = kernel.eval(x, support[i]) - potentials[static_cast<Eigen::Index>(i)];
    if (v > best) best = v;
  }
  return best;
}

FiniteGCF uap_approximant(const FiniteGCF& f_dense, const PointSet& centers, const PointSet& x_grid) {
  if (centers.empty() || x_grid.empty()) throw InputError("net and grid must be nonempty");
  std::vector<double> fx(x_grid.size());
  for (std::size_t j = 0; j < x_grid.size(); ++j) fx[j] = gcf_eval(f_dense, x_grid[j]);
  Eigen::VectorXd conj(static_cast<Eigen::Index>(centers.size()));
  for (std::size_t c = 0; c < centers.size(); ++c) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
      best = std::max(best, f_dense.kernel().eval(x_grid[j], centers[c]) - fx[j]);
    }
    conj[static_cast<Eigen::Index>(c)] = best;
  }
  return FiniteGCF(f_dense.kernel(), centers, std::move(conj));
}

FiniteGCF uap_approximant(const FiniteGCF& f_dense, const EpsilonNet& net, const PointSet& x_grid) {
  return uap_approximant(f_dense, net.centers, x_grid);
}

double uap_error(const FiniteGCF& f_dense, const PointSet& centers, const PointSet& grid) {
  const FiniteGCF g = uap_approximant(f_dense, centers, grid);
  double worst = 0.0;
  for (const auto& x : grid) worst = std::max(worst, std::abs(gcf_eval(f_dense, x) - gcf_eval(g, x)));
  return worst;
}

double uap_error(const FiniteGCF& f_dense, const EpsilonNet& net, const PointSet& grid) {
  return uap_error(f_dense, net.centers, grid);
}

GradCheckReport fd_gradient_check(const std::function<double(const Point&)>& value,
                                  const std::function<Point(const Point&)>& gradient,
                                  const PointSet& points, double step) {
  if (!(step > 0.0)) throw InputError("finite-difference step must be positive");
  GradCheckReport report;
  report.step = step;
  for (const auto& x : points) {
    const Point an = gradient(x);
    Point fd(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      Point hi = x;
      Point lo = x;
      hi[j] += step;
      lo[j] -= step;
      fd[j] = (value(hi) - value(lo)) / (2.0 * step);
    }
    const double rel = (fd - an).norm() / std::max(an.norm(), 1.0);
    if (report.worst_point.size() == 0 || rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_point = x;
    }
  }
  return report;
}

GradConvergenceReport grad_convergence_check(const std::vector<FiniteGCF>& sequence,
                                             const FiniteGCF& f_limit, const PointSet& probe,
                                             double margin, double boundary_margin) {
  GradConvergenceReport report;
  PointSet kept;
  std::vector<Point> limit_grads;
  const Box& box = f_limit.domain();
  for (const auto& x : probe) {
    const double inset = std::min((x - box.lower()).minCoeff(), (box.upper() - x).minCoeff());
    if (inset >= boundary_margin && active_entry(f_limit, x).margin >= margin) {
      kept.push_back(x);
      limit_grads.push_back(gcf_grad(f_limit, x));
    }
  }
  report.probes_used = kept.size();
  for (const auto& f : sequence) {
    double worst = 0.0;
    Point worst_point = kept.empty() ? Point() : kept.front();
    for (std::size_t p = 0; p < kept.size(); ++p) {
      const double e = (gcf_grad(f, kept[p]) - limit_grads[p]).norm();
      if (e > worst) {
        worst = e;
        worst_point = kept[p];
      }
    }
    if (!report.errors.empty() && worst > report.errors.back()) report.decreasing = false;
    report.errors.push_back(worst);
    report.worst_points.push_back(worst_point);
  }
  return report;
}

namespace {

// Visits every k-subset of {0..n-1}.
template <class Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    fn(pick);
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace

LpConjugate lp_conjugate_oracle(const FiniteGCF& f, const Point& y) {
  const auto affine = f.kernel().affine_in_x();
  if (!affine) throw UnsupportedError("exact conjugation needs a kernel affine in x");
  const auto n = static_cast<Eigen::Index>(f.dim());
  if (n > 3) throw InputError("exact conjugation enumerates vertices and supports dim <= 3 only");
  const Box& box = f.domain();

  // Constraints a . (x, s) <= b. Cuts: s - <x, slope(y) - slope(y_i)> <= offset(y) - offset(y_i) + r_i.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  const Point sy = affine->slope(y);
  const double oy = affine->offset(y);
  std::size_t cuts = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = f.potentials()[static_cast<Eigen::Index>(i)];
    if (std::isinf(r)) continue;
    Eigen::VectorXd a(n + 1);
    a.head(n) = -(sy - affine->slope(f.support()[i]));
    a[n] = 1.0;
    rows.push_back(std::move(a));
    rhs.push_back(oy - affine->offset(f.support()[i]) + r);
    ++cuts;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd up = Eigen::VectorXd::Zero(n + 1);
    up[j] = 1.0;
    rows.push_back(up);
    rhs.push_back(box.upper()[j]);
    rows.push_back(-up);
    rhs.push_back(-box.lower()[j]);
  }

  LpConjugate best{-std::numeric_limits<double>::infinity(), Point()};
  const auto dim = static_cast<std::size_t>(n + 1);
  Eigen::MatrixXd a(n + 1, n + 1);
  Eigen::VectorXd b(n + 1);
  for_each_subset(rows.size(), dim, [&](const std::vector<std::size_t>& pick) {
    if (pick[0] >= cuts) return;  // s must be pinned by a cut
    for (std::size_t r = 0; r < dim; ++r) {
      a.row(static_cast<Eigen::Index>(r)) = rows[pick[r]].transpose();
      b[static_cast<Eigen::Index>(r)] = rhs[pick[r]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < static_cast<Eigen::Index>(dim)) return;
    const Eigen::VectorXd v = lu.solve(b);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double scale = 1.0 + std::abs(rhs[r]) + rows[r].cwiseAbs().dot(v.cwiseAbs());
      if (rows[r].dot(v) > rhs[r] + 1e-12 * scale) return;
    }
    if (v[n] > best.value) {
      best.value = v[n];
      best.argmax = v.head(n);
    }
  });
  return best;
}

FiniteGCF exact_lean_project(const FiniteGCF& f) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) r[static_cast<Eigen::Index>(i)] = lp_conjugate_oracle(f, f.support()[i]).value;
  return f.with_potentials(std::move(r));
}

double exact_lean_shortfall(const FiniteGCF& f) {
  return (f.potentials() - exact_lean_project(f).potentials()).maxCoeff();
}

namespace {

long common_denominator(const Eigen::VectorXd& a, const Eigen::VectorXd& b, long max_denominator) {
  for (long d = 1; d <= max_denominator; ++d) {
    bool ok = true;
    for (const Eigen::VectorXd* w : {&a, &b}) {
      for (Eigen::Index i = 0; i < w->size() && ok; ++i) {
        const double scaled = (*w)[i] * static_cast<double>(d);
        ok = std::abs(scaled - std::round(scaled)) <= 1e-9 * static_cast<double>(d);
      }
    }
    if (ok) return d;
  }
  throw UnsupportedError("weights are not multiples of 1/D for any D <= " + std::to_string(max_denominator));
}

struct TableSearch {
  const Eigen::MatrixXd& s;
  std::vector<long> row_left;
  std::vector<long> col_left;
  Eigen::MatrixXi table;
  Eigen::MatrixXi best_table;
  double best = -std::numeric_limits<double>::infinity();

  double bound(Eigen::Index k, Eigen::Index i) const {
    double total = 0.0;
    for (Eigen::Index r = k; r < s.rows(); ++r) {
      const long left = row_left[static_cast<std::size_t>(r)];
      if (left == 0) continue;
      double top = -std::numeric_limits<double>::infinity();
      for (Eigen::Index c = (r == k ? i : 0); c < s.cols(); ++c) {
        if (col_left[static_cast<std::size_t>(c)] > 0) top = std::max(top, s(r, c));
      }
      total += static_cast<double>(left) * top;
    }
    return total;
  }

  void run(Eigen::Index k, Eigen::Index i, double acc) {
    if (k == s.rows()) {
      if (acc > best) {
        best = acc;
        best_table = table;
      }
      return;
    }
    if (i == s.cols()) {
      if (row_left[static_cast<std::size_t>(k)] == 0) run(k + 1, 0, acc);
      return;
    }
    if (!(acc + bound(k, i) > best)) return;
    long& rl = row_left[static_cast<std::size_t>(k)];
    long& cl = col_left[static_cast<std::size_t>(i)];
    const long hi = std::min(rl, cl);
    const long lo = i + 1 == s.cols() ? rl : 0;  // last column takes the remainder
    for (long q = hi; q >= lo; --q) {
      rl -= q;
      cl -= q;
      table(k, i) = static_cast<int>(q);
      run(k, i + 1, acc + static_cast<double>(q) * s(k, i));
      rl += q;
      cl += q;
    }
    table(k, i) = 0;
  }
};

}  // namespace

DiscreteTransport exact_transport(const Eigen::MatrixXd& surplus, const Eigen::VectorXd& mu_weights,
                                  const Eigen::VectorXd& eta_weights, long max_denominator, long max_units) {
  if (surplus.rows() != mu_weights.size() || surplus.cols() != eta_weights.size()) {
    throw InputError("surplus matrix shape does not match the weights");
  }
  const long d = common_denominator(mu_weights, eta_weights, max_denominator);
  TableSearch search{surplus, {}, {}, Eigen::MatrixXi::Zero(surplus.rows(), surplus.cols()), {}, -INFINITY};
  long mu_units = 0;
  long eta_units = 0;
  for (Eigen::Index k = 0; k < mu_weights.size(); ++k) {
    search.row_left.push_back(std::lround(mu_weights[k] * static_cast<double>(d)));
    mu_units += search.row_left.back();
  }
  for (Eigen::Index i = 0; i < eta_weights.size(); ++i) {
    search.col_left.push_back(std::lround(eta_weights[i] * static_cast<double>(d)));
    eta_units += search.col_left.back();
  }
  if (mu_units != eta_units) throw InputError("scaled masses disagree");
  if (mu_units > max_units) {
    throw ResourceError("transport instance has " + std::to_string(mu_units) + " mass units, cap is " +
                        std::to_string(max_units));
  }
  search.run(0, 0, 0.0);
  DiscreteTransport out;
  out.denominator = d;
  out.value = search.best / static_cast<double>(d);
  out.plan = search.best_table.cast<double>() / static_cast<double>(d);
  return out;
}

Json to_json(const ValidationReport& report) {
  return Json{{"check_name", report.check_name},
              {"instances", report.instances},
              {"max_error", report.max_error},
              {"tolerance", report.tolerance},
              {"pass", report.pass}};
}

}  // namespace gcx
