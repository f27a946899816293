#include "gconvex/auction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gconvex/errors.hpp"
#include "gconvex/parallel.hpp"
#include "gconvex/rng.hpp"

namespace gcx::auction {

namespace {

constexpr std::size_t kChunkRows = 2048;

using RowBlock = Eigen::Ref<const Eigen::MatrixXd>;
using WeightBlock = Eigen::Ref<const Eigen::VectorXd>;

void check_type(const Menu& menu, const Point& y) {
  if (static_cast<std::size_t>(y.size()) != menu.items()) {
    throw InputError("type has dimension " + std::to_string(y.size()) + ", menu has " +
                     std::to_string(menu.items()) + " items");
  }
}

void check_types(const Menu& menu, const SampleMeasure& types) {
  if (types.dim() != menu.items()) {
    throw InputError("type sample has dimension " + std::to_string(types.dim()) + ", menu has " +
                     std::to_string(menu.items()) + " items");
  }
}

struct ChunkSums {
  double value = 0.0;
  Eigen::MatrixXd grad_allocations;
  Eigen::VectorXd grad_prices;
};

// Soft revenue contribution of a block of weighted types.
ChunkSums soft_revenue_block(const Menu& menu, const RowBlock& types, const WeightBlock& weights,
                             double tau, bool with_gradient) {
  const Eigen::MatrixXd& alloc = menu.allocations();
  const Eigen::VectorXd& prices = menu.prices();

  Eigen::MatrixXd w = types * alloc.transpose();
  w.rowwise() -= prices.transpose();
  const Eigen::VectorXd top = w.rowwise().maxCoeff();
  w = ((w.colwise() - top) * tau).array().exp().matrix();
  const Eigen::VectorXd z = w.rowwise().sum();
  w.array().colwise() /= z.array();

  const Eigen::VectorXd expected_payment = w * prices;
  ChunkSums out;
  out.value = weights.dot(expected_payment);
  if (!with_gradient) return out;

  // d(expected payment)/d(score_j) scaled by tau: tau w_j (t_j - R).
  Eigen::MatrixXd g = w;
  g.array().rowwise() *= prices.transpose().array();
  g -= (w.array().colwise() * expected_payment.array()).matrix();
  g *= tau;

  out.grad_prices = (w - g).transpose() * weights;
  out.grad_allocations = (g.array().colwise() * weights.array()).matrix().transpose() * types;
  return out;
}

SoftRevenue soft_revenue_rows(const Menu& menu, const RowBlock& types, const WeightBlock& weights,
                              double tau, std::size_t threads, bool with_gradient = true) {
  const auto rows = static_cast<std::size_t>(types.rows());
  std::vector<ChunkSums> partial(chunk_count(rows, kChunkRows));
  for_each_chunk(rows, kChunkRows, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
    const auto bi = static_cast<Eigen::Index>(b);
    const auto len = static_cast<Eigen::Index>(e - b);
    partial[c] = soft_revenue_block(menu, types.middleRows(bi, len), weights.segment(bi, len), tau,
                                    with_gradient);
  });
  SoftRevenue out;
  const auto m = static_cast<Eigen::Index>(menu.size());
  out.grad_allocations = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(menu.items()));
  out.grad_prices = Eigen::VectorXd::Zero(m);
  for (const auto& p : partial) {
    out.value += p.value;
    if (!with_gradient) continue;
    out.grad_allocations += p.grad_allocations;
    out.grad_prices += p.grad_prices;
  }
  out.grad_allocations.row(0).setZero();
  out.grad_prices[0] = 0.0;
  return out;
}

struct Outcome {
  std::size_t entry;
  double utility;
};

Outcome best_entry(const Menu& menu, const Eigen::Ref<const Eigen::RowVectorXd>& y) {
  Outcome best{0, 0.0};
  const Eigen::MatrixXd& a = menu.allocations();
  for (Eigen::Index i = 1; i < a.rows(); ++i) {
    const double u = a.row(i).dot(y) - menu.prices()[i];
    if (u > best.utility) best = {static_cast<std::size_t>(i), u};
  }
  return best;
}

}  // namespace

Menu::Menu(Eigen::MatrixXd allocations, Eigen::VectorXd prices)
    : allocations_(std::move(allocations)), prices_(std::move(prices)) {
  if (allocations_.rows() == 0 || allocations_.cols() == 0) {
    throw InputError("Menu: need at least one entry and one item");
  }
  if (prices_.size() != allocations_.rows()) {
    throw InputError("Menu: " + std::to_string(allocations_.rows()) + " allocations but " +
                     std::to_string(prices_.size()) + " prices");
  }
  if (!allocations_.allFinite() || !prices_.allFinite()) throw InputError("Menu: non-finite entry");
  if ((allocations_.array() < 0.0).any() || (allocations_.array() > 1.0).any()) {
    throw InputError("Menu: allocation probabilities must lie in [0, 1]");
  }
  if (!allocations_.row(0).isZero(0.0) || prices_[0] != 0.0) {
    throw InputError("Menu: entry 0 must be the zero allocation at price 0");
  }
}

Menu Menu::zero_only(std::size_t items) {
  return Menu(Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(items)), Eigen::VectorXd::Zero(1));
}

FiniteGCF Menu::indirect_utility_function() const {
  const Box unit = Box::unit(items());
  PointSet support;
  support.reserve(size());
  for (Eigen::Index i = 0; i < allocations_.rows(); ++i) support.push_back(allocations_.row(i).transpose());
  return FiniteGCF(Kernel::bilinear(unit, unit), std::move(support), prices_);
}

Choice choose(const Menu& menu, const Point& type) {
  check_type(menu, type);
  const Outcome o = best_entry(menu, type.transpose());
  const auto i = static_cast<Eigen::Index>(o.entry);
  return Choice{o.entry, o.utility, menu.prices()[i], menu.allocations().row(i).transpose()};
}

double indirect_utility(const Menu& menu, const Point& type) { return choose(menu, type).utility; }
Point allocation(const Menu& menu, const Point& type) { return choose(menu, type).allocation; }
double payment(const Menu& menu, const Point& type) { return choose(menu, type).payment; }

SoftRevenue soft_revenue(const Menu& menu, const SampleMeasure& types, Temperature t,
                         std::size_t threads) {
  check_types(menu, types);
  return soft_revenue_rows(menu, types.points(), types.weights(), t.tau(), threads);
}

double soft_revenue_value(const Menu& menu, const SampleMeasure& types, Temperature t,
                          std::size_t threads) {
  check_types(menu, types);
  return soft_revenue_rows(menu, types.points(), types.weights(), t.tau(), threads, false).value;
}

double hard_revenue(const Menu& menu, const SampleMeasure& types) {
  check_types(menu, types);
  double total = 0.0;
  for (Eigen::Index k = 0; k < types.points().rows(); ++k) {
    const Outcome o = best_entry(menu, types.points().row(k));
    total += types.weights()[k] * menu.prices()[static_cast<Eigen::Index>(o.entry)];
  }
  return total;
}

namespace {

// Utility of each entry along y0 + s d is affine in s: c_i + s slope_i.
struct SegmentPiece {
  double from;
  double to;
  std::size_t entry;
};

std::vector<SegmentPiece> upper_envelope_on_segment(const Menu& menu, const Point& y0, const Point& d) {
  const Eigen::VectorXd c = menu.allocations() * y0 - menu.prices();
  const Eigen::VectorXd slope = menu.allocations() * d;
  auto best_at = [&](double s) {
    std::size_t best = 0;
    double bv = c[0] + s * slope[0];
    for (Eigen::Index i = 1; i < c.size(); ++i) {
      const double v = c[i] + s * slope[i];
      if (v > bv) {
        bv = v;
        best = static_cast<std::size_t>(i);
      }
    }
    return best;
  };
  std::vector<SegmentPiece> pieces;
  double s = 0.0;
  // Start with the entry active just to the right of s = 0.
  std::size_t cur = best_at(0.0);
  {
    // Among entries tied at s = 0 take the one with the largest slope.
    const double v0 = c[static_cast<Eigen::Index>(cur)];
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (c[i] == v0 && slope[i] > slope[static_cast<Eigen::Index>(cur)]) cur = static_cast<std::size_t>(i);
    }
  }
  while (s < 1.0) {
    const auto ci = static_cast<Eigen::Index>(cur);
    double next = 1.0;
    std::size_t next_entry = cur;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (slope[i] <= slope[ci]) continue;
      // Crossing where entry i overtakes the current one.
      const double cross = (c[ci] - c[i]) / (slope[i] - slope[ci]);
      if (cross > s && (cross < next || (cross == next && slope[i] > slope[static_cast<Eigen::Index>(next_entry)]))) {
        next = cross;
        next_entry = static_cast<std::size_t>(i);
      }
    }
    pieces.push_back({s, next, cur});
    if (next_entry == cur) break;
    s = next;
    cur = next_entry;
  }
  return pieces;
}

}  // namespace

double payment_integral_residual(const Menu& menu, std::optional<Temperature> t, const Point& y,
                                 const Anchor& anchor, std::size_t quadrature_points) {
  check_type(menu, y);
  check_type(menu, anchor.y0);
  const Point d = y - anchor.y0;
  if (!t) {
    const double lhs = indirect_utility(menu, y) - indirect_utility(menu, anchor.y0);
    double integral = 0.0;
    for (const auto& piece : upper_envelope_on_segment(menu, anchor.y0, d)) {
      integral += (piece.to - piece.from) *
                  menu.allocations().row(static_cast<Eigen::Index>(piece.entry)).dot(d);
    }
    return std::abs(lhs - integral);
  }

  const FiniteGCF v = menu.indirect_utility_function();
  const double lhs = gcf_eval_smooth(v, y, *t) - gcf_eval_smooth(v, anchor.y0, *t);
  // 4-point Gauss-Legendre on [-1, 1].
  static constexpr double kNodes[4] = {-0.8611363115940526, -0.3399810435848563,
                                       0.3399810435848563, 0.8611363115940526};
  static constexpr double kWeights[4] = {0.3478548451374538, 0.6521451548625461,
                                         0.6521451548625461, 0.3478548451374538};
  const std::size_t panels = std::max<std::size_t>(1, (quadrature_points + 3) / 4);
  const double h = 1.0 / static_cast<double>(panels);
  double integral = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * h;
    for (int q = 0; q < 4; ++q) {
      const double s = mid + 0.5 * h * kNodes[q];
      const Point ys = anchor.y0 + s * d;
      integral += 0.5 * h * kWeights[q] * d.dot(gcf_grad_smooth(v, ys, *t));
    }
  }
  return std::abs(lhs - integral);
}

MechanismReport evaluate_mechanism(const Menu& menu, const SampleMeasure& types,
                                   std::optional<Temperature> final_tau) {
  check_types(menu, types);
  const double n = static_cast<double>(menu.items());
  // Weighted first and second moments of per-item profit, surplus, utility.
  double m_p = 0, m_s = 0, m_u = 0, q_p = 0, q_s = 0, q_u = 0, w2 = 0;
  for (Eigen::Index k = 0; k < types.points().rows(); ++k) {
    const double w = types.weights()[k];
    const Outcome o = best_entry(menu, types.points().row(k));
    const double profit = menu.prices()[static_cast<Eigen::Index>(o.entry)] / n;
    const double utility = o.utility / n;
    const double surplus = profit + utility;
    m_p += w * profit;
    m_s += w * surplus;
    m_u += w * utility;
    q_p += w * profit * profit;
    q_s += w * surplus * surplus;
    q_u += w * utility * utility;
    w2 += w * w;
  }
  auto se = [&](double mean, double second) {
    const double var = std::max(0.0, second - mean * mean);
    return std::sqrt(var * w2);
  };
  MechanismReport r;
  r.items = menu.items();
  r.mean_profit_per_item = m_p;
  r.mean_surplus_per_item = m_s;
  r.mean_utility_per_item = m_u;
  r.se_profit_per_item = se(m_p, q_p);
  r.se_surplus_per_item = se(m_s, q_s);
  r.se_utility_per_item = se(m_u, q_u);
  r.samples = types.size();
  if (final_tau) r.hard_soft_gap = soft_revenue(menu, types, *final_tau).value / n - m_p;
  return r;
}

MechanismReport evaluate_mechanism(const Menu& menu, std::size_t samples, std::uint64_t seed,
                                   std::optional<Temperature> final_tau) {
  Rng rng(seed);
  const SampleMeasure types = SampleMeasure::draw_uniform(Box::unit(menu.items()), samples, rng);
  MechanismReport r = evaluate_mechanism(menu, types, final_tau);
  r.seed = seed;
  return r;
}

PostedPriceSummary posted_price_summary(const Menu& menu, const SampleMeasure& types) {
  check_types(menu, types);
  std::vector<double> paid;
  for (Eigen::Index k = 0; k < types.points().rows(); ++k) {
    const Outcome o = best_entry(menu, types.points().row(k));
    if (o.entry != 0) paid.push_back(menu.prices()[static_cast<Eigen::Index>(o.entry)]);
  }
  PostedPriceSummary s;
  if (paid.empty()) return s;
  std::sort(paid.begin(), paid.end());
  s.median_payment = paid[paid.size() / 2];
  s.min_payment = paid.front();
  s.max_payment = paid.back();
  s.purchase_rate = static_cast<double>(paid.size()) / static_cast<double>(types.size());
  return s;
}

std::uint64_t evaluation_seed(std::uint64_t training_seed) {
  return training_seed ^ 0x9e3779b97f4a7c15ULL;
}

}  // namespace gcx::auction
