#include "multibai/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace multibai {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieRel = 1e-12;

struct Problem {
  const Family* family = nullptr;
  std::span<const double> means;
  int m = 0;
  std::vector<int> top;   // ascending
  std::vector<int> alts;  // ascending
  int k() const { return static_cast<int>(means.size()); }
};

Problem make_problem(const Family& family, std::span<const double> means, int m) {
  Problem p;
  p.family = &family;
  p.means = means;
  p.m = m;
  p.top = top_m_arms(means, m);
  std::vector<char> in_top(means.size(), 0);
  for (int t : p.top) in_top[static_cast<std::size_t>(t)] = 1;
  for (int a = 0; a < p.k(); ++a) {
    if (!in_top[static_cast<std::size_t>(a)]) p.alts.push_back(a);
  }
  return p;
}

struct AltEval {
  double f = 0.0;
  double pooled = 0.0;
};

// Transport cost against one alternative arm, evaluated at the pooled
// closed-form minimizer. Zero total weight carries no evidence.
AltEval eval_alt(const Problem& p, const double* w, int a) {
  double tw = 0.0, twx = 0.0;
  for (int t : p.top) {
    tw += w[t];
    twx += w[t] * p.means[t];
  }
  const double tot = tw + w[a];
  AltEval out;
  if (tot <= 0.0) {
    double s = p.means[a];
    for (int t : p.top) s += p.means[t];
    out.pooled = s / (p.m + 1.0);
    out.f = 0.0;
    return out;
  }
  const double lam = (twx + w[a] * p.means[a]) / tot;
  double c = 0.0;
  if (w[a] > 0.0) c += w[a] * p.family->kl(p.means[a], lam);
  for (int t : p.top) {
    if (w[t] > 0.0) c += w[t] * p.family->kl(p.means[t], lam);
  }
  out.pooled = lam;
  out.f = c;
  return out;
}

// Supergradient of one alternative's transport cost (Danskin at the pooled
// point): d(mu_i, pooled) on the involved coordinates, zero elsewhere.
void alt_gradient(const Problem& p, int a, double pooled, double* grad) {
  std::fill(grad, grad + p.k(), 0.0);
  for (int t : p.top) grad[t] = p.family->kl(p.means[t], pooled);
  grad[a] = p.family->kl(p.means[a], pooled);
}

struct EvalOut {
  double g = kInf;
  int critical = -1;
  double pooled = 0.0;
};

EvalOut eval_g(const Problem& p, const double* w, double* grad, long* evals) {
  if (evals) ++*evals;
  EvalOut out;
  for (int a : p.alts) {
    const AltEval e = eval_alt(p, w, a);
    if (e.f < out.g) {
      out.g = e.f;
      out.critical = a;
      out.pooled = e.pooled;
    }
  }
  if (grad != nullptr) alt_gradient(p, out.critical, out.pooled, grad);
  return out;
}

// Euclidean projection onto the simplex (sort-based), with a final
// renormalization to keep the sum exactly one.
void project_simplex(std::vector<double>& v, std::vector<double>& buf) {
  const int n = static_cast<int>(v.size());
  buf.assign(v.begin(), v.end());
  std::sort(buf.begin(), buf.end(), std::greater<double>());
  double cum = 0.0, theta = buf[0] - 1.0;
  for (int j = 0; j < n; ++j) {
    cum += buf[j];
    const double t = (cum - 1.0) / (j + 1);
    if (buf[j] - t > 0.0) theta = t;
  }
  double sum = 0.0;
  for (double& x : v) {
    x = std::max(0.0, x - theta);
    sum += x;
  }
  if (sum > 0.0) {
    for (double& x : v) x /= sum;
  } else {
    std::fill(v.begin(), v.end(), 1.0 / n);
  }
}

bool solve_linear(std::vector<std::vector<double>>& m, std::vector<double>& rhs) {
  const int n = static_cast<int>(rhs.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    }
    if (std::fabs(m[piv][col]) < 1e-300) return false;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c2 = col; c2 < n; ++c2) m[r][c2] -= f * m[col][c2];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    double acc = rhs[col];
    for (int c2 = col + 1; c2 < n; ++c2) acc -= m[col][c2] * rhs[c2];
    rhs[col] = acc / m[col][col];
  }
  return true;
}

// One pass over all alternatives: values and supergradients.
struct FullEval {
  std::vector<double> f;
  std::vector<std::vector<double>> grads;
  double g = kInf;
  int argmin = 0;   // position within p.alts
  int second = -1;  // runner-up position, -1 for a single alternative
};

FullEval eval_all(const Problem& p, const double* w, long* evals) {
  const int k = p.k();
  const int n = static_cast<int>(p.alts.size());
  FullEval out;
  out.f.resize(static_cast<std::size_t>(n));
  out.grads.assign(static_cast<std::size_t>(n),
                   std::vector<double>(static_cast<std::size_t>(k)));
  for (int j = 0; j < n; ++j) {
    const AltEval e = eval_alt(p, w, p.alts[static_cast<std::size_t>(j)]);
    out.f[static_cast<std::size_t>(j)] = e.f;
    alt_gradient(p, p.alts[static_cast<std::size_t>(j)], e.pooled,
                 out.grads[static_cast<std::size_t>(j)].data());
  }
  if (evals) *evals += n;
  for (int j = 0; j < n; ++j) {
    if (out.f[static_cast<std::size_t>(j)] < out.g) {
      out.g = out.f[static_cast<std::size_t>(j)];
      out.argmin = j;
    }
  }
  for (int j = 0; j < n; ++j) {
    if (j == out.argmin) continue;
    if (out.second < 0 ||
        out.f[static_cast<std::size_t>(j)] < out.f[static_cast<std::size_t>(out.second)]) {
      out.second = j;
    }
  }
  return out;
}

struct CertOut {
  double g = 0.0;
  double gap = kInf;
  std::vector<double> mixture;  // over p.alts, attaining the gap
};

// Upper bound from a supergradient mixture c over the alternatives:
//   U(c) = sum_a c_a (f_a - grad_a . w) + max_i (sum_a c_a grad_a)_i.
double mixture_bound(int k, const std::vector<double>& phi,
                     const std::vector<std::vector<double>>& grads,
                     const std::vector<double>& c) {
  double base = 0.0;
  std::vector<double> zeta(static_cast<std::size_t>(k), 0.0);
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0.0) continue;
    base += c[j] * phi[j];
    for (int i = 0; i < k; ++i) zeta[static_cast<std::size_t>(i)] += c[j] * grads[j][static_cast<std::size_t>(i)];
  }
  return base + *std::max_element(zeta.begin(), zeta.end());
}

// Certified optimality gap at w. Every mixture of per-alternative
// supergradients yields a valid global upper bound (concavity); the gap is
// minimized over pure mixtures, exact 1-D breakpoint enumeration for every
// pair of alternatives, and a KKT least-squares mixture on the near-active
// set.
CertOut certify(const Problem& p, const FullEval& ev, const double* w) {
  const int k = p.k();
  const int n = static_cast<int>(p.alts.size());
  const std::vector<double>& f = ev.f;
  const std::vector<std::vector<double>>& grads = ev.grads;
  std::vector<double> phi(static_cast<std::size_t>(n));
  const double g = ev.g;
  for (int j = 0; j < n; ++j) {
    double gw = 0.0;
    for (int i = 0; i < k; ++i) gw += grads[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] * w[i];
    phi[static_cast<std::size_t>(j)] = f[static_cast<std::size_t>(j)] - gw;
  }

  CertOut out;
  out.g = g;
  out.mixture.assign(static_cast<std::size_t>(n), 0.0);
  out.mixture[static_cast<std::size_t>(ev.argmin)] = 1.0;
  std::vector<double> c(static_cast<std::size_t>(n), 0.0);
  auto try_mixture = [&](const std::vector<double>& cand) {
    const double gap = mixture_bound(k, phi, grads, cand) - g;
    if (gap < out.gap) {
      out.gap = gap;
      out.mixture = cand;
    }
  };

  for (int j = 0; j < n; ++j) {
    std::fill(c.begin(), c.end(), 0.0);
    c[static_cast<std::size_t>(j)] = 1.0;
    try_mixture(c);
  }

  // Pairwise mixtures: along c e_a + (1-c) e_b the bound is piecewise linear
  // in c, so its minimum sits at a coordinate crossing of the max term.
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const auto& ga = grads[static_cast<std::size_t>(a)];
      const auto& gb = grads[static_cast<std::size_t>(b)];
      for (int i = 0; i < k; ++i) {
        for (int j2 = i + 1; j2 < k; ++j2) {
          const double di = ga[static_cast<std::size_t>(i)] - gb[static_cast<std::size_t>(i)];
          const double dj = ga[static_cast<std::size_t>(j2)] - gb[static_cast<std::size_t>(j2)];
          const double denom = di - dj;
          if (std::fabs(denom) < 1e-300) continue;
          const double cross =
              (gb[static_cast<std::size_t>(j2)] - gb[static_cast<std::size_t>(i)]) / denom;
          if (!(cross > 0.0 && cross < 1.0)) continue;
          std::fill(c.begin(), c.end(), 0.0);
          c[static_cast<std::size_t>(a)] = cross;
          c[static_cast<std::size_t>(b)] = 1.0 - cross;
          try_mixture(c);
        }
      }
    }
  }

  // KKT mixture: least-squares equalization of the mixed supergradient over
  // the support, restricted to alternatives inside the current gap band.
  std::vector<int> act;
  for (int j = 0; j < n; ++j) {
    if (f[static_cast<std::size_t>(j)] - g <= out.gap * (1.0 + 1e-9) + 1e-15) act.push_back(j);
  }
  if (act.size() >= 2) {
    std::vector<int> support;
    for (int i = 0; i < k; ++i) {
      if (w[i] > 1e-9) support.push_back(i);
    }
    const int na = static_cast<int>(act.size());
    const int nx = na;  // c_0..c_{na-2} plus z
    const int last = act[static_cast<std::size_t>(na - 1)];
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs_rows;
    for (int i : support) {
      std::vector<double> row(static_cast<std::size_t>(nx), 0.0);
      for (int j = 0; j < na - 1; ++j) {
        const int aj = act[static_cast<std::size_t>(j)];
        row[static_cast<std::size_t>(j)] =
            grads[static_cast<std::size_t>(aj)][static_cast<std::size_t>(i)] -
            grads[static_cast<std::size_t>(last)][static_cast<std::size_t>(i)];
      }
      row[static_cast<std::size_t>(nx - 1)] = -1.0;  // -z
      rows.push_back(std::move(row));
      rhs_rows.push_back(-grads[static_cast<std::size_t>(last)][static_cast<std::size_t>(i)]);
    }
    if (static_cast<int>(rows.size()) >= nx) {
      std::vector<std::vector<double>> ata(
          static_cast<std::size_t>(nx), std::vector<double>(static_cast<std::size_t>(nx), 0.0));
      std::vector<double> atb(static_cast<std::size_t>(nx), 0.0);
      double scale = 0.0;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int i = 0; i < nx; ++i) {
          atb[static_cast<std::size_t>(i)] += rows[r][static_cast<std::size_t>(i)] * rhs_rows[r];
          for (int j = 0; j < nx; ++j) {
            ata[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                rows[r][static_cast<std::size_t>(i)] * rows[r][static_cast<std::size_t>(j)];
          }
        }
      }
      for (int i = 0; i < nx; ++i) scale = std::max(scale, ata[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
      for (int i = 0; i < nx; ++i) ata[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] += 1e-12 * (scale + 1e-300);
      if (solve_linear(ata, atb)) {
        std::fill(c.begin(), c.end(), 0.0);
        double csum = 0.0;
        for (int j = 0; j < na - 1; ++j) {
          const double cj = std::max(0.0, atb[static_cast<std::size_t>(j)]);
          c[static_cast<std::size_t>(act[static_cast<std::size_t>(j)])] = cj;
          csum += cj;
        }
        const double clast = std::max(0.0, 1.0 - csum);
        c[static_cast<std::size_t>(last)] = clast;
        csum += clast;
        if (csum > 1e-12) {
          for (double& x : c) x /= csum;
          try_mixture(c);
        }
      }
    }
  }

  out.gap = std::max(0.0, out.gap);
  return out;
}

// Maximize g along e_i - e_j by golden section; the move is kept only when
// it strictly improves, so flat directions leave w untouched.
double golden_dir(const Problem& p, std::vector<double>& w, int i, int j,
                  int iters, long* evals) {
  const double lo = -w[static_cast<std::size_t>(i)];
  const double hi = w[static_cast<std::size_t>(j)];
  const double g0 = eval_g(p, w.data(), nullptr, evals).g;
  if (hi - lo < 1e-15) return g0;
  auto phi_at = [&](double s) {
    const double wi = w[static_cast<std::size_t>(i)], wj = w[static_cast<std::size_t>(j)];
    w[static_cast<std::size_t>(i)] = std::max(0.0, wi + s);
    w[static_cast<std::size_t>(j)] = std::max(0.0, wj - s);
    const double val = eval_g(p, w.data(), nullptr, evals).g;
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(j)] = wj;
    return val;
  };
  const double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = phi_at(x1), f2 = phi_at(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = phi_at(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = phi_at(x1);
    }
  }
  const double s = 0.5 * (a + b);
  const double gs = phi_at(s);
  if (gs > g0) {
    w[static_cast<std::size_t>(i)] = std::max(0.0, w[static_cast<std::size_t>(i)] + s);
    w[static_cast<std::size_t>(j)] = std::max(0.0, w[static_cast<std::size_t>(j)] - s);
    return gs;
  }
  return g0;
}

double pair_sweep(const Problem& p, std::vector<double>& w, int golden_iters,
                  long* evals) {
  double g = -kInf;
  for (int i = 0; i < p.k(); ++i) {
    for (int j = i + 1; j < p.k(); ++j) {
      g = std::max(g, golden_dir(p, w, i, j, golden_iters, evals));
    }
  }
  return g;
}

// Projected ascent with Polyak-style steps toward a certified target value.
// Leaves w at the best point seen.
double polyak_epoch(const Problem& p, std::vector<double>& w, double target,
                    int steps, long* evals, long budget) {
  std::vector<double> grad(static_cast<std::size_t>(p.k())), buf;
  std::vector<double> best_w = w;
  double best_g = -kInf;
  for (int s = 0; s < steps && *evals < budget; ++s) {
    const EvalOut e = eval_g(p, w.data(), grad.data(), evals);
    if (e.g > best_g) {
      best_g = e.g;
      best_w = w;
    }
    double n2 = 0.0;
    for (double x : grad) n2 += x * x;
    const double step = (target - e.g) / (n2 + 1e-300);
    if (!(step > 0.0)) break;
    for (int i = 0; i < p.k(); ++i) w[static_cast<std::size_t>(i)] += step * grad[static_cast<std::size_t>(i)];
    project_simplex(w, buf);
  }
  w = best_w;
  return best_g;
}

// Diminishing-step projected supergradient ascent (normalized directions).
// Leaves w at the best point seen.
double ascent_stage(const Problem& p, std::vector<double>& w, int iters,
                    double step_scale, long step_offset, long* evals, long budget) {
  std::vector<double> grad(static_cast<std::size_t>(p.k())), buf;
  std::vector<double> best_w = w;
  double best_g = -kInf;
  for (int it = 1; it <= iters && *evals < budget; ++it) {
    const EvalOut e = eval_g(p, w.data(), grad.data(), evals);
    if (e.g > best_g) {
      best_g = e.g;
      best_w = w;
    }
    double n2 = 0.0;
    for (double x : grad) n2 += x * x;
    const double step =
        step_scale / (std::sqrt(static_cast<double>(step_offset + it)) * (std::sqrt(n2) + 1e-300));
    for (int i = 0; i < p.k(); ++i) w[static_cast<std::size_t>(i)] += step * grad[static_cast<std::size_t>(i)];
    project_simplex(w, buf);
  }
  w = best_w;
  return best_g;
}

}  // namespace

Weights::Weights(std::vector<double> w) : w_(std::move(w)) {
  if (w_.empty()) throw std::invalid_argument("weights must be nonempty");
  double sum = 0.0;
  for (double x : w_) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument("weights must be nonnegative and finite");
    }
    sum += x;
  }
  if (std::fabs(sum - 1.0) > kSimplexTol) {
    throw std::invalid_argument("weights must sum to one");
  }
}

Weights Weights::uniform(int k) {
  if (k < 1) throw std::invalid_argument("uniform weights need k >= 1");
  Weights w;
  w.w_.assign(static_cast<std::size_t>(k), 1.0 / k);
  return w;
}

Weights Weights::unchecked(std::vector<double> w) {
  Weights out;
  out.w_ = std::move(w);
  return out;
}

BanditInstance::BanditInstance(Family family, std::vector<double> means, int m_opt)
    : family_(family), means_(std::move(means)), m_opt_(m_opt) {
  const int k = static_cast<int>(means_.size());
  if (k < 2) throw std::invalid_argument("instance needs at least two arms");
  if (m_opt_ < 1 || m_opt_ > k - 1) {
    throw std::invalid_argument("m_opt must lie in [1, K-1]");
  }
  for (double mu : means_) family_.require_mean(mu);
  std::vector<double> sorted = means_;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  const double plateau = sorted[0];
  for (int i = 0; i < m_opt_; ++i) {
    if (std::fabs(sorted[static_cast<std::size_t>(i)] - plateau) > kPlateauTol) {
      throw std::invalid_argument("top means must form an equal plateau of size m_opt");
    }
  }
  if (!(sorted[static_cast<std::size_t>(m_opt_ - 1)] >
        sorted[static_cast<std::size_t>(m_opt_)] + kPlateauTol)) {
    throw std::invalid_argument("plateau must strictly exceed the (m_opt+1)-th mean");
  }
  mu_star_ = plateau;
  for (int a = 0; a < k; ++a) {
    if (means_[static_cast<std::size_t>(a)] == mu_star_) optimal_set_.push_back(a);
  }
}

std::vector<int> top_m_arms(std::span<const double> means, int m) {
  const int k = static_cast<int>(means.size());
  if (m < 1 || m >= k) throw std::invalid_argument("top set size must lie in [1, K-1]");
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return means[static_cast<std::size_t>(a)] > means[static_cast<std::size_t>(b)];
  });
  idx.resize(static_cast<std::size_t>(m));
  std::sort(idx.begin(), idx.end());
  return idx;
}

double pooled_alt_mean(std::span<const double> means, std::span<const double> weights) {
  if (means.size() != weights.size() || means.empty()) {
    throw std::invalid_argument("pooled_alt_mean needs matching nonempty inputs");
  }
  double ws = 0.0, wx = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      throw std::invalid_argument("pooled_alt_mean weights must be strictly positive");
    }
    ws += weights[i];
    wx += weights[i] * means[i];
  }
  return wx / ws;
}

double i_alpha(const Family& family, std::span<const double> means_top,
               double mean_alt, std::span<const double> alphas) {
  if (means_top.size() != alphas.size() || means_top.empty()) {
    throw std::invalid_argument("i_alpha needs matching nonempty inputs");
  }
  double asum = 0.0;
  for (double a : alphas) {
    if (!(a >= 0.0)) throw std::invalid_argument("i_alpha weights must be nonnegative");
    asum += a;
  }
  if (asum > 1.0 + 1e-12) throw std::invalid_argument("i_alpha weights exceed one");
  const double a_alt = std::max(0.0, 1.0 - asum);
  double mbar = a_alt * mean_alt;
  bool all_equal = true;
  for (std::size_t i = 0; i < means_top.size(); ++i) {
    mbar += alphas[i] * means_top[i];
    all_equal = all_equal && means_top[i] == mean_alt;
  }
  if (all_equal) return 0.0;
  double v = a_alt > 0.0 ? a_alt * family.kl(mean_alt, mbar) : 0.0;
  for (std::size_t i = 0; i < means_top.size(); ++i) {
    if (alphas[i] > 0.0) v += alphas[i] * family.kl(means_top[i], mbar);
  }
  return v;
}

BestResponse best_response(const Family& family, std::span<const double> means,
                           int m_opt, std::span<const double> w) {
  if (means.size() != w.size()) {
    throw std::invalid_argument("best_response needs matching means and weights");
  }
  const Problem p = make_problem(family, means, m_opt);
  BestResponse best;
  best.value = kInf;
  for (int a : p.alts) {
    const AltEval e = eval_alt(p, w.data(), a);
    if (e.f < best.value) {
      best.value = e.f;
      best.critical_arm = a;
      best.pooled_mean = e.pooled;
    }
  }
  return best;
}

BestResponse best_response(const BanditInstance& instance, const Weights& w) {
  if (w.size() != instance.k()) {
    throw std::invalid_argument("weights size does not match instance");
  }
  return best_response(instance.family(), instance.means(), instance.m_opt(), w.span());
}

double g_value(const Family& family, std::span<const double> means, int m_opt,
               std::span<const double> w) {
  return best_response(family, means, m_opt, w).value;
}

double g_value(const BanditInstance& instance, const Weights& w) {
  return best_response(instance, w).value;
}

OracleSolveError::OracleSolveError(const std::string& what, OracleSolution best)
    : std::runtime_error(what), best_(std::move(best)) {}

OracleSolution solve(const BanditInstance& instance, const SolveOptions& options) {
  if (!(options.tol >= 1e-10)) {
    throw std::invalid_argument("solve tolerance must be at least 1e-10");
  }
  const Problem p = make_problem(instance.family(), instance.means(), instance.m_opt());
  const int k = p.k();
  RngStream rs(0x5EEDBA11C0FFEEULL);
  long evals = 0;
  const long budget = std::max<long>(options.max_evaluations, 1000);

  struct Candidate {
    std::vector<double> w;
    double g = -kInf;
    double gap = kInf;
    bool certified = false;
  };
  Candidate global;

  const int n_starts = 1 + std::max(0, options.multistarts);
  for (int s = 0; s < n_starts; ++s) {
    std::vector<double> w;
    if (s == 0) {
      w.assign(static_cast<std::size_t>(k), 1.0 / k);
    } else {
      w.resize(static_cast<std::size_t>(k));
      double sum = 0.0;
      for (double& x : w) {
        x = -std::log(1.0 - rs.next_double01()) + 1e-12;
        sum += x;
      }
      for (double& x : w) x /= sum;
    }

    Candidate cand;
    cand.g = ascent_stage(p, w, 300, 0.3, 0, &evals, budget);
    cand.w = w;

    for (int round = 0; round < 16 && evals < budget; ++round) {
      const CertOut cert = certify(p, w.data(), &evals);
      if (cert.g >= cand.g) {
        cand.g = cert.g;
        cand.gap = cert.gap;
        cand.w = w;
      } else if (cert.gap + cert.g >= cand.g && cert.gap < cand.gap) {
        // same plateau, tighter certificate
        cand.gap = std::max(cert.g + cert.gap - cand.g, 0.0);
      }
      if (cert.gap <= options.tol * std::max(cert.g, 1e-300)) {
        cand.certified = true;
        break;
      }
      if (round % 2 == 0) {
        polyak_epoch(p, w, cert.g + cert.gap, 200, &evals, budget);
      } else {
        pair_sweep(p, w, 48, &evals);
        pair_sweep(p, w, 48, &evals);
      }
    }

    const bool better = cand.g > global.g * (1.0 + kTieRel) + 1e-300;
    if (global.w.empty() || better) {
      global = cand;
    }
    if (global.certified) break;
  }

  OracleSolution sol;
  sol.w_star = Weights::unchecked(global.w);
  sol.t_star = 1.0 / global.g;
  sol.gap_certificate = global.gap;
  sol.converged = global.certified;
  sol.evaluations = evals;
  if (!sol.converged) {
    throw OracleSolveError(
        "oracle solve did not certify the requested tolerance within budget", sol);
  }
  return sol;
}

PluginOracle::PluginOracle(Family family, int k, int m_opt)
    : family_(family), k_(k), m_opt_(m_opt), w_(Weights::uniform(k)) {
  if (k < 2 || m_opt < 1 || m_opt > k - 1) {
    throw std::invalid_argument("plugin oracle needs K >= 2 and m_opt in [1, K-1]");
  }
}

const Weights& PluginOracle::update(std::span<const double> means) {
  ++calls_;
  if (static_cast<int>(means.size()) != k_) {
    throw std::invalid_argument("plugin oracle means size mismatch");
  }
  const auto [mn, mx] = std::minmax_element(means.begin(), means.end());
  if (!(*mx > *mn)) {
    w_ = Weights::uniform(k_);
    return w_;
  }
  const Problem p = make_problem(family_, means, m_opt_);
  std::vector<double> w = w_.values();
  long evals = 0;

  std::vector<double> grad(static_cast<std::size_t>(k_)), buf;
  std::vector<double> best_w = w;
  double best_g = -kInf;
  for (int j = 1; j <= 8; ++j) {
    const EvalOut e = eval_g(p, w.data(), grad.data(), &evals);
    if (e.g > best_g) {
      best_g = e.g;
      best_w = w;
    }
    double n2 = 0.0;
    for (double x : grad) n2 += x * x;
    const double step =
        0.5 / (std::sqrt(static_cast<double>(16 + calls_ + j)) * (std::sqrt(n2) + 1e-300));
    for (int i = 0; i < k_; ++i) w[static_cast<std::size_t>(i)] += step * grad[static_cast<std::size_t>(i)];
    project_simplex(w, buf);
  }
  w = best_w;
  const double swept = pair_sweep(p, w, 24, &evals);
  if (swept < best_g) w = best_w;

  double sum = 0.0;
  for (double x : w) sum += x;
  if (sum > 0.0) {
    for (double& x : w) x /= sum;
  }
  w_ = Weights::unchecked(std::move(w));
  return w_;
}

}  // namespace multibai
