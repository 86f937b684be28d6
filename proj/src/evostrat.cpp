// Copyright 2026 The ldgea Authors
// SPDX-License-Identifier: Apache-2.0
#include "ldgea/evostrat.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "ldgea/error.hpp"

namespace ldgea {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int default_lambda(std::size_t n) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(n))));
}

std::vector<int> ranking(std::span<const double> values) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto key = [&](int i) { return std::isnan(values[i]) ? INFINITY : values[i]; };
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return key(a) < key(b); });
  return idx;
}

VectorXd standard_normal_vector(std::size_t n, Rng& rng) {
  VectorXd z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = standard_normal(rng);
  return z;
}

/// Inverse standard normal CDF (Acklam's rational approximation plus one
/// Halley refinement step).
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("normal_quantile: p outside (0, 1)");
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - 0.02425) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kBudget: return "budget";
    case Termination::kParamTol: return "param-tol";
    case Termination::kFunTol: return "fun-tol";
    case Termination::kHistTol: return "hist-tol";
    case Termination::kExternalStop: return "external-stop";
    case Termination::kMaxIterations: return "max-iterations";
    case Termination::kDegenerate: return "degenerate";
  }
  return "unknown";
}

int EsConfig::resolved_lambda() const {
  return lambda > 0 ? lambda : default_lambda(std::max<std::size_t>(1, box.size()));
}
int EsConfig::resolved_mu() const { return mu > 0 ? mu : std::max(1, resolved_lambda() / 4); }
int EsConfig::resolved_history() const {
  if (history > 0) return history;
  const double n = static_cast<double>(box.size());
  return 10 + static_cast<int>(std::ceil(30.0 * n / resolved_lambda()));
}

void EsConfig::validate() const {
  if (box.size() == 0 || box.lower.size() != box.upper.size()) {
    throw ArgumentError("EsConfig: empty or malformed box");
  }
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!(box.upper[i] > box.lower[i])) throw ArgumentError("EsConfig: box has zero width");
  }
  const int l = resolved_lambda(), m = resolved_mu();
  if (m < 1 || m > l) throw ArgumentError("EsConfig: need 1 <= mu <= lambda");
  if (!(sigma0 > 0.0)) throw ArgumentError("EsConfig: sigma0 must be positive");
  if (!(tol_param > 0.0 && tol_fun > 0.0 && tol_hist > 0.0)) {
    throw ArgumentError("EsConfig: tolerances must be positive");
  }
  if (budget < 0) throw ArgumentError("EsConfig: negative budget");
}

EsRunResult cmsa_es_run(const Objective& f, const EsConfig& cfg, std::span<const double> init,
                        std::optional<double> init_value) {
  cfg.validate();
  const std::size_t n = cfg.box.size();
  if (init.size() != n || !cfg.box.contains(init)) {
    throw ArgumentError("cmsa_es_run: initial point outside the box");
  }
  EsRunResult r;
  r.best.assign(init.begin(), init.end());
  if (init_value) r.best_value = *init_value;
  if (cfg.budget == 0) return r;
  if (!init_value) {
    r.best_value = f(init);
    ++r.evaluations;
  }
  if (!std::isfinite(r.best_value)) {
    throw ArgumentError("cmsa_es_run: objective is not finite at the initial point");
  }

  const int lambda = cfg.resolved_lambda();
  const int mu = cfg.resolved_mu();
  const int window = cfg.resolved_history();
  const double dn = static_cast<double>(n);
  const double tau = 1.0 / std::sqrt(2.0 * dn);
  const double tau_c = 1.0 + dn * (dn + 1.0) / (2.0 * mu);

  VectorXd lo(n), width(n), mean(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = cfg.box.lower[i];
    width[i] = cfg.box.width(i);
    mean[i] = (init[i] - lo[i]) / width[i];
  }
  double sigma = cfg.sigma0;
  MatrixXd cov = MatrixXd::Identity(n, n);
  Rng rng(cfg.seed);

  std::vector<VectorXd> ys(lambda), ss(lambda);
  std::vector<double> sig(lambda), val(lambda);
  std::vector<double> x(n);
  std::deque<double> hist;
  double prev_min = r.best_value;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig;

  while (true) {
    if (cfg.stop != nullptr && cfg.stop->load(std::memory_order_relaxed)) {
      r.reason = Termination::kExternalStop;
      break;
    }
    if (r.evaluations + lambda > cfg.budget) {
      r.reason = Termination::kBudget;
      break;
    }
    eig.compute(cov);
    const MatrixXd root =
        eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    for (int l = 0; l < lambda; ++l) {
      sig[l] = sigma * std::exp(tau * standard_normal(rng));
      VectorXd y = mean + sig[l] * (root * standard_normal_vector(n, rng));
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = reflect_into(y[i], 0.0, 1.0);
        x[i] = std::clamp(lo[i] + y[i] * width[i], cfg.box.lower[i], cfg.box.upper[i]);
      }
      ss[l] = (y - mean) / sig[l];
      ys[l] = std::move(y);
      val[l] = f(x);
      ++r.evaluations;
    }
    const auto order = ranking(val);
    VectorXd new_mean = VectorXd::Zero(n);
    MatrixXd ssum = MatrixXd::Zero(n, n);
    double new_sigma = 0.0;
    for (int k = 0; k < mu; ++k) {
      const int l = order[k];
      new_mean += ys[l];
      new_sigma += sig[l];
      ssum.noalias() += ss[l] * ss[l].transpose();
    }
    new_mean /= mu;
    new_sigma /= mu;
    cov = (1.0 - 1.0 / tau_c) * cov + (1.0 / tau_c) * (ssum / mu);
    cov = 0.5 * (cov + cov.transpose());

    const int top = order[0];
    const double gen_min = std::isnan(val[top]) ? INFINITY : val[top];
    if (gen_min < r.best_value) {
      r.best_value = gen_min;
      for (std::size_t i = 0; i < n; ++i) {
        r.best[i] = std::clamp(lo[i] + ys[top][i] * width[i], cfg.box.lower[i], cfg.box.upper[i]);
      }
    }
    r.trace.push_back(gen_min);
    ++r.generations;

    const double shift = ((new_mean - mean).cwiseProduct(width)).norm();
    mean = new_mean;
    sigma = new_sigma;
    if (shift <= cfg.tol_param) {
      r.reason = Termination::kParamTol;
      break;
    }
    if (std::abs(gen_min - prev_min) <= cfg.tol_fun) {
      r.reason = Termination::kFunTol;
      break;
    }
    prev_min = gen_min;
    hist.push_back(gen_min);
    if (static_cast<int>(hist.size()) > window) hist.pop_front();
    if (static_cast<int>(hist.size()) == window) {
      const auto [mn, mx] = std::minmax_element(hist.begin(), hist.end());
      if (*mx - *mn <= cfg.tol_hist) {
        r.reason = Termination::kHistTol;
        break;
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

int round_integer_coordinate(double v, int catalog_size) {
  if (catalog_size < 1) throw ArgumentError("round_integer_coordinate: empty catalog");
  if (std::isnan(v)) return 0;
  const double r = std::nearbyint(std::clamp(v, -1e9, 1e9));
  return static_cast<int>(std::clamp(r, 0.0, static_cast<double>(catalog_size - 1)));
}

double integer_min_std(double p) { return 0.5 / normal_quantile(1.0 - p / 2.0); }

std::vector<double> MixedSpace::evaluation_point(std::span<const double> x) const {
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (integer_mask[i]) {
      out[i] = round_integer_coordinate(out[i], catalog_size);
    } else {
      out[i] = std::clamp(reflect_into(out[i], box.lower[i], box.upper[i]), box.lower[i],
                          box.upper[i]);
    }
  }
  return out;
}

struct CmaEs::State {
  std::size_t n = 0;
  int lambda = 0, mu = 0;
  VectorXd weights;
  double mueff = 0, cc = 0, cs = 0, c1 = 0, cmu = 0, damps = 0, chin = 0;
  VectorXd lo, width, min_std;  // min_std in normalised units, 0 for continuous
  VectorXd mean, pc, ps;
  MatrixXd cov, basis, inv_sqrt;
  VectorXd diag;
  double sigma = 0.3;
  double tol_param = 0, tol_fun = 0;
  long max_iter = 0;
  long gen = 0;
  double prev_best = INFINITY;
  Rng rng;
  std::vector<VectorXd> raw;
  std::vector<std::vector<double>> points;
  std::optional<Termination> stop;

  void decompose() {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
    basis = eig.eigenvectors();
    diag = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
    inv_sqrt = basis * diag.cwiseInverse().asDiagonal() * basis.transpose();
  }
};

CmaEs::CmaEs(const MixedSpace& space, const CmaParams& params, std::span<const double> mean,
             std::uint64_t seed)
    : s_(std::make_unique<State>()) {
  auto& s = *s_;
  s.n = space.size();
  if (s.n == 0 || mean.size() != s.n || space.integer_mask.size() != s.n) {
    throw ArgumentError("CmaEs: dimension mismatch");
  }
  if (!(params.sigma0 > 0.0)) throw ArgumentError("CmaEs: sigma0 must be positive");
  const double n = static_cast<double>(s.n);
  s.lambda = params.lambda > 0 ? params.lambda : default_lambda(s.n);
  if (s.lambda < 2) throw ArgumentError("CmaEs: lambda must be at least 2");
  s.mu = s.lambda / 2;
  s.weights.resize(s.mu);
  for (int i = 0; i < s.mu; ++i) s.weights[i] = std::log(s.mu + 0.5) - std::log(i + 1.0);
  s.weights /= s.weights.sum();
  s.mueff = 1.0 / s.weights.squaredNorm();
  s.cc = (4 + s.mueff / n) / (n + 4 + 2 * s.mueff / n);
  s.cs = (s.mueff + 2) / (n + s.mueff + 5);
  s.c1 = 2 / ((n + 1.3) * (n + 1.3) + s.mueff);
  s.cmu = std::min(1 - s.c1, 2 * (s.mueff - 2 + 1 / s.mueff) / ((n + 2) * (n + 2) + s.mueff));
  s.damps = 1 + 2 * std::max(0.0, std::sqrt((s.mueff - 1) / (n + 1)) - 1) + s.cs;
  s.chin = std::sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n));
  s.tol_param = params.tol_param;
  s.tol_fun = params.tol_fun;
  s.max_iter = params.max_iterations > 0
                   ? params.max_iterations
                   : static_cast<long>(100 + 50 * (n + 3) * (n + 3) / std::sqrt(s.lambda));

  const double p = params.integer_flip_probability > 0 ? params.integer_flip_probability : 1.0 / n;
  const double sd_min = integer_min_std(std::min(p, 0.999));
  s.lo.resize(s.n);
  s.width.resize(s.n);
  s.min_std = VectorXd::Zero(s.n);
  s.mean.resize(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    if (space.integer_mask[i]) {
      s.lo[i] = -0.5;
      s.width[i] = static_cast<double>(space.catalog_size);
      s.min_std[i] = sd_min / s.width[i];
    } else {
      s.lo[i] = space.box.lower[i];
      s.width[i] = space.box.width(i);
      if (!(s.width[i] > 0)) throw ArgumentError("CmaEs: box has zero width");
    }
    s.mean[i] = reflect_into((mean[i] - s.lo[i]) / s.width[i], 0.0, 1.0);
  }
  s.sigma = params.sigma0;
  s.pc = VectorXd::Zero(s.n);
  s.ps = VectorXd::Zero(s.n);
  s.cov = MatrixXd::Identity(s.n, s.n);
  s.rng.seed(seed);
  s.decompose();
}

CmaEs::~CmaEs() = default;
CmaEs::CmaEs(CmaEs&&) noexcept = default;
CmaEs& CmaEs::operator=(CmaEs&&) noexcept = default;

int CmaEs::lambda() const { return s_->lambda; }
long CmaEs::generation() const { return s_->gen; }

const std::vector<std::vector<double>>& CmaEs::ask() {
  auto& s = *s_;
  s.raw.resize(s.lambda);
  s.points.resize(s.lambda);
  for (int k = 0; k < s.lambda; ++k) {
    VectorXd u =
        s.mean + s.sigma * (s.basis * s.diag.cwiseProduct(standard_normal_vector(s.n, s.rng)));
    auto& x = s.points[k];
    x.resize(s.n);
    for (std::size_t i = 0; i < s.n; ++i) {
      u[i] = reflect_into(u[i], 0.0, 1.0);
      x[i] = s.lo[i] + u[i] * s.width[i];
    }
    s.raw[k] = std::move(u);
  }
  return s.points;
}

void CmaEs::tell(std::span<const double> values) {
  auto& s = *s_;
  if (values.size() != static_cast<std::size_t>(s.lambda) || s.raw.size() != values.size()) {
    throw ArgumentError("CmaEs::tell: expected one value per sampled point");
  }
  const auto order = ranking(values);
  const VectorXd old_mean = s.mean;
  VectorXd mean = VectorXd::Zero(s.n);
  for (int k = 0; k < s.mu; ++k) mean += s.weights[k] * s.raw[order[k]];
  const VectorXd yw = (mean - old_mean) / s.sigma;
  s.ps = (1 - s.cs) * s.ps + std::sqrt(s.cs * (2 - s.cs) * s.mueff) * (s.inv_sqrt * yw);
  ++s.gen;
  const double ps_norm = s.ps.norm();
  const double hsig_lhs = ps_norm / std::sqrt(1 - std::pow(1 - s.cs, 2.0 * s.gen)) / s.chin;
  const bool hsig = hsig_lhs < 1.4 + 2.0 / (static_cast<double>(s.n) + 1);
  s.pc = (1 - s.cc) * s.pc + (hsig ? std::sqrt(s.cc * (2 - s.cc) * s.mueff) : 0.0) * yw;
  MatrixXd rank_mu = MatrixXd::Zero(s.n, s.n);
  for (int k = 0; k < s.mu; ++k) {
    const VectorXd y = (s.raw[order[k]] - old_mean) / s.sigma;
    rank_mu.noalias() += s.weights[k] * y * y.transpose();
  }
  s.cov = (1 - s.c1 - s.cmu) * s.cov +
          s.c1 * (s.pc * s.pc.transpose() + (hsig ? 0.0 : s.cc * (2 - s.cc)) * s.cov) +
          s.cmu * rank_mu;
  s.cov = 0.5 * (s.cov + s.cov.transpose());
  s.sigma *= std::exp((s.cs / s.damps) * (ps_norm / s.chin - 1));
  s.mean = mean;
  for (std::size_t i = 0; i < s.n; ++i) {
    if (s.min_std[i] > 0 && s.sigma * std::sqrt(s.cov(i, i)) < s.min_std[i]) {
      const double target = s.min_std[i] / s.sigma;
      s.cov(i, i) = target * target;
    }
  }
  s.decompose();

  const double best = std::isnan(values[order[0]]) ? INFINITY : values[order[0]];
  s.stop.reset();
  const double cond = (s.diag.maxCoeff() / s.diag.minCoeff());
  if (!std::isfinite(s.sigma) || !(s.sigma > 0) || !(cond * cond < 1e14) ||
      !s.cov.allFinite()) {
    s.stop = Termination::kDegenerate;
  } else if (((s.mean - old_mean).cwiseProduct(s.width)).norm() <= s.tol_param) {
    s.stop = Termination::kParamTol;
  } else if (std::abs(best - s.prev_best) <= s.tol_fun) {
    s.stop = Termination::kFunTol;
  } else if (s.gen >= s.max_iter) {
    s.stop = Termination::kMaxIterations;
  }
  s.prev_best = best;
}

std::optional<Termination> CmaEs::stop_reason() const { return s_->stop; }

std::vector<double> CmaEs::mean() const {
  const auto& s = *s_;
  std::vector<double> m(s.n);
  for (std::size_t i = 0; i < s.n; ++i) m[i] = s.lo[i] + s.mean[i] * s.width[i];
  return m;
}

std::vector<double> CmaEs::coordinate_std() const {
  const auto& s = *s_;
  std::vector<double> sd(s.n);
  for (std::size_t i = 0; i < s.n; ++i) sd[i] = s.sigma * std::sqrt(s.cov(i, i)) * s.width[i];
  return sd;
}

BaselineResult cma_es_baseline_run(const Objective& f, const MixedSpace& space,
                                   const BaselineConfig& cfg) {
  const std::size_t n = space.size();
  if (n == 0 || space.integer_mask.size() != n) {
    throw ArgumentError("cma_es_baseline_run: malformed search space");
  }
  if (cfg.budget < 0) throw ArgumentError("cma_es_baseline_run: negative budget");
  BaselineResult out;
  const int lambda_def = cfg.cma.lambda > 0 ? cfg.cma.lambda : default_lambda(n);
  Rng rng(derive_seed(cfg.seed, 0xb190));
  int n_large = 0;
  long used_large = 0, used_small = 0;
  auto stopped = [&] { return cfg.stop != nullptr && cfg.stop->load(std::memory_order_relaxed); };

  for (int run = 0; out.evaluations < cfg.budget; ++run) {
    if (stopped()) {
      out.interrupted = true;
      break;
    }
    CmaParams p = cfg.cma;
    bool large = true;
    if (run == 0) {
      p.lambda = lambda_def;
    } else if (used_small < used_large) {
      large = false;
      const double ratio = 0.5 * std::ldexp(1.0, n_large);
      const double u = uniform01(rng);
      p.lambda = std::max(lambda_def,
                          static_cast<int>(std::floor(lambda_def * std::pow(ratio, u * u))));
      p.sigma0 = cfg.cma.sigma0 * std::pow(10.0, -2.0 * uniform01(rng));
    } else {
      ++n_large;
      p.lambda = lambda_def << std::min(n_large, 20);
    }
    std::vector<double> start(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = uniform01(rng);
      start[i] = space.integer_mask[i] ? -0.5 + u * space.catalog_size
                                       : space.box.lower[i] + u * space.box.width(i);
    }
    CmaEs es(space, p, start, derive_seed(cfg.seed, 0xc3a, static_cast<std::uint64_t>(run)));
    ConvergedPoint best;
    best.run = run;
    best.lambda = p.lambda;
    std::vector<double> values(es.lambda());
    while (true) {
      if (stopped()) {
        out.interrupted = true;
        best.reason = Termination::kExternalStop;
        break;
      }
      const auto& pts = es.ask();
      const long room = cfg.budget - out.evaluations;
      const long take = std::min<long>(es.lambda(), room);
      std::fill(values.begin(), values.end(), INFINITY);
      for (long k = 0; k < take; ++k) {
        auto x = space.evaluation_point(pts[k]);
        values[k] = f(x);
        ++out.evaluations;
        ++best.evaluations;
        if (values[k] < best.value || best.x.empty()) {
          best.value = values[k];
          best.x = std::move(x);
        }
      }
      if (take < es.lambda()) {
        best.reason = Termination::kBudget;
        break;
      }
      es.tell(values);
      if (auto why = es.stop_reason()) {
        best.reason = *why;
        break;
      }
      if (out.evaluations >= cfg.budget) {
        best.reason = Termination::kBudget;
        break;
      }
    }
    (large ? used_large : used_small) += best.evaluations;
    if (!best.x.empty()) {
      if (cfg.on_converged) cfg.on_converged(best);
      out.archive.push_back(std::move(best));
    }
    out.restarts = run;
    if (out.interrupted) break;
  }
  return out;
}

}  // namespace ldgea
