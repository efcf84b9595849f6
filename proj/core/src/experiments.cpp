#include "plhom/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace plhom {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Symmetric tridiagonal (d, e); counts eigenvalues below x via the Sturm
// sequence of the shifted LDL^T factorization.
struct Tridiag {
  std::vector<double> d, e;

  // zero pivots are replaced by -pivmin before the sign is counted, so exact
  // submatrix eigenvalues hit by the bisection cannot corrupt the count
  double pivmin() const {
    double e2max = 0.0;
    for (double v : e) e2max = std::max(e2max, v * v);
    return std::max(std::numeric_limits<double>::min() * e2max,
                    std::numeric_limits<double>::min());
  }

  int count_below(double x) const {
    const double pm = pivmin();
    int count = 0;
    double q = d[0] - x;
    if (std::abs(q) <= pm) q = -pm;
    if (q < 0.0) ++count;
    for (size_t i = 1; i < d.size(); ++i) {
      q = d[i] - x - e[i - 1] * e[i - 1] / q;
      if (std::abs(q) <= pm) q = -pm;
      if (q < 0.0) ++count;
    }
    return count;
  }

  double kth_eigenvalue(int k) const {
    double hi = 0.0;
    for (size_t i = 0; i < d.size(); ++i) {
      const double off = (i > 0 ? std::abs(e[i - 1]) : 0.0) +
                         (i + 1 < d.size() ? std::abs(e[i]) : 0.0);
      hi = std::max(hi, d[i] + off);
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(mid) >= k)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  }
};

Tridiag assemble_fd(const ProblemSpec& spec, int n, std::vector<double>* rho_diag) {
  const double h = spec.length / n;
  Tridiag T;
  T.d.resize(n - 1);
  T.e.resize(n - 2);
  std::vector<double> rho(n - 1), am(n);  // am[i] = a at (i+1/2)h
  for (int i = 0; i < n; ++i)
    am[i] = spec.coefficient.eval_scaled(spec.eps, (i + 0.5) * h / 1.0);
  for (int i = 1; i < n; ++i)
    rho[i - 1] = spec.weight.eval_avg(i * h / spec.eps);
  for (int i = 1; i < n; ++i) {
    const double diag = (am[i - 1] + am[i]) / (h * h);
    T.d[i - 1] = diag / rho[i - 1];
    if (i < n - 1) T.e[i - 1] = -am[i] / (h * h) / std::sqrt(rho[i - 1] * rho[i]);
  }
  if (rho_diag) *rho_diag = rho;
  return T;
}

// Inverse iteration for the eigenvector of T at (approximately) lambda.
std::vector<double> inverse_iteration(const Tridiag& T, double lambda) {
  const size_t n = T.d.size();
  std::vector<double> v(n, 1.0);
  for (size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.3 * std::sin(7.9 * (i + 1));
  const double shift = lambda * (1.0 + 1e-11) + 1e-300;
  for (int iter = 0; iter < 4; ++iter) {
    // Thomas solve with diagonal regularization
    std::vector<double> diag(n), rhs = v;
    for (size_t i = 0; i < n; ++i) diag[i] = T.d[i] - shift;
    for (size_t i = 1; i < n; ++i) {
      if (std::abs(diag[i - 1]) < 1e-280) diag[i - 1] = 1e-280;
      const double m = T.e[i - 1] / diag[i - 1];
      diag[i] -= m * T.e[i - 1];
      rhs[i] -= m * rhs[i - 1];
    }
    if (std::abs(diag[n - 1]) < 1e-280) diag[n - 1] = 1e-280;
    v[n - 1] = rhs[n - 1] / diag[n - 1];
    for (size_t i = n - 1; i-- > 0;) v[i] = (rhs[i] - T.e[i] * v[i + 1]) / diag[i];
    double norm = 0.0;
    for (double x : v) norm = std::max(norm, std::abs(x));
    for (double& x : v) x /= norm;
  }
  return v;
}

template <class F>
void parallel_for(int n, F&& body) {
  const int workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16));
  if (n <= 1 || workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& t : pool) t.join();
}

ConvergenceRecord run_cell(const ProblemSpec& base, double eps, int k, double tol,
                           std::string* failure) {
  ConvergenceRecord rec;
  rec.eps = eps;
  rec.k = k;
  rec.p = base.p();
  const auto t0 = Clock::now();
  try {
    const ProblemSpec spec = base.with_eps(eps);
    rec.lambda_eps = solve_eigen(spec, k, tol).lambda;
    const auto [L, a_star] = homogenize_coefficient(spec.coefficient, spec.trig->exponent());
    (void)L;
    rec.lambda_limit = limit_eigenvalue(
        {spec.trig->exponent(), spec.length, spec.weight.mean(), a_star}, k);
    rec.abs_err = std::abs(rec.lambda_eps - rec.lambda_limit);
    const BoundReport b = applicable_bound(spec, k);
    rec.bound = b.bound_value;
    rec.ratio = rec.bound > 0.0 ? rec.abs_err / rec.bound
                                : std::numeric_limits<double>::quiet_NaN();
  } catch (const std::exception& ex) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.lambda_eps = rec.lambda_limit = rec.abs_err = rec.bound = rec.ratio = nan;
    if (failure) *failure = ex.what();
  }
  rec.runtime_ms = elapsed_ms(t0);
  return rec;
}

}  // namespace

BoundReport applicable_bound(const ProblemSpec& spec, int k) {
  if (spec.constant_coefficient()) {
    const double c = spec.coefficient.mean();
    BoundReport b = bound_teo1d(spec.weight, spec.trig->exponent(), spec.eps, k,
                                spec.length);
    b.constant *= c;
    b.bound_value *= c;
    return b;
  }
  if (spec.length != 1.0)
    throw std::invalid_argument("applicable_bound: coefficient problems need length 1");
  const TransformedProblem t = transform_general(spec);
  return bound_general_eq(t, spec.coefficient.upper(), spec.weight.lower(),
                          spec.trig->exponent(), spec.eps, k);
}

FdResult fd_oracle_p2(const ProblemSpec& spec, int k, int grid_points) {
  if (std::abs(spec.p() - 2.0) > 1e-12)
    throw std::invalid_argument("fd_oracle_p2: only valid for p = 2");
  if (grid_points < 1000)
    throw std::invalid_argument("fd_oracle_p2: grid_points must be >= 1000");
  if (k < 1 || k >= grid_points - 1)
    throw std::invalid_argument("fd_oracle_p2: k out of range");

  const Tridiag T = assemble_fd(spec, grid_points, nullptr);
  const double lam = T.kth_eigenvalue(k);
  const Tridiag Th = assemble_fd(spec, grid_points / 2, nullptr);
  const double lam_h = Th.kth_eigenvalue(k);
  FdResult r;
  r.lambda = lam;
  r.error_estimate = std::abs(lam - lam_h) / 3.0;
  return r;
}

double fd_oracle_p2_richardson(const ProblemSpec& spec, int k, int n) {
  const double lam_n = fd_oracle_p2(spec, k, n).lambda;
  const double lam_2n = fd_oracle_p2(spec, k, 2 * n).lambda;
  return (4.0 * lam_2n - lam_n) / 3.0;
}

std::vector<std::pair<double, double>> fd_eigenvector_p2(const ProblemSpec& spec,
                                                         int k, int n) {
  if (std::abs(spec.p() - 2.0) > 1e-12)
    throw std::invalid_argument("fd_eigenvector_p2: only valid for p = 2");
  std::vector<double> rho;
  const Tridiag T = assemble_fd(spec, n, &rho);
  const double lam = T.kth_eigenvalue(k);
  std::vector<double> z = inverse_iteration(T, lam);
  // undo the symmetrizing scaling u_i = z_i / sqrt(rho_i)
  const double h = spec.length / n;
  std::vector<std::pair<double, double>> out(z.size());
  double peak = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    out[i] = {(i + 1) * h, z[i] / std::sqrt(rho[i])};
    peak = std::max(peak, std::abs(out[i].second));
  }
  const double sign = out.front().second >= 0.0 ? 1.0 : -1.0;
  for (auto& [x, u] : out) u *= sign / peak;
  return out;
}

std::vector<ConvergenceRecord> sweep_eps(const ProblemSpec& base,
                                         const std::vector<double>& eps_list,
                                         const std::vector<int>& k_list, double tol,
                                         std::vector<std::string>* failures) {
  if (eps_list.empty() || k_list.empty())
    throw std::invalid_argument("sweep_eps: empty sweep lists");
  struct Cell {
    double eps;
    int k;
  };
  std::vector<Cell> cells;
  for (double e : eps_list)
    for (int k : k_list) cells.push_back({e, k});
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return a.eps != b.eps ? a.eps < b.eps : a.k < b.k;
  });

  std::vector<ConvergenceRecord> records(cells.size());
  std::vector<std::string> errs(cells.size());
  parallel_for(static_cast<int>(cells.size()), [&](int i) {
    records[i] = run_cell(base, cells[i].eps, cells[i].k, tol, &errs[i]);
  });
  if (failures)
    for (auto& e : errs)
      if (!e.empty()) failures->push_back(e);
  return records;
}

std::vector<ConvergenceRecord> sweep_k(const ProblemSpec& base, double eps, int k_max,
                                       double tol, std::vector<std::string>* warnings) {
  if (k_max < 1) throw std::invalid_argument("sweep_k: k_max must be >= 1");
  std::vector<ConvergenceRecord> records(k_max);
  std::vector<std::string> errs(k_max);
  parallel_for(k_max, [&](int i) {
    records[i] = run_cell(base, eps, i + 1, tol, &errs[i]);
  });
  if (warnings) {
    for (auto& e : errs)
      if (!e.empty()) warnings->push_back(e);
    for (const auto& r : records)
      if (std::isfinite(r.bound) && r.bound > r.lambda_limit)
        warnings->push_back("bound exceeds the eigenvalue itself at k=" +
                            std::to_string(r.k) + " (vacuous regime)");
  }
  return records;
}

std::optional<RateFit> fit_rate(const std::vector<ConvergenceRecord>& records,
                                RateFit::Axis axis, double tol) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records) {
    if (!std::isfinite(r.abs_err) || r.abs_err <= 0.0) continue;
    if (r.abs_err < 10.0 * tol * std::abs(r.lambda_eps)) continue;  // noise floor
    const double ax = axis == RateFit::Axis::eps ? r.eps : static_cast<double>(r.k);
    pts.emplace_back(std::log(ax), std::log(r.abs_err));
  }
  if (pts.size() < 4) return std::nullopt;

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double n = static_cast<double>(pts.size());
  const double denom = n * sxx - sx * sx;
  RateFit fit;
  fit.axis = axis;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (auto [x, y] : pts) {
    const double e = y - (fit.slope * x + fit.intercept);
    ss_res += e * e;
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.points_used = static_cast<int>(pts.size());
  return fit;
}

std::vector<ZeroRecord> track_zeros(const ProblemSpec& base,
                                    const std::vector<double>& eps_list, int k,
                                    double tol) {
  if (k < 2) throw std::invalid_argument("track_zeros: k must be >= 2 for interior zeros");
  const PExponent& pe = base.trig->exponent();
  // generic constant of the rate estimate with the eps and k factors stripped,
  // so that c * eps * k^{p+1} reproduces the full bound
  const double c_generic = bound_teo1d(base.weight, pe, 1.0, 1, base.length).constant *
                           std::pow(pe.pi_p, pe.p + 1.0);

  std::vector<ZeroRecord> out;
  std::vector<std::vector<ZeroRecord>> per_eps(eps_list.size());
  parallel_for(static_cast<int>(eps_list.size()), [&](int i) {
    const double eps = eps_list[i];
    const EigenResult r = solve_eigen(base.with_eps(eps), k, tol);
    const auto [domain_bound, zero_bound] = bound_nodal(k, pe, eps, c_generic);
    (void)domain_bound;
    for (int j = 1; j < k; ++j) {
      ZeroRecord zr;
      zr.eps = eps;
      zr.j = j;
      zr.x_eps = r.zeros[j - 1];
      zr.x_limit = base.length * j / k;
      zr.abs_dev = std::abs(zr.x_eps - zr.x_limit);
      zr.bound = j * zero_bound;
      per_eps[i].push_back(zr);
    }
  });
  for (auto& v : per_eps) out.insert(out.end(), v.begin(), v.end());
  return out;
}

double fig_eps_min() { return 1.0 / 128.0; }

std::string figure_data(int figure_id, int resolution) {
  if (resolution < 2 || resolution > 2000)
    throw std::invalid_argument("figure_data: resolution out of range [2, 2000]");
  std::ostringstream os;
  const double tol = 1e-8;

  if (figure_id == 1 || figure_id == 2) {
    const char* preset = figure_id == 1 ? "two-plus-sin" : "inv-two-plus-sin";
    const ProblemSpec base = ProblemSpec::make(2.0, build_weight({preset, {}}), 1.0);
    std::vector<double> eps(resolution);
    for (int i = 0; i < resolution; ++i)
      eps[i] = fig_eps_min() +
               (1.0 - fig_eps_min()) * static_cast<double>(i) / (resolution - 1);
    std::vector<double> lams(resolution);
    parallel_for(resolution, [&](int i) {
      lams[i] = solve_eigen(base.with_eps(eps[i]), 1, tol).lambda;
    });
    os << (figure_id == 1 ? "eps,sqrt_lambda\n" : "eps,lambda,sqrt_lambda\n");
    for (int i = 0; i < resolution; ++i) {
      if (figure_id == 1)
        os << csv_number(eps[i]) << ',' << csv_number(std::sqrt(lams[i])) << '\n';
      else
        os << csv_number(eps[i]) << ',' << csv_number(lams[i]) << ','
           << csv_number(std::sqrt(lams[i])) << '\n';
    }
    return os.str();
  }

  if (figure_id == 3 || figure_id == 4) {
    const int k = figure_id == 3 ? 1 : 4;
    const ProblemSpec base = ProblemSpec::make(2.0, build_weight({"two-plus-sin", {}}), 1.0);
    const std::vector<double> eps_set{0.5, 1.0 / 16.0, 1.0 / 64.0};
    os << "x,u_eps,u_limit,diff,eps_tag\n";
    for (double eps : eps_set) {
      const EigenResult r = solve_eigen(base.with_eps(eps), k, tol);
      const auto samples = reconstruct_eigenfunction(base, r, resolution);
      for (const auto& [x, u] : samples) {
        const double ul = base.trig->core(base.pi_p() * k * x / base.length).s;
        os << csv_number(x) << ',' << csv_number(u) << ',' << csv_number(ul) << ','
           << csv_number(u - ul) << ',' << csv_number(eps) << '\n';
      }
    }
    return os.str();
  }
  throw std::invalid_argument("figure_data: unknown figure id " +
                              std::to_string(figure_id));
}

std::string csv_number(double v) {
  if (v == 0.0) return "0";  // normalize the sign of zero
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_records_csv(std::ostream& os, const std::vector<ConvergenceRecord>& records,
                       const std::vector<std::string>& provenance) {
  for (const auto& line : provenance) os << "# " << line << '\n';
  os << "eps,k,p,lambda_eps,lambda_limit,abs_err,bound,ratio,runtime_ms\n";
  for (const auto& r : records)
    os << csv_number(r.eps) << ',' << r.k << ',' << csv_number(r.p) << ','
       << csv_number(r.lambda_eps) << ',' << csv_number(r.lambda_limit) << ','
       << csv_number(r.abs_err) << ',' << csv_number(r.bound) << ','
       << csv_number(r.ratio) << ',' << csv_number(r.runtime_ms) << '\n';
}

void write_zero_records_csv(std::ostream& os, const std::vector<ZeroRecord>& records,
                            const std::vector<std::string>& provenance) {
  for (const auto& line : provenance) os << "# " << line << '\n';
  os << "eps,j,x_j_eps,x_j_limit,abs_dev,bound\n";
  for (const auto& r : records)
    os << csv_number(r.eps) << ',' << r.j << ',' << csv_number(r.x_eps) << ','
       << csv_number(r.x_limit) << ',' << csv_number(r.abs_dev) << ','
       << csv_number(r.bound) << '\n';
}

}  // namespace plhom
