#include "vibronic/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace vibronic {

namespace {

struct Simplex {
  std::vector<Eigen::VectorXd> x;
  std::vector<double> f;
};

void sort_simplex(Simplex& s) {
  std::vector<std::size_t> order(s.x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
  Simplex sorted;
  for (std::size_t i : order) {
    sorted.x.push_back(s.x[i]);
    sorted.f.push_back(s.f[i]);
  }
  s = std::move(sorted);
}

double diameter(const Simplex& s) {
  double d = 0.0;
  for (std::size_t i = 1; i < s.x.size(); ++i) d = std::max(d, (s.x[i] - s.x[0]).lpNorm<Eigen::Infinity>());
  return d;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& start,
                             const NelderMeadOptions& options) {
  const auto n = start.size();
  NelderMeadResult result;
  result.x = start;
  result.f = f(start);
  result.evals = 1;
  if (n == 0) {
    result.converged = true;
    return result;
  }

  const double dn = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / dn;
  const double contract = 0.75 - 1.0 / (2.0 * dn);
  const double shrink = 1.0 - 1.0 / dn;

  double step = options.initial_step;
  for (int round = 0; round <= options.restarts; ++round) {
    Simplex s;
    s.x.push_back(result.x);
    s.f.push_back(result.f);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd v = result.x;
      v(i) += step;
      s.x.push_back(v);
      s.f.push_back(f(v));
      ++result.evals;
    }
    sort_simplex(s);

    bool converged = false;
    while (result.evals < options.max_evals) {
      if (s.f.back() - s.f.front() <= options.f_tol && diameter(s) <= options.x_tol) {
        converged = true;
        break;
      }
      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i) centroid += s.x[i];
      centroid /= dn;

      const Eigen::VectorXd xr = centroid + reflect * (centroid - s.x.back());
      const double fr = f(xr);
      ++result.evals;
      if (fr < s.f.front()) {
        const Eigen::VectorXd xe = centroid + expand * (xr - centroid);
        const double fe = f(xe);
        ++result.evals;
        if (fe < fr) {
          s.x.back() = xe;
          s.f.back() = fe;
        } else {
          s.x.back() = xr;
          s.f.back() = fr;
        }
      } else if (fr < s.f[n - 1]) {
        s.x.back() = xr;
        s.f.back() = fr;
      } else {
        const bool outside = fr < s.f.back();
        const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + contract * (xr - centroid))
                                           : Eigen::VectorXd(centroid - contract * (centroid - s.x.back()));
        const double fc = f(xc);
        ++result.evals;
        if (fc < (outside ? fr : s.f.back())) {
          s.x.back() = xc;
          s.f.back() = fc;
        } else {
          for (std::size_t i = 1; i < s.x.size(); ++i) {
            s.x[i] = s.x[0] + shrink * (s.x[i] - s.x[0]);
            s.f[i] = f(s.x[i]);
            ++result.evals;
          }
        }
      }
      sort_simplex(s);
    }

    const bool improved = s.f.front() < result.f;
    if (s.f.front() <= result.f) {
      result.x = s.x.front();
      result.f = s.f.front();
    }
    result.converged = converged;
    if (!converged) break;
    if (round > 0 && !improved) break;
    step = std::max(10.0 * options.x_tol, 1e-3 * options.initial_step);
  }
  return result;
}

}  // namespace vibronic
