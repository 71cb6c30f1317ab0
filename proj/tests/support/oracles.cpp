#include "support/oracles.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace fitsink::test::oracle {
namespace {

using Real = boost::multiprecision::cpp_bin_float_50;
using Vec = std::vector<Real>;

Vec normalized(Vec x) {
  Real mean = 0;
  for (const auto& v : x) mean += v;
  mean /= static_cast<int>(x.size());
  for (auto& v : x) v /= mean;
  return x;
}

Eigen::VectorXd to_double(const Vec& x) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(x.size()));
  for (std::size_t k = 0; k < x.size(); ++k) out[static_cast<Eigen::Index>(k)] = x[k].convert_to<double>();
  return out;
}

}  // namespace

FitnessComplexity fc_fixed_point(const Eigen::MatrixXd& pattern, int iterations) {
  const auto n = static_cast<std::size_t>(pattern.rows());
  const auto m = static_cast<std::size_t>(pattern.cols());
  Vec f(n, Real(1));
  Vec q(m, Real(1));
  for (int it = 0; it < iterations; ++it) {
    Vec nf(n, Real(0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (pattern(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0) nf[i] += q[j];
      }
    }
    f = normalized(nf);
    Vec nq(m, Real(0));
    for (std::size_t j = 0; j < m; ++j) {
      Real s = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (pattern(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0) s += 1 / f[i];
      }
      nq[j] = 1 / s;
    }
    q = normalized(nq);
  }
  return {to_double(f), to_double(q)};
}

Scaling sk_fixed_point(const Eigen::MatrixXd& a, const Eigen::VectorXd& r, const Eigen::VectorXd& c,
                       int iterations) {
  const auto n = static_cast<std::size_t>(a.rows());
  const auto m = static_cast<std::size_t>(a.cols());
  auto at = [&](std::size_t i, std::size_t j) {
    return Real(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  };
  Vec u(n, Real(1));
  Vec v(m, Real(1));
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      Real s = 0;
      for (std::size_t j = 0; j < m; ++j) s += at(i, j) * v[j];
      u[i] = Real(r[static_cast<Eigen::Index>(i)]) / s;
    }
    for (std::size_t j = 0; j < m; ++j) {
      Real s = 0;
      for (std::size_t i = 0; i < n; ++i) s += at(i, j) * u[i];
      v[j] = Real(c[static_cast<Eigen::Index>(j)]) / s;
    }
  }
  Scaling out{to_double(u), to_double(v), Eigen::MatrixXd(a.rows(), a.cols())};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out.scaled(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (u[i] * at(i, j) * v[j]).convert_to<double>();
    }
  }
  return out;
}

std::optional<Scaling> newton_scaling(const Eigen::MatrixXd& a, const Eigen::VectorXd& r,
                                      const Eigen::VectorXd& c) {
  const Eigen::Index n = a.rows();
  const Eigen::Index m = a.cols();
  const Eigen::Index k = n + m - 1;
  auto residual = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd alpha = z.head(n);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
    beta.head(m - 1) = z.tail(m - 1);
    Eigen::MatrixXd b = (alpha.array().exp().matrix().asDiagonal() * a) *
                        beta.array().exp().matrix().asDiagonal();
    Eigen::VectorXd res(k);
    res.head(n) = b.rowwise().sum() - r;
    res.tail(m - 1) = (b.colwise().sum().transpose() - c).head(m - 1);
    return std::pair{res, b};
  };
  Eigen::VectorXd z = Eigen::VectorXd::Zero(k);
  for (int it = 0; it < 200; ++it) {
    auto [res, b] = residual(z);
    if (res.lpNorm<Eigen::Infinity>() < 1e-15 * r.sum()) {
      Scaling out{z.head(n).array().exp(), Eigen::VectorXd::Ones(m), b};
      out.v.head(m - 1) = z.tail(m - 1).array().exp();
      return out;
    }
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      jac(i, i) = b.row(i).sum();
      for (Eigen::Index j = 0; j + 1 < m; ++j) {
        jac(i, n + j) = b(i, j);
        jac(n + j, i) = b(i, j);
      }
    }
    for (Eigen::Index j = 0; j + 1 < m; ++j) jac(n + j, n + j) = b.col(j).sum();
    const Eigen::VectorXd step = jac.fullPivLu().solve(-res);
    double t = 1.0;
    const double base = res.norm();
    while (t > 1e-12 && residual(z + t * step).first.norm() >= base) t /= 2;
    if (t <= 1e-12) return std::nullopt;
    z += t * step;
  }
  return std::nullopt;
}

namespace {

// For each cell, whether some positive permutation diagonal passes through it.
std::vector<bool> covered_cells(const Eigen::MatrixXd& pattern) {
  const auto n = static_cast<std::size_t>(pattern.rows());
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<bool> covered(n * n, false);
  do {
    bool positive = true;
    for (std::size_t i = 0; i < n && positive; ++i) {
      positive = pattern(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i])) != 0;
    }
    if (positive) {
      for (std::size_t i = 0; i < n; ++i) covered[i * n + perm[i]] = true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return covered;
}

}  // namespace

bool total_support_by_permutations(const Eigen::MatrixXd& pattern) {
  const auto covered = covered_cells(pattern);
  const auto n = static_cast<std::size_t>(pattern.rows());
  if (pattern.isZero()) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (pattern(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0 &&
          !covered[i * n + j]) {
        return false;
      }
    }
  }
  return true;
}

bool support_by_permutations(const Eigen::MatrixXd& pattern) {
  const auto covered = covered_cells(pattern);
  return std::any_of(covered.begin(), covered.end(), [](bool b) { return b; });
}

Eigen::VectorXd central_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& at, double h) {
  Eigen::VectorXd g(at.size());
  for (Eigen::Index k = 0; k < at.size(); ++k) {
    Eigen::VectorXd plus = at;
    Eigen::VectorXd minus = at;
    plus[k] += h;
    minus[k] -= h;
    g[k] = (f(plus) - f(minus)) / (2 * h);
  }
  return g;
}

Eigen::MatrixXd central_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& at,
    double h) {
  Eigen::MatrixXd jac(f(at).size(), at.size());
  for (Eigen::Index k = 0; k < at.size(); ++k) {
    Eigen::VectorXd plus = at;
    Eigen::VectorXd minus = at;
    plus[k] += h;
    minus[k] -= h;
    jac.col(k) = (f(plus) - f(minus)) / (2 * h);
  }
  return jac;
}

}  // namespace fitsink::test::oracle
