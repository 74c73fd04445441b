#pragma once

// Textbook LARS written directly from the textbook recursion, used only as
// a test oracle. Recomputes every quantity from scratch at each step (explicit
// Gram inverse, normalized equiangular vector, residual correlations) and
// shares no code with the library solver.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

struct RefPath {
  std::vector<std::size_t> order;
  Eigen::VectorXd beta;
  std::size_t dummies = 0;
  bool quota = false;
};

inline RefPath reference_lars(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              std::size_t t_stop, std::size_t dummy_start) {
  const auto m = static_cast<std::size_t>(x.cols());
  const std::size_t cap = std::min<std::size_t>(static_cast<std::size_t>(x.rows()) - 1, m);
  RefPath out;
  out.beta = Eigen::VectorXd::Zero(x.cols());
  std::vector<bool> in(m, false);

  auto add = [&](std::size_t j) {
    out.order.push_back(j);
    in[j] = true;
    if (j >= dummy_start) ++out.dummies;
  };

  Eigen::VectorXd c = x.transpose() * y;
  {
    std::size_t j0 = 0;
    for (std::size_t j = 1; j < m; ++j)
      if (std::abs(c(j)) > std::abs(c(j0))) j0 = j;
    if (std::abs(c(j0)) == 0.0) return out;
    add(j0);
  }
  bool last = out.dummies == t_stop;

  for (;;) {
    c = x.transpose() * (y - x * out.beta);
    const std::size_t na = out.order.size();
    double big_c = 0.0;
    for (std::size_t j : out.order) big_c = std::max(big_c, std::abs(c(j)));

    Eigen::MatrixXd xa(x.rows(), na);
    for (std::size_t k = 0; k < na; ++k) {
      const double s = c(out.order[k]) >= 0 ? 1.0 : -1.0;
      xa.col(k) = s * x.col(out.order[k]);
    }
    const Eigen::MatrixXd ginv = (xa.transpose() * xa).fullPivLu().inverse();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(na);
    const double norm_a = 1.0 / std::sqrt(ones.dot(ginv * ones));
    const Eigen::VectorXd w = norm_a * ginv * ones;
    const Eigen::VectorXd u = xa * w;
    const Eigen::VectorXd a = x.transpose() * u;

    double gamma = big_c / norm_a;
    std::size_t next = m;
    if (na < cap) {
      for (std::size_t j = 0; j < m; ++j) {
        if (in[j]) continue;
        for (double g : {(big_c - c(j)) / (norm_a - a(j)), (big_c + c(j)) / (norm_a + a(j))}) {
          if (g > 1e-14 && g < gamma) {
            gamma = g;
            next = j;
          }
        }
      }
    }
    for (std::size_t k = 0; k < na; ++k) {
      const double s = c(out.order[k]) >= 0 ? 1.0 : -1.0;
      out.beta(out.order[k]) += gamma * s * w(k);
    }
    if (next == m || last) {
      out.quota = out.dummies >= t_stop;
      return out;
    }
    add(next);
    last = out.dummies == t_stop;
  }
}

}  // namespace oracle
