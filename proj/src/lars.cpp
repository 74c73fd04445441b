#include "screentrex/lars.hpp"

#include "screentrex/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace strex {

namespace {

constexpr double kTieTol = 1e-12;
constexpr double kLockstepTol = 1e-10;
constexpr double kInputTol = 1e-8;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

void check_standardized(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (y.size() != x.rows())
    throw Error(ErrorCode::Dimension, "response length does not match design rows");
  if (x.rows() < 2 || x.cols() < 1) throw Error(ErrorCode::Dimension, "design is empty");
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).sum() / n;
    const double norm = x.col(j).norm();
    if (std::abs(mean) > kInputTol || std::abs(norm - 1.0) > kInputTol)
      throw Error(ErrorCode::NotStandardized,
                  "design column " + std::to_string(j) + " is not zero-mean unit-norm");
  }
  if (std::abs(y.mean()) > kInputTol * (1.0 + y.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::NotStandardized, "response is not centered");
}

}  // namespace

LarsPath::LarsPath(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, PathConfig cfg)
    : x_(x), y_(y), cfg_(cfg) {
  if (cfg_.t_stop < 1) throw Error(ErrorCode::InvalidArgument, "t_stop must be at least 1");
  if (cfg_.dummy_start > static_cast<std::size_t>(x.cols()))
    throw Error(ErrorCode::InvalidArgument, "dummy_start exceeds column count");
  check_standardized(x_, y_);

  const auto m = x_.cols();
  beta_ = Eigen::VectorXd::Zero(m);
  corr_ = x_.transpose() * y_;
  is_active_.assign(static_cast<std::size_t>(m), 0);

  const double cmax = corr_.cwiseAbs().maxCoeff();
  if (!(cmax > kTieTol * y_.norm()) || max_active() == 0) {
    done_ = true;
    return;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    if (std::abs(corr_(j)) >= cmax * (1.0 - kTieTol)) {
      enter(static_cast<std::size_t>(j));
      break;
    }
  }
}

std::size_t LarsPath::max_active() const noexcept {
  // Centered columns span at most n - 1 dimensions.
  return std::min(static_cast<std::size_t>(x_.rows()) - 1, static_cast<std::size_t>(x_.cols()));
}

void LarsPath::enter(std::size_t j) {
  active_.push_back(j);
  is_active_[j] = 1;
  if (j >= cfg_.dummy_start) {
    ++dummies_;
    if (dummies_ == cfg_.t_stop) final_step_ = true;
  }
}

bool LarsPath::step() {
  if (done_) return false;
  const auto n = x_.rows();
  const auto na = static_cast<Eigen::Index>(active_.size());

  Eigen::MatrixXd xa(n, na);
  Eigen::VectorXd sign(na);
  double c_max = 0.0;
  for (Eigen::Index k = 0; k < na; ++k) {
    const auto j = static_cast<Eigen::Index>(active_[static_cast<std::size_t>(k)]);
    xa.col(k) = x_.col(j);
    sign(k) = corr_(j) >= 0.0 ? 1.0 : -1.0;
    c_max = std::max(c_max, std::abs(corr_(j)));
  }

  const Eigen::MatrixXd gram = xa.transpose() * xa;
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  const bool singular = llt.info() != Eigen::Success ||
                        llt.matrixLLT().diagonal().cwiseAbs2().minCoeff() <= 1e-10;
  if (singular) {
    std::ostringstream msg;
    msg << "equiangular system is singular for active set {";
    for (std::size_t k = 0; k < active_.size(); ++k) msg << (k ? "," : "") << active_[k];
    msg << "}";
    throw Error(ErrorCode::Singular, msg.str());
  }

  // Coefficient direction; every active correlation then drops at unit rate.
  const Eigen::VectorXd dir = llt.solve(sign);
  const Eigen::VectorXd u = xa * dir;
  const Eigen::VectorXd a = x_.transpose() * u;

  double best = std::numeric_limits<double>::infinity();
  std::size_t next = kNone;
  if (active_.size() < max_active()) {
    const auto m = x_.cols();
    std::vector<double> reach(static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());
    auto candidate = [&](double num, double den) {
      // den ~ 0: the column moves in lockstep with the active set (a copy or
      // a combination of active columns) and can never join it.
      if (!(den > kLockstepTol)) return std::numeric_limits<double>::infinity();
      if (num < 0.0) {
        if (num < -kTieTol * c_max) return std::numeric_limits<double>::infinity();
        num = 0.0;
      }
      return num / den;
    };
    for (Eigen::Index j = 0; j < m; ++j) {
      if (is_active_[static_cast<std::size_t>(j)]) continue;
      const double g = std::min(candidate(c_max - corr_(j), 1.0 - a(j)),
                                candidate(c_max + corr_(j), 1.0 + a(j)));
      reach[static_cast<std::size_t>(j)] = g;
      best = std::min(best, g);
    }
    if (std::isfinite(best)) {
      const double cutoff = best * (1.0 + kTieTol);
      for (std::size_t j = 0; j < reach.size(); ++j) {
        if (reach[j] <= cutoff) {
          next = j;
          break;
        }
      }
    }
  }

  bool exhausted = false;
  double gamma = best;
  if (next == kNone || best >= c_max * (1.0 - kTieTol)) {
    gamma = c_max;
    exhausted = true;
  }

  for (Eigen::Index k = 0; k < na; ++k)
    beta_(static_cast<Eigen::Index>(active_[static_cast<std::size_t>(k)])) += gamma * dir(k);
  corr_.noalias() -= gamma * a;
  ++steps_;

  if (exhausted || final_step_) {
    done_ = true;
    quota_reached_ = dummies_ >= cfg_.t_stop;
    return true;
  }
  enter(next);
  if (cfg_.max_steps != 0 && steps_ >= cfg_.max_steps) {
    done_ = true;
    quota_reached_ = dummies_ >= cfg_.t_stop;
  }
  return true;
}

PathResult LarsPath::result() const {
  PathResult r;
  r.entry_order = active_;
  r.coefficients = beta_;
  r.dummies_included = dummies_;
  r.terminated_early = quota_reached_;
  r.steps = steps_;
  return r;
}

Eigen::VectorXd knot_correlations(const LarsPath& state) {
  const auto& x = state.design();
  Eigen::VectorXd resid = state.response();
  for (std::size_t j : state.active())
    resid.noalias() -= state.coefficients()(static_cast<Eigen::Index>(j)) *
                       x.col(static_cast<Eigen::Index>(j));
  return x.transpose() * resid;
}

PathResult lars_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const PathConfig& cfg) {
  LarsPath path(x, y, cfg);
  while (!path.finished()) path.step();
  return path.result();
}

}  // namespace strex
