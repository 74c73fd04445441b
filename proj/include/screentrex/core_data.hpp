#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace strex {

/// Predictor matrix (n observations x p predictors), response and column labels.
/// Validated on construction and immutable afterwards.
class Dataset {
 public:
  // Throws Error if n < 3, p < 1, entries are non-finite, y has the wrong
  // length, or labels are missing/duplicated. Empty labels become V1..Vp.
  Dataset(Eigen::MatrixXd x, Eigen::VectorXd y, std::vector<std::string> labels = {});

  const Eigen::MatrixXd& x() const noexcept { return x_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t n() const noexcept { return static_cast<std::size_t>(x_.rows()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(x_.cols()); }

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  std::vector<std::string> labels_;
};

/// Columns centered to mean zero and scaled to unit Euclidean norm; response
/// centered only.
struct StandardizedDataset {
  Eigen::MatrixXd x_std;
  Eigen::VectorXd y_c;
  Eigen::VectorXd scale;  // original column norms after centering
  Eigen::VectorXd mean;   // original column means
  double y_mean = 0.0;
  std::vector<std::string> labels;

  std::size_t n() const noexcept { return static_cast<std::size_t>(x_std.rows()); }
  std::size_t p() const noexcept { return static_cast<std::size_t>(x_std.cols()); }

  Dataset as_dataset() const;
  // Maps standardized columns back to the original scale.
  Eigen::MatrixXd restore_x() const;
};

StandardizedDataset standardize(const Dataset& d);

// Centers each column and scales it to unit norm in place. Throws
// Error(ZeroVariance) naming the first constant column.
void standardize_columns(Eigen::Ref<Eigen::MatrixXd> m, Eigen::VectorXd* mean = nullptr,
                         Eigen::VectorXd* scale = nullptr,
                         const std::vector<std::string>* labels = nullptr);

Dataset load_csv(const std::filesystem::path& x_path, const std::filesystem::path& y_path,
                 bool header);

// Writes with shortest round-trip formatting so that load_csv reproduces the
// values bit for bit.
void write_csv(const Dataset& d, const std::filesystem::path& x_path,
               const std::filesystem::path& y_path, bool header);

}  // namespace strex
