#include "screentrex/core_data.hpp"

#include "screentrex/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_set>

namespace strex {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_cell(std::string_view cell, const std::filesystem::path& file, std::size_t row,
                  std::size_t col) {
  double v = 0.0;
  // from_chars rejects a leading '+'.
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << file.string() << ": non-numeric cell at row " << row << ", column " << col << " ('"
        << cell << "')";
    throw Error(ErrorCode::Parse, msg.str());
  }
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(const std::filesystem::path& path, bool header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  Table t;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (header_pending) {
      for (auto f : fields) t.header.emplace_back(f);
      header_pending = false;
      continue;
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      row.push_back(parse_cell(fields[c], path, line_no, c + 1));
    if (!t.rows.empty() && row.size() != t.rows.front().size()) {
      std::ostringstream msg;
      msg << path.string() << ": row " << line_no << " has " << row.size() << " columns, expected "
          << t.rows.front().size();
      throw Error(ErrorCode::Dimension, msg.str());
    }
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw Error(ErrorCode::Parse, path.string() + ": empty file");
  return t;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd x, Eigen::VectorXd y, std::vector<std::string> labels)
    : x_(std::move(x)), y_(std::move(y)), labels_(std::move(labels)) {
  if (x_.rows() < 3)
    throw Error(ErrorCode::Dimension, "dataset needs at least 3 observations, got " +
                                          std::to_string(x_.rows()));
  if (x_.cols() < 1) throw Error(ErrorCode::Dimension, "dataset needs at least one predictor");
  if (y_.size() != x_.rows())
    throw Error(ErrorCode::Dimension, "response has " + std::to_string(y_.size()) +
                                          " values but predictor matrix has " +
                                          std::to_string(x_.rows()) + " rows");
  if (!x_.allFinite()) throw Error(ErrorCode::InvalidArgument, "predictor matrix has non-finite entries");
  if (!y_.allFinite()) throw Error(ErrorCode::InvalidArgument, "response has non-finite entries");
  if (labels_.empty()) {
    labels_.reserve(p());
    for (std::size_t j = 0; j < p(); ++j) labels_.push_back("V" + std::to_string(j + 1));
  }
  if (labels_.size() != p())
    throw Error(ErrorCode::Dimension, "expected " + std::to_string(p()) + " labels, got " +
                                          std::to_string(labels_.size()));
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second) throw Error(ErrorCode::InvalidArgument, "duplicate label '" + l + "'");
}

void standardize_columns(Eigen::Ref<Eigen::MatrixXd> m, Eigen::VectorXd* mean,
                         Eigen::VectorXd* scale, const std::vector<std::string>* labels) {
  if (mean) mean->resize(m.cols());
  if (scale) scale->resize(m.cols());
  const double rows = static_cast<double>(m.rows());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    auto col = m.col(j);
    const double mu = col.sum() / rows;
    col.array() -= mu;
    const double norm = col.norm();
    // Relative to the column magnitude so that large constant columns still trip.
    if (!(norm > 1e-12 * (1.0 + std::abs(mu)) * std::sqrt(rows))) {
      const std::string name = labels ? (*labels)[static_cast<std::size_t>(j)]
                                      : "column " + std::to_string(j + 1);
      throw Error(ErrorCode::ZeroVariance, "zero variance in " + name);
    }
    col /= norm;
    if (mean) (*mean)(j) = mu;
    if (scale) (*scale)(j) = norm;
  }
}

StandardizedDataset standardize(const Dataset& d) {
  StandardizedDataset s;
  s.x_std = d.x();
  s.labels = d.labels();
  standardize_columns(s.x_std, &s.mean, &s.scale, &s.labels);
  s.y_mean = d.y().mean();
  s.y_c = d.y().array() - s.y_mean;
  return s;
}

Dataset StandardizedDataset::as_dataset() const { return Dataset(x_std, y_c, labels); }

Eigen::MatrixXd StandardizedDataset::restore_x() const {
  Eigen::MatrixXd x = x_std * scale.asDiagonal();
  x.rowwise() += mean.transpose();
  return x;
}

Dataset load_csv(const std::filesystem::path& x_path, const std::filesystem::path& y_path,
                 bool header) {
  Table xt = read_table(x_path, header);
  Table yt = read_table(y_path, header);
  const std::size_t n = xt.rows.size();
  const std::size_t p = xt.rows.front().size();
  if (yt.rows.front().size() != 1)
    throw Error(ErrorCode::Dimension, y_path.string() + ": response file must have one column");
  if (yt.rows.size() != n)
    throw Error(ErrorCode::Dimension, "dimension mismatch: " + x_path.string() + " has " +
                                          std::to_string(n) + " rows but " + y_path.string() +
                                          " has " + std::to_string(yt.rows.size()) + " values");
  if (header && xt.header.size() != p)
    throw Error(ErrorCode::Dimension, x_path.string() + ": header has " +
                                          std::to_string(xt.header.size()) + " names for " +
                                          std::to_string(p) + " columns");
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) x(i, j) = xt.rows[i][j];
    y(i) = yt.rows[i][0];
  }
  return Dataset(std::move(x), std::move(y), std::move(xt.header));
}

void write_csv(const Dataset& d, const std::filesystem::path& x_path,
               const std::filesystem::path& y_path, bool header) {
  std::ofstream xo(x_path);
  std::ofstream yo(y_path);
  if (!xo) throw Error(ErrorCode::Io, "cannot write " + x_path.string());
  if (!yo) throw Error(ErrorCode::Io, "cannot write " + y_path.string());
  if (header) {
    for (std::size_t j = 0; j < d.p(); ++j) xo << (j ? "," : "") << d.labels()[j];
    xo << '\n';
    yo << "y\n";
  }
  for (std::size_t i = 0; i < d.n(); ++i) {
    for (std::size_t j = 0; j < d.p(); ++j)
      xo << (j ? "," : "") << shortest(d.x()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    xo << '\n';
    yo << shortest(d.y()(static_cast<Eigen::Index>(i))) << '\n';
  }
  if (!xo || !yo) throw Error(ErrorCode::Io, "write failed for " + x_path.string());
}

}  // namespace strex
