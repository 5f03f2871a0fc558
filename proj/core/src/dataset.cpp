#include "warmgp/dataset.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "warmgp/rng.hpp"

namespace warmgp {

namespace {

bool parse_cell(std::string_view cell, double& out) {
  // Trim surrounding whitespace; std::from_chars is locale independent.
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
    cell.remove_suffix(1);
  if (cell.empty()) return false;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

}  // namespace

Dataset load_csv(const std::string& path, Index target_column, bool has_header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t arity = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && has_header) continue;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const auto cells = split_row(line);
    if (arity == 0) {
      arity = cells.size();
      if (arity < 2) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": need at least two columns");
      }
      if (target_column < 0 || static_cast<std::size_t>(target_column) >= arity) {
        throw ParseError(path + ": target column " + std::to_string(target_column) +
                         " out of range for " + std::to_string(arity) + " columns");
      }
    } else if (cells.size() != arity) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(arity) + " cells, got " + std::to_string(cells.size()));
    }
    std::vector<double> row(arity);
    for (std::size_t c = 0; c < arity; ++c) {
      if (!parse_cell(cells[c], row[c])) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                         std::string(cells[c]) + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");

  const Index n = static_cast<Index>(rows.size());
  const Index d = static_cast<Index>(arity) - 1;
  Dataset out;
  out.X.resize(n, d);
  out.y.resize(n);
  out.name = std::filesystem::path(path).stem().string();
  for (Index i = 0; i < n; ++i) {
    Index k = 0;
    for (Index c = 0; c < static_cast<Index>(arity); ++c) {
      if (c == target_column) {
        out.y(i) = rows[i][c];
      } else {
        out.X(i, k++) = rows[i][c];
      }
    }
  }
  return out;
}

namespace {

// Population standard deviation; returns 0 for (numerically) constant input.
std::pair<double, double> mean_std(const Vector& v) {
  const double mean = v.mean();
  const double var = (v.array() - mean).square().sum() / static_cast<double>(v.size());
  double sd = std::sqrt(var);
  if (sd <= 1e-12 * (1.0 + std::abs(mean))) sd = 0.0;
  return {mean, sd};
}

}  // namespace

std::pair<Dataset, StandardizationParams> standardize(const Dataset& d) {
  if (d.size() < 2) throw std::invalid_argument("standardize: need at least two rows");

  StandardizationParams p;
  p.feature_mean.resize(d.dim());
  p.feature_std.resize(d.dim());

  Dataset out = d;
  for (Index c = 0; c < d.dim(); ++c) {
    auto [mean, sd] = mean_std(d.X.col(c));
    p.feature_mean(c) = mean;
    p.feature_std(c) = sd;
    if (sd == 0.0) {
      out.X.col(c).setZero();
    } else {
      out.X.col(c) = (d.X.col(c).array() - mean) / sd;
    }
  }
  auto [ym, ys] = mean_std(d.y);
  p.target_mean = ym;
  p.target_std = ys;
  if (ys == 0.0) {
    out.y.setZero();
  } else {
    out.y = (d.y.array() - ym) / ys;
  }
  return {std::move(out), std::move(p)};
}

Dataset unstandardize(const Dataset& d, const StandardizationParams& params) {
  Dataset out = d;
  for (Index c = 0; c < d.dim(); ++c) {
    out.X.col(c) = d.X.col(c).array() * params.feature_std(c) + params.feature_mean(c);
  }
  out.y = d.y.array() * params.target_std + params.target_mean;
  return out;
}

SequentialSplit sample_split(const Dataset& d, Index n1, Index n2, std::uint64_t seed) {
  if (n1 <= 0 || n2 <= 0) throw std::invalid_argument("sample_split: n1 and n2 must be positive");
  if (n1 + n2 > d.size()) throw std::invalid_argument("sample_split: n1 + n2 exceeds dataset size");

  // Partial Fisher-Yates: the first n1 + n2 entries are a uniform sample
  // without replacement.
  std::vector<Index> idx(static_cast<std::size_t>(d.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  Rng rng(seed);
  const std::size_t take = static_cast<std::size_t>(n1 + n2);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.uniform_index(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }

  SequentialSplit s;
  s.seed = seed;
  s.X1.resize(n1, d.dim());
  s.y1.resize(n1);
  s.X2.resize(n2, d.dim());
  s.y2.resize(n2);
  for (Index i = 0; i < n1; ++i) {
    s.X1.row(i) = d.X.row(idx[static_cast<std::size_t>(i)]);
    s.y1(i) = d.y(idx[static_cast<std::size_t>(i)]);
  }
  for (Index i = 0; i < n2; ++i) {
    s.X2.row(i) = d.X.row(idx[static_cast<std::size_t>(n1 + i)]);
    s.y2(i) = d.y(idx[static_cast<std::size_t>(n1 + i)]);
  }
  return s;
}

}  // namespace warmgp
