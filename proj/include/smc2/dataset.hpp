// Copyright 2026 The adaptive-smc2 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SMC2_DATASET_HPP
#define SMC2_DATASET_HPP

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smc2 {

/// Observations y_1..y_T, each a vector of `dim` reals, stored row-major.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t dim, std::vector<double> values, std::string meta = {})
      : dim_{dim}, values_{std::move(values)}, meta_{std::move(meta)} {
    if (dim_ == 0 || values_.size() % dim_ != 0) {
      throw std::invalid_argument("dataset size is not a multiple of the observation dimension");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("dataset contains a non-finite observation");
      }
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] const std::string& meta() const noexcept { return meta_; }

  /// Observation at zero-based index `i` (i.e. y_{i+1}).
  [[nodiscard]] std::span<const double> operator[](std::size_t i) const {
    return std::span<const double>{values_}.subspan(i * dim_, dim_);
  }

 private:
  std::size_t dim_ = 1;
  std::vector<double> values_;
  std::string meta_;
};

/// Writes "t,y[,y2...]" with one observation per line, t starting at 1.
inline void write_dataset_csv(const Dataset& data, std::ostream& out) {
  out << "t";
  for (std::size_t j = 0; j < data.dim(); ++j) {
    out << ",y";
    if (j > 0) {
      out << j + 1;
    }
  }
  out << '\n' << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << i + 1;
    for (double v : data[i]) {
      out << ',' << v;
    }
    out << '\n';
  }
}

inline Dataset read_dataset_csv(std::istream& in, std::string meta = {}) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("dataset csv is empty");
  }
  std::size_t columns = 1;
  for (char c : line) {
    columns += c == ',' ? 1 : 0;
  }
  if (columns < 2) {
    throw std::runtime_error("dataset csv header must be t,y[,y2...]");
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::stringstream row{line};
    std::string cell;
    std::size_t col = 0;
    while (std::getline(row, cell, ',')) {
      if (col > 0) {
        values.push_back(std::stod(cell));
      }
      ++col;
    }
    if (col != columns) {
      throw std::runtime_error("dataset csv row has the wrong number of columns: " + line);
    }
  }
  return Dataset{columns - 1, std::move(values), std::move(meta)};
}

inline void save_dataset(const Dataset& data, const std::string& path) {
  std::ofstream out{path};
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write_dataset_csv(data, out);
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream in{path};
  if (!in) {
    throw std::runtime_error("cannot open dataset " + path);
  }
  return read_dataset_csv(in, path);
}

}  // namespace smc2

#endif  // SMC2_DATASET_HPP
