/*
 * Copyright 2026 The copboost Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace copboost {

enum class Partition : std::uint8_t { train, mstop, test };

Partition parse_partition(std::string_view name);
std::string_view partition_name(Partition p);

// Bivariate responses with covariates. Missing values are not representable.
struct Dataset {
  std::vector<double> y1;
  std::vector<double> y2;
  Eigen::MatrixXd x;  // n x p
  std::vector<Partition> partition;

  std::size_t n() const { return y1.size(); }
  int p() const { return static_cast<int>(x.cols()); }
  std::span<const double> column(int j) const {
    return {x.col(j).data(), static_cast<std::size_t>(x.rows())};
  }
  std::size_t count(Partition part) const;
  Dataset subset(Partition part) const;
  // Throws InputError on length mismatches or non-finite cells.
  void validate() const;
};

// CSV with header y1,y2,x1..xp,partition. Row numbers in errors are 1-based
// data rows (the header is row 0).
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const Dataset& data);
void write_csv_file(const std::string& path, const Dataset& data);

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace copboost
