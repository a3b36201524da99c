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

#include "copboost/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "copboost/error.hpp"

namespace copboost {

Partition parse_partition(std::string_view name) {
  if (name == "train") return Partition::train;
  if (name == "mstop" || name == "oobag") return Partition::mstop;
  if (name == "test") return Partition::test;
  throw InputError("unknown partition label '" + std::string(name) + "'");
}

std::string_view partition_name(Partition p) {
  switch (p) {
    case Partition::train: return "train";
    case Partition::mstop: return "mstop";
    case Partition::test: return "test";
  }
  return "train";
}

std::size_t Dataset::count(Partition part) const {
  std::size_t c = 0;
  for (Partition q : partition) c += (q == part);
  return c;
}

Dataset Dataset::subset(Partition part) const {
  Dataset out;
  const std::size_t m = count(part);
  out.y1.reserve(m);
  out.y2.reserve(m);
  out.partition.assign(m, part);
  out.x.resize(static_cast<Eigen::Index>(m), x.cols());
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < n(); ++i) {
    if (partition[i] != part) continue;
    out.y1.push_back(y1[i]);
    out.y2.push_back(y2[i]);
    out.x.row(r++) = x.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

void Dataset::validate() const {
  if (y2.size() != n() || partition.size() != n() || static_cast<std::size_t>(x.rows()) != n())
    throw InputError("dataset columns have different lengths");
  for (std::size_t i = 0; i < n(); ++i) {
    bool ok = std::isfinite(y1[i]) && std::isfinite(y2[i]);
    for (Eigen::Index j = 0; ok && j < x.cols(); ++j) ok = std::isfinite(x(i, j));
    if (!ok) throw InputError("row " + std::to_string(i + 1) + ": non-finite value");
  }
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t c = line.find(',', start);
    out.push_back(line.substr(start, c == std::string_view::npos ? c : c - start));
    if (c == std::string_view::npos) break;
    start = c + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r'))
      f.remove_suffix(1);
  }
  return out;
}

double parse_cell(std::string_view s, std::size_t row, std::string_view col) {
  const auto fail = [&](const char* why) {
    return InputError("row " + std::to_string(row) + ", column " + std::string(col) + ": " + why +
                      " '" + std::string(s) + "'");
  };
  if (s.empty()) throw fail("missing value");
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw fail("not a number");
  if (!std::isfinite(v)) throw fail("non-finite value");
  return v;
}

}  // namespace

Dataset read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty CSV input");
  const auto header = split(line);
  const bool has_partition = !header.empty() && header.back() == "partition";
  const std::size_t n_cov = header.size() - 2 - (has_partition ? 1 : 0);
  if (header.size() < 2 + (has_partition ? 1 : 0) || header[0] != "y1" || header[1] != "y2")
    throw InputError("CSV header must start with y1,y2");
  for (std::size_t j = 0; j < n_cov; ++j) {
    if (header[2 + j] != "x" + std::to_string(j + 1))
      throw InputError("CSV header column " + std::to_string(j + 3) + " must be x" +
                       std::to_string(j + 1));
  }
  Dataset d;
  std::vector<double> xs;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto f = split(line);
    if (f.size() != header.size())
      throw InputError("row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    d.y1.push_back(parse_cell(f[0], row, "y1"));
    d.y2.push_back(parse_cell(f[1], row, "y2"));
    for (std::size_t j = 0; j < n_cov; ++j) xs.push_back(parse_cell(f[2 + j], row, header[2 + j]));
    if (has_partition) {
      try {
        d.partition.push_back(parse_partition(f.back()));
      } catch (const InputError& e) {
        throw InputError("row " + std::to_string(row) + ": " + e.what());
      }
    } else {
      d.partition.push_back(Partition::train);
    }
  }
  const auto n = static_cast<Eigen::Index>(d.y1.size());
  d.x.resize(n, static_cast<Eigen::Index>(n_cov));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d.x.cols(); ++j) d.x(i, j) = xs[i * n_cov + j];
  return d;
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open data file '" + path + "'");
  return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
  out << "y1,y2";
  for (int j = 0; j < data.p(); ++j) out << ",x" << j + 1;
  out << ",partition\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    out << format_double(data.y1[i]) << ',' << format_double(data.y2[i]);
    for (int j = 0; j < data.p(); ++j) out << ',' << format_double(data.x(i, j));
    out << ',' << partition_name(data.partition[i]) << '\n';
  }
}

void write_csv_file(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_csv(out, data);
  if (!out) throw InputError("write to '" + path + "' failed");
}

}  // namespace copboost
