//
// Copyright 2026 The purdest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PURDEST_DATASET_HPP_
#define PURDEST_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "purdest/errors.hpp"

namespace purdest {

// Read-only window onto a contiguous range of rows of a BinaryMatrix.
struct BlockView {
  std::span<const std::uint8_t> cells;
  std::size_t rows = 0;
  std::size_t dim = 0;

  std::span<const std::uint8_t> row(std::size_t i) const {
    return cells.subspan(i * dim, dim);
  }
  bool empty() const { return rows == 0; }
};

// Row-major n x d matrix with entries in {0, 1}.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;

  BinaryMatrix(std::size_t rows, std::size_t dim)
      : rows_(rows), dim_(dim), cells_(rows * dim, 0) {}

  BinaryMatrix(std::size_t rows, std::size_t dim,
               std::vector<std::uint8_t> cells)
      : rows_(rows), dim_(dim), cells_(std::move(cells)) {
    if (cells_.size() != rows_ * dim_) {
      throw DimensionMismatch("matrix needs " + std::to_string(rows_ * dim_) +
                              " cells, got " + std::to_string(cells_.size()));
    }
    for (std::uint8_t c : cells_) {
      if (c > 1) throw DomainError("binary matrix entries must be 0 or 1");
    }
  }

  static BinaryMatrix from_rows(
      const std::vector<std::vector<std::uint8_t>>& rows) {
    if (rows.empty()) return BinaryMatrix(0, 0);
    const std::size_t dim = rows.front().size();
    std::vector<std::uint8_t> cells;
    cells.reserve(rows.size() * dim);
    for (const auto& r : rows) {
      if (r.size() != dim) throw DimensionMismatch("ragged rows");
      cells.insert(cells.end(), r.begin(), r.end());
    }
    return BinaryMatrix(rows.size(), dim, std::move(cells));
  }

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }

  std::uint8_t at(std::size_t i, std::size_t j) const {
    return cells_[i * dim_ + j];
  }
  void set(std::size_t i, std::size_t j, bool value) {
    cells_[i * dim_ + j] = value ? 1 : 0;
  }
  std::span<const std::uint8_t> row(std::size_t i) const {
    return std::span<const std::uint8_t>(cells_).subspan(i * dim_, dim_);
  }
  std::span<std::uint8_t> mutable_cells() { return cells_; }

  BlockView block(std::size_t first_row, std::size_t count) const {
    if (first_row + count > rows_) {
      throw InsufficientSamples("block [" + std::to_string(first_row) + ", " +
                                std::to_string(first_row + count) +
                                ") exceeds " + std::to_string(rows_) + " rows");
    }
    return BlockView{
        std::span<const std::uint8_t>(cells_).subspan(first_row * dim_,
                                                      count * dim_),
        count, dim_};
  }
  BlockView all() const { return block(0, rows_); }

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Per-column empirical mean of a block.
inline std::vector<double> column_means(const BlockView& block) {
  std::vector<double> mean(block.dim, 0.0);
  if (block.rows == 0) return mean;
  std::vector<std::uint64_t> counts(block.dim, 0);
  for (std::size_t i = 0; i < block.rows; ++i) {
    const auto r = block.row(i);
    for (std::size_t j = 0; j < block.dim; ++j) counts[j] += r[j];
  }
  for (std::size_t j = 0; j < block.dim; ++j) {
    mean[j] = static_cast<double>(counts[j]) / static_cast<double>(block.rows);
  }
  return mean;
}

}  // namespace purdest

#endif  // PURDEST_DATASET_HPP_
