// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

// Linear algebra over GF(2) on bit-packed rows of at most 64 columns.

#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace davies::gf2 {

using Row = std::uint64_t;

inline int parity(Row r) { return std::popcount(r) & 1; }

inline int rank(std::vector<Row> rows) {
    int r = 0;
    for (int col = 0; col < 64 && r < static_cast<int>(rows.size()); ++col) {
        const Row bit = Row{1} << col;
        std::size_t piv = static_cast<std::size_t>(r);
        while (piv < rows.size() && !(rows[piv] & bit)) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[static_cast<std::size_t>(r)], rows[piv]);
        for (std::size_t k = 0; k < rows.size(); ++k)
            if (k != static_cast<std::size_t>(r) && (rows[k] & bit)) rows[k] ^= rows[static_cast<std::size_t>(r)];
        ++r;
    }
    return r;
}

/// Reduced row echelon form of a row set, with the row operations recorded so
/// that any right-hand side can be solved afterwards.
class Elimination {
public:
    Elimination(std::vector<Row> rows, int ncols) : rows_(std::move(rows)), ncols_(ncols) {
        if (rows_.size() > 64) throw std::invalid_argument("gf2::Elimination supports at most 64 rows");
        ops_.resize(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) ops_[i] = Row{1} << i;
        std::size_t r = 0;
        for (int col = 0; col < ncols_ && r < rows_.size(); ++col) {
            const Row bit = Row{1} << col;
            std::size_t piv = r;
            while (piv < rows_.size() && !(rows_[piv] & bit)) ++piv;
            if (piv == rows_.size()) continue;
            std::swap(rows_[r], rows_[piv]);
            std::swap(ops_[r], ops_[piv]);
            for (std::size_t k = 0; k < rows_.size(); ++k)
                if (k != r && (rows_[k] & bit)) {
                    rows_[k] ^= rows_[r];
                    ops_[k] ^= ops_[r];
                }
            pivots_.push_back(col);
            ++r;
        }
    }

    int rank() const { return static_cast<int>(pivots_.size()); }

    /// Some x with row_i . x = bit_i(rhs) for all original rows i, if consistent.
    std::optional<Row> solve(Row rhs) const {
        Row x = 0;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const int b = parity(ops_[r] & rhs);
            if (r >= pivots_.size()) {
                if (b) return std::nullopt;
                continue;
            }
            if (b) x |= Row{1} << pivots_[r];
        }
        return x;
    }

    /// Basis of {x : row_i . x = 0 for all i}.
    std::vector<Row> nullspace() const {
        std::vector<Row> basis;
        Row pivmask = 0;
        for (int p : pivots_) pivmask |= Row{1} << p;
        for (int col = 0; col < ncols_; ++col) {
            if (pivmask & (Row{1} << col)) continue;
            Row v = Row{1} << col;
            for (std::size_t r = 0; r < pivots_.size(); ++r)
                if (rows_[r] & (Row{1} << col)) v |= Row{1} << pivots_[r];
            basis.push_back(v);
        }
        return basis;
    }

private:
    std::vector<Row> rows_;
    std::vector<Row> ops_;
    std::vector<int> pivots_;
    int ncols_;
};

} // namespace davies::gf2
