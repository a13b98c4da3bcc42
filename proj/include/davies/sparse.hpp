// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "davies/pauli_sum.hpp"

namespace davies {

using SpMat = Eigen::SparseMatrix<cplx, Eigen::ColMajor, std::int64_t>;
using Triplet = Eigen::Triplet<cplx, std::int64_t>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;

/// Site-count cap for Hilbert-space matrices built from Pauli sums.
inline int& hilbert_site_cap() {
    static int cap = 16;
    return cap;
}

/// Square complex sparse matrix with a Hermiticity tag.
struct SparseMatrix {
    SpMat data;
    bool hermitian = false;

    std::int64_t dim() const { return data.rows(); }
    std::int64_t nnz() const { return data.nonZeros(); }

    /// Max |A_ij - conj(A_ji)|.
    double hermiticity_defect() const {
        SpMat d = SpMat(data.adjoint()) - data;
        double m = 0.0;
        for (int k = 0; k < d.outerSize(); ++k)
            for (SpMat::InnerIterator it(d, k); it; ++it) m = std::max(m, std::abs(it.value()));
        return m;
    }

    bool check_hermitian(double tol = 1e-14) const { return hermiticity_defect() <= tol; }

    MatC dense() const { return MatC(data); }

    /// Coordinate text: "dim nnz" then "row col re im" per entry, column-major order.
    void write_coo(std::ostream& os) const {
        os << dim() << ' ' << nnz() << '\n';
        os << std::setprecision(17);
        for (int k = 0; k < data.outerSize(); ++k)
            for (SpMat::InnerIterator it(data, k); it; ++it)
                os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag()
                   << '\n';
    }

    static SparseMatrix read_coo(std::istream& is) {
        std::int64_t dim = 0, nnz = 0;
        if (!(is >> dim >> nnz)) throw std::runtime_error("coordinate matrix: bad header");
        std::vector<Triplet> trips;
        trips.reserve(static_cast<std::size_t>(nnz));
        for (std::int64_t k = 0; k < nnz; ++k) {
            std::int64_t r = 0, c = 0;
            double re = 0, im = 0;
            if (!(is >> r >> c >> re >> im)) throw std::runtime_error("coordinate matrix: truncated");
            trips.emplace_back(r, c, cplx{re, im});
        }
        SparseMatrix m;
        m.data.resize(dim, dim);
        m.data.setFromTriplets(trips.begin(), trips.end());
        return m;
    }
};

/// Dense-or-sparse matrix of a Pauli sum on the 2^n computational basis.
inline SparseMatrix to_matrix(const PauliSum& a) {
    const int n = a.n();
    if (n > hilbert_site_cap()) throw PauliError("to_matrix: site count exceeds configured cap");
    const std::int64_t dim = std::int64_t{1} << n;
    std::vector<Triplet> trips;
    trips.reserve(a.size() * static_cast<std::size_t>(dim));
    for (const auto& t : a.terms())
        for (std::int64_t b = 0; b < dim; ++b) {
            const auto ub = static_cast<std::uint64_t>(b);
            trips.emplace_back(static_cast<std::int64_t>(ub ^ t.op.x), b, t.coeff * column_entry(t.op, ub));
        }
    SparseMatrix m;
    m.data.resize(dim, dim);
    m.data.setFromTriplets(trips.begin(), trips.end());
    m.data.prune(cplx{0.0}, 0.0);
    m.hermitian = a.is_hermitian();
    return m;
}

inline SparseMatrix to_matrix(const PauliString& p) { return to_matrix(PauliSum(p)); }

inline MatC to_dense(const PauliSum& a) { return to_matrix(a).dense(); }

} // namespace davies
