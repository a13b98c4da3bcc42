// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file opspace.hpp
 * @brief Operator space in the normalized Pauli basis.
 *
 * An operator X on n qubits is the coefficient vector c with X = sum_k c_k P_k,
 * P_k the unsigned Pauli string with key k. Pauli strings are orthonormal under
 * the normalized Hilbert-Schmidt product tr(X^dag Y) / 2^n, so a superoperator
 * matrix in this basis is unitarily equivalent to its matrix-unit form.
 *
 * Superoperators are kept symbolically as sums of c * (P_left . X . P_right)
 * and materialized on any basis that they leave invariant.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "davies/gf2.hpp"
#include "davies/models.hpp"
#include "davies/sparse.hpp"

namespace davies {

/// Worker threads for assembly and block jobs; DAVIES_WORKERS overrides.
inline int worker_count() {
    if (const char* env = std::getenv("DAVIES_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs f(chunk, begin, end) over `workers` contiguous chunks of [0, count).
template <class F>
void parallel_chunks(std::int64_t count, int workers, F&& f) {
    workers = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(workers, count / 256 + 1)));
    if (workers == 1) {
        f(0, std::int64_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    const std::int64_t step = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t b = w * step, e = std::min(count, b + step);
        pool.emplace_back([&f, w, b, e] { f(w, b, e); });
    }
    for (auto& t : pool) t.join();
}

struct SuperTerm {
    cplx coeff;
    PauliString left;
    PauliString right;
};

/// X -> sum_i coeff_i * left_i X right_i.
class SuperOp {
public:
    SuperOp() = default;
    explicit SuperOp(int n) : n_(n) {}

    int n() const { return n_; }
    const std::vector<SuperTerm>& terms() const { return terms_; }

    /// Adds c * (L . X . R) expanded over the terms of L and R.
    void add(cplx c, const PauliSum& left, const PauliSum& right) {
        for (const auto& a : left.terms())
            for (const auto& b : right.terms()) terms_.push_back({c * a.coeff * b.coeff, a.op, b.op});
    }

    void add(const SuperOp& o, cplx scale = 1.0) {
        for (const auto& t : o.terms_) terms_.push_back({scale * t.coeff, t.left, t.right});
    }

    /// Merges terms with equal (left, right) and drops those below tol.
    SuperOp& canonicalize(double tol = 1e-15) {
        auto less = [this](const SuperTerm& a, const SuperTerm& b) {
            return a.left.key() != b.left.key() ? a.left.key() < b.left.key() : a.right.key() < b.right.key();
        };
        std::sort(terms_.begin(), terms_.end(), less);
        std::vector<SuperTerm> merged;
        for (const auto& t : terms_) {
            if (!merged.empty() && merged.back().left.key() == t.left.key() && merged.back().right.key() == t.right.key())
                merged.back().coeff += t.coeff;
            else merged.push_back(t);
        }
        std::erase_if(merged, [tol](const SuperTerm& t) { return std::abs(t.coeff) <= tol; });
        terms_ = std::move(merged);
        return *this;
    }

    PauliSum apply(const PauliSum& x) const {
        PauliSum out(n_);
        for (const auto& xt : x.terms())
            for (const auto& t : terms_) {
                const PauliString r = t.left * xt.op * t.right;
                out.add(r.unsigned_form(), t.coeff * xt.coeff * r.coefficient());
            }
        out.canonicalize();
        return out;
    }

    friend SuperOp operator+(SuperOp a, const SuperOp& b) {
        a.add(b);
        return a.canonicalize();
    }

private:
    int n_ = 0;
    std::vector<SuperTerm> terms_;
};

/// Ordered set of Pauli keys spanning an invariant subspace of operator space.
class OperatorBasis {
public:
    OperatorBasis() = default;

    /// All 4^n strings; the index of a key is the key itself.
    static std::shared_ptr<const OperatorBasis> full(int n) {
        if (n > 12) throw std::invalid_argument("full operator basis limited to 12 sites");
        auto b = std::make_shared<OperatorBasis>();
        b->n_ = n;
        b->identity_index_ = true;
        b->keys_.resize(std::size_t{1} << (2 * n));
        for (std::size_t k = 0; k < b->keys_.size(); ++k) b->keys_[k] = k;
        b->label_ = "full";
        return b;
    }

    static std::shared_ptr<const OperatorBasis> from_keys(int n, std::vector<std::uint64_t> keys, std::string label) {
        auto b = std::make_shared<OperatorBasis>();
        b->n_ = n;
        b->keys_ = std::move(keys);
        b->label_ = std::move(label);
        b->index_.reserve(b->keys_.size());
        for (std::size_t i = 0; i < b->keys_.size(); ++i)
            if (!b->index_.emplace(b->keys_[i], static_cast<std::int64_t>(i)).second)
                throw std::invalid_argument("operator basis has duplicate keys");
        return b;
    }

    int n() const { return n_; }
    std::int64_t dim() const { return static_cast<std::int64_t>(keys_.size()); }
    const std::vector<std::uint64_t>& keys() const { return keys_; }
    const std::string& label() const { return label_; }
    PauliString element(std::int64_t i) const { return PauliString::from_key(n_, keys_[static_cast<std::size_t>(i)]); }

    /// Index of a key, or -1 when outside the basis.
    std::int64_t index(std::uint64_t key) const {
        if (identity_index_) return key < keys_.size() ? static_cast<std::int64_t>(key) : -1;
        auto it = index_.find(key);
        return it == index_.end() ? -1 : it->second;
    }

    VecC encode(const PauliSum& x) const {
        VecC v = VecC::Zero(dim());
        for (const auto& t : x.terms()) {
            const auto i = index(t.op.key());
            if (i < 0) throw std::invalid_argument("operator has components outside the basis");
            v[i] += t.coeff;
        }
        return v;
    }

    PauliSum decode(const VecC& v, double tol = 0.0) const {
        PauliSum x(n_);
        for (std::int64_t i = 0; i < dim(); ++i)
            if (std::abs(v[i]) > tol) x.add(element(i), v[i]);
        x.canonicalize(tol);
        return x;
    }

private:
    int n_ = 0;
    bool identity_index_ = false;
    std::vector<std::uint64_t> keys_;
    std::unordered_map<std::uint64_t, std::int64_t> index_;
    std::string label_;
};

using BasisPtr = std::shared_ptr<const OperatorBasis>;

/// Matrix of a superoperator on an invariant basis. Throws if the basis is not invariant.
inline SparseMatrix materialize(const SuperOp& op, const OperatorBasis& basis, bool hermitian,
                                int workers = worker_count()) {
    const std::int64_t dim = basis.dim();
    std::vector<std::vector<Triplet>> parts(static_cast<std::size_t>(std::max(1, workers)));
    std::vector<std::string> errors(parts.size());
    parallel_chunks(dim, workers, [&](int w, std::int64_t b, std::int64_t e) {
        auto& out = parts[static_cast<std::size_t>(w)];
        std::vector<std::pair<std::int64_t, cplx>> col;
        for (std::int64_t j = b; j < e; ++j) {
            const PauliString p = basis.element(j);
            col.clear();
            for (const auto& t : op.terms()) {
                const PauliString r = t.left * p * t.right;
                const std::int64_t i = basis.index(r.key());
                if (i < 0) {
                    errors[static_cast<std::size_t>(w)] = "superoperator leaves basis '" + basis.label() + "'";
                    return;
                }
                col.emplace_back(i, t.coeff * r.coefficient());
            }
            std::sort(col.begin(), col.end(), [](const auto& a, const auto& c) { return a.first < c.first; });
            for (std::size_t k = 0; k < col.size();) {
                cplx s = 0.0;
                const std::int64_t i = col[k].first;
                for (; k < col.size() && col[k].first == i; ++k) s += col[k].second;
                if (std::abs(s) > 1e-15) out.emplace_back(i, j, s);
            }
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw std::invalid_argument(e);
    std::vector<Triplet> trips;
    for (auto& p : parts) trips.insert(trips.end(), p.begin(), p.end());
    SparseMatrix m;
    m.data.resize(dim, dim);
    m.data.setFromTriplets(trips.begin(), trips.end());
    m.hermitian = hermitian;
    return m;
}

/// Commutation signatures against the stabilizers and logicals of a model.
///
/// Checks are the independent stabilizers followed by X_1, Z_1, X_2, Z_2, ...
/// The syndrome of a Pauli string has bit i set iff it anticommutes with check i.
/// Syndrome classes are cosets rep * G of the stabilizer group G; every
/// superoperator built from stabilizer-diagonal jump operators preserves them.
class SyndromeFrame {
public:
    explicit SyndromeFrame(const ModelSpec& m) : n_(m.n_sites) {
        for (int t : m.independent_stabilizers()) stabilizers_.push_back(m.stabilizers[static_cast<std::size_t>(t)]);
        for (const auto& s : m.stabilizers) all_stabilizers_.push_back(s);
        checks_ = stabilizers_;
        for (const auto& lp : m.logicals) {
            checks_.push_back(lp.X);
            checks_.push_back(lp.Z);
        }
        if (checks_.size() > 64) throw std::invalid_argument("syndrome frame supports at most 64 checks");
        std::vector<gf2::Row> rows;
        for (const auto& c : checks_) rows.push_back(commutation_row(c));
        const gf2::Elimination el(rows, 2 * n_);
        if (el.rank() != static_cast<int>(rows.size())) throw std::invalid_argument("checks are not independent");
        for (std::size_t i = 0; i < checks_.size(); ++i) {
            const auto sol = el.solve(gf2::Row{1} << i);
            destabilizers_.push_back(PauliString::from_key(n_, *sol));
        }
    }

    int n() const { return n_; }
    int rank() const { return static_cast<int>(stabilizers_.size()); }
    int logical_count() const { return static_cast<int>(checks_.size() - stabilizers_.size()) / 2; }
    std::uint64_t block_count() const { return std::uint64_t{1} << checks_.size(); }
    std::uint64_t block_dim() const { return std::uint64_t{1} << rank(); }
    const std::vector<PauliString>& stabilizers() const { return stabilizers_; }

    std::uint64_t syndrome(const PauliString& p) const {
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < checks_.size(); ++i)
            if (symplectic(checks_[i], p)) s |= std::uint64_t{1} << i;
        return s;
    }

    PauliString representative(std::uint64_t syn) const {
        PauliString r = PauliString::identity(n_);
        for (std::size_t i = 0; i < checks_.size(); ++i)
            if (syn >> i & 1) r = r * destabilizers_[i];
        return r.unsigned_form();
    }

    /// Stabilizer flip part of a syndrome (bits over the independent stabilizers).
    std::uint64_t flip_bits(std::uint64_t syn) const { return syn & ((std::uint64_t{1} << rank()) - 1); }
    /// Logical sector part: for pair i, bits (anticommutes X_i, anticommutes Z_i).
    std::uint64_t sector_bits(std::uint64_t syn) const { return syn >> rank(); }

    /// Which of all model stabilizers (including dependent ones) the class flips.
    std::vector<int> flipped_stabilizers(std::uint64_t syn) const {
        const PauliString r = representative(syn);
        std::vector<int> out;
        for (std::size_t t = 0; t < all_stabilizers_.size(); ++t)
            if (!commutes(all_stabilizers_[t], r)) out.push_back(static_cast<int>(t));
        return out;
    }

    /// Letters I, Z, X, Y per logical pair: Z_i-like anticommutes with X_i, X_i-like with Z_i.
    std::string sector_name(std::uint64_t syn) const {
        std::string s;
        const std::uint64_t bits = sector_bits(syn);
        for (int i = 0; i < logical_count(); ++i) {
            const bool ax = bits >> (2 * i) & 1, az = bits >> (2 * i + 1) & 1;
            s += ax ? (az ? 'Y' : 'Z') : (az ? 'X' : 'I');
        }
        return s;
    }

    /// Syndrome of the sector with the given letters and no stabilizer flips.
    std::uint64_t sector_syndrome(const std::string& letters) const {
        if (static_cast<int>(letters.size()) != logical_count()) throw std::invalid_argument("sector letter count");
        std::uint64_t bits = 0;
        for (int i = 0; i < logical_count(); ++i) {
            const char c = letters[static_cast<std::size_t>(i)];
            const bool ax = c == 'Z' || c == 'Y', az = c == 'X' || c == 'Y';
            if (!ax && !az && c != 'I') throw std::invalid_argument("sector letters must be I, X, Y or Z");
            bits |= (std::uint64_t{ax} << (2 * i)) | (std::uint64_t{az} << (2 * i + 1));
        }
        return bits << rank();
    }

    /// Keys of the class: representative times every stabilizer-group element, Gray-code order.
    std::vector<std::uint64_t> class_keys(std::uint64_t syn) const {
        const std::uint64_t size = block_dim();
        std::vector<std::uint64_t> keys;
        keys.reserve(size);
        PauliString cur = representative(syn);
        keys.push_back(cur.key());
        for (std::uint64_t g = 1; g < size; ++g) {
            const int bit = std::countr_zero(g);
            cur = (cur * stabilizers_[static_cast<std::size_t>(bit)]).unsigned_form();
            keys.push_back(cur.key());
        }
        return keys;
    }

    BasisPtr class_basis(std::uint64_t syn) const {
        return OperatorBasis::from_keys(n_, class_keys(syn), "class " + std::to_string(syn));
    }

private:
    int n_;
    std::vector<PauliString> stabilizers_;
    std::vector<PauliString> all_stabilizers_;
    std::vector<PauliString> checks_;
    std::vector<PauliString> destabilizers_;
};

/// Gibbs state rho = exp(-beta H) / Z and its square root, for H = -sum c_t S_t.
struct GibbsState {
    PauliSum rho;
    PauliSum rho_sqrt;
    double log_partition = 0.0;
};

inline GibbsState gibbs_state(const ModelSpec& m, double beta) {
    if (m.stabilizers.size() > 22) throw std::invalid_argument("Gibbs state expansion limited to 22 stabilizers");
    auto product = [&](double scale) {
        PauliSum p = PauliSum::identity(m.n_sites);
        for (std::size_t t = 0; t < m.stabilizers.size(); ++t) {
            const double a = scale * beta * m.coefficients[t];
            PauliSum f = PauliSum::identity(m.n_sites, std::cosh(a));
            f += PauliSum(m.stabilizers[t], std::sinh(a));
            p = p * f;
        }
        return p;
    };
    GibbsState g;
    PauliSum e = product(1.0);
    const double z = std::ldexp(std::real(e.coefficient(0)), m.n_sites);
    g.log_partition = std::log(z);
    e *= 1.0 / z;
    g.rho = e;
    PauliSum s = product(0.5);
    s *= 1.0 / std::sqrt(z);
    g.rho_sqrt = s;
    return g;
}

/// X -> X . r for an operator r.
inline SuperOp right_multiplication(const PauliSum& r) {
    SuperOp op(r.n());
    op.add(1.0, PauliSum::identity(r.n()), r);
    return op.canonicalize();
}

/// X -> r . X for an operator r.
inline SuperOp left_multiplication(const PauliSum& r) {
    SuperOp op(r.n());
    op.add(1.0, r, PauliSum::identity(r.n()));
    return op.canonicalize();
}

/// Gram matrix of <X, Y>_beta = tr(rho X^dag Y) on a basis.
inline MatC beta_gram(const GibbsState& g, const OperatorBasis& basis) {
    const SparseMatrix r = materialize(right_multiplication(g.rho_sqrt), basis, false, 1);
    const MatC rd = r.dense();
    return std::ldexp(1.0, basis.n()) * (rd.adjoint() * rd);
}

} // namespace davies
