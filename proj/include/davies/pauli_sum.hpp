// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <ostream>
#include <utility>
#include <vector>

#include "davies/pauli.hpp"

namespace davies {

/// Linear combination of Pauli strings; each term is kept in Hermitian letter
/// form with the phase folded into its complex coefficient.
class PauliSum {
public:
    struct Term {
        PauliString op;
        cplx coeff;
    };

    PauliSum() = default;
    explicit PauliSum(int n) : n_(n) {}
    PauliSum(const PauliString& p, cplx c = 1.0) : n_(p.n) { add(p, c); canonicalize(); }

    static PauliSum identity(int n, cplx c = 1.0) { return PauliSum(PauliString::identity(n), c); }

    int n() const { return n_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    /// Appends without merging; call canonicalize() afterwards.
    void add(const PauliString& p, cplx c) {
        if (n_ != p.n) {
            if (terms_.empty() && n_ == 0) n_ = p.n;
            else throw PauliError("PauliSum: site count mismatch");
        }
        terms_.push_back({p.unsigned_form(), c * p.coefficient()});
    }

    /// Sorts by key, merges duplicates and drops coefficients with |c| <= tol.
    PauliSum& canonicalize(double tol = 1e-15) {
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& a, const Term& b) { return a.op.key() < b.op.key(); });
        std::vector<Term> merged;
        merged.reserve(terms_.size());
        for (const auto& t : terms_) {
            if (!merged.empty() && merged.back().op.key() == t.op.key()) merged.back().coeff += t.coeff;
            else merged.push_back(t);
        }
        std::erase_if(merged, [tol](const Term& t) { return std::abs(t.coeff) <= tol; });
        terms_ = std::move(merged);
        return *this;
    }

    /// Coefficient of the unsigned string with the given key (0 if absent).
    cplx coefficient(std::uint64_t key) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                                   [](const Term& t, std::uint64_t k) { return t.op.key() < k; });
        return (it != terms_.end() && it->op.key() == key) ? it->coeff : cplx{0.0};
    }

    PauliSum adjoint() const {
        PauliSum r(n_);
        r.terms_ = terms_;
        for (auto& t : r.terms_) t.coeff = std::conj(t.coeff);
        return r;
    }

    bool is_hermitian(double tol = 1e-14) const {
        return std::all_of(terms_.begin(), terms_.end(),
                           [tol](const Term& t) { return std::abs(t.coeff.imag()) <= tol; });
    }

    /// Max |coefficient difference| over the union of keys.
    double distance(const PauliSum& other) const {
        PauliSum d = *this;
        for (const auto& t : other.terms_) d.terms_.push_back({t.op, -t.coeff});
        d.canonicalize(0.0);
        double m = 0.0;
        for (const auto& t : d.terms_) m = std::max(m, std::abs(t.coeff));
        return m;
    }

    PauliSum& operator+=(const PauliSum& o) {
        if (o.empty()) return *this;
        if (empty() && n_ == 0) n_ = o.n_;
        if (o.n_ != n_) throw PauliError("PauliSum: site count mismatch");
        terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
        return canonicalize();
    }
    PauliSum& operator*=(cplx s) {
        for (auto& t : terms_) t.coeff *= s;
        return canonicalize();
    }

    friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
    friend PauliSum operator-(PauliSum a, const PauliSum& b) {
        PauliSum nb = b;
        nb *= -1.0;
        return a += nb;
    }
    friend PauliSum operator*(PauliSum a, cplx s) { return a *= s; }
    friend PauliSum operator*(cplx s, PauliSum a) { return a *= s; }

    friend PauliSum operator*(const PauliSum& a, const PauliSum& b) {
        if (a.n_ != b.n_) throw PauliError("PauliSum: site count mismatch");
        PauliSum r(a.n_);
        r.terms_.reserve(a.size() * b.size());
        for (const auto& s : a.terms_)
            for (const auto& t : b.terms_) {
                const PauliString p = s.op * t.op;
                r.terms_.push_back({p.unsigned_form(), s.coeff * t.coeff * p.coefficient()});
            }
        return r.canonicalize();
    }

    friend std::ostream& operator<<(std::ostream& os, const PauliSum& s) {
        bool first = true;
        for (const auto& t : s.terms_) {
            if (!first) os << " + ";
            os << "(" << t.coeff.real() << (t.coeff.imag() >= 0 ? "+" : "") << t.coeff.imag() << "i)"
               << t.op.to_string().substr(1);
            first = false;
        }
        if (first) os << "0";
        return os;
    }

private:
    int n_ = 0;
    std::vector<Term> terms_;
};

/// Projector (1 + s*P)/2 onto the s-eigenspace of a Hermitian Pauli string (s = +-1).
inline PauliSum eigen_projector(const PauliString& p, int sign) {
    PauliSum r = PauliSum::identity(p.n, 0.5);
    r += PauliSum(p, 0.5 * sign);
    return r;
}

} // namespace davies
