// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "davies/gf2.hpp"
#include "davies/pauli_sum.hpp"

namespace davies {

/// Row r with r . key(Q) = 1 iff Q anticommutes with p.
inline gf2::Row commutation_row(const PauliString& p) { return p.z | (p.x << p.n); }

/// Throws unless the terms of h pairwise commute.
inline void require_commuting_terms(const PauliSum& h) {
    const auto& t = h.terms();
    for (std::size_t a = 0; a < t.size(); ++a)
        for (std::size_t b = a + 1; b < t.size(); ++b)
            if (!commutes(t[a].op, t[b].op))
                throw PauliError("Hamiltonian terms " + t[a].op.to_string() + " and " + t[b].op.to_string() +
                                 " do not commute");
}

namespace detail {

inline std::vector<PauliString> commutant_constraints(std::span<const PauliString> generators, const PauliSum& h) {
    std::vector<PauliString> cons(generators.begin(), generators.end());
    for (const auto& t : h.terms()) cons.push_back(t.op);
    for (const auto& c : cons)
        if (c.n != h.n() && !h.empty()) throw PauliError("commutant: site count mismatch");
    return cons;
}

} // namespace detail

/// Exhaustive count over all 4^n strings; feasible for n <= 8 or so.
inline std::uint64_t commutant_dimension_scan(std::span<const PauliString> generators, const PauliSum& h) {
    require_commuting_terms(h);
    const auto cons = detail::commutant_constraints(generators, h);
    const int n = cons.empty() ? h.n() : cons.front().n;
    const std::uint64_t total = std::uint64_t{1} << (2 * n);
    std::uint64_t count = 0;
    for (std::uint64_t key = 0; key < total; ++key) {
        const PauliString q = PauliString::from_key(n, key);
        bool ok = true;
        for (const auto& c : cons)
            if (symplectic(c, q)) {
                ok = false;
                break;
            }
        count += ok;
    }
    return count;
}

/// Same count from the rank of the symplectic constraint system.
inline std::uint64_t commutant_dimension_gf2(std::span<const PauliString> generators, const PauliSum& h) {
    require_commuting_terms(h);
    const auto cons = detail::commutant_constraints(generators, h);
    const int n = cons.empty() ? h.n() : cons.front().n;
    std::vector<gf2::Row> rows;
    rows.reserve(cons.size());
    for (const auto& c : cons) rows.push_back(commutation_row(c));
    return std::uint64_t{1} << (2 * n - gf2::rank(rows));
}

/// Number of Pauli strings commuting with every generator and every term of h.
/// Distinct Pauli strings are linearly independent, so this is the dimension
/// of the commutant algebra spanned by Pauli strings.
inline std::uint64_t commutant_dimension(std::span<const PauliString> generators, const PauliSum& h) {
    const int n = generators.empty() ? h.n() : generators.front().n;
    return n <= 8 ? commutant_dimension_scan(generators, h) : commutant_dimension_gf2(generators, h);
}

} // namespace davies
