// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file models.hpp
 * @brief Commuting-Pauli spin models: the Ising ring and the 2D toric code.
 *
 * Toric-code sites live on the edges of an L x L periodic lattice. Edge
 * (r, c, o) starts at vertex (r, c) and points right (o = 0) or down (o = 1);
 * its site index is 2(rL + c) + o. Star s = rL + c sits on vertex (r, c),
 * plaquette p = rL + c has (r, c) as its top-left corner.
 */

#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "davies/commutant.hpp"
#include "davies/gf2.hpp"
#include "davies/pauli_sum.hpp"

namespace davies {

enum class ModelKind { Ising, Toric };

inline const char* to_string(ModelKind k) { return k == ModelKind::Ising ? "ising" : "toric"; }

struct LogicalPair {
    PauliString X;
    PauliString Z;
};

struct SnakeCombPartition {
    std::vector<int> snake_sites; ///< in path order
    std::vector<int> comb_sites;
    int qubit1_site = -1;
    int qubit2_site = -1;
};

struct ModelSpec {
    ModelKind kind = ModelKind::Ising;
    int size = 0; ///< N for the ring, L for the torus
    int n_sites = 0;
    double J = 1.0;
    std::vector<PauliString> stabilizers;
    std::vector<double> coefficients; ///< per stabilizer, H = -sum_t coefficients[t] * stabilizers[t]
    std::vector<std::string> stabilizer_names;
    std::vector<std::vector<int>> constraints; ///< index sets whose product is +1
    std::vector<LogicalPair> logicals;
    std::optional<SnakeCombPartition> partition;

    PauliSum hamiltonian() const {
        PauliSum h(n_sites);
        for (std::size_t t = 0; t < stabilizers.size(); ++t) h.add(stabilizers[t], -coefficients[t]);
        h.canonicalize();
        return h;
    }

    /// Greedy maximal independent subset of the stabilizers, in list order.
    std::vector<int> independent_stabilizers() const {
        std::vector<int> idx;
        std::vector<gf2::Row> rows;
        for (std::size_t t = 0; t < stabilizers.size(); ++t) {
            rows.push_back(stabilizers[t].key());
            if (gf2::rank(rows) == static_cast<int>(rows.size())) idx.push_back(static_cast<int>(t));
            else rows.pop_back();
        }
        return idx;
    }

    std::string label() const {
        return std::string(to_string(kind)) + (kind == ModelKind::Ising ? " N=" : " L=") + std::to_string(size);
    }
};

namespace detail {

inline void apply_coefficients(ModelSpec& m, const std::vector<double>& coeffs) {
    if (coeffs.empty()) {
        m.coefficients.assign(m.stabilizers.size(), m.J);
        return;
    }
    if (coeffs.size() != m.stabilizers.size())
        throw std::invalid_argument("per-term coefficient list has the wrong length");
    for (double c : coeffs)
        if (!(c > 0.0)) throw std::invalid_argument("per-term coefficients must be positive");
    m.coefficients = coeffs;
}

} // namespace detail

/// Ferromagnetic ring: bonds Z_j Z_{j+1} with cyclic closure.
inline ModelSpec build_ising_ring(int N, double J, const std::vector<double>& bond_couplings = {}) {
    if (N < 3) throw std::invalid_argument("Ising ring needs N >= 3");
    if (N > kMaxSites) throw std::invalid_argument("Ising ring too large");
    if (!(J > 0.0)) throw std::invalid_argument("coupling J must be positive");
    ModelSpec m;
    m.kind = ModelKind::Ising;
    m.size = N;
    m.n_sites = N;
    m.J = J;
    std::vector<int> all;
    for (int j = 0; j < N; ++j) {
        const int k = (j + 1) % N;
        m.stabilizers.emplace_back(N, 0, (1ull << j) | (1ull << k));
        m.stabilizer_names.push_back("Z" + std::to_string(j) + "Z" + std::to_string(k));
        all.push_back(j);
    }
    m.constraints.push_back(all);
    const std::uint64_t allx = (1ull << N) - 1ull;
    m.logicals.push_back({PauliString(N, allx, 0), PauliString::Z(N, 0)});
    detail::apply_coefficients(m, bond_couplings);
    return m;
}

/// Lattice geometry helpers for the torus.
struct TorusLattice {
    int L;

    int site(int r, int c, int o) const { return 2 * (wrap(r) * L + wrap(c)) + o; }
    int h(int r, int c) const { return site(r, c, 0); }
    int v(int r, int c) const { return site(r, c, 1); }
    int vertex(int r, int c) const { return wrap(r) * L + wrap(c); }
    int plaquette(int r, int c) const { return wrap(r) * L + wrap(c); }
    int wrap(int a) const { return ((a % L) + L) % L; }
    int n_sites() const { return 2 * L * L; }

    std::vector<int> star_sites(int r, int c) const { return {h(r, c), h(r, c - 1), v(r, c), v(r - 1, c)}; }
    std::vector<int> plaquette_sites(int r, int c) const { return {h(r, c), h(r + 1, c), v(r, c), v(r, c + 1)}; }

    /// Primal endpoints (vertices) of an edge.
    std::pair<int, int> endpoints(int s) const {
        const int o = s % 2, cell = s / 2, r = cell / L, c = cell % L;
        return o == 0 ? std::pair{vertex(r, c), vertex(r, c + 1)} : std::pair{vertex(r, c), vertex(r + 1, c)};
    }
    /// Dual endpoints (plaquettes) of an edge.
    std::pair<int, int> faces(int s) const {
        const int o = s % 2, cell = s / 2, r = cell / L, c = cell % L;
        return o == 0 ? std::pair{plaquette(r - 1, c), plaquette(r, c)}
                      : std::pair{plaquette(r, c - 1), plaquette(r, c)};
    }
};

namespace detail {

/// Edge list of the unique path between two nodes in a forest given by edges.
template <class EndFn>
std::vector<int> tree_path(const std::vector<int>& edges, int from, int to, EndFn ends) {
    std::map<int, std::vector<std::pair<int, int>>> adj;
    for (int e : edges) {
        auto [a, b] = ends(e);
        adj[a].push_back({b, e});
        adj[b].push_back({a, e});
    }
    std::map<int, std::pair<int, int>> parent; // node -> (prev node, edge)
    std::deque<int> queue{from};
    parent[from] = {-1, -1};
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        if (u == to) break;
        for (auto [w, e] : adj[u])
            if (!parent.count(w)) {
                parent[w] = {u, e};
                queue.push_back(w);
            }
    }
    if (!parent.count(to)) throw std::logic_error("tree_path: nodes not connected");
    std::vector<int> path;
    for (int u = to; u != from; u = parent[u].first) path.push_back(parent[u].second);
    return path;
}

inline std::uint64_t mask_of(const std::vector<int>& sites) {
    std::uint64_t m = 0;
    for (int s : sites) m ^= 1ull << s;
    return m;
}

} // namespace detail

/// Kitaev's toric code on an L x L torus, with snake/comb partition.
inline ModelSpec build_toric_code(int L, double J, const std::vector<double>& term_couplings = {}) {
    if (L < 2) throw std::invalid_argument("toric code needs L >= 2");
    if (2 * L * L > kMaxSites) throw std::invalid_argument("toric code too large for 64-bit masks");
    if (!(J > 0.0)) throw std::invalid_argument("coupling J must be positive");
    const TorusLattice lat{L};
    const int n = lat.n_sites();
    ModelSpec m;
    m.kind = ModelKind::Toric;
    m.size = L;
    m.n_sites = n;
    m.J = J;
    std::vector<int> stars, plaqs;
    for (int r = 0; r < L; ++r)
        for (int c = 0; c < L; ++c) {
            m.stabilizers.emplace_back(n, detail::mask_of(lat.star_sites(r, c)), 0);
            m.stabilizer_names.push_back("X_s(" + std::to_string(r) + "," + std::to_string(c) + ")");
            stars.push_back(static_cast<int>(m.stabilizers.size()) - 1);
        }
    for (int r = 0; r < L; ++r)
        for (int c = 0; c < L; ++c) {
            m.stabilizers.emplace_back(n, 0, detail::mask_of(lat.plaquette_sites(r, c)));
            m.stabilizer_names.push_back("Z_p(" + std::to_string(r) + "," + std::to_string(c) + ")");
            plaqs.push_back(static_cast<int>(m.stabilizers.size()) - 1);
        }
    m.constraints = {stars, plaqs};

    // Snake: boustrophedon walk over plaquettes, recording the crossed edges.
    SnakeCombPartition part;
    std::vector<std::pair<int, int>> walk;
    for (int r = 0; r < L; ++r)
        for (int k = 0; k < L; ++k) walk.push_back({r, (r % 2 == 0) ? k : L - 1 - k});
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
        auto [r0, c0] = walk[i];
        auto [r1, c1] = walk[i + 1];
        if (r1 == r0) part.snake_sites.push_back(lat.v(r0, std::max(c0, c1)));
        else part.snake_sites.push_back(lat.h(r1, c0));
    }
    part.qubit1_site = lat.v(L - 1, 0);
    part.qubit2_site = lat.h(0, L - 1);
    const std::set<int> snake_set(part.snake_sites.begin(), part.snake_sites.end());
    for (int s = 0; s < n; ++s)
        if (!snake_set.count(s) && s != part.qubit1_site && s != part.qubit2_site) part.comb_sites.push_back(s);

    // Logical loops: fundamental cycles of the two spare edges through the comb
    // (sigma^z, primal) and the snake (sigma^x, dual).
    auto ends = [&](int e) { return lat.endpoints(e); };
    auto faces = [&](int e) { return lat.faces(e); };
    for (int q : {part.qubit1_site, part.qubit2_site}) {
        auto [a, b] = lat.endpoints(q);
        auto zpath = detail::tree_path(part.comb_sites, a, b, ends);
        zpath.push_back(q);
        auto [f, g] = lat.faces(q);
        auto xpath = detail::tree_path(part.snake_sites, f, g, faces);
        xpath.push_back(q);
        m.logicals.push_back({PauliString(n, detail::mask_of(xpath), 0), PauliString(n, 0, detail::mask_of(zpath))});
    }
    m.partition = std::move(part);
    detail::apply_coefficients(m, term_couplings);
    return m;
}

struct ModelReport {
    bool ok = true;
    std::vector<std::string> failures;
    int independent_stabilizers = 0;
    std::uint64_t ground_degeneracy = 0;
    int snake_flip_rank = -1;
    int comb_flip_rank = -1;

    void fail(std::string msg) {
        ok = false;
        failures.push_back(std::move(msg));
    }
};

/// Checks every structural invariant of a model description.
inline ModelReport verify_model(const ModelSpec& m) {
    ModelReport rep;
    const auto& st = m.stabilizers;
    for (std::size_t a = 0; a < st.size(); ++a)
        for (std::size_t b = a + 1; b < st.size(); ++b)
            if (!commutes(st[a], st[b])) rep.fail("stabilizers " + m.stabilizer_names[a] + " and " + m.stabilizer_names[b] + " anticommute");

    for (const auto& con : m.constraints) {
        PauliString prod = PauliString::identity(m.n_sites);
        for (int t : con) prod = prod * st[static_cast<std::size_t>(t)];
        if (!(prod == PauliString::identity(m.n_sites)))
            rep.fail("constraint product is " + prod.to_string() + ", not +identity");
    }

    for (std::size_t i = 0; i < m.logicals.size(); ++i) {
        const auto& lp = m.logicals[i];
        const std::string tag = "logical pair " + std::to_string(i + 1);
        if (commutes(lp.X, lp.Z)) rep.fail(tag + " commutes within the pair");
        if (!(lp.X * lp.X == PauliString::identity(m.n_sites)) || !(lp.Z * lp.Z == PauliString::identity(m.n_sites)))
            rep.fail(tag + " does not square to identity");
        for (std::size_t t = 0; t < st.size(); ++t) {
            if (!commutes(lp.X, st[t])) rep.fail(tag + " X anticommutes with " + m.stabilizer_names[t]);
            if (!commutes(lp.Z, st[t])) rep.fail(tag + " Z anticommutes with " + m.stabilizer_names[t]);
        }
        for (std::size_t k = 0; k < m.logicals.size(); ++k) {
            if (k == i) continue;
            const auto& o = m.logicals[k];
            if (!commutes(lp.X, o.X) || !commutes(lp.X, o.Z) || !commutes(lp.Z, o.X) || !commutes(lp.Z, o.Z))
                rep.fail(tag + " does not commute with logical pair " + std::to_string(k + 1));
        }
    }

    // Counting: n = (#logical qubits) + rank(stabilizers).
    rep.independent_stabilizers = static_cast<int>(m.independent_stabilizers().size());
    const int k = static_cast<int>(m.logicals.size());
    rep.ground_degeneracy = std::uint64_t{1} << (m.n_sites - rep.independent_stabilizers);
    if (k + rep.independent_stabilizers != m.n_sites)
        rep.fail("dimension count: 2^" + std::to_string(m.n_sites) + " != 2^" + std::to_string(k) + " x 2^" +
                 std::to_string(rep.independent_stabilizers));
    // Logicals independent of each other and of the stabilizer group.
    {
        std::vector<gf2::Row> rows;
        for (int t : m.independent_stabilizers()) rows.push_back(st[static_cast<std::size_t>(t)].key());
        for (const auto& lp : m.logicals) {
            rows.push_back(lp.X.key());
            rows.push_back(lp.Z.key());
        }
        if (gf2::rank(rows) != static_cast<int>(rows.size())) rep.fail("logicals lie in the stabilizer group");
    }

    if (m.partition) {
        const auto& p = *m.partition;
        std::vector<int> count(static_cast<std::size_t>(m.n_sites), 0);
        for (int s : p.snake_sites) ++count[static_cast<std::size_t>(s)];
        for (int s : p.comb_sites) ++count[static_cast<std::size_t>(s)];
        ++count[static_cast<std::size_t>(p.qubit1_site)];
        ++count[static_cast<std::size_t>(p.qubit2_site)];
        for (int s = 0; s < m.n_sites; ++s)
            if (count[static_cast<std::size_t>(s)] != 1) rep.fail("partition covers site " + std::to_string(s) + " " + std::to_string(count[static_cast<std::size_t>(s)]) + " times");

        std::vector<int> stars, plaqs;
        for (std::size_t t = 0; t < st.size(); ++t) (st[t].x ? stars : plaqs).push_back(static_cast<int>(t));
        auto flip_rank = [&](const std::vector<int>& sites, bool use_x, const std::vector<int>& targets) {
            std::vector<gf2::Row> rows;
            for (int s : sites) {
                const PauliString op = use_x ? PauliString::X(m.n_sites, s) : PauliString::Z(m.n_sites, s);
                gf2::Row pattern = 0;
                for (std::size_t i = 0; i < targets.size(); ++i)
                    if (!commutes(op, st[static_cast<std::size_t>(targets[i])])) pattern |= gf2::Row{1} << i;
                rows.push_back(pattern);
            }
            return gf2::rank(rows);
        };
        rep.snake_flip_rank = flip_rank(p.snake_sites, true, plaqs);
        rep.comb_flip_rank = flip_rank(p.comb_sites, false, stars);
        const int need = m.size * m.size - 1;
        if (rep.snake_flip_rank != need) rep.fail("snake flip rank " + std::to_string(rep.snake_flip_rank) + " != " + std::to_string(need));
        if (rep.comb_flip_rank != need) rep.fail("comb flip rank " + std::to_string(rep.comb_flip_rank) + " != " + std::to_string(need));
        // Logical qubits must commute with both the snake and the comb algebras.
        for (const auto& lp : m.logicals)
            for (const PauliString& l : {lp.X, lp.Z}) {
                for (int s : p.snake_sites)
                    if (!commutes(l, PauliString::X(m.n_sites, s))) rep.fail("logical " + l.to_string() + " touches snake site " + std::to_string(s));
                for (int s : p.comb_sites)
                    if (!commutes(l, PauliString::Z(m.n_sites, s))) rep.fail("logical " + l.to_string() + " touches comb site " + std::to_string(s));
            }
    }
    return rep;
}

} // namespace davies
