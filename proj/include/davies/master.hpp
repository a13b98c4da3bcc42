// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file master.hpp
 * @brief Master Hamiltonian K and its block decomposition.
 *
 * K is -L transported by X -> X rho^{1/2}: K(Y) = -L(Y rho^{-1/2}) rho^{1/2}.
 * Per channel, with eta = e^{-beta omega / 2},
 *
 *   k(Y) = r [A^dag A Y + Y A^dag A + eta^2 (A A^dag Y + Y A A^dag)
 *             - 2 eta (A^dag Y A + A Y A^dag)],
 *
 * i.e. k = r (A_L - eta A_R)^*(A_L - eta A_R) + r (A^dag_R - eta A^dag_L)^*(A^dag_R - eta A^dag_L)
 * with X_L Y = X Y and X_R Y = Y X.
 */

#pragma once

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "davies/davies.hpp"

namespace davies {

struct MasterHamiltonian {
    SuperOperatorRep rep;
    VecC kernel_witness; ///< rho^{1/2} in the basis; empty when rho^{1/2} lies outside it
    std::vector<SuperOp> components;
};

/// K on an invariant basis (full space for n <= 8 when basis is null).
inline MasterHamiltonian to_master(const DaviesGenerator& g, BasisPtr basis = nullptr, bool keep_components = false) {
    if (!basis) {
        if (g.n() > 8) throw GeneratorError("full operator space limited to 8 sites; use a block basis");
        basis = OperatorBasis::full(g.n());
    }
    MasterHamiltonian mh;
    mh.rep = make_rep(g.master(), basis, Space::HilbertSchmidt, g.params().beta, "K", true);
    if (g.model().stabilizers.size() <= 22) {
        const PauliSum rs = gibbs_state(g.model(), g.params().beta).rho_sqrt;
        bool inside = true;
        for (const auto& t : rs.terms()) inside &= basis->index(t.op.key()) >= 0;
        if (inside) mh.kernel_witness = basis->encode(rs);
    }
    if (keep_components)
        for (std::size_t i = 0; i < g.channels().size(); ++i) mh.components.push_back(g.master_component(i));
    return mh;
}

/// Numerical transport of a materialized -L: K = R (-L) R^{-1} with R = right multiplication by rho^{1/2}.
/// Dense; intended for cross-checks on small bases.
inline MatC transport_to_master(const SuperOperatorRep& minus_l, const GibbsState& gs) {
    if (!minus_l.beta) throw GeneratorError("master transform needs beta metadata");
    if (minus_l.space != Space::Liouville) throw GeneratorError("master transform expects a Liouville-space rep");
    const MatC R = materialize(right_multiplication(gs.rho_sqrt), *minus_l.basis, false, 1).dense();
    return R * minus_l.matrix.dense() * R.inverse();
}

struct BlockLabel {
    std::uint64_t syndrome = 0;
    std::vector<int> flip_pattern; ///< stabilizers (model indices) flipped between bra and ket
    std::string sector;            ///< logical letters, one per logical qubit
    std::int64_t dimension = 0;

    std::string to_string() const {
        std::string s = "sector " + sector + " flips {";
        for (std::size_t i = 0; i < flip_pattern.size(); ++i) s += (i ? "," : "") + std::to_string(flip_pattern[i]);
        return s + "}";
    }
};

inline BlockLabel block_label(const SyndromeFrame& fr, std::uint64_t syn) {
    return {syn, fr.flipped_stabilizers(syn), fr.sector_name(syn), static_cast<std::int64_t>(fr.block_dim())};
}

struct Block {
    BlockLabel label;
    SuperOperatorRep rep;
    std::optional<double> gap;
};

/// K restricted to one syndrome class.
inline Block master_block(const DaviesGenerator& g, const SyndromeFrame& fr, std::uint64_t syn) {
    if (fr.block_dim() > (std::uint64_t{1} << 20)) throw GeneratorError("block dimension exceeds 2^20");
    Block b{block_label(fr, syn), {}, std::nullopt};
    b.rep = make_rep(g.master(), fr.class_basis(syn), Space::HilbertSchmidt, g.params().beta, "K block", true);
    return b;
}

/// Syndrome classes of the model, in increasing syndrome order.
inline std::vector<std::uint64_t> all_syndromes(const SyndromeFrame& fr) {
    if (fr.block_count() > (std::uint64_t{1} << 24)) throw GeneratorError("too many blocks to enumerate");
    std::vector<std::uint64_t> out(fr.block_count());
    for (std::uint64_t s = 0; s < out.size(); ++s) out[s] = s;
    return out;
}

/// All blocks of K; their direct sum is unitarily equal to K on the full space.
inline std::vector<Block> block_decompose(const DaviesGenerator& g) {
    const SyndromeFrame fr(g.model());
    std::vector<Block> out;
    for (std::uint64_t s : all_syndromes(fr)) out.push_back(master_block(g, fr, s));
    return out;
}

inline nlohmann::json block_inventory(const std::vector<Block>& blocks) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& b : blocks) {
        nlohmann::json e{{"label", b.label.to_string()},
                         {"syndrome", b.label.syndrome},
                         {"sector", b.label.sector},
                         {"flip_pattern", b.label.flip_pattern},
                         {"dimension", b.label.dimension}};
        if (b.gap) e["gap"] = *b.gap;
        j.push_back(e);
    }
    return j;
}

/// Block V . Y of the sigma^x part of the toric-code generator, with
/// V = a_s F_s Z_nu X_mu and Y in the plaquette algebra generated by the
/// plaquettes and sigma^x on the snake.
struct KitaevXBlock {
    std::uint64_t star_mask = 0; ///< a_s: subset of stars (bit = star index)
    std::vector<int> comb_flips;  ///< F_s: sigma^z on these comb sites
    unsigned nu = 0;              ///< bit k: include logical Z_{k+1}
    unsigned mu = 0;              ///< bit k: include logical X_{k+1}
};

struct SignFlipResult {
    SuperOperatorRep restricted;   ///< L'_x on the plaquette-algebra basis
    SuperOperatorRep projected;    ///< L_x on the V . Y basis
    std::vector<int> flipped_sites; ///< supp(F_s) symmetric difference supp(Z_nu)
    double residual = 0.0;         ///< max |restricted - phase-corrected projected|
};

inline PauliString kitaev_v(const ModelSpec& m, const KitaevXBlock& blk) {
    const int n = m.n_sites;
    PauliString v = PauliString::identity(n);
    const int L2 = m.size * m.size;
    for (int s = 0; s < L2; ++s)
        if (blk.star_mask >> s & 1) v = v * m.stabilizers[static_cast<std::size_t>(s)];
    for (int site : blk.comb_flips) v = v * PauliString::Z(n, site);
    for (int k = 0; k < 2; ++k) {
        if (blk.nu >> k & 1) v = v * m.logicals[static_cast<std::size_t>(k)].Z;
        if (blk.mu >> k & 1) v = v * m.logicals[static_cast<std::size_t>(k)].X;
    }
    return v;
}

/// Keys of the plaquette algebra: products of L^2 - 1 plaquettes and sigma^x on the snake.
inline std::vector<std::uint64_t> plaquette_algebra_keys(const ModelSpec& m) {
    if (m.kind != ModelKind::Toric || !m.partition) throw GeneratorError("plaquette algebra needs a toric model");
    const int n = m.n_sites, L2 = m.size * m.size;
    std::vector<PauliString> gens;
    for (int p = 0; p < L2 - 1; ++p) gens.push_back(m.stabilizers[static_cast<std::size_t>(L2 + p)]);
    for (int s : m.partition->snake_sites) gens.push_back(PauliString::X(n, s));
    if (gens.size() > 40) throw GeneratorError("plaquette algebra too large");
    std::vector<std::uint64_t> keys;
    keys.reserve(std::size_t{1} << gens.size());
    PauliString cur = PauliString::identity(n);
    keys.push_back(cur.key());
    for (std::uint64_t g = 1; g < (std::uint64_t{1} << gens.size()); ++g) {
        cur = (cur * gens[static_cast<std::size_t>(std::countr_zero(g))]).unsigned_form();
        keys.push_back(cur.key());
    }
    return keys;
}

/// Restricted sigma^x generator with sign-flipped sandwich terms on
/// supp(F_s) symmetric difference supp(Z_nu), compared with the direct projection.
inline SignFlipResult sign_flip_restriction(const DaviesGenerator& g, const KitaevXBlock& blk) {
    const ModelSpec& m = g.model();
    if (m.kind != ModelKind::Toric) throw GeneratorError("sign-flip restriction applies to the toric code");
    const int n = m.n_sites;
    for (int s : blk.comb_flips)
        if (std::find(m.partition->comb_sites.begin(), m.partition->comb_sites.end(), s) == m.partition->comb_sites.end())
            throw GeneratorError("F_s may only act on comb sites");
    const PauliString v = kitaev_v(m, blk);
    std::uint64_t zmask = 0;
    for (int s : blk.comb_flips) zmask ^= 1ull << s;
    for (int k = 0; k < 2; ++k)
        if (blk.nu >> k & 1) zmask ^= m.logicals[static_cast<std::size_t>(k)].Z.z;

    SignFlipResult res;
    for (int j = 0; j < n; ++j)
        if (zmask >> j & 1) res.flipped_sites.push_back(j);

    SuperOp restricted(n), direct(n);
    for (std::size_t i = 0; i < g.channels().size(); ++i) {
        const PauliString& s = g.couplings()[static_cast<std::size_t>(g.channels()[i].coupling)];
        if (s.z != 0) continue;
        if (std::popcount(s.x) != 1) throw GeneratorError("x-type restriction expects single-site sigma^x couplings");
        const double sign = (s.x & zmask) ? -1.0 : 1.0;
        if (!commutes(s, v) != ((s.x & zmask) != 0)) throw GeneratorError("V does not have the expected Z-type part");
        restricted.add(g.channel_dissipator(i, sign));
        direct.add(g.channel_dissipator(i));
    }
    restricted.canonicalize();
    direct.canonicalize();

    const auto ykeys = plaquette_algebra_keys(m);
    std::vector<std::uint64_t> vkeys;
    std::vector<cplx> phase; // b_k = phase_k * V * Y_k
    for (auto k : ykeys) {
        const PauliString vy = v * PauliString::from_key(n, k);
        vkeys.push_back(vy.key());
        phase.push_back(std::conj(vy.coefficient()));
    }
    res.restricted = make_rep(restricted, OperatorBasis::from_keys(n, ykeys, "plaquette algebra"), Space::Liouville,
                              g.params().beta, "L'_x", false);
    res.projected = make_rep(direct, OperatorBasis::from_keys(n, vkeys, "V . plaquette algebra"), Space::Liouville,
                             g.params().beta, "L_x block", false);
    const MatC a = res.restricted.matrix.dense(), b = res.projected.matrix.dense();
    double worst = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k)
            worst = std::max(worst, std::abs(a(i, k) - b(i, k) * phase[static_cast<std::size_t>(i)] /
                                                         phase[static_cast<std::size_t>(k)]));
    res.residual = worst;
    return res;
}

} // namespace davies
