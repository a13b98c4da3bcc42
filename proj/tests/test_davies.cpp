// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "davies/davies.hpp"
#include "oracle.hpp"

using namespace davies;

namespace {

MatC dense(const PauliSum& s) { return to_dense(s); }

double max_abs(const MatC& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

MatC random_dense(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> nd;
    MatC x(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) x(i, j) = {nd(rng), nd(rng)};
    return x;
}

PauliSum to_pauli(const MatC& x, int n) {
    PauliSum s(n);
    const std::uint64_t dim = 1ull << n;
    for (std::uint64_t k = 0; k < (1ull << (2 * n)); ++k) {
        const auto p = PauliString::from_key(n, k);
        cplx c = 0.0;
        for (std::uint64_t b = 0; b < dim; ++b)
            c += std::conj(column_entry(p, b)) * x(static_cast<int>(b ^ p.x), static_cast<int>(b));
        s.add(p, c / static_cast<double>(dim));
    }
    return s.canonicalize(1e-14);
}

/// Random operator: dense for small n, a sparse random Pauli sum otherwise.
MatC random_operator(std::mt19937_64& rng, int n) {
    if (n <= 4) return random_dense(rng, 1 << n);
    std::normal_distribution<double> nd;
    PauliSum s(n);
    for (int i = 0; i < 40; ++i) s.add(PauliString::from_key(n, rng() % (1ull << (2 * n))), {nd(rng), nd(rng)});
    return dense(s.canonicalize());
}

} // namespace

TEST(ThermalParams, ConstantIdentities) {
    for (double bj : {0.0, 0.1, 0.25, 0.5, 1.0, 3.0}) {
        const auto tp = ThermalParams::from_beta_j(bj, 1.3);
        EXPECT_NEAR(tp.h_plus() + tp.h_minus(), 2.0 * tp.h_zero, 1e-15);
        EXPECT_GT(tp.gamma(), 0.0);
        EXPECT_LE(tp.gamma(), 1.0);
        EXPECT_NEAR(tp.gamma(), std::exp(-2.0 * bj), 1e-15);
        EXPECT_NEAR(tp.rate(PauliString::X(3, 0), 4 * 1.3), 0.5 * tp.h_plus(), 1e-15);
        EXPECT_NEAR(std::exp(-tp.beta * 4 * 1.3) * tp.rate(PauliString::X(3, 0), 4 * 1.3), 0.5 * tp.h_minus(), 1e-15);
    }
    auto tp = ThermalParams::from_beta_j(0.25);
    tp.rate_table.push_back({"IXI", 0.0, 0.7});
    EXPECT_DOUBLE_EQ(tp.rate(PauliString::X(3, 1), 0.0), 0.7);
    EXPECT_DOUBLE_EQ(tp.rate(PauliString::X(3, 0), 0.0), 0.25);
}

TEST(Fourier, IsingBondComponents) {
    const auto m = build_ising_ring(4, 1.0);
    const auto jump = fourier_decompose(PauliString::X(4, 2), m);
    ASSERT_EQ(jump.components.size(), 3u);
    EXPECT_DOUBLE_EQ(jump.components[0].omega, -4.0);
    EXPECT_DOUBLE_EQ(jump.components[1].omega, 0.0);
    EXPECT_DOUBLE_EQ(jump.components[2].omega, 4.0);
    // a = sigma^x P^+, P^+ = (1 - Z_b)(1 - Z_b')/4 on the bonds touching site 2.
    const PauliSum I = PauliSum::identity(4), X = PauliSum(PauliString::X(4, 2));
    const PauliSum Zb(PauliString(4, 0, 0b0110)), Zc(PauliString(4, 0, 0b1100));
    const PauliSum Pp = (I - Zb) * (I - Zc) * PauliSum::identity(4, 0.25);
    const PauliSum P0 = (I - Zb * Zc) * PauliSum::identity(4, 0.5);
    EXPECT_LT(jump.components[2].op.distance(X * Pp), 1e-15);
    EXPECT_LT(jump.components[0].op.distance((X * Pp).adjoint()), 1e-15);
    EXPECT_LT(jump.components[1].op.distance(X * P0), 1e-15);
}

TEST(Fourier, CommutingCouplingHasOneComponent) {
    const auto m = build_ising_ring(5, 1.0);
    const auto jump = fourier_decompose(PauliString::Z(5, 1), m);
    ASSERT_EQ(jump.components.size(), 1u);
    EXPECT_EQ(jump.components[0].omega, 0.0);
    EXPECT_LT(jump.components[0].op.distance(PauliSum(PauliString::Z(5, 1))), 1e-15);
}

TEST(Fourier, SumRuleAndConjugation) {
    for (const auto& m : {build_ising_ring(4, 1.0), build_toric_code(2, 0.8), build_toric_code(3, 1.0)}) {
        std::vector<PauliString> cs = default_couplings(m);
        for (int j = 0; j < m.n_sites; ++j) cs.push_back(PauliString::Y(m.n_sites, j));
        for (const auto& s : cs) {
            const auto jump = fourier_decompose(s, m);
            EXPECT_LT(jump.sum().distance(PauliSum(s)), 1e-14);
            for (const auto& c : jump.components) {
                const auto* mirror = jump.at(-c.omega, 1e-12);
                ASSERT_NE(mirror, nullptr);
                EXPECT_LT(c.op.adjoint().distance(mirror->op), 1e-14);
            }
        }
    }
}

TEST(Fourier, ToricFrequenciesFromPlaquettes) {
    const auto m = build_toric_code(2, 1.0);
    for (int j = 0; j < m.n_sites; ++j) {
        const auto jump = fourier_decompose(PauliString::X(8, j), m);
        ASSERT_EQ(jump.components.size(), 3u);
        EXPECT_DOUBLE_EQ(jump.components.front().omega, -4.0);
        EXPECT_DOUBLE_EQ(jump.components.back().omega, 4.0);
    }
}

TEST(Fourier, ReconstructionAgainstDenseEvolution) {
    for (const auto& m : {build_ising_ring(3, 1.0), build_ising_ring(4, 0.6), build_toric_code(2, 1.0)}) {
        const MatC H = dense(m.hamiltonian());
        std::vector<PauliString> cs = default_couplings(m);
        cs.push_back(PauliString::Y(m.n_sites, 1));
        for (const auto& s : cs) {
            const auto jump = fourier_decompose(s, m);
            for (double t : {0.1, 0.7, 1.3}) {
                const double tt = t / m.J;
                const MatC U = (MatC(H * cplx{0.0, tt})).exp();
                const MatC direct = U * dense(PauliSum(s)) * U.adjoint();
                EXPECT_LT(max_abs(direct - dense(jump.evolved(tt))), 1e-10);
            }
            // Components agree with the dense spectral projection.
            for (const auto& dc : oracle::fourier(H, dense(PauliSum(s)))) {
                const auto* c = jump.at(dc.omega, 1e-8);
                ASSERT_NE(c, nullptr) << dc.omega;
                EXPECT_LT(max_abs(dense(c->op) - dc.op), 1e-10);
            }
        }
    }
}

TEST(Fourier, RejectsMismatchedCoupling) {
    EXPECT_THROW(fourier_decompose(PauliString::X(5, 0), build_ising_ring(4, 1.0)), GeneratorError);
}

TEST(Generator, MatchesDenseOracle) {
    std::mt19937_64 rng(17);
    struct Case {
        ModelSpec m;
        std::vector<PauliString> cs;
        double bj;
    };
    const auto ising = build_ising_ring(3, 1.0);
    const auto toric = build_toric_code(2, 1.0);
    for (const auto& c : {Case{ising, default_couplings(ising), 0.3}, Case{ising, default_couplings(ising), 0.0},
                          Case{toric, default_couplings(toric), 0.25}}) {
        const auto tp = ThermalParams::from_beta_j(c.bj, c.m.J);
        const DaviesGenerator g(c.m, c.cs, tp);
        const auto og = oracle::dense_generator(c.m, c.cs, tp.beta);
        const SuperOp L = g.dissipator(), G = g.full_generator();
        const MatC H = dense(c.m.hamiltonian());
        for (int s = 0; s < (c.m.n_sites > 4 ? 1 : 3); ++s) {
            const MatC X = random_operator(rng, c.m.n_sites);
            const PauliSum xp = to_pauli(X, c.m.n_sites);
            EXPECT_LT(max_abs(dense(L.apply(xp)) - og.apply(X)), 1e-11);
            const MatC full = og.apply(X) + cplx{0.0, 1.0} * (H * X - X * H);
            EXPECT_LT(max_abs(dense(G.apply(xp)) - full), 1e-11);
        }
    }
}

TEST(Generator, PositiveSemidefiniteForIsingN3) {
    const auto m = build_ising_ring(3, 1.0);
    for (double bj : {0.0, 0.5}) {
        const auto rep = build_generator(m, default_couplings(m), ThermalParams::from_beta_j(bj));
        const auto ev = oracle::sorted_real_eigenvalues(rep.matrix.dense());
        const double norm = ev.cwiseAbs().maxCoeff();
        EXPECT_GE(ev[0], -1e-10 * norm);
        EXPECT_LT(std::abs(ev[0]), 1e-10 * norm);
        EXPECT_GT(ev[1], 1e-3); // ergodic: simple kernel
    }
}

TEST(Generator, PlainHermitianAtInfiniteTemperature) {
    const auto m = build_ising_ring(3, 1.0);
    const auto rep = build_generator(m, default_couplings(m), ThermalParams::from_beta_j(0.0));
    EXPECT_TRUE(rep.matrix.hermitian);
    EXPECT_LT(rep.matrix.hermiticity_defect(), 1e-14);
    const auto gs = gibbs_state(m, 0.0);
    EXPECT_LT(gs.rho.distance(PauliSum::identity(3, 0.125)), 1e-15);
    EXPECT_LT(detailed_balance_residual(rep, gs, 20), 1e-14);
}

TEST(Generator, ErgodicKernelAtZeroBeta) {
    const auto m = build_ising_ring(3, 1.0);
    std::vector<PauliString> cs;
    for (int j = 0; j < 3; ++j) cs.push_back(PauliString::X(3, j));
    cs.push_back(PauliString::Y(3, 1));
    for (int j = 0; j < 3; ++j) cs.push_back(PauliString::Z(3, j));
    const auto rep = build_generator(m, cs, ThermalParams::from_beta_j(0.0));
    const auto ev = oracle::hermitian_eigenvalues(rep.matrix.dense());
    int kernel = 0;
    for (int i = 0; i < ev.size(); ++i) kernel += std::abs(ev[i]) < 1e-10 * ev.maxCoeff();
    EXPECT_EQ(kernel, 1);
    // The kernel vector is the identity.
    const VecC one = rep.basis->encode(PauliSum::identity(3));
    EXPECT_LT((rep.matrix.data * one).norm(), 1e-14);
}

TEST(Generator, DetailedBalanceIsing) {
    for (int N : {3, 4}) {
        const auto m = build_ising_ring(N, 1.0);
        const auto tp = ThermalParams::from_beta_j(0.5);
        const auto rep = build_generator(m, default_couplings(m), tp);
        EXPECT_LT(detailed_balance_residual(rep, gibbs_state(m, tp.beta), 40), 1e-12) << N;
        EXPECT_LT(stationarity_residual(rep, gibbs_state(m, tp.beta), 50), 1e-12) << N;
    }
}

TEST(Generator, DetailedBalanceDenseTrace) {
    // Same property through explicit matrices: tr(rho Y^dag L X) = tr(rho (L Y)^dag X).
    const auto m = build_ising_ring(3, 1.0);
    const double beta = 0.5;
    const auto og = oracle::dense_generator(m, default_couplings(m), beta);
    const MatC rho = oracle::gibbs(dense(m.hamiltonian()), beta);
    std::mt19937_64 rng(4);
    for (int s = 0; s < 20; ++s) {
        const MatC X = random_dense(rng, 8), Y = random_dense(rng, 8);
        const cplx a = (rho * Y.adjoint() * og.apply(X)).trace();
        const cplx b = (rho * og.apply(Y).adjoint() * X).trace();
        EXPECT_LT(std::abs(a - b), 1e-12 * std::abs((rho * X.adjoint() * X).trace()) * 10);
        EXPECT_LT(std::abs((rho * og.apply(X)).trace()), 1e-12 * X.norm());
    }
}

TEST(Generator, DetailedBalanceToricBlocks) {
    const auto m = build_toric_code(2, 1.0);
    const auto tp = ThermalParams::from_beta_j(0.25);
    const DaviesGenerator g(m, default_couplings(m), tp);
    const SyndromeFrame fr(m);
    const auto gs = gibbs_state(m, tp.beta);
    std::mt19937_64 rng(9);
    for (int b = 0; b < 6; ++b) {
        const std::uint64_t syn = b == 0 ? 0 : rng() % fr.block_count();
        const auto rep = build_generator(g, fr.class_basis(syn));
        EXPECT_LT(detailed_balance_residual(rep, gs, 10), 1e-12);
        EXPECT_LT(stationarity_residual(rep, gs, 10), 1e-12);
    }
}

TEST(Generator, DissipativityIdentity) {
    const auto m = build_ising_ring(3, 1.0);
    const auto tp = ThermalParams::from_beta_j(0.3);
    const DaviesGenerator g(m, default_couplings(m), tp);
    const auto gs = gibbs_state(m, tp.beta);
    const auto basis = OperatorBasis::full(3);
    for (std::size_t i = 0; i < g.channels().size(); ++i)
        EXPECT_LT(dissipativity_identity_check(g, i, gs, basis, 5), 1e-12) << i;
    // S = sigma^x on site 2 at omega = 4J is among them.
    bool found = false;
    for (const auto& c : g.channels())
        found |= g.couplings()[static_cast<std::size_t>(c.coupling)] == PauliString::X(3, 2) && c.omega == 4.0;
    EXPECT_TRUE(found);
}

TEST(Generator, DissipativityOnLogicalZ) {
    // -<Z, L_x Z>_beta = 2 <1, h_+ P^+ + h_- P^- + h_0 P^0>_beta for sigma^x on the site of Z.
    const auto m = build_ising_ring(3, 1.0);
    for (double bj : {0.0, 0.3, 1.0}) {
        const auto tp = ThermalParams::from_beta_j(bj);
        const DaviesGenerator g(m, {PauliString::X(3, 0)}, tp);
        const PauliSum Z(PauliString::Z(3, 0));
        const PauliSum LZ = g.dissipator().apply(Z);
        const MatC rho = oracle::gibbs(dense(m.hamiltonian()), tp.beta);
        const cplx lhs = -(rho * dense(Z) * dense(LZ)).trace();
        const PauliSum I = PauliSum::identity(3);
        const PauliSum Za(PauliString(3, 0, 0b101)), Zb(PauliString(3, 0, 0b011));
        const PauliSum Pp = (I - Za) * (I - Zb) * PauliSum::identity(3, 0.25);
        const PauliSum Pm = (I + Za) * (I + Zb) * PauliSum::identity(3, 0.25);
        const PauliSum P0 = (I - Za * Zb) * PauliSum::identity(3, 0.5);
        auto ev = [&](const PauliSum& p) { return std::real((rho * dense(p)).trace()); };
        const double G = tp.h_plus() * ev(Pp) + tp.h_minus() * ev(Pm) + tp.h_zero * ev(P0);
        EXPECT_NEAR(lhs.real(), 2.0 * G, 1e-12);
        EXPECT_NEAR(lhs.imag(), 0.0, 1e-12);
        EXPECT_GE(lhs.real(), 2.0 * tp.h_minus() - 1e-12);
    }
}

TEST(Generator, IdentityIsInvariant) {
    const auto m = build_toric_code(2, 1.0);
    const DaviesGenerator g(m, default_couplings(m), ThermalParams::from_beta_j(0.25));
    EXPECT_TRUE(g.dissipator().apply(PauliSum::identity(8)).empty());
    EXPECT_TRUE(g.full_generator().apply(PauliSum::identity(8)).empty());
}

TEST(Generator, HamiltonianPartCommutesWithChannels) {
    const auto m = build_ising_ring(3, 1.0);
    const DaviesGenerator g(m, default_couplings(m), ThermalParams::from_beta_j(0.4));
    const auto basis = OperatorBasis::full(3);
    const MatC D = materialize(g.hamiltonian_part(), *basis, false).dense();
    for (std::size_t i = 0; i < g.channels().size(); ++i) {
        const MatC Li = materialize(g.channel_dissipator(i), *basis, false).dense();
        EXPECT_LT(max_abs(D * Li - Li * D), 1e-10);
    }
}

TEST(Generator, SemigroupRelaxesToGibbsMean) {
    const auto m = build_ising_ring(3, 1.0);
    const auto tp = ThermalParams::from_beta_j(0.25);
    const auto rep = build_generator(m, default_couplings(m), tp);
    const MatC Lt = MatC(-rep.matrix.dense() * 300.0).exp();
    const MatC rho = oracle::gibbs(dense(m.hamiltonian()), tp.beta);
    std::mt19937_64 rng(21);
    for (int s = 0; s < 5; ++s) {
        const MatC X = random_dense(rng, 8);
        const VecC x = rep.basis->encode(to_pauli(X, 3));
        const MatC Xt = dense(rep.basis->decode(Lt * x));
        EXPECT_LT(max_abs(Xt - (rho * X).trace() * MatC::Identity(8, 8)), 1e-8);
    }
}

TEST(Generator, ProvenanceRecordsConstants) {
    const auto m = build_ising_ring(3, 1.0);
    const DaviesGenerator g(m, default_couplings(m), ThermalParams::from_beta_j(0.5));
    const auto j = g.provenance();
    EXPECT_EQ(j["couplings"].size(), 9u);
    EXPECT_NEAR(j["gamma"].get<double>(), std::exp(-1.0), 1e-15);
    EXPECT_EQ(j["model"], "ising");
}
