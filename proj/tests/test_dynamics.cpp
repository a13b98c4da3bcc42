// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "davies/dynamics.hpp"
#include "oracle.hpp"

using namespace davies;

namespace {

SparseMatrix sparse_of(const MatC& d) {
    SparseMatrix m;
    m.data = d.sparseView();
    return m;
}

} // namespace

TEST(Expmv, MatchesDenseExponential) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    MatC a(40, 40);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) a(i, j) = {nd(rng), nd(rng)};
    const VecC v = random_vector(rng, 40);
    for (double t : {0.05, 0.6, 2.0}) {
        const VecC ref = (t * a).exp() * v;
        EXPECT_LT((expmv(sparse_of(a), v, t) - ref).norm() / ref.norm(), 1e-8) << t;
    }
    EXPECT_EQ(expmv(sparse_of(a), v, 0.0), v);
    EXPECT_THROW(expmv(sparse_of(a), v, -1.0), std::invalid_argument);
}

TEST(Expmv, FullGeneratorAgainstDense) {
    const auto m = build_ising_ring(3, 1.0);
    const DaviesGenerator g(m, default_couplings(m), ThermalParams::from_beta_j(0.4));
    const auto basis = OperatorBasis::full(3);
    const SparseMatrix G = materialize(g.full_generator(), *basis, false);
    std::mt19937_64 rng(2);
    const VecC v = random_vector(rng, basis->dim());
    for (double t : {0.3, 4.0}) {
        const VecC ref = (t * G.dense()).exp() * v;
        EXPECT_LT((expmv(G, v, t) - ref).norm() / ref.norm(), 1e-9);
    }
}

TEST(Evolve, UnitalAndMeanPreserving) {
    const auto m = build_ising_ring(3, 1.0);
    const auto tp = ThermalParams::from_beta_j(0.5);
    const DaviesGenerator g(m, default_couplings(m), tp);
    const auto basis = OperatorBasis::full(3);
    const auto L = make_rep(g.dissipator(), basis, Space::Liouville, tp.beta, "L", false);
    const auto G = make_rep(g.full_generator(), basis, Space::Liouville, tp.beta, "G", false);
    const VecC one = basis->encode(PauliSum::identity(3));
    for (double t : {0.5, 7.0, 20.0}) {
        EXPECT_LT((evolve(L, one, t) - one).norm(), 1e-12);
        EXPECT_LT((evolve(G, one, t) - one).norm(), 1e-12);
    }
    const GibbsState gs = gibbs_state(m, tp.beta);
    const MatC gram = beta_gram(gs, *basis);
    std::mt19937_64 rng(6);
    const VecC a = random_vector(rng, basis->dim());
    const cplx mean = one.dot(gram * a);
    VecC x = a;
    for (int s = 0; s < 20; ++s) {
        x = evolve(L, x, 1.0);
        EXPECT_LT(std::abs(one.dot(gram * x) - mean), 1e-10);
    }
}

TEST(Autocorrelation, IsingLogicalZ) {
    const auto m = build_ising_ring(3, 1.0);
    const auto tp = ThermalParams::from_beta_j(0.25);
    const auto tr = autocorrelation(m, tp, default_couplings(m), m.logicals[0].Z);
    ASSERT_EQ(tr.t.size(), 60u);
    EXPECT_GE(tr.rate, tr.certified_gap * (1 - 1e-6));
    EXPECT_GE(tr.schwarz_slack, -1e-10);
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        EXPECT_GE(tr.values_dissipative[i], 0.0);
        if (i) {
            EXPECT_LE(tr.values_dissipative[i], tr.values_dissipative[i - 1] + 1e-14);
        }
        EXPECT_LE(tr.values_dissipative[i], std::exp(-tr.certified_gap * tr.t[i]) + 1e-12);
    }
}

TEST(Autocorrelation, StartsAtOneAndVanishes) {
    const auto m = build_ising_ring(3, 1.0);
    const auto tp = ThermalParams::from_beta_j(0.25);
    const auto cs = default_couplings(m);
    const double gap = certify(DaviesGenerator(m, cs, tp)).gap;
    const auto tr = autocorrelation(m, tp, cs, m.logicals[0].X, {0.0, 1.0, 50.0 / gap});
    EXPECT_NEAR(tr.values_dissipative[0], 1.0, 1e-14);
    EXPECT_NEAR(std::abs(tr.values_full[0] - 1.0), 0.0, 1e-14);
    EXPECT_LT(tr.values_dissipative[2], 1e-4);
    EXPECT_LT(std::abs(tr.values_full[2]), 1e-4);
}

TEST(Autocorrelation, SpectralSandwich) {
    const auto m = build_ising_ring(4, 1.0);
    const auto tp = ThermalParams::from_beta_j(0.5);
    const DaviesGenerator g(m, default_couplings(m), tp);
    const auto K = to_master(g);
    const double normL = oracle::hermitian_eigenvalues(K.rep.matrix.dense()).maxCoeff();
    for (const auto& A : {m.logicals[0].Z, m.logicals[0].X, PauliString::X(4, 2)}) {
        const auto tr = autocorrelation(m, tp, default_couplings(m), A);
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            if (tr.values_dissipative[i] < 1e-13) continue;
            EXPECT_GE(tr.values_dissipative[i], std::exp(-normL * tr.t[i]) * (1 - 1e-9));
            EXPECT_LE(tr.values_dissipative[i], std::exp(-tr.certified_gap * tr.t[i]) * (1 + 1e-9));
        }
        EXPECT_GE(tr.schwarz_slack, -1e-10) << A.to_string();
    }
}

TEST(Autocorrelation, ToricLogicalZ) {
    const auto m = build_toric_code(2, 1.0);
    const auto tp = ThermalParams::from_beta_j(0.25);
    const auto tr = autocorrelation(m, tp, default_couplings(m), m.logicals[0].Z);
    EXPECT_GE(tr.schwarz_slack, -1e-10);
    EXPECT_GE(tr.rate, std::exp(-2.0) / 3.0);
    EXPECT_GE(tr.rate, tr.certified_gap * (1 - 1e-6));
    const double normL = 2.0 * static_cast<double>(default_couplings(m).size());
    EXPECT_LE(tr.rate, normL);
}

TEST(Autocorrelation, ConservedObservableDoesNotDecay) {
    const auto m = build_ising_ring(3, 1.0);
    const auto tr = autocorrelation(m, ThermalParams::from_beta_j(0.25), couplings_from_letters(m, "x"),
                                    m.logicals[0].X);
    EXPECT_NEAR(tr.values_dissipative.back(), 1.0, 1e-9);
    EXPECT_THROW(relaxation_time(tr), DynamicsError);
}

TEST(Autocorrelation, InfiniteTemperatureRelaxation) {
    const auto m = build_ising_ring(3, 1.0);
    const auto tr = autocorrelation(m, ThermalParams::from_beta_j(0.0), default_couplings(m), PauliString::Z(3, 0));
    EXPECT_LE(relaxation_time(tr), 3.0);
}

TEST(Autocorrelation, RejectsNonzeroMean) {
    const auto m = build_ising_ring(3, 1.0);
    EXPECT_THROW(autocorrelation(m, ThermalParams::from_beta_j(0.5), default_couplings(m), m.stabilizers[0]),
                 DynamicsError);
}

TEST(Autocorrelation, Serialization) {
    const auto m = build_ising_ring(3, 1.0);
    const auto tr = autocorrelation(m, ThermalParams::from_beta_j(0.25), default_couplings(m), m.logicals[0].Z);
    std::ostringstream os;
    write_csv(os, tr);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "t,re_full,im_full,dissipative");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 61);
    const auto j = to_json(tr);
    EXPECT_NEAR(j["relaxation_time"].get<double>(), 1.0 / tr.rate, 1e-15);
}

TEST(Autocorrelation, GridAndFit) {
    const auto g = default_grid(0.5);
    EXPECT_NEAR(g.front(), 0.02, 1e-15);
    EXPECT_NEAR(g.back(), 60.0, 1e-12);
    std::vector<double> v;
    for (double t : g) v.push_back(std::exp(-0.7 * t));
    EXPECT_NEAR(fit_decay_rate(g, v), 0.7, 1e-10);
    EXPECT_THROW(default_grid(0.0), DynamicsError);
}
