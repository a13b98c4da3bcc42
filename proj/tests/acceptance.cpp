// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "davies/commutant.hpp"
#include "davies/dynamics.hpp"

using namespace davies;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    const char* name;
    double budget; ///< seconds
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double gamma_beta_j(double g) { return -0.5 * std::log(g); }

const double kGammas[] = {0.2, 0.5, 1.0};

VecR hermitian_eigenvalues(const MatC& m) {
    return Eigen::SelfAdjointEigenSolver<MatC>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

Outcome projector_identity() {
    double dev = 0;
    for (double g : kGammas) {
        const Eigen::SelfAdjointEigenSolver<MatR> es(bond_pair_block(g));
        for (int i = 0; i < 4; ++i) {
            const double v = es.eigenvalues()[i];
            dev = std::max(dev, std::min(std::abs(v), std::abs(v - 1.0)));
        }
    }
    return {dev < 1e-12, "max deviation from {0,1} " + fmt("%.2e", dev)};
}

Outcome two_pair_eigenvalues() {
    double dev = 0;
    for (double g : kGammas) {
        const double g2 = g * g;
        const std::vector<double> expect{0.0, 2.0, (3 + g2) / (2 * (1 + g2)), (1 + 3 * g2) / (2 * (1 + g2))};
        const VecR ev = hermitian_eigenvalues(abelian_chain_hamiltonian(3, ThermalParams::from_beta_j(gamma_beta_j(g)))
                                                  .matrix.dense());
        // Every eigenvalue is in the list and every list value occurs.
        for (int i = 0; i < ev.size(); ++i) {
            double best = 1e300;
            for (double e : expect) best = std::min(best, std::abs(ev[i] - e));
            dev = std::max(dev, best);
        }
        for (double e : expect) dev = std::max(dev, (ev.array() - e).abs().minCoeff());
    }
    return {dev < 1e-12, "max deviation " + fmt("%.2e", dev)};
}

Outcome chain_bound() {
    double slack = 1e300;
    int worst_n = 0;
    double worst_g = 0;
    bool ok = true;
    for (double g : kGammas) {
        const ThermalParams tp = ThermalParams::from_beta_j(gamma_beta_j(g));
        for (int N = 3; N <= 12; ++N) {
            const GapReport r = gap(abelian_chain_hamiltonian(N, tp), std::nullopt, abelian_chain_kernel(N, g));
            ok &= r.kernel_dim == 2 && r.converged;
            const double s = r.gap - g * g / (1 + g * g);
            if (s < slack) slack = s, worst_n = N, worst_g = g;
        }
    }
    return {ok && slack > 0, "min slack " + fmt("%.6f", slack) + " at N=" + std::to_string(worst_n) +
                                 " gamma=" + fmt("%.1f", worst_g)};
}

Outcome ising_theorem() {
    double margin = 1e300;
    bool ok = true;
    std::string where;
    for (double bj : {0.0, 0.25, 0.5})
        for (int N = 3; N <= 7; ++N) {
            const ModelSpec m = build_ising_ring(N, 1.0);
            const GapReport r = certify(DaviesGenerator(m, default_couplings(m), ThermalParams::from_beta_j(bj)));
            ok &= r.converged && r.kernel_dim == 1;
            const double rel = r.gap / r.analytic_bound;
            if (rel < margin) margin = rel, where = "N=" + std::to_string(N) + " betaJ=" + fmt("%.2f", bj);
        }
    return {ok && margin >= 1.0, "min gap/bound " + fmt("%.3f", margin) + " at " + where};
}

Outcome toric_theorem() {
    bool ok = true;
    std::ostringstream os;
    const ModelSpec m = build_toric_code(2, 1.0);
    double diff = 0;
    for (double bj : {0.0, 0.25}) {
        const DaviesGenerator g(m, default_couplings(m), ThermalParams::from_beta_j(bj));
        CertifyOptions blocks, full;
        blocks.path = CertifyPath::Blocks;
        full.path = CertifyPath::Full;
        full.solver.force_iterative = true;
        const GapReport rb = certify(g, blocks), rf = certify(g, full);
        ok &= rb.certified() && rb.kernel_dim == 1 && rf.kernel_dim == 1 && rf.converged;
        diff = std::max(diff, std::abs(rb.gap - rf.gap));
        os << "betaJ=" << bj << " gap " << fmt("%.6f", rb.gap) << " >= " << fmt("%.6f", rb.analytic_bound) << "; ";
    }
    os << "|blocks - full iterative| " << fmt("%.1e", diff);
    return {ok && diff < 1e-8, os.str()};
}

Outcome unitary_equivalence() {
    double dev = 0;
    for (double bj : {0.0, 0.5}) {
        const ModelSpec m = build_ising_ring(3, 1.0);
        const DaviesGenerator g(m, default_couplings(m), ThermalParams::from_beta_j(bj));
        VecR k = hermitian_eigenvalues(to_master(g).rep.matrix.dense());
        const Eigen::ComplexEigenSolver<MatC> es(build_generator(g).matrix.dense());
        VecR l = es.eigenvalues().real();
        std::sort(k.data(), k.data() + k.size());
        std::sort(l.data(), l.data() + l.size());
        dev = std::max({dev, (k - l).cwiseAbs().maxCoeff(), es.eigenvalues().imag().cwiseAbs().maxCoeff()});
    }
    return {dev < 1e-10, "max spectral deviation " + fmt("%.2e", dev)};
}

Outcome structural_identities() {
    double db = 0, dis = 0, fr = 0, st = 0;
    for (const ModelSpec& m : {build_ising_ring(3, 1.0), build_ising_ring(4, 1.0), build_toric_code(2, 1.0)}) {
        const auto cs = default_couplings(m);
        const MatC H = to_dense(m.hamiltonian());
        for (const auto& s : cs) {
            const auto jump = fourier_decompose(s, m);
            for (double t : {0.1, 0.7, 1.3}) {
                const MatC U = (MatC(H * cplx{0.0, t})).exp();
                const MatC direct = U * to_dense(PauliSum(s)) * U.adjoint();
                fr = std::max(fr, (direct - to_dense(jump.evolved(t))).cwiseAbs().maxCoeff());
            }
        }
        for (double bj : {0.25, 0.5}) {
            const ThermalParams tp = ThermalParams::from_beta_j(bj);
            const DaviesGenerator g(m, cs, tp);
            const GibbsState gs = gibbs_state(m, tp.beta);
            const SyndromeFrame frame(m);
            std::mt19937_64 rng(11);
            std::vector<std::uint64_t> syns{0};
            for (int k = 0; k < 3; ++k) syns.push_back(1 + rng() % (frame.block_count() - 1));
            for (auto syn : syns) {
                const auto basis = frame.class_basis(syn);
                const auto rep = build_generator(g, basis);
                db = std::max(db, detailed_balance_residual(rep, gs, 3, 5 + syn));
                for (std::size_t c = 0; c < g.channels().size(); ++c)
                    dis = std::max(dis, dissipativity_identity_check(g, c, gs, basis, 1, 9 + syn));
                if (syn == 0) st = std::max(st, stationarity_residual(rep, gs, 3, 13));
            }
        }
    }
    std::ostringstream os;
    os << "detailed balance " << fmt("%.1e", db) << ", dissipativity " << fmt("%.1e", dis) << ", Fourier "
       << fmt("%.1e", fr) << ", stationarity " << fmt("%.1e", st);
    return {db < 1e-12 && dis < 1e-12 && fr < 1e-10 && st < 1e-12, os.str()};
}

Outcome ergodicity() {
    bool ok = true;
    int cases = 0;
    auto kernel_of = [](const DaviesGenerator& g) {
        std::int64_t k = 0;
        for (const auto& b : block_gaps(g)) k += b.kernel_dim;
        return k;
    };
    for (int N : {3, 4, 5}) {
        const ModelSpec m = build_ising_ring(N, 1.0);
        for (const std::string set : {"default", "x", "y", "z", "xy", "xz", "yz"}) {
            const auto cs = couplings_from_letters(m, set);
            const auto k = kernel_of(DaviesGenerator(m, cs, ThermalParams::from_beta_j(0.3)));
            ok &= static_cast<std::uint64_t>(k) == commutant_dimension(cs, m.hamiltonian());
            if (set == "default") ok &= k == 1;
            ++cases;
        }
    }
    const ModelSpec t = build_toric_code(2, 1.0);
    for (const std::string set : {"default", "x", "z"}) {
        const auto cs = couplings_from_letters(t, set);
        const auto k = kernel_of(DaviesGenerator(t, cs, ThermalParams::from_beta_j(0.25)));
        ok &= static_cast<std::uint64_t>(k) == commutant_dimension(cs, t.hamiltonian());
        if (set == "default") ok &= k == 1;
        ++cases;
    }
    return {ok, std::to_string(cases) + " coupling sets, kernel = commutant dimension in each"};
}

Outcome schwarz() {
    double slack = 1e300;
    const ModelSpec ising = build_ising_ring(3, 1.0), toric = build_toric_code(2, 1.0);
    for (double bj : {0.0, 0.25, 0.5}) {
        const ThermalParams tp = ThermalParams::from_beta_j(bj);
        for (const auto& A : {ising.logicals[0].Z, ising.logicals[0].X})
            slack = std::min(slack, autocorrelation(ising, tp, default_couplings(ising), A).schwarz_slack);
        slack = std::min(slack, autocorrelation(toric, tp, default_couplings(toric), toric.logicals[0].Z).schwarz_slack);
    }
    return {slack >= -1e-10, "min slack " + fmt("%.2e", slack) + " over 60-point grids"};
}

Outcome no_memory() {
    const double bj = 0.25, cap = 3.0 * std::exp(8.0 * bj);
    double lo = 1e300, hi = 0;
    for (int N = 3; N <= 6; ++N) {
        const ModelSpec m = build_ising_ring(N, 1.0);
        const double tau =
            relaxation_time(autocorrelation(m, ThermalParams::from_beta_j(bj), default_couplings(m), m.logicals[0].Z));
        lo = std::min(lo, tau);
        hi = std::max(hi, tau);
    }
    const ModelSpec t = build_toric_code(2, 1.0);
    const double tt =
        relaxation_time(autocorrelation(t, ThermalParams::from_beta_j(bj), default_couplings(t), t.logicals[0].Z));
    std::ostringstream os;
    os << "Ising tau in [" << fmt("%.4f", lo) << ", " << fmt("%.4f", hi) << "] (spread " << fmt("%.1f", 100 * (hi / lo - 1))
       << "%), toric tau " << fmt("%.4f", tt) << ", cap " << fmt("%.3f", cap);
    return {hi / lo - 1 < 0.25 && hi <= cap && tt <= cap, os.str()};
}

MatC random_psd(std::mt19937_64& rng, int dim, int rank) {
    std::normal_distribution<double> nd;
    MatC g(dim, rank);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = {nd(rng), nd(rng)};
    return g * g.adjoint();
}

SparseMatrix from_dense(const MatC& d) {
    SparseMatrix m;
    m.data = d.sparseView();
    m.hermitian = true;
    return m;
}

Outcome lemma_checkers() {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    int bad2 = 0, bad3 = 0;
    double worst2 = 1e300, worst3 = 1e300;
    for (int t = 0; t < 1000; ++t) {
        const int dim = 2 + static_cast<int>(rng() % 7);
        const MatC A = random_psd(rng, dim, 1 + static_cast<int>(rng() % (dim - 1)));
        const MatC B = random_psd(rng, dim, 1 + static_cast<int>(rng() % dim));
        try {
            const Lemma2 r = lemma2_bound(from_dense(A), from_dense(B));
            bad2 += !r.holds;
            worst2 = std::min(worst2, r.min_eig - r.bound);
        } catch (const SpectralError&) {
            --t; // B without positive spectrum; draw again
        }
    }
    for (int t = 0; t < 1000; ++t) {
        const double y = ud(rng), z = ud(rng), u = 0.01 + 2 * ud(rng);
        const cplx x = std::polar(std::sqrt(y * z) * ud(rng), 6.283185307179586 * ud(rng));
        const Lemma3 r = lemma3_bound(y, x, z, u);
        bad3 += !r.holds;
        worst3 = std::min(worst3, r.min_eig - r.bound);
    }
    // Hand-derived examples.
    MatC a = MatC::Zero(2, 2), b(2, 2);
    a(1, 1) = 1;
    b << 0.5, 0.5, 0.5, 0.5;
    const Lemma2 e2 = lemma2_bound(from_dense(a), from_dense(b));
    const Lemma3 e3a = lemma3_bound(1, 0, 0, 1), e3b = lemma3_bound(1, 1, 1, 2);
    const bool examples = std::abs(e2.bound - 0.25) < 1e-9 && std::abs(e2.min_eig - (1 - 1 / std::sqrt(2.0))) < 1e-12 &&
                          std::abs(e3a.bound - 0.5) < 1e-15 && std::abs(e3b.bound - 0.5) < 1e-14 &&
                          std::abs(e3b.min_eig - (2 - std::sqrt(2.0))) < 1e-14;
    std::ostringstream os;
    os << "lemma2 violations " << bad2 << " (min slack " << fmt("%.2e", worst2) << "), lemma3 violations " << bad3
       << " (min slack " << fmt("%.2e", worst3) << "), examples " << (examples ? "ok" : "wrong");
    return {bad2 == 0 && bad3 == 0 && examples, os.str()};
}

} // namespace

int main() {
    const Criterion criteria[] = {
        {"1 projector identity of the bond-pair block", 1, projector_identity},
        {"2 eigenvalue list of k12 + k23", 1, two_pair_eigenvalues},
        {"3 abelian-chain bound gamma^2/(1+gamma^2), N = 3..12", 60, chain_bound},
        {"4 Ising ring gap >= e^{-8 betaJ}/3, N = 3..7", 600, ising_theorem},
        {"5 toric code L = 2 gap >= e^{-8 betaJ}/3, blocks vs full", 1200, toric_theorem},
        {"6 spectra of K and -L agree, Ising N = 3", 10, unitary_equivalence},
        {"7 structural identities, Ising N = 3, 4 and toric L = 2", 600, structural_identities},
        {"8 kernel dimension equals commutant dimension", 600, ergodicity},
        {"9 Schwarz bound on autocorrelations", 600, schwarz},
        {"10 size-independent relaxation time at betaJ = 0.25", 600, no_memory},
        {"11 lemma checkers on random and hand-derived instances", 60, lemma_checkers},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budget) {
            o.pass = false;
            o.detail += "; over the " + fmt("%.0f", c.budget) + " s budget";
        }
        failed += !o.pass;
        std::printf("%s  %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
