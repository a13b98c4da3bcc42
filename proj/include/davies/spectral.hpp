// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file spectral.hpp
 * @brief Spectral gaps of Hermitian PSD superoperators, analytic gap bounds
 *        and numerical checkers for the operator inequalities behind them.
 */

#pragma once

#include <chrono>
#include <cmath>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "davies/master.hpp"

namespace davies {

class SpectralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public SpectralError {
public:
    using SpectralError::SpectralError;
};

enum class SolverKind { Dense, Iterative };

inline const char* to_string(SolverKind s) { return s == SolverKind::Dense ? "dense" : "iterative"; }

struct SolverOptions {
    std::int64_t dense_cap = 1024;
    bool force_iterative = false;
    int max_iter = 0;          ///< matrix-vector products; 0 means 10 sqrt(dim) + 200
    double tol = 1e-9;         ///< residual tolerance relative to the largest eigenvalue
    double kernel_rel = 1e-10; ///< kernel threshold relative to the largest eigenvalue
    int krylov = 80;
    int keep = 20;
    std::uint64_t seed = 12345;
};

struct GapReport {
    std::int64_t dim = 0;
    std::int64_t kernel_dim = 0;
    double gap = 0.0;
    double analytic_bound = 0.0;
    std::string bound_name;
    SolverKind solver = SolverKind::Dense;
    double residual = 0.0;      ///< |K v - gap v| / |K|
    double elapsed = 0.0;       ///< seconds
    double norm = 0.0;          ///< largest eigenvalue
    double below = 0.0;         ///< largest eigenvalue counted as kernel
    double above = 0.0;         ///< smallest eigenvalue above the threshold (= gap)
    bool converged = true;
    std::int64_t matvecs = 0;
    std::int64_t blocks = 1;

    bool certified() const { return bound_name.empty() || gap >= analytic_bound; }
    double margin() const { return gap - analytic_bound; }
};

inline nlohmann::json to_json(const GapReport& r) {
    return {{"dim", r.dim},
            {"kernel_dim", r.kernel_dim},
            {"gap", r.gap},
            {"analytic_bound", r.analytic_bound},
            {"bound_name", r.bound_name},
            {"margin", r.margin()},
            {"certified", r.certified()},
            {"solver", to_string(r.solver)},
            {"residual", r.residual},
            {"elapsed", r.elapsed},
            {"norm", r.norm},
            {"kernel_threshold_neighbours", {r.below, r.above}},
            {"converged", r.converged},
            {"matvecs", r.matvecs},
            {"blocks", r.blocks}};
}

namespace detail {

inline bool is_real(const SpMat& a) {
    for (int k = 0; k < a.outerSize(); ++k)
        for (SpMat::InnerIterator it(a, k); it; ++it)
            if (it.value().imag() != 0.0) return false;
    return true;
}

struct DenseEig {
    VecR values;
    MatC vectors;
};

inline DenseEig dense_eig(const SpMat& a, bool vectors) {
    const int opt = vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
    DenseEig out;
    if (is_real(a)) {
        MatR d = MatR(a.real());
        d = 0.5 * (d + d.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<MatR> es(d, opt);
        out.values = es.eigenvalues();
        if (vectors) out.vectors = es.eigenvectors().cast<cplx>();
    } else {
        MatC d = MatC(a);
        d = 0.5 * (d + d.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<MatC> es(d, opt);
        out.values = es.eigenvalues();
        if (vectors) out.vectors = es.eigenvectors();
    }
    return out;
}

/// Orthogonalizes v against the columns of Q (twice) and returns the remaining norm.
inline double orthogonalize(VecC& v, const std::vector<VecC>& Q) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : Q) v -= q * q.dot(v);
    return v.norm();
}

/// Largest eigenvalue estimate of a Hermitian PSD matrix from a short Lanczos run.
inline double lanczos_largest(const SpMat& a, std::mt19937_64& rng, int steps = 60) {
    const std::int64_t dim = a.rows();
    steps = static_cast<int>(std::min<std::int64_t>(steps, dim));
    std::vector<VecC> V;
    VecC v = random_vector(rng, dim);
    v.normalize();
    MatC T = MatC::Zero(steps, steps);
    int k = 0;
    for (; k < steps; ++k) {
        V.push_back(v);
        VecC w = a * v;
        for (int i = 0; i <= k; ++i) T(i, k) = V[static_cast<std::size_t>(i)].dot(w);
        const double nr = orthogonalize(w, V);
        if (nr < 1e-13 * std::max(1.0, T.cwiseAbs().maxCoeff())) {
            ++k;
            break;
        }
        v = w / nr;
    }
    MatC t = T.topLeftCorner(k, k);
    t = 0.5 * (t + t.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<MatC> es(t, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

} // namespace detail

/// Largest |eigenvalue| of a Hermitian matrix by power iteration.
inline double power_norm(const SpMat& a, double rel_tol = 1e-10, int max_iter = 20000, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    VecC v = random_vector(rng, a.rows());
    v.normalize();
    double prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        VecC w = a * v;
        const double est = std::abs(v.dot(w));
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        v = w / nw;
        if (it > 0 && std::abs(est - prev) <= rel_tol * std::max(est, 1e-300)) return std::max(est, nw);
        prev = est;
    }
    return prev;
}

/// Smallest nonkernel eigenvalue of a Hermitian PSD matrix.
///
/// Dense path: full eigendecomposition. Iterative path: thick-restart
/// Lanczos (Rayleigh-Ritz on a stored Krylov basis) with full
/// reorthogonalization against the deflated kernel basis. Ritz pairs that
/// converge below the kernel threshold join the deflation set.
inline GapReport gap(const SparseMatrix& m, std::optional<std::int64_t> expected_kernel = std::nullopt,
                     const std::vector<VecC>& deflation = {}, const SolverOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const SpMat& a = m.data;
    const std::int64_t dim = a.rows();
    if (dim == 0) throw SpectralError("gap of an empty matrix");
    GapReport rep;
    rep.dim = dim;
    if (!opt.force_iterative && dim <= opt.dense_cap) {
        rep.solver = SolverKind::Dense;
        const auto eig = detail::dense_eig(a, true);
        const VecR& ev = eig.values;
        rep.norm = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
        if (ev[0] < -1e-10 * std::max(rep.norm, 1e-300))
            throw SpectralError("matrix is not positive semidefinite: eigenvalue " + std::to_string(ev[0]));
        const double thr = opt.kernel_rel * rep.norm;
        std::int64_t k = 0;
        while (k < dim && ev[k] < thr) ++k;
        rep.kernel_dim = k;
        rep.below = k > 0 ? ev[k - 1] : 0.0;
        if (k == dim) {
            rep.gap = rep.above = 0.0;
        } else {
            rep.gap = rep.above = ev[k];
            const VecC v = eig.vectors.col(k);
            rep.residual = (a * v - rep.gap * v).norm() / std::max(rep.norm, 1e-300);
        }
    } else {
        rep.solver = SolverKind::Iterative;
        std::mt19937_64 rng(opt.seed);
        rep.norm = detail::lanczos_largest(a, rng);
        const double thr = opt.kernel_rel * rep.norm;
        const double rtol = opt.tol * rep.norm;
        std::vector<VecC> D;
        for (const auto& d0 : deflation) {
            VecC d = d0;
            if (detail::orthogonalize(d, D) < 1e-12 * d0.norm()) continue;
            d.normalize();
            if ((a * d).norm() > 1e-8 * rep.norm) throw SpectralError("deflation vector is not in the kernel");
            D.push_back(d);
        }
        const std::int64_t cap = opt.max_iter > 0 ? opt.max_iter
                                                  : static_cast<std::int64_t>(10.0 * std::sqrt(double(dim)) + 200.0);
        const int mk = static_cast<int>(std::min<std::int64_t>(opt.krylov, dim - static_cast<std::int64_t>(D.size())));
        const int keep = std::min(opt.keep, std::max(1, mk / 2));
        std::vector<VecC> V, AV;
        VecC next = random_vector(rng, dim);
        double theta = 0.0, rn = 0.0, below = 0.0;
        bool done = false;
        while (!done) {
            while (static_cast<int>(V.size()) < mk) {
                VecC w = next;
                std::vector<VecC> all = D;
                all.insert(all.end(), V.begin(), V.end());
                double nw = detail::orthogonalize(w, all);
                if (nw < 1e-10 * std::max(1.0, next.norm())) {
                    w = random_vector(rng, dim);
                    nw = detail::orthogonalize(w, all);
                    if (nw < 1e-12) break; // invariant subspace exhausted
                }
                w /= nw;
                V.push_back(w);
                AV.push_back(a * w);
                ++rep.matvecs;
                next = AV.back();
            }
            const int k = static_cast<int>(V.size());
            if (k == 0) throw SpectralError("no complement left after deflation");
            MatC T(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) T(i, j) = V[static_cast<std::size_t>(i)].dot(AV[static_cast<std::size_t>(j)]);
            T = 0.5 * (T + T.adjoint()).eval();
            Eigen::SelfAdjointEigenSolver<MatC> es(T);
            auto ritz = [&](int c, VecC& x, VecC& ax) {
                x = VecC::Zero(dim);
                ax = VecC::Zero(dim);
                for (int i = 0; i < k; ++i) {
                    x += es.eigenvectors()(i, c) * V[static_cast<std::size_t>(i)];
                    ax += es.eigenvectors()(i, c) * AV[static_cast<std::size_t>(i)];
                }
            };
            VecC x, ax;
            ritz(0, x, ax);
            theta = es.eigenvalues()[0];
            VecC r = ax - theta * x;
            rn = r.norm();
            const bool exhausted = k < mk;
            if (rn < rtol || exhausted) {
                if (theta < thr) {
                    below = std::max(below, theta);
                    D.push_back(x.normalized());
                    ++rep.kernel_dim;
                    // Keep the remaining Ritz vectors as the new basis.
                    std::vector<VecC> nv, nav;
                    for (int c = 1; c < std::min(k, keep + 1); ++c) {
                        VecC y, ay;
                        ritz(c, y, ay);
                        nv.push_back(y);
                        nav.push_back(ay);
                    }
                    V = std::move(nv);
                    AV = std::move(nav);
                    next = random_vector(rng, dim);
                    continue;
                }
                rep.gap = rep.above = theta;
                rep.residual = rn / rep.norm;
                break;
            }
            if (rep.matvecs >= cap) {
                rep.converged = false;
                rep.gap = rep.above = theta;
                rep.residual = rn / rep.norm;
                break;
            }
            std::vector<VecC> nv, nav;
            for (int c = 0; c < std::min(k, keep); ++c) {
                VecC y, ay;
                ritz(c, y, ay);
                nv.push_back(y);
                nav.push_back(ay);
            }
            V = std::move(nv);
            AV = std::move(nav);
            next = r;
        }
        rep.kernel_dim = static_cast<std::int64_t>(D.size());
        rep.below = below;
    }
    rep.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (expected_kernel && *expected_kernel != rep.kernel_dim)
        throw SpectralError("kernel dimension " + std::to_string(rep.kernel_dim) + " differs from expected " +
                            std::to_string(*expected_kernel));
    return rep;
}

inline GapReport gap(const SuperOperatorRep& rep, std::optional<std::int64_t> expected_kernel = std::nullopt,
                     const std::vector<VecC>& deflation = {}, const SolverOptions& opt = {}) {
    if (!rep.matrix.hermitian) throw SpectralError("gap needs a Hermitian representation (use K, not -L)");
    return gap(rep.matrix, expected_kernel, deflation, opt);
}

struct NamedBound {
    std::string name;
    double value;
};

/// Analytic gap bounds: thm1 (Ising) or thm2 (toric) gamma^4/3 = e^{-8 beta J}/3;
/// for the ring also prop1 = h_-/2 and prop2 = gamma^2/(1+gamma^2).
inline std::vector<NamedBound> analytic_bounds(const ModelSpec& m, const ThermalParams& tp) {
    const double g = tp.gamma(), g2 = g * g;
    if (m.kind == ModelKind::Toric) return {{"thm2", g2 * g2 / 3.0}};
    return {{"thm1", g2 * g2 / 3.0}, {"prop1", 0.5 * tp.h_minus()}, {"prop2", g2 / (1.0 + g2)}};
}

inline double theorem_bound(const ModelSpec& m, const ThermalParams& tp) { return analytic_bounds(m, tp).front().value; }

/// The 4 x 4 bond-pair block in the order [++, +-, -+, --], + the ground value of a bond.
inline MatR bond_pair_block(double gamma) {
    const double g2 = gamma * gamma, d = 1.0 + g2;
    MatR k(4, 4);
    k << g2 / d, 0, 0, -gamma / d, 0, 0.5, -0.5, 0, 0, -0.5, 0.5, 0, -gamma / d, 0, 0, 1.0 / d;
    return k;
}

/// Open-chain sum of bond-pair blocks on N bond variables (2^N states, bit b set = bond b excited).
inline SuperOperatorRep abelian_chain_hamiltonian(int N, const ThermalParams& tp, int pairs = -1) {
    if (N < 2) throw std::invalid_argument("abelian chain needs at least two bonds");
    if (N > 24) throw std::invalid_argument("abelian chain too long");
    if (pairs < 0) pairs = N - 1;
    const MatR k = bond_pair_block(tp.gamma());
    const std::int64_t dim = std::int64_t{1} << N;
    std::vector<Triplet> trips;
    for (int p = 0; p < pairs; ++p)
        for (std::int64_t s = 0; s < dim; ++s) {
            const int col = 2 * static_cast<int>(s >> p & 1) + static_cast<int>(s >> (p + 1) & 1);
            for (int row = 0; row < 4; ++row) {
                if (k(row, col) == 0.0) continue;
                std::int64_t t = s & ~((std::int64_t{3}) << p);
                t |= std::int64_t{(row >> 1) & 1} << p;
                t |= std::int64_t{row & 1} << (p + 1);
                trips.emplace_back(t, s, k(row, col));
            }
        }
    SuperOperatorRep r;
    r.matrix.data.resize(dim, dim);
    r.matrix.data.setFromTriplets(trips.begin(), trips.end());
    r.matrix.hermitian = true;
    r.space = Space::HilbertSchmidt;
    r.beta = tp.beta;
    r.name = "K_ab";
    std::vector<std::uint64_t> keys(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = i;
    r.basis = OperatorBasis::from_keys(N, std::move(keys), "bond configurations");
    return r;
}

/// Kernel vectors of the chain: psi(b) = gamma^{#excited/2} on each parity sector.
inline std::vector<VecC> abelian_chain_kernel(int N, double gamma) {
    const std::int64_t dim = std::int64_t{1} << N;
    std::vector<VecC> out(2, VecC::Zero(dim));
    for (std::int64_t s = 0; s < dim; ++s) {
        const int c = std::popcount(static_cast<std::uint64_t>(s));
        out[static_cast<std::size_t>(c & 1)][s] = std::pow(gamma, 0.5 * c);
    }
    for (auto& v : out) v.normalize();
    return out;
}

struct Lemma1 {
    bool holds = false;
    double min_eig = 0.0; ///< smallest eigenvalue of A^2 - g A
    double gap = 0.0;
};

/// Holds iff A^2 - g A >= 0 (to 1e-10 |A|^2), which implies Gap(A) >= g.
inline Lemma1 lemma1_check(const SparseMatrix& A, double g) {
    const auto eig = detail::dense_eig(A.data, false);
    const VecR& ev = eig.values;
    const double norm = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
    std::int64_t k = 0;
    while (k < ev.size() && ev[k] < 1e-10 * norm) ++k;
    if (k == 0) throw SpectralError("lemma1_check needs a nontrivial kernel");
    Lemma1 r;
    r.min_eig = (ev.array() * ev.array() - g * ev.array()).minCoeff();
    r.holds = r.min_eig >= -1e-10 * norm * norm;
    r.gap = k < ev.size() ? ev[k] : 0.0;
    if (r.holds && r.gap < g - 1e-10 * norm) throw SpectralError("lemma1_check: consequence violated");
    return r;
}

struct Lemma2 {
    double g_a = 0.0, g_b = 0.0, norm_b = 0.0, bound = 0.0, min_eig = 0.0;
    bool holds = false;
};

/// g_A g_B / (g_A + |B|) with g_B the smallest eigenvalue of B compressed to Ker A.
inline Lemma2 lemma2_bound(const SparseMatrix& A, const SparseMatrix& B) {
    const auto ea = detail::dense_eig(A.data, true);
    const double na = std::max(std::abs(ea.values[0]), std::abs(ea.values[ea.values.size() - 1]));
    if (ea.values[0] < -1e-10 * na) throw SpectralError("lemma2_bound: A is not PSD");
    std::int64_t k = 0;
    while (k < ea.values.size() && ea.values[k] < 1e-10 * na) ++k;
    if (k == 0) throw SpectralError("lemma2_bound needs a nontrivial kernel of A");
    Lemma2 r;
    r.g_a = k < ea.values.size() ? ea.values[k] : 0.0;
    const MatC P = ea.vectors.leftCols(k);
    const MatC Bd = MatC(B.data);
    MatC C = P.adjoint() * Bd * P;
    C = 0.5 * (C + C.adjoint()).eval();
    r.g_b = Eigen::SelfAdjointEigenSolver<MatC>(C, Eigen::EigenvaluesOnly).eigenvalues()[0];
    if (r.g_b <= 0.0) throw SpectralError("lemma2_bound hypothesis fails: B vanishes on part of Ker A");
    r.norm_b = power_norm(B.data);
    r.bound = r.g_a * r.g_b / (r.g_a + r.norm_b);
    MatC S = MatC(A.data) + Bd;
    S = 0.5 * (S + S.adjoint()).eval();
    r.min_eig = Eigen::SelfAdjointEigenSolver<MatC>(S, Eigen::EigenvaluesOnly).eigenvalues()[0];
    r.holds = r.min_eig >= r.bound - 1e-10 * std::max(1.0, na + r.norm_b);
    return r;
}

struct Lemma3 {
    double bound = 0.0, norm_c = 0.0, min_eig = 0.0;
    bool holds = false;
};

/// y u / (u + |C'|) for C' = [[y, x], [x*, z]] PSD and u > 0, against eps_-([[y, x], [x*, z + u]]).
inline Lemma3 lemma3_bound(double y, cplx x, double z, double u) {
    if (!(u > 0.0)) throw SpectralError("lemma3_bound needs u > 0");
    Eigen::Matrix2cd c;
    c << y, x, std::conj(x), z;
    const Eigen::Vector2d ec = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(c).eigenvalues();
    const double scale = std::max({1.0, std::abs(y), std::abs(z), std::abs(x)});
    if (ec[0] < -1e-12 * scale) throw SpectralError("lemma3_bound: C' is not PSD");
    Lemma3 r;
    r.norm_c = ec[1];
    r.bound = y * u / (u + r.norm_c);
    c(1, 1) += u;
    r.min_eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(c).eigenvalues()[0];
    r.holds = r.min_eig >= r.bound - 1e-12 * (scale + u);
    return r;
}

enum class CertifyPath { Auto, Full, Blocks };

struct CertifyOptions {
    CertifyPath path = CertifyPath::Auto;
    SolverOptions solver;
    int workers = 0; ///< 0 means worker_count()
    std::optional<std::int64_t> expected_kernel;
    std::vector<std::uint64_t> only_blocks; ///< restrict to these syndromes (diagnostics)
};

struct BlockGap {
    std::uint64_t syndrome;
    std::int64_t kernel_dim;
    double gap;      ///< smallest eigenvalue above the global threshold; +inf if none
    double smallest; ///< smallest eigenvalue
    double norm;
    std::int64_t matvecs;
    bool converged;
};

/// Per-block spectra of K over all syndrome classes, thresholded with the global norm.
inline std::vector<BlockGap> block_gaps(const DaviesGenerator& g, const CertifyOptions& opt = {}) {
    const SyndromeFrame fr(g.model());
    std::vector<std::uint64_t> syns = opt.only_blocks.empty() ? all_syndromes(fr) : opt.only_blocks;
    if (fr.block_dim() > (std::uint64_t{1} << 20)) throw SpectralError("block dimension exceeds 2^20");
    const SuperOp K = g.master();
    std::vector<BlockGap> out(syns.size());
    std::vector<std::vector<double>> lows(syns.size());
    const int workers = opt.workers > 0 ? opt.workers : worker_count();
    std::mutex err_mu;
    std::string err;
    parallel_chunks(static_cast<std::int64_t>(syns.size()), workers, [&](int, std::int64_t b, std::int64_t e) {
        try {
            for (std::int64_t i = b; i < e; ++i) {
                const auto basis = fr.class_basis(syns[static_cast<std::size_t>(i)]);
                const SparseMatrix m = materialize(K, *basis, true, 1);
                BlockGap& bg = out[static_cast<std::size_t>(i)];
                bg.syndrome = syns[static_cast<std::size_t>(i)];
                if (m.dim() <= opt.solver.dense_cap && !opt.solver.force_iterative) {
                    const auto eig = detail::dense_eig(m.data, false);
                    bg.norm = eig.values[eig.values.size() - 1];
                    bg.smallest = eig.values[0];
                    auto& lo = lows[static_cast<std::size_t>(i)];
                    for (int k = 0; k < eig.values.size() && k < 64; ++k) lo.push_back(eig.values[k]);
                    bg.matvecs = 0;
                    bg.converged = true;
                } else {
                    std::vector<VecC> defl;
                    if (bg.syndrome == 0) defl.push_back(basis->encode(gibbs_state(g.model(), g.params().beta).rho_sqrt));
                    const GapReport r = gap(m, std::nullopt, defl, opt.solver);
                    bg.norm = r.norm;
                    bg.smallest = r.kernel_dim > 0 ? 0.0 : r.gap;
                    auto& lo = lows[static_cast<std::size_t>(i)];
                    for (std::int64_t k = 0; k < r.kernel_dim; ++k) lo.push_back(0.0);
                    lo.push_back(r.gap);
                    bg.matvecs = r.matvecs;
                    bg.converged = r.converged;
                }
            }
        } catch (const std::exception& ex) {
            std::lock_guard lk(err_mu);
            err = ex.what();
        }
    });
    if (!err.empty()) throw SpectralError(err);
    double norm = 0.0;
    for (const auto& bg : out) norm = std::max(norm, bg.norm);
    const double thr = opt.solver.kernel_rel * norm;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].kernel_dim = 0;
        out[i].gap = std::numeric_limits<double>::infinity();
        for (double v : lows[i]) {
            if (v < thr) ++out[i].kernel_dim;
            else {
                out[i].gap = std::min(out[i].gap, v);
            }
        }
    }
    return out;
}

/// Gap of -L (equivalently K) with the theorem bound attached.
inline GapReport certify(const DaviesGenerator& g, const CertifyOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const ModelSpec& m = g.model();
    CertifyPath path = opt.path;
    if (path == CertifyPath::Auto) path = m.n_sites <= 4 ? CertifyPath::Full : CertifyPath::Blocks;
    GapReport rep;
    if (path == CertifyPath::Full) {
        const auto mh = to_master(g);
        std::vector<VecC> defl;
        if (mh.kernel_witness.size()) defl.push_back(mh.kernel_witness);
        rep = gap(mh.rep, std::nullopt, defl, opt.solver);
    } else {
        const auto bgs = block_gaps(g, opt);
        rep.solver = SolverKind::Dense;
        rep.gap = std::numeric_limits<double>::infinity();
        rep.blocks = static_cast<std::int64_t>(bgs.size());
        double thr_below = 0.0;
        for (const auto& b : bgs) {
            rep.dim += static_cast<std::int64_t>(SyndromeFrame(m).block_dim());
            rep.kernel_dim += b.kernel_dim;
            rep.gap = std::min(rep.gap, b.gap);
            rep.norm = std::max(rep.norm, b.norm);
            rep.matvecs += b.matvecs;
            rep.converged &= b.converged;
            if (b.matvecs) rep.solver = SolverKind::Iterative;
            if (b.kernel_dim > 0) thr_below = std::max(thr_below, b.smallest);
        }
        rep.below = thr_below;
        rep.above = rep.gap;
        // Residual of the reported eigenpair, recomputed on the extremal block.
        for (const auto& b : bgs)
            if (b.gap == rep.gap) {
                const auto blk = master_block(g, SyndromeFrame(m), b.syndrome);
                if (blk.rep.dim() <= opt.solver.dense_cap) {
                    const auto eig = detail::dense_eig(blk.rep.matrix.data, true);
                    Eigen::Index k = 0;
                    (eig.values.array() - rep.gap).abs().minCoeff(&k);
                    const VecC v = eig.vectors.col(k);
                    rep.residual = (blk.rep.matrix.data * v - rep.gap * v).norm() / rep.norm;
                }
                break;
            }
    }
    const auto bounds = analytic_bounds(m, g.params());
    rep.bound_name = bounds.front().name;
    rep.analytic_bound = bounds.front().value;
    rep.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.expected_kernel && *opt.expected_kernel != rep.kernel_dim)
        throw SpectralError("kernel dimension " + std::to_string(rep.kernel_dim) + " differs from expected " +
                            std::to_string(*opt.expected_kernel));
    return rep;
}

} // namespace davies
