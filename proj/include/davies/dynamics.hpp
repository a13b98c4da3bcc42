// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file dynamics.hpp
 * @brief Heisenberg-picture evolution and beta-weighted autocorrelations.
 *
 * Evolution uses a Krylov approximation of exp(tM) v on each substep. The
 * number of substeps is doubled until two successive refinements agree.
 * M need not be Hermitian.
 */

#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "davies/spectral.hpp"

namespace davies {

class DynamicsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExpmvOptions {
    int krylov = 30;
    double tol = 1e-9;     ///< relative difference between successive refinements
    int max_doublings = 16;
};

namespace detail {

inline double one_norm(const SpMat& a) {
    double best = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        double s = 0.0;
        for (SpMat::InnerIterator it(a, k); it; ++it) s += std::abs(it.value());
        best = std::max(best, s);
    }
    return best;
}

/// One Krylov step exp(tau M) v with an m-dimensional Arnoldi basis.
inline VecC krylov_step(const SpMat& M, const VecC& v, double tau, int m) {
    const double beta = v.norm();
    if (beta == 0.0) return v;
    const std::int64_t dim = v.size();
    m = static_cast<int>(std::min<std::int64_t>(m, dim));
    std::vector<VecC> V;
    V.reserve(static_cast<std::size_t>(m) + 1);
    V.push_back(v / beta);
    MatC Hk = MatC::Zero(m + 1, m);
    int k = 0;
    for (; k < m; ++k) {
        VecC w = M * V.back();
        for (int i = 0; i <= k; ++i) {
            Hk(i, k) = V[static_cast<std::size_t>(i)].dot(w);
            w -= Hk(i, k) * V[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i <= k; ++i) { // second pass
            const cplx c = V[static_cast<std::size_t>(i)].dot(w);
            Hk(i, k) += c;
            w -= c * V[static_cast<std::size_t>(i)];
        }
        const double h = w.norm();
        Hk(k + 1, k) = h;
        if (h < 1e-13 * beta) {
            ++k;
            break;
        }
        V.push_back(w / h);
    }
    const MatC E = (tau * Hk.topLeftCorner(k, k)).exp();
    VecC out = VecC::Zero(dim);
    for (int i = 0; i < k; ++i) out += (beta * E(i, 0)) * V[static_cast<std::size_t>(i)];
    return out;
}

inline VecC expmv_substeps(const SpMat& M, const VecC& v, double t, int steps, int m) {
    VecC x = v;
    const double tau = t / steps;
    for (int s = 0; s < steps; ++s) x = krylov_step(M, x, tau, m);
    return x;
}

} // namespace detail

/// exp(t M) v with step-doubling error control.
inline VecC expmv(const SparseMatrix& M, const VecC& v, double t, const ExpmvOptions& opt = {}) {
    if (t < 0) throw std::invalid_argument("evolution time must be nonnegative");
    if (M.dim() != v.size()) throw std::invalid_argument("vector dimension does not match the operator");
    if (t == 0.0 || v.norm() == 0.0) return v;
    const double nt = t * detail::one_norm(M.data);
    int steps = std::max(1, static_cast<int>(std::ceil(nt / 4.0)));
    VecC prev = detail::expmv_substeps(M.data, v, t, steps, opt.krylov);
    for (int d = 0; d < opt.max_doublings; ++d) {
        steps *= 2;
        VecC cur = detail::expmv_substeps(M.data, v, t, steps, opt.krylov);
        const double scale = std::max(cur.norm(), 1e-300 * v.norm());
        if ((cur - prev).norm() <= opt.tol * scale) return cur;
        prev = std::move(cur);
    }
    throw DynamicsError("exponential action did not converge at t = " + std::to_string(t));
}

/// e^{t M} A for a generator rep M (not -L: pass the semigroup generator itself).
inline VecC evolve(const SuperOperatorRep& rep, const VecC& a, double t, const ExpmvOptions& opt = {}) {
    return expmv(rep.matrix, a, t, opt);
}

struct AutocorrelationTrace {
    std::string label;
    std::vector<double> t;
    std::vector<cplx> values_full;
    std::vector<double> values_dissipative;
    double rate = 0.0;       ///< fitted decay rate of the dissipative trace; NaN if the grid allows no fit
    double certified_gap = 0.0;
    double schwarz_slack = 0.0; ///< min over the grid of diss^2 - |full|^2
};

/// 60 logarithmic points in [0.01, 30] / gap.
inline std::vector<double> default_grid(double gap, int points = 60) {
    if (!(gap > 0)) throw DynamicsError("time grid needs a positive gap estimate");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double a = std::log(0.01 / gap), b = std::log(30.0 / gap);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
    return g;
}

/// Least-squares decay rate of log values on the tail half of the grid, skipping values below 1e-12.
inline double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& v) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = t.size() / 2; i < t.size(); ++i) {
        if (v[i] < 1e-12) continue;
        const double y = std::log(v[i]);
        sx += t[i];
        sy += y;
        sxx += t[i] * t[i];
        sxy += t[i] * y;
        ++n;
    }
    if (n < 2) throw DynamicsError("too few points above 1e-12 in the fitting window");
    const double den = n * sxx - sx * sx;
    if (den <= 0) throw DynamicsError("degenerate fitting window");
    return -(n * sxy - sx * sy) / den;
}

/// Rates below this are reported as non-decaying.
inline constexpr double kRateFloor = 1e-8;

inline double relaxation_time(const AutocorrelationTrace& tr) {
    if (!(tr.rate > kRateFloor))
        throw DynamicsError("trace of " + tr.label + " does not decay (rate " + std::to_string(tr.rate) +
                            "); the observable is conserved");
    return 1.0 / tr.rate;
}

/// Both autocorrelation traces of a Pauli observable, computed on its syndrome class.
/// A is normalized by construction (<A, A>_beta = 1) and must have zero Gibbs mean.
inline AutocorrelationTrace autocorrelation(const ModelSpec& m, const ThermalParams& tp,
                                            const std::vector<PauliString>& couplings, const PauliString& A,
                                            std::vector<double> grid = {}, const ExpmvOptions& opt = {}) {
    const DaviesGenerator g(m, couplings, tp);
    const GibbsState gs = gibbs_state(m, tp.beta);
    const SyndromeFrame fr(m);
    const PauliString a = A.unsigned_form();
    const auto basis = fr.class_basis(fr.syndrome(a));
    const MatC gram = beta_gram(gs, *basis);
    const VecC av = basis->encode(PauliSum(a));
    const VecC one = basis->index(0) >= 0 ? basis->encode(PauliSum::identity(m.n_sites)) : VecC::Zero(basis->dim());
    if (std::abs(one.dot(gram * av)) > 1e-12) throw DynamicsError("observable has nonzero Gibbs mean");

    const SparseMatrix Lm = materialize(g.dissipator(), *basis, false);
    const SparseMatrix Gm = materialize(g.full_generator(), *basis, false);

    AutocorrelationTrace tr;
    tr.label = A.to_string();
    tr.certified_gap = certify(g).gap;
    tr.t = grid.empty() ? default_grid(tr.certified_gap) : std::move(grid);
    const VecC adag = basis->encode(PauliSum(a).adjoint());
    VecC xl = adag, xg = adag;
    double tprev = 0.0;
    tr.schwarz_slack = std::numeric_limits<double>::infinity();
    for (double t : tr.t) {
        xl = expmv(Lm, xl, t - tprev, opt);
        xg = expmv(Gm, xg, t - tprev, opt);
        tprev = t;
        const cplx d = av.dot(gram * xl), f = av.dot(gram * xg);
        tr.values_dissipative.push_back(d.real());
        tr.values_full.push_back(f);
        tr.schwarz_slack = std::min(tr.schwarz_slack, d.real() * d.real() - std::norm(f));
    }
    try {
        tr.rate = fit_decay_rate(tr.t, tr.values_dissipative);
    } catch (const DynamicsError&) {
        tr.rate = std::numeric_limits<double>::quiet_NaN(); // grid too short to fit
    }
    return tr;
}

inline void write_csv(std::ostream& os, const AutocorrelationTrace& tr) {
    os << "t,re_full,im_full,dissipative\n";
    os.precision(17);
    for (std::size_t i = 0; i < tr.t.size(); ++i)
        os << tr.t[i] << ',' << tr.values_full[i].real() << ',' << tr.values_full[i].imag() << ','
           << tr.values_dissipative[i] << '\n';
}

inline nlohmann::json to_json(const AutocorrelationTrace& tr) {
    nlohmann::json j{{"observable", tr.label},
                     {"points", tr.t.size()},
                     {"fitted_rate", tr.rate},
                     {"certified_gap", tr.certified_gap},
                     {"schwarz_slack", tr.schwarz_slack}};
    if (tr.rate > kRateFloor) j["relaxation_time"] = 1.0 / tr.rate;
    else j["relaxation_time"] = nullptr;
    return j;
}

} // namespace davies
