// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file davies.hpp
 * @brief Fourier components of Pauli couplings and the Davies generator.
 *
 * Heisenberg-picture generator, summed over channels (alpha, omega >= 0) with
 * A = S_alpha(omega) lowering the energy by omega:
 *
 *   L(X) = r [2 A^dag X A - {A^dag A, X} + e^{-beta omega} (2 A X A^dag - {A A^dag, X})]
 *
 * The default rate r is 1 / (1 + e^{-beta omega}) for omega > 0 and h_0 / 4 at
 * omega = 0, which gives the constants h_+/2, h_-/2 and h_0/2 of the bond
 * model. The full evolution is G = i delta + L with delta(X) = [H, X].
 */

#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "davies/models.hpp"
#include "davies/opspace.hpp"

namespace davies {

struct RateEntry {
    std::string coupling; ///< unsigned text of the coupling string, or "*"
    double omega = 0.0;
    double rate = 0.0;
};

struct ThermalParams {
    double beta = 0.0;
    double J = 1.0;
    double h_zero = 1.0;
    std::vector<RateEntry> rate_table;

    static ThermalParams from_beta_j(double beta_j, double J = 1.0) {
        if (!(beta_j >= 0.0)) throw std::invalid_argument("beta J must be nonnegative");
        return {beta_j / J, J, 1.0, {}};
    }

    double beta_j() const { return beta * J; }
    double gamma() const { return std::exp(-2.0 * beta * J); }
    double eta(double omega) const { return std::exp(-0.5 * beta * omega); }
    double h_plus() const { return 2.0 / (gamma() * gamma() + 1.0); }
    double h_minus() const { return 2.0 * gamma() * gamma() / (gamma() * gamma() + 1.0); }
    double freq_tol() const { return 1e-9 * J; }

    /// Channel rate for the component of S at frequency omega >= 0.
    double rate(const PauliString& s, double omega) const {
        const std::string text = s.unsigned_form().to_string().substr(1);
        for (const auto& e : rate_table)
            if ((e.coupling == "*" || e.coupling == text) && std::abs(e.omega - omega) <= freq_tol()) {
                if (!(e.rate > 0.0)) throw std::invalid_argument("rate table entries must be positive");
                return e.rate;
            }
        if (std::abs(omega) <= freq_tol()) return 0.25 * h_zero;
        return 1.0 / (1.0 + std::exp(-beta * omega));
    }
};

class GeneratorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FourierComponent {
    double omega;
    PauliSum op;
};

struct JumpOperatorSet {
    PauliString coupling;
    std::vector<FourierComponent> components; ///< ascending omega

    PauliSum sum() const {
        PauliSum s(coupling.n);
        for (const auto& c : components) s += c.op;
        return s.canonicalize(1e-14);
    }

    /// e^{itH} S e^{-itH} from the components.
    PauliSum evolved(double t) const {
        PauliSum s(coupling.n);
        for (const auto& c : components) s += c.op * PauliSum::identity(coupling.n, std::exp(cplx{0.0, -c.omega * t}));
        return s.canonicalize(1e-14);
    }

    const FourierComponent* at(double omega, double tol) const {
        for (const auto& c : components)
            if (std::abs(c.omega - omega) <= tol) return &c;
        return nullptr;
    }
};

/// S(omega) = S . prod_{t in T} (1 + s_t S_t)/2 with omega = -2 sum_t c_t s_t,
/// T the stabilizers anticommuting with S.
inline JumpOperatorSet fourier_decompose(const PauliString& s, const ModelSpec& m) {
    if (s.n != m.n_sites) throw GeneratorError("coupling acts on a different number of sites than the model");
    std::vector<std::size_t> T;
    for (std::size_t t = 0; t < m.stabilizers.size(); ++t)
        if (!commutes(s, m.stabilizers[t])) T.push_back(t);
    if (T.size() > 16) throw GeneratorError("coupling anticommutes with too many stabilizers");
    const double tol = 1e-9 * m.J;
    JumpOperatorSet out{s, {}};
    const PauliSum base(s);
    for (std::uint64_t pat = 0; pat < (std::uint64_t{1} << T.size()); ++pat) {
        double omega = 0.0;
        PauliSum proj = PauliSum::identity(s.n);
        for (std::size_t i = 0; i < T.size(); ++i) {
            const int sign = (pat >> i & 1) ? -1 : 1;
            omega -= 2.0 * sign * m.coefficients[T[i]];
            proj = proj * eigen_projector(m.stabilizers[T[i]], sign);
        }
        PauliSum op = base * proj;
        if (op.empty()) continue;
        FourierComponent* slot = nullptr;
        for (auto& c : out.components) {
            const double d = std::abs(c.omega - omega);
            if (d <= tol) slot = &c;
            else if (d <= 1e3 * tol)
                throw GeneratorError("Bohr frequencies " + std::to_string(c.omega) + " and " + std::to_string(omega) +
                                     " are too close to group");
        }
        if (slot) slot->op += op;
        else out.components.push_back({omega, op});
    }
    for (auto& c : out.components) c.op.canonicalize(1e-14);
    std::erase_if(out.components, [](const FourierComponent& c) { return c.op.empty(); });
    std::sort(out.components.begin(), out.components.end(),
              [](const FourierComponent& a, const FourierComponent& b) { return a.omega < b.omega; });
    for (auto& c : out.components)
        if (std::abs(c.omega) <= tol) c.omega = 0.0;
    return out;
}

/// One dissipative channel: A = S_alpha(omega), omega >= 0.
struct Channel {
    int coupling = 0;
    double omega = 0.0;
    double rate = 0.0;
    PauliSum A;
    PauliSum Adag;
};

inline std::vector<PauliString> default_couplings(const ModelSpec& m) {
    std::vector<PauliString> out;
    for (int j = 0; j < m.n_sites; ++j) {
        out.push_back(PauliString::X(m.n_sites, j));
        if (m.kind == ModelKind::Ising) out.push_back(PauliString::Y(m.n_sites, j));
        out.push_back(PauliString::Z(m.n_sites, j));
    }
    return out;
}

/// Parses a coupling-set name: letters from {x, y, z}, e.g. "xz", "xyz", "x".
inline std::vector<PauliString> couplings_from_letters(const ModelSpec& m, const std::string& letters) {
    if (letters == "default") return default_couplings(m);
    std::vector<PauliString> out;
    for (char c : letters)
        if (c != 'x' && c != 'y' && c != 'z') throw std::invalid_argument("coupling letters must be x, y or z");
    for (int j = 0; j < m.n_sites; ++j)
        for (char c : letters)
            out.push_back(c == 'x' ? PauliString::X(m.n_sites, j)
                                   : c == 'y' ? PauliString::Y(m.n_sites, j) : PauliString::Z(m.n_sites, j));
    return out;
}

/// Symbolic Davies generator of a commuting Pauli model.
class DaviesGenerator {
public:
    DaviesGenerator(ModelSpec m, std::vector<PauliString> couplings, ThermalParams tp)
        : model_(std::move(m)), couplings_(std::move(couplings)), tp_(std::move(tp)) {
        if (!(tp_.beta >= 0.0)) throw GeneratorError("beta must be nonnegative");
        const double tol = 1e-9 * model_.J;
        for (std::size_t a = 0; a < couplings_.size(); ++a) {
            if (couplings_[a].n != model_.n_sites) throw GeneratorError("coupling acts on sites outside the model");
            couplings_[a] = couplings_[a].unsigned_form();
            jumps_.push_back(fourier_decompose(couplings_[a], model_));
            for (const auto& c : jumps_.back().components) {
                if (c.omega < -tol) continue;
                Channel ch;
                ch.coupling = static_cast<int>(a);
                ch.omega = c.omega;
                ch.rate = tp_.rate(couplings_[a], c.omega);
                ch.A = c.op;
                ch.Adag = c.op.adjoint();
                channels_.push_back(std::move(ch));
            }
        }
    }

    const ModelSpec& model() const { return model_; }
    const ThermalParams& params() const { return tp_; }
    const std::vector<PauliString>& couplings() const { return couplings_; }
    const std::vector<JumpOperatorSet>& jumps() const { return jumps_; }
    const std::vector<Channel>& channels() const { return channels_; }
    int n() const { return model_.n_sites; }

    /// Dissipator of one channel, L_{alpha omega}. A sandwich sign of -1 flips
    /// the A^dag X A and A X A^dag terms.
    SuperOp channel_dissipator(std::size_t i, double sandwich_sign = 1.0) const {
        const Channel& c = channels_.at(i);
        const int n = model_.n_sites;
        const PauliSum I = PauliSum::identity(n);
        const double w = std::exp(-tp_.beta * c.omega);
        const PauliSum AdA = c.Adag * c.A, AAd = c.A * c.Adag;
        SuperOp op(n);
        op.add(2.0 * sandwich_sign * c.rate, c.Adag, c.A);
        op.add(-c.rate, AdA, I);
        op.add(-c.rate, I, AdA);
        op.add(2.0 * sandwich_sign * c.rate * w, c.A, c.Adag);
        op.add(-c.rate * w, AAd, I);
        op.add(-c.rate * w, I, AAd);
        return op.canonicalize();
    }

    /// L restricted to channels whose coupling index satisfies pred.
    template <class Pred>
    SuperOp dissipator_if(Pred pred) const {
        SuperOp op(n());
        for (std::size_t i = 0; i < channels_.size(); ++i)
            if (pred(channels_[i])) op.add(channel_dissipator(i));
        return op.canonicalize();
    }

    SuperOp dissipator() const {
        return dissipator_if([](const Channel&) { return true; });
    }

    /// -L.
    SuperOp minus_dissipator() const {
        SuperOp op(n());
        op.add(dissipator(), -1.0);
        return op.canonicalize();
    }

    /// delta(X) = [H, X].
    SuperOp hamiltonian_part() const {
        const PauliSum H = model_.hamiltonian(), I = PauliSum::identity(n());
        SuperOp op(n());
        op.add(1.0, H, I);
        op.add(-1.0, I, H);
        return op.canonicalize();
    }

    /// G = i delta + L.
    SuperOp full_generator() const {
        SuperOp op(n());
        op.add(hamiltonian_part(), cplx{0.0, 1.0});
        op.add(dissipator());
        return op.canonicalize();
    }

    /// Master-Hamiltonian summand k_{alpha omega}: the image of -L_{alpha omega}
    /// under X -> X rho^{1/2}, with eta = e^{-beta omega / 2}.
    SuperOp master_component(std::size_t i) const {
        const Channel& c = channels_.at(i);
        const int n = model_.n_sites;
        const PauliSum I = PauliSum::identity(n);
        const double e = tp_.eta(c.omega);
        const PauliSum AdA = c.Adag * c.A, AAd = c.A * c.Adag;
        SuperOp op(n);
        op.add(c.rate, AdA, I);
        op.add(c.rate, I, AdA);
        op.add(c.rate * e * e, AAd, I);
        op.add(c.rate * e * e, I, AAd);
        op.add(-2.0 * c.rate * e, c.Adag, c.A);
        op.add(-2.0 * c.rate * e, c.A, c.Adag);
        return op.canonicalize();
    }

    SuperOp master() const {
        SuperOp op(n());
        for (std::size_t i = 0; i < channels_.size(); ++i) op.add(master_component(i));
        return op.canonicalize();
    }

    nlohmann::json provenance() const {
        nlohmann::json j;
        j["model"] = to_string(model_.kind);
        j["size"] = model_.size;
        j["n_sites"] = model_.n_sites;
        j["J"] = model_.J;
        j["beta"] = tp_.beta;
        j["betaJ"] = tp_.beta_j();
        j["gamma"] = tp_.gamma();
        j["h_plus"] = tp_.h_plus();
        j["h_minus"] = tp_.h_minus();
        j["h_zero"] = tp_.h_zero;
        j["basis"] = "normalized Pauli strings, orthonormal under tr(X^dag Y)/2^n; key = x | z << n";
        j["generator"] = "Heisenberg picture; -L stored; G = i[H,.] + L";
        auto& cs = j["couplings"] = nlohmann::json::array();
        for (const auto& c : couplings_) cs.push_back(c.to_string().substr(1));
        auto& ch = j["channels"] = nlohmann::json::array();
        for (const auto& c : channels_)
            ch.push_back({{"coupling", couplings_[static_cast<std::size_t>(c.coupling)].to_string().substr(1)},
                          {"omega", c.omega},
                          {"rate", c.rate}});
        return j;
    }

private:
    ModelSpec model_;
    std::vector<PauliString> couplings_;
    ThermalParams tp_;
    std::vector<JumpOperatorSet> jumps_;
    std::vector<Channel> channels_;
};

enum class Space { Liouville, HilbertSchmidt };

inline const char* to_string(Space s) { return s == Space::Liouville ? "liouville" : "hilbert-schmidt"; }

/// A materialized superoperator on an invariant basis.
struct SuperOperatorRep {
    BasisPtr basis;
    SparseMatrix matrix;
    Space space = Space::Liouville;
    std::optional<double> beta;
    std::string name;

    std::int64_t dim() const { return matrix.dim(); }
};

inline SuperOperatorRep make_rep(const SuperOp& op, BasisPtr basis, Space space, std::optional<double> beta,
                                 std::string name, bool hermitian) {
    SuperOperatorRep r;
    r.matrix = materialize(op, *basis, hermitian);
    r.basis = std::move(basis);
    r.space = space;
    r.beta = beta;
    r.name = std::move(name);
    return r;
}

/// -L on the full operator space (n <= 8) or on a supplied invariant basis.
inline SuperOperatorRep build_generator(const DaviesGenerator& g, BasisPtr basis = nullptr) {
    if (!basis) {
        if (g.n() > 8) throw GeneratorError("full operator space limited to 8 sites; use a block basis");
        basis = OperatorBasis::full(g.n());
    }
    // -L is self-adjoint in the beta product, and in this basis only at beta = 0.
    return make_rep(g.minus_dissipator(), basis, Space::Liouville, g.params().beta, "-L", g.params().beta == 0.0);
}

inline SuperOperatorRep build_generator(const ModelSpec& m, const std::vector<PauliString>& couplings,
                                        const ThermalParams& tp, BasisPtr basis = nullptr) {
    return build_generator(DaviesGenerator(m, couplings, tp), std::move(basis));
}

inline SuperOperatorRep build_hamiltonian_part(const DaviesGenerator& g, BasisPtr basis) {
    return make_rep(g.hamiltonian_part(), std::move(basis), Space::Liouville, g.params().beta, "delta", false);
}

/// Random complex Gaussian vectors with a fixed seed.
inline VecC random_vector(std::mt19937_64& rng, std::int64_t dim) {
    std::normal_distribution<double> nd;
    VecC v(dim);
    for (std::int64_t i = 0; i < dim; ++i) v[i] = {nd(rng), nd(rng)};
    return v;
}

/// max |<Y, L X>_beta - <L Y, X>_beta| / (|X|_beta |Y|_beta) over random pairs.
inline double detailed_balance_residual(const SuperOperatorRep& rep, const GibbsState& gs, int samples,
                                        std::uint64_t seed = 1) {
    if (rep.space != Space::Liouville || !rep.beta) throw GeneratorError("detailed balance needs a Liouville rep with beta");
    const MatC G = beta_gram(gs, *rep.basis);
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const VecC x = random_vector(rng, rep.dim()), y = random_vector(rng, rep.dim());
        const VecC lx = rep.matrix.data * x, ly = rep.matrix.data * y;
        const cplx a = y.dot(G * lx), b = ly.dot(G * x);
        const double nx = std::sqrt(std::real(x.dot(G * x))), ny = std::sqrt(std::real(y.dot(G * y)));
        worst = std::max(worst, std::abs(a - b) / (nx * ny));
    }
    return worst;
}

/// max |tr(rho L(X))| / |X|_beta over random X.
inline double stationarity_residual(const SuperOperatorRep& rep, const GibbsState& gs, int samples,
                                    std::uint64_t seed = 2) {
    const auto& basis = *rep.basis;
    VecC w = VecC::Zero(rep.dim());
    for (const auto& t : gs.rho.terms()) {
        const auto i = basis.index(t.op.key());
        if (i >= 0) w[i] = std::ldexp(1.0, basis.n()) * std::conj(t.coeff);
    }
    const MatC G = beta_gram(gs, basis);
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const VecC x = random_vector(rng, rep.dim());
        const VecC lx = rep.matrix.data * x;
        worst = std::max(worst, std::abs(cplx(w.transpose() * lx)) / std::sqrt(std::real(x.dot(G * x))));
    }
    return worst;
}

/// Residual of -<X, L_c X>_beta = r (<[A,X],[A,X]>_beta + e^{-beta omega} <[A^dag,X],[A^dag,X]>_beta)
/// for random X, relative to the left side's scale.
inline double dissipativity_identity_check(const DaviesGenerator& g, std::size_t channel, const GibbsState& gs,
                                           BasisPtr basis, int samples, std::uint64_t seed = 3) {
    const Channel& c = g.channels().at(channel);
    const SparseMatrix Lc = materialize(g.channel_dissipator(channel), *basis, false);
    const PauliSum I = PauliSum::identity(g.n());
    auto commutator = [&](const PauliSum& a) {
        SuperOp op(g.n());
        op.add(1.0, a, I);
        op.add(-1.0, I, a);
        return op.canonicalize();
    };
    const MatC G = beta_gram(gs, *basis);
    std::mt19937_64 rng(seed);
    const double w = std::exp(-g.params().beta * c.omega);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const VecC x = random_vector(rng, basis->dim());
        const PauliSum X = basis->decode(x);
        const cplx lhs = -x.dot(G * (Lc.data * x));
        const PauliSum ca = commutator(c.A).apply(X), cd = commutator(c.Adag).apply(X);
        // Commutators may leave the class; evaluate <.,.>_beta on explicit sums.
        auto bnorm = [&](const PauliSum& y) { return std::real((y.adjoint() * y * gs.rho).coefficient(0)) * std::ldexp(1.0, g.n()); };
        const double rhs = c.rate * (bnorm(ca) + w * bnorm(cd));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    return worst;
}

} // namespace davies
