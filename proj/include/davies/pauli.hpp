// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file pauli.hpp
 * @brief n-qubit Pauli strings in the symplectic (bit-mask) representation.
 *
 * A PauliString stores an x-mask, a z-mask and an exponent k in Z_4 such that
 * the operator equals i^k times the tensor product of the Hermitian letters
 * I, X, Y, Z selected per site by (x_j, z_j) = (0,0), (1,0), (1,1), (0,1).
 * Site j is bit j of both masks; site 0 is the leftmost letter of the text
 * form and the least significant bit of a computational basis index.
 */

#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace davies {

using cplx = std::complex<double>;

inline constexpr int kMaxSites = 32;

class PauliError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Value of i^k for k in Z_4.
inline cplx phase_value(unsigned k) {
    switch (k & 3u) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

struct PauliString {
    int n = 0;
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    std::uint8_t phase = 0; ///< exponent of i, relative to the Hermitian letter form

    PauliString() = default;
    PauliString(int n_sites, std::uint64_t x_mask, std::uint64_t z_mask, unsigned ph = 0)
        : n(n_sites), x(x_mask), z(z_mask), phase(static_cast<std::uint8_t>(ph & 3u)) {
        if (n < 0 || n > kMaxSites) throw PauliError("PauliString: site count out of range");
        const std::uint64_t lim = n == 64 ? ~0ull : ((1ull << n) - 1ull);
        if ((x & ~lim) || (z & ~lim)) throw PauliError("PauliString: mask has bits outside the sites");
    }

    static PauliString identity(int n) { return {n, 0, 0}; }
    static PauliString X(int n, int j) { return {n, 1ull << j, 0}; }
    static PauliString Y(int n, int j) { return {n, 1ull << j, 1ull << j}; }
    static PauliString Z(int n, int j) { return {n, 0, 1ull << j}; }

    /// Parses "+XIZY", "-iXX", "i ZZ"; a missing prefix means "+".
    static PauliString parse(std::string_view text);

    std::string to_string() const;

    /// Key identifying the string up to phase: x | z << n.
    std::uint64_t key() const { return x | (z << n); }
    static PauliString from_key(int n, std::uint64_t key) {
        const std::uint64_t lim = (1ull << n) - 1ull;
        return {n, key & lim, (key >> n) & lim};
    }

    bool is_identity() const { return x == 0 && z == 0; }
    bool is_hermitian() const { return (phase & 1u) == 0; }
    int weight() const { return std::popcount(x | z); }
    std::uint64_t support() const { return x | z; }
    cplx coefficient() const { return phase_value(phase); }

    /// Same string with phase reset to the Hermitian letter form.
    PauliString unsigned_form() const { return {n, x, z, 0}; }

    bool operator==(const PauliString&) const = default;
};

inline void require_same_size(const PauliString& a, const PauliString& b) {
    if (a.n != b.n) throw PauliError("Pauli operands act on different site counts");
}

/// Exact product P*Q with phase tracking.
inline PauliString multiply(const PauliString& p, const PauliString& q) {
    require_same_size(p, q);
    // Letter form -> X^x Z^z form carries i^{|x&z|}; X^a Z^b X^c Z^d = (-1)^{|b&c|} X^{a^c} Z^{b^d}.
    const std::uint64_t x = p.x ^ q.x;
    const std::uint64_t z = p.z ^ q.z;
    const int k = p.phase + q.phase + std::popcount(p.x & p.z) + std::popcount(q.x & q.z) +
                  2 * std::popcount(p.z & q.x) - std::popcount(x & z);
    return {p.n, x, z, static_cast<unsigned>(((k % 4) + 4) % 4)};
}

inline PauliString operator*(const PauliString& p, const PauliString& q) { return multiply(p, q); }

/// Hermitian adjoint (letters are Hermitian, only the phase conjugates).
inline PauliString adjoint(const PauliString& p) {
    return {p.n, p.x, p.z, static_cast<unsigned>((4 - p.phase) & 3u)};
}

/// Symplectic form; 0 iff the strings commute.
inline int symplectic(const PauliString& p, const PauliString& q) {
    return (std::popcount(p.x & q.z) + std::popcount(p.z & q.x)) & 1;
}

inline bool commutes(const PauliString& p, const PauliString& q) {
    require_same_size(p, q);
    return symplectic(p, q) == 0;
}

/// Matrix element <b ^ x| P |b> for computational basis state b.
inline cplx column_entry(const PauliString& p, std::uint64_t b) {
    const int k = p.phase + std::popcount(p.x & p.z) + 2 * std::popcount(p.z & b);
    return phase_value(static_cast<unsigned>(k));
}

inline PauliString PauliString::parse(std::string_view text) {
    unsigned ph = 0;
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < text.size() && text[pos] == ' ') ++pos;
    };
    skip_space();
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        if (text[pos] == '-') ph = 2;
        ++pos;
    }
    skip_space();
    if (pos < text.size() && text[pos] == 'i') {
        ph += 1;
        ++pos;
    }
    skip_space();
    const std::string_view letters = text.substr(pos);
    if (letters.size() > static_cast<std::size_t>(kMaxSites)) throw PauliError("Pauli text too long");
    std::uint64_t x = 0, z = 0;
    for (std::size_t j = 0; j < letters.size(); ++j) {
        switch (letters[j]) {
        case 'I': break;
        case 'X': x |= 1ull << j; break;
        case 'Y': x |= 1ull << j; z |= 1ull << j; break;
        case 'Z': z |= 1ull << j; break;
        default: throw PauliError("invalid Pauli letter '" + std::string(1, letters[j]) + "'");
        }
    }
    return {static_cast<int>(letters.size()), x, z, ph & 3u};
}

inline std::string PauliString::to_string() const {
    static constexpr const char* prefix[] = {"+", "+i", "-", "-i"};
    std::string s = prefix[phase & 3u];
    for (int j = 0; j < n; ++j) {
        const bool xb = (x >> j) & 1u, zb = (z >> j) & 1u;
        s += xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
    }
    return s;
}

} // namespace davies
