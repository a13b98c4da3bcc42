// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

// Block decomposition of the L = 2 toric-code master Hamiltonian: smallest
// block gaps, their labels, and the sigma^x sign-flip restriction.

#include <algorithm>
#include <cstdio>

#include "davies/spectral.hpp"

int main() {
    using namespace davies;
    const ModelSpec m = build_toric_code(2, 1.0);
    const ThermalParams tp = ThermalParams::from_beta_j(0.25);
    const DaviesGenerator g(m, default_couplings(m), tp);
    const SyndromeFrame fr(m);
    std::printf("%s: %llu blocks of dimension %llu\n", m.label().c_str(),
                static_cast<unsigned long long>(fr.block_count()), static_cast<unsigned long long>(fr.block_dim()));

    auto gaps = block_gaps(g);
    std::sort(gaps.begin(), gaps.end(), [](const BlockGap& a, const BlockGap& b) { return a.gap < b.gap; });
    for (std::size_t i = 0; i < 5; ++i)
        std::printf("  gap %.10f  %s\n", gaps[i].gap, block_label(fr, gaps[i].syndrome).to_string().c_str());
    std::printf("bound thm2 = %.10f\n", theorem_bound(m, tp));

    KitaevXBlock blk;
    blk.nu = 1;
    const SignFlipResult sf = sign_flip_restriction(g, blk);
    std::printf("sign-flip restriction (V = Z_1): %zu flipped sites, residual %.2e\n", sf.flipped_sites.size(),
                sf.residual);
}
