// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

// Gap of the open bond chain built from 4 x 4 bond-pair projectors.

#include <cstdio>

#include "davies/spectral.hpp"

int main() {
    using namespace davies;
    for (double gamma : {0.2, 0.5, 1.0}) {
        const ThermalParams tp = ThermalParams::from_beta_j(-0.5 * std::log(gamma));
        std::printf("gamma = %.2f, bound gamma^2/(1+gamma^2) = %.6f\n", gamma, gamma * gamma / (1 + gamma * gamma));
        for (int N = 3; N <= 12; ++N) {
            const GapReport r = gap(abelian_chain_hamiltonian(N, tp), 2, abelian_chain_kernel(N, gamma));
            std::printf("  N = %2d  gap %.10f  (%s)\n", N, r.gap, to_string(r.solver));
        }
    }
}
