#include "nbdkal/counts.hpp"

#include <cmath>
#include <cstdlib>

namespace nbdkal {

namespace {

double nk(const BlockStructure& s, Index k) {
    if (k < 0 || k >= s.block_count()) return 0.0; // n_0 = n_{N_b+1} = 0
    return static_cast<double>(s.size(k));
}

bool in_band(BandProfile profile, Index k, Index l) {
    if (profile == BandProfile::General) return true;
    return std::abs(k - l) <= 1;
}

} // namespace

double mul_first_order_count(const BlockStructure& s, BandProfile profile) {
    double total = s.sum_sizes_cubed();
    for (Index k = 0; k < s.block_count(); ++k) {
        for (Index l = 0; l < s.block_count(); ++l) {
            if (k == l || !in_band(profile, k, l)) continue;
            // P^(0)_k Q^(1)_{k,l} and P^(1)_{k,l} Q^(0)_l
            total += nk(s, k) * nk(s, k) * nk(s, l);
            total += nk(s, k) * nk(s, l) * nk(s, l);
        }
    }
    return total;
}

double mul_first_order_count_moments(const BlockStructure& s) {
    double nb = static_cast<double>(s.block_count());
    double n = static_cast<double>(s.dim());
    double n2 = s.moment_n2();
    double n3 = s.moment_n3();
    return 2.0 * n * n2 * n2 / nb - n3 * n3 * n3 / (nb * nb);
}

double mul_first_order_count_nearest_equal(const BlockStructure& s) {
    double nb = static_cast<double>(s.block_count());
    double n = static_cast<double>(s.dim());
    return 5.0 * n * n * n / (nb * nb) - 4.0 * n * n * n / (nb * nb * nb);
}

double sym_product_count(const BlockStructure& s, BandProfile profile) {
    double total = 0;
    for (Index k = 0; k < s.block_count(); ++k) {
        double a = nk(s, k);
        total += a * a * a;               // A_k = R0_k Q0_k
        total += a * a * (a + 1.0) / 2.0; // S0_k = A_k R0_k^T, lower half
        for (Index l = 0; l < s.block_count(); ++l) {
            if (k == l || !in_band(profile, k, l)) continue;
            total += a * a * nk(s, l); // C_{k,l} = A_k R1_{l,k}^T
        }
    }
    // R0 Q1 R0^T: full first stage, lower-triangle second stage.
    for (Index k = 0; k < s.block_count(); ++k) {
        for (Index l = 0; l < s.block_count(); ++l) {
            if (k == l || !in_band(profile, k, l)) continue;
            total += nk(s, k) * nk(s, l) * nk(s, l); // B_{k,l} = Q1_{k,l} R0_l^T
            if (k > l) total += nk(s, k) * nk(s, k) * nk(s, l); // (R0 B)_{k,l}
        }
    }
    return total;
}

double sym_product_count_moments(const BlockStructure& s) {
    double nb = static_cast<double>(s.block_count());
    double n = static_cast<double>(s.dim());
    double n2 = s.moment_n2();
    double n3 = s.moment_n3();
    return (5.0 * n + 1.0) * n2 * n2 / (2.0 * nb) - n3 * n3 * n3 / (nb * nb);
}

double sym_product_count_nearest(const BlockStructure& s) {
    double total = 0;
    for (Index k = 0; k < s.block_count(); ++k) {
        double a = nk(s, k);
        total += 0.5 * a * a * (3.0 * a + 1.0 + 5.0 * (nk(s, k - 1) + nk(s, k + 1)));
    }
    return total;
}

double inverse_update_count(const BlockStructure& s) {
    double total = s.sum_sizes_cubed(); // W_k = M0_k^-1 P0_k
    for (Index k = 0; k < s.block_count(); ++k) {
        for (Index l = 0; l < s.block_count(); ++l) {
            if (k == l) continue;
            total += 2.0 * nk(s, k) * nk(s, l) * nk(s, l);          // two full first stages
            if (k > l) total += 2.0 * nk(s, k) * nk(s, k) * nk(s, l); // two lower second stages
        }
    }
    return total;
}

double inverse_update_count_moments(const BlockStructure& s) {
    double n = static_cast<double>(s.dim());
    double total = 0;
    for (Index k = 0; k < s.block_count(); ++k) {
        double a = nk(s, k);
        total += a * a * (3.0 * n - 2.0 * a);
    }
    return total;
}

double ld_factor_count(const BlockStructure& s) { return 0.5 * s.sum_sizes_cubed(); }

double block_recover_count(const BlockStructure& s) {
    return 0.5 * s.sum_sizes_cubed() + s.sum_sizes_squared();
}

double dense_sym_product_count(Index n) {
    double d = static_cast<double>(n);
    return 1.5 * d * d * d + 0.5 * d * d;
}

double dense_spd_inverse_count(Index n) {
    double d = static_cast<double>(n);
    return 0.5 * d * d * d;
}

long storage_count(const BlockStructure& s, BandProfile profile, bool symmetric,
                   FirstOrderDiagonal convention) {
    long total = 0;
    const long n = static_cast<long>(s.dim());
    if (profile == BandProfile::General) {
        total = symmetric ? n * (n + 1) / 2 : n * n;
    } else {
        for (Index k = 0; k < s.block_count(); ++k) {
            long a = static_cast<long>(s.size(k));
            long next = (k + 1 < s.block_count()) ? static_cast<long>(s.size(k + 1)) : 0;
            total += symmetric ? a * (a + 1) / 2 + a * next : a * a + 2 * a * next;
        }
    }
    if (convention == FirstOrderDiagonal::Split) {
        for (Index k = 0; k < s.block_count(); ++k) {
            long a = static_cast<long>(s.size(k));
            total += symmetric ? a * (a + 1) / 2 : a * a;
        }
    }
    return total;
}

} // namespace nbdkal
