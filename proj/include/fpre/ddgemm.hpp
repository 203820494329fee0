// Register-blocked double-double matrix multiplication: a BLIS-style inner
// kernel on packed panels plus a minimal blocked driver. The kernel walks k
// outermost and the register block in row-major (i, j) order, so every output
// element accumulates its k-products in increasing-k order regardless of the
// blocking parameters; results are bitwise independent of the configuration.
// Edge tiles are zero-padded in the m/n directions only; the k range is
// truncated, never padded.
#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fpre/dd.hpp"

namespace fpre {

struct kernel_config {
    int mr = 8;   // register-block rows, one of {2, 4, 6, 8}
    int nr = 4;   // register-block cols, one of {2, 4, 8}
    int kc = 64;  // depth per kernel call, >= 1

    bool valid() const {
        return (mr == 2 || mr == 4 || mr == 6 || mr == 8) &&
               (nr == 2 || nr == 4 || nr == 8) && kc >= 1;
    }
};

inline std::vector<kernel_config> kernel_config_sweep(int kc = 64) {
    std::vector<kernel_config> v;
    for (int mr : {2, 4, 6, 8})
        for (int nr : {2, 4, 8}) v.push_back({mr, nr, kc});
    return v;
}

struct dd_matrix {
    int rows = 0, cols = 0;
    std::vector<double_double> data;  // row-major

    dd_matrix() = default;
    dd_matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, {0.0, 0.0}) {
        if (r <= 0 || c <= 0) throw std::invalid_argument("dd_matrix: non-positive shape");
    }
    double_double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    const double_double& at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    static dd_matrix identity(int n) {
        dd_matrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = {1.0, 0.0};
        return m;
    }
};

// c_block (mr x nr, row-major) += a_panel (mr x kc, k-major: mr entries per k)
// times b_panel (kc x nr, k-major: nr entries per k), depth k_eff <= cfg.kc
template <eft_backend BK, typename T>
inline void ddgemm_kernel(const dd_pair<T>* a_panel, const dd_pair<T>* b_panel,
                          dd_pair<T>* c_block, kernel_config cfg, int k_eff) {
    for (int k = 0; k < k_eff; ++k) {
        const dd_pair<T>* a = a_panel + static_cast<std::size_t>(k) * cfg.mr;
        const dd_pair<T>* b = b_panel + static_cast<std::size_t>(k) * cfg.nr;
        for (int i = 0; i < cfg.mr; ++i)
            for (int j = 0; j < cfg.nr; ++j)
                c_block[static_cast<std::size_t>(i) * cfg.nr + j] =
                    dd_add<BK>(c_block[static_cast<std::size_t>(i) * cfg.nr + j],
                               dd_mul<BK>(a[i], b[j]));
    }
}

inline void ddgemm_kernel(std::span<const double_double> a_panel,
                          std::span<const double_double> b_panel,
                          std::span<double_double> c_block, kernel_config cfg,
                          eft_backend bk = eft_backend::baseline) {
    if (!cfg.valid()) throw std::invalid_argument("ddgemm_kernel: invalid config");
    if (a_panel.size() % cfg.mr != 0 || b_panel.size() % cfg.nr != 0 ||
        a_panel.size() / cfg.mr != b_panel.size() / cfg.nr ||
        c_block.size() != static_cast<std::size_t>(cfg.mr) * cfg.nr)
        throw std::invalid_argument("ddgemm_kernel: panel shape mismatch");
    int k_eff = static_cast<int>(a_panel.size() / cfg.mr);
    if (k_eff > cfg.kc) throw std::invalid_argument("ddgemm_kernel: panel depth exceeds kc");
    switch (bk) {
        case eft_backend::baseline:
            return ddgemm_kernel<eft_backend::baseline>(a_panel.data(), b_panel.data(),
                                                        c_block.data(), cfg, k_eff);
        case eft_backend::fpaddre_exact:
            return ddgemm_kernel<eft_backend::fpaddre_exact>(a_panel.data(), b_panel.data(),
                                                             c_block.data(), cfg, k_eff);
        case eft_backend::fpaddre_simulated:
            return ddgemm_kernel<eft_backend::fpaddre_simulated>(a_panel.data(), b_panel.data(),
                                                                 c_block.data(), cfg, k_eff);
    }
    throw std::invalid_argument("ddgemm_kernel: unknown backend");
}

namespace detail {

// rows [i0, i0+mr) x depth [k0, k0+k_eff) of a, zero-padded past the row edge
inline void pack_a(const dd_matrix& a, int i0, int k0, int mr, int k_eff,
                   std::vector<double_double>& out) {
    out.assign(static_cast<std::size_t>(mr) * k_eff, {0.0, 0.0});
    for (int k = 0; k < k_eff; ++k)
        for (int i = 0; i < mr && i0 + i < a.rows; ++i)
            out[static_cast<std::size_t>(k) * mr + i] = a.at(i0 + i, k0 + k);
}

// depth [k0, k0+k_eff) x cols [j0, j0+nr) of b, zero-padded past the col edge
inline void pack_b(const dd_matrix& b, int k0, int j0, int nr, int k_eff,
                   std::vector<double_double>& out) {
    out.assign(static_cast<std::size_t>(nr) * k_eff, {0.0, 0.0});
    for (int k = 0; k < k_eff; ++k)
        for (int j = 0; j < nr && j0 + j < b.cols; ++j)
            out[static_cast<std::size_t>(k) * nr + j] = b.at(k0 + k, j0 + j);
}

}  // namespace detail

// returns c + a * b
inline dd_matrix ddgemm(const dd_matrix& a, const dd_matrix& b, dd_matrix c,
                        kernel_config cfg, eft_backend bk = eft_backend::baseline) {
    if (!cfg.valid()) throw std::invalid_argument("ddgemm: invalid config");
    if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols)
        throw std::invalid_argument("ddgemm: shape mismatch");

    std::vector<double_double> a_pack, b_pack;
    std::vector<double_double> c_tile(static_cast<std::size_t>(cfg.mr) * cfg.nr);
    for (int j0 = 0; j0 < b.cols; j0 += cfg.nr) {
        for (int k0 = 0; k0 < a.cols; k0 += cfg.kc) {
            int k_eff = std::min(cfg.kc, a.cols - k0);
            detail::pack_b(b, k0, j0, cfg.nr, k_eff, b_pack);
            for (int i0 = 0; i0 < a.rows; i0 += cfg.mr) {
                detail::pack_a(a, i0, k0, cfg.mr, k_eff, a_pack);
                for (int i = 0; i < cfg.mr; ++i)
                    for (int j = 0; j < cfg.nr; ++j)
                        c_tile[static_cast<std::size_t>(i) * cfg.nr + j] =
                            (i0 + i < c.rows && j0 + j < c.cols) ? c.at(i0 + i, j0 + j)
                                                                 : double_double{0.0, 0.0};
                ddgemm_kernel(std::span<const double_double>(a_pack),
                              std::span<const double_double>(b_pack),
                              std::span<double_double>(c_tile), cfg, bk);
                for (int i = 0; i < cfg.mr && i0 + i < c.rows; ++i)
                    for (int j = 0; j < cfg.nr && j0 + j < c.cols; ++j)
                        c.at(i0 + i, j0 + j) = c_tile[static_cast<std::size_t>(i) * cfg.nr + j];
            }
        }
    }
    return c;
}

}  // namespace fpre
