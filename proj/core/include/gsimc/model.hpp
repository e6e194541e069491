#pragma once

#include "gsimc/kernels.hpp"
#include "gsimc/spectral.hpp"
#include "gsimc/types.hpp"

#include <span>
#include <vector>

namespace gsimc {

/// Closed-form spectral filter H(L) = U_k diag(H(lambda)) U_k^T with the
/// gains cached at construction.
class GsImcModel {
public:
    /// Throws KernelDomainError if the kernel does not cover the basis spectrum.
    static GsImcModel fit(SpectralBasis basis, KernelSpec kernel);

    [[nodiscard]] const SpectralBasis& basis() const { return basis_; }
    [[nodiscard]] const KernelSpec& kernel() const { return kernel_; }
    [[nodiscard]] const Vector& gains() const { return gains_; }
    [[nodiscard]] std::size_t n_items() const { return basis_.n(); }
    [[nodiscard]] std::size_t rank() const { return basis_.k(); }

    /// gains .* (U_k^T s) for the indicator of `items`.
    [[nodiscard]] Vector fourier_prediction(std::span<const ItemRow> items) const;

    /// H(L) f for an arbitrary real signal.
    [[nodiscard]] Vector filter(const Vector& f) const;

    /// Dense n x n filter matrix; intended for small graphs and tests.
    [[nodiscard]] Matrix filter_matrix() const;

private:
    GsImcModel(SpectralBasis basis, KernelSpec kernel, Vector gains)
        : basis_(std::move(basis)), kernel_(kernel), gains_(std::move(gains)) {}

    SpectralBasis basis_;
    KernelSpec kernel_;
    Vector gains_;
};

/// Scores for every item plus the observed set that produced them.
struct Prediction {
    Vector scores;
    std::vector<ItemRow> observed;  // sorted, unique

    [[nodiscard]] bool is_observed(ItemRow item) const;
};

GsImcModel fit(SpectralBasis basis, KernelSpec kernel);

/// y = H(L) s for a binary s. Throws PreconditionError on a non-binary entry.
Prediction reconstruct(const GsImcModel& model, const Vector& s);
/// Same, with s given as its support.
Prediction reconstruct(const GsImcModel& model, std::span<const ItemRow> observed);

/// y_new = y + H(L) delta_s. `delta` must be disjoint from prior.observed.
Prediction incremental_update(const GsImcModel& model, const Prediction& prior,
                              std::span<const ItemRow> delta);

/// Unobserved items by descending score; ties go to the lower row index.
/// Returns all candidates when fewer than n_rec exist.
std::vector<ItemRow> recommend_topn(const Prediction& pred, std::size_t n_rec);
std::vector<ItemRow> recommend_topn(const Vector& scores, std::span<const ItemRow> excluded,
                                    std::size_t n_rec);

}  // namespace gsimc
