#include "gsimc/model.hpp"

#include "gsimc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gsimc {

namespace {

std::vector<ItemRow> sorted_unique(std::span<const ItemRow> items) {
    std::vector<ItemRow> out(items.begin(), items.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

GsImcModel GsImcModel::fit(SpectralBasis basis, KernelSpec kernel) {
    validate(kernel);
    Vector gains = h_diagonal(kernel, basis.eigenvalues);
    return GsImcModel(std::move(basis), kernel, std::move(gains));
}

GsImcModel fit(SpectralBasis basis, KernelSpec kernel) {
    return GsImcModel::fit(std::move(basis), kernel);
}

Vector GsImcModel::fourier_prediction(std::span<const ItemRow> items) const {
    return gains_.cwiseProduct(gft_indicator(basis_, items));
}

Vector GsImcModel::filter(const Vector& f) const {
    return igft(basis_, gains_.cwiseProduct(gft(basis_, f)));
}

Matrix GsImcModel::filter_matrix() const {
    const auto& u = basis_.eigenvectors;
    return u * gains_.asDiagonal() * u.transpose();
}

bool Prediction::is_observed(ItemRow item) const {
    return std::binary_search(observed.begin(), observed.end(), item);
}

Prediction reconstruct(const GsImcModel& model, const Vector& s) {
    if (static_cast<std::size_t>(s.size()) != model.n_items()) {
        throw DimensionError("reconstruct: signal length " + std::to_string(s.size()) + " != n=" +
                             std::to_string(model.n_items()));
    }
    std::vector<ItemRow> support;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] == 1.0) {
            support.push_back(static_cast<ItemRow>(i));
        } else if (s[i] != 0.0) {
            throw PreconditionError("reconstruct: observation vector must be binary");
        }
    }
    return reconstruct(model, support);
}

Prediction reconstruct(const GsImcModel& model, std::span<const ItemRow> observed) {
    Prediction p;
    p.observed = sorted_unique(observed);
    p.scores = igft(model.basis(), model.fourier_prediction(p.observed));
    return p;
}

Prediction incremental_update(const GsImcModel& model, const Prediction& prior,
                              std::span<const ItemRow> delta) {
    const auto d = sorted_unique(delta);
    for (const auto item : d) {
        if (prior.is_observed(item)) {
            throw PreconditionError("incremental_update: item " + std::to_string(item) +
                                    " is already observed");
        }
    }
    Prediction next;
    next.scores = prior.scores;
    if (!d.empty()) next.scores += igft(model.basis(), model.fourier_prediction(d));
    next.observed.reserve(prior.observed.size() + d.size());
    std::merge(prior.observed.begin(), prior.observed.end(), d.begin(), d.end(),
               std::back_inserter(next.observed));
    return next;
}

std::vector<ItemRow> recommend_topn(const Vector& scores, std::span<const ItemRow> excluded,
                                    std::size_t n_rec) {
    const auto n = static_cast<std::size_t>(scores.size());
    std::vector<char> blocked(n, 0);
    for (const auto i : excluded) {
        if (i < n) blocked[i] = 1;
    }
    std::vector<ItemRow> candidates;
    candidates.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!blocked[i]) candidates.push_back(i);
    }
    const auto better = [&scores](ItemRow a, ItemRow b) {
        const double sa = scores[static_cast<Eigen::Index>(a)];
        const double sb = scores[static_cast<Eigen::Index>(b)];
        return sa != sb ? sa > sb : a < b;
    };
    const std::size_t take = std::min(n_rec, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                      candidates.end(), better);
    candidates.resize(take);
    return candidates;
}

std::vector<ItemRow> recommend_topn(const Prediction& pred, std::size_t n_rec) {
    return recommend_topn(pred.scores, pred.observed, n_rec);
}

}  // namespace gsimc
