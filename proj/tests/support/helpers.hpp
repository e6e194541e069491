#pragma once

#include "gsimc/data.hpp"
#include "gsimc/graph.hpp"
#include "gsimc/spectral.hpp"

#include <vector>

namespace testing_support {

/// Dense 0/1 matrix -> library rating matrix.
inline gsimc::RatingMatrix to_rating(const gsimc::Matrix& r) {
    std::vector<std::pair<gsimc::ItemRow, std::size_t>> pairs;
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < r.cols(); ++j)
            if (r(i, j) != 0.0) pairs.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return gsimc::rating_matrix_from_pairs(static_cast<std::size_t>(r.rows()), static_cast<std::size_t>(r.cols()), pairs);
}

inline gsimc::SpectralBasis full_basis(const gsimc::Matrix& l) {
    return gsimc::exact_eigs(l, static_cast<std::size_t>(l.rows()));
}

}  // namespace testing_support
