#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>

namespace gsimc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Dense row index of an item in the rating matrix (a graph vertex).
using ItemRow = std::size_t;

inline constexpr std::uint64_t kDefaultSeed = 9876;

}  // namespace gsimc
