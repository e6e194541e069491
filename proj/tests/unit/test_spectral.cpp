#include "gsimc/errors.hpp"
#include "gsimc/graph.hpp"
#include "gsimc/spectral.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include <Eigen/Eigenvalues>
#include <filesystem>

using namespace gsimc;
using testing_support::full_basis;
using testing_support::to_rating;

namespace {

Laplacian random_laplacian(int n, int m, double density, std::uint64_t seed) {
    return hypergraph_laplacian(to_rating(oracle::random_ratings(n, m, density, seed)));
}

}  // namespace

TEST(ExactEigs, MatchesDenseSolverAndIsOrthonormal) {
    const auto l = random_laplacian(40, 60, 0.1, 7);
    Eigen::SelfAdjointEigenSolver<Matrix> es(l.matrix);
    const auto b = exact_eigs(l, 15);
    ASSERT_EQ(b.k(), 15u);
    ASSERT_EQ(b.n(), 40u);
    EXPECT_LE((b.eigenvalues - es.eigenvalues().head(15)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(orthonormality_error(b), 1e-10);
    for (Eigen::Index j = 0; j < 15; ++j) {
        EXPECT_LE((l.matrix * b.eigenvectors.col(j) - b.eigenvalues[j] * b.eigenvectors.col(j)).norm(), 1e-9);
        Eigen::Index arg = 0;
        b.eigenvectors.col(j).cwiseAbs().maxCoeff(&arg);
        EXPECT_GT(b.eigenvectors(arg, j), 0.0);
    }
    EXPECT_TRUE(std::is_sorted(b.eigenvalues.begin(), b.eigenvalues.end()));
}

TEST(ExactEigs, RankBounds) {
    const auto l = random_laplacian(10, 20, 0.2, 1);
    EXPECT_THROW(exact_eigs(l, 0), PreconditionError);
    EXPECT_THROW(exact_eigs(l, 11), PreconditionError);
    EXPECT_EQ(exact_eigs(l, 10).k(), 10u);
    EXPECT_THROW(exact_eigs(Matrix::Zero(3, 4), 1), DimensionError);
}

TEST(Nystrom, AllColumnsRecoversLeadingPairs) {
    const auto l = random_laplacian(60, 120, 0.08, 3);
    const auto exact = exact_eigs(l, 10);
    NystromParams p;
    p.columns = 60;
    p.rank = 10;
    p.oversampling = 50;  // k + p = l: the sketch spans everything
    p.power_iterations = 3;
    p.seed = 5;
    const auto approx = nystrom_eigs(l, p);
    EXPECT_LE((approx.eigenvalues - exact.eigenvalues).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE(orthonormality_error(approx), 1e-6);
    EXPECT_EQ(std::get<NystromParams>(approx.method), p);
    // Same subspace: projections of exact vectors onto the approximate basis.
    const Matrix overlap = approx.eigenvectors.transpose() * exact.eigenvectors;
    EXPECT_GE(overlap.cwiseAbs().colwise().maxCoeff().minCoeff(), 1.0 - 1e-4);
}

TEST(Nystrom, SeedDeterminism) {
    const auto l = random_laplacian(50, 100, 0.1, 4);
    NystromParams p{40, 10, 10, 2, 11};
    const auto a = nystrom_eigs(l, p);
    const auto b = nystrom_eigs(l, p);
    EXPECT_EQ(a.eigenvalues, b.eigenvalues);
    EXPECT_EQ(a.eigenvectors, b.eigenvectors);
}

TEST(Nystrom, ParameterValidation) {
    const auto l = random_laplacian(30, 60, 0.1, 2);
    EXPECT_THROW(nystrom_eigs(l, NystromParams{10, 5, 10, 2, 1}), PreconditionError);  // k + p > l
    EXPECT_THROW(nystrom_eigs(l, NystromParams{31, 5, 10, 2, 1}), PreconditionError);  // l > n
    EXPECT_THROW(nystrom_eigs(l, NystromParams{20, 0, 10, 2, 1}), PreconditionError);
}

TEST(Nystrom, RankDeficientSample) {
    // Two disconnected cliques: S = I - L has rank 2, so any sample of A has rank <= 2.
    Matrix r = Matrix::Zero(12, 2);
    r.block(0, 0, 6, 1).setOnes();
    r.block(6, 1, 6, 1).setOnes();
    const auto l = hypergraph_laplacian(to_rating(r));
    EXPECT_THROW(nystrom_eigs(l, NystromParams{10, 3, 2, 1, 1}), RankDeficiencyError);
}

TEST(Transforms, RoundTripAndIndicator) {
    const auto l = random_laplacian(25, 40, 0.15, 9);
    const auto b = full_basis(l.matrix);
    Vector f = Vector::LinSpaced(25, -1.0, 2.0);
    EXPECT_LE((igft(b, gft(b, f)) - f).cwiseAbs().maxCoeff(), 1e-12);

    const std::vector<ItemRow> items = {1, 4, 7};
    Vector s = Vector::Zero(25);
    for (auto i : items) s[static_cast<Eigen::Index>(i)] = 1.0;
    EXPECT_LE((gft_indicator(b, items) - gft(b, s)).cwiseAbs().maxCoeff(), 1e-14);

    EXPECT_THROW(gft(b, Vector::Zero(24)), DimensionError);
    EXPECT_THROW(igft(b, Vector::Zero(3)), DimensionError);
    const std::vector<ItemRow> bad = {25};
    EXPECT_THROW(gft_indicator(b, bad), DimensionError);
}

TEST(Transforms, BandAndPaleyWiener) {
    const auto b = full_basis(oracle::hypergraph_laplacian(oracle::fixture_ratings()));
    EXPECT_EQ(band(b, 0.6).k(), 2u);
    EXPECT_EQ(truncate(b, 1).k(), 1u);
    EXPECT_THROW(truncate(b, 4), PreconditionError);
    const Vector u1 = b.eigenvectors.col(1);
    EXPECT_TRUE(in_paley_wiener(b, u1, 0.5));
    EXPECT_FALSE(in_paley_wiener(b, u1, 0.1));
    EXPECT_NEAR(bandlimit_residual(b, u1, 0.1), 1.0, 1e-12);
}

TEST(BasisIo, RoundTripPreservesEverything) {
    const auto l = random_laplacian(20, 30, 0.2, 6);
    NystromParams p{15, 4, 3, 1, 77};
    const auto b = nystrom_eigs(l, p);
    const auto path = std::filesystem::temp_directory_path() / "gsimc_test_basis.bin";
    save_basis(path, b, content_hash(l));
    const auto loaded = load_basis(path);
    EXPECT_EQ(loaded.laplacian_hash, content_hash(l));
    EXPECT_EQ(loaded.basis.eigenvalues, b.eigenvalues);
    EXPECT_EQ(loaded.basis.eigenvectors, b.eigenvectors);
    EXPECT_EQ(std::get<NystromParams>(loaded.basis.method), p);
    std::filesystem::remove(path);
}

TEST(BasisIo, RejectsGarbage) {
    const auto path = std::filesystem::temp_directory_path() / "gsimc_test_garbage.bin";
    { std::ofstream(path) << "definitely not a basis"; }
    EXPECT_THROW(load_basis(path), IoError);
    std::filesystem::remove(path);
    EXPECT_THROW(load_basis(path), IoError);
}
