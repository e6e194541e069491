#include "gsimc/errors.hpp"
#include "gsimc/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace gsimc;

TEST(Penalty, FamilyFormulas) {
    EXPECT_DOUBLE_EQ(r_value(Tikhonov{2.0}, 0.5).value, 1.0);
    EXPECT_DOUBLE_EQ(r_value(Diffusion{2.0}, 0.5).value, std::exp(0.5));
    EXPECT_DOUBLE_EQ(r_value(RandomWalk{4.0}, 1.0).value, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(r_value(InverseCosine{}, 1.0).value, 1.0 / std::cos(std::numbers::pi / 4.0));
    EXPECT_DOUBLE_EQ(r_value(BandlimitedCutoff{0.5}, 0.5).value, 1.0);
    EXPECT_TRUE(r_value(BandlimitedCutoff{0.5}, 0.6).infinite);
}

TEST(Penalty, DomainGuards) {
    EXPECT_THROW(r_value(RandomWalk{2.0}, 2.0), KernelDomainError);
    EXPECT_THROW(r_value(InverseCosine{}, 2.0), KernelDomainError);
    EXPECT_THROW(r_value(Tikhonov{}, -0.1), KernelDomainError);
    EXPECT_NO_THROW(r_value(Tikhonov{}, -1e-12));  // roundoff below zero is clamped
    EXPECT_THROW(validate(KernelSpec{RandomWalk{1.5}, 1.0}), KernelDomainError);
    EXPECT_THROW(validate(KernelSpec{Tikhonov{}, 0.0}), KernelDomainError);
    EXPECT_THROW(validate(KernelSpec{Diffusion{-1.0}, 1.0}), KernelDomainError);
    EXPECT_THROW(make_family("gaussian", 1, 4, 0), KernelDomainError);
}

TEST(Gain, TikhonovFixtureGains) {
    const KernelSpec spec{Tikhonov{1.0}, 1.0};
    Vector lambda(3);
    lambda << 0.0, 0.5, 1.0;
    const Vector h = h_diagonal(spec, lambda);
    EXPECT_NEAR(h[0], 1.0, 1e-15);
    EXPECT_NEAR(h[1], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(h[2], 0.5, 1e-15);
}

TEST(Gain, CutoffIsBandIndicator) {
    const KernelSpec spec{BandlimitedCutoff{0.0}, 10.0};
    EXPECT_EQ(h_value(spec, 0.0), 1.0);
    EXPECT_EQ(h_value(spec, 1e-3), 0.0);
}

TEST(Gain, NonincreasingAndInUnitInterval) {
    const Vector lambda = Vector::LinSpaced(200, 0.0, 1.99);
    for (const auto& fam : {KernelFamily{Tikhonov{}}, KernelFamily{Diffusion{}}, KernelFamily{RandomWalk{}},
                            KernelFamily{InverseCosine{}}, KernelFamily{BandlimitedCutoff{1.0}}}) {
        for (double phi : {0.1, 1.0, 10.0, 1000.0}) {
            const Vector h = h_diagonal(KernelSpec{fam, phi}, lambda);
            for (Eigen::Index i = 0; i < h.size(); ++i) {
                EXPECT_GE(h[i], 0.0);
                EXPECT_LE(h[i], 1.0);
                if (i > 0) EXPECT_LE(h[i], h[i - 1] + 1e-15) << family_name(fam);
            }
        }
    }
}

TEST(Names, RoundTripThroughFactory) {
    for (const char* name : {"tikhonov", "diffusion", "random-walk", "inverse-cosine", "cutoff"}) {
        EXPECT_EQ(family_name(make_family(name, 1.0, 4.0, 0.5)), name);
    }
    EXPECT_NE(describe(KernelSpec{}).find("random-walk"), std::string::npos);
}
