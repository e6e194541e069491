#pragma once

#include "gsimc/types.hpp"

#include <string>
#include <string_view>
#include <variant>

namespace gsimc {

/// R(lambda) = gamma * lambda
struct Tikhonov {
    double gamma = 1.0;
};
/// R(lambda) = exp(gamma * lambda / 2)
struct Diffusion {
    double gamma = 1.0;
};
/// R(lambda) = 1 / (a - lambda), defined for lambda < a
struct RandomWalk {
    double a = 4.0;
};
/// R(lambda) = 1 / cos(lambda * pi / 4), defined for lambda < 2
struct InverseCosine {};
/// R(lambda) = 1 inside [0, omega], +infinity outside. The filter uses the
/// phi -> infinity limit, so gains are the band indicator.
struct BandlimitedCutoff {
    double omega = 0.0;
};

using KernelFamily = std::variant<Tikhonov, Diffusion, RandomWalk, InverseCosine, BandlimitedCutoff>;

/// A regularization family plus phi, defining H(lambda) = 1 / (1 + R(lambda)/phi).
struct KernelSpec {
    KernelFamily family = RandomWalk{};
    double phi = 10.0;
};

/// R(lambda), with the cutoff's infinite branch kept symbolic.
struct Penalty {
    double value = 0.0;
    bool infinite = false;
};

/// Throws KernelDomainError on gamma < 0, a < 2 or phi <= 0.
void validate(const KernelSpec& spec);

Penalty r_value(const KernelFamily& family, double lambda);
inline Penalty r_value(const KernelSpec& spec, double lambda) { return r_value(spec.family, lambda); }

/// Filter gain in [0, 1].
double h_value(const KernelSpec& spec, double lambda);

/// Elementwise h_value; nonincreasing for ascending input.
Vector h_diagonal(const KernelSpec& spec, const Vector& eigenvalues);

std::string_view family_name(const KernelFamily& family);
std::string describe(const KernelSpec& spec);

/// Builds a family from its CLI name (tikhonov, diffusion, random-walk,
/// inverse-cosine, cutoff) and the relevant parameter.
KernelFamily make_family(std::string_view name, double gamma, double a, double omega);

}  // namespace gsimc
