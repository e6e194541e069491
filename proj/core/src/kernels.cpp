#include "gsimc/kernels.hpp"

#include "gsimc/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace gsimc {

namespace {

// Eigensolvers return zero eigenvalues as tiny negatives.
constexpr double kNegativeTolerance = 1e-8;
// Round-off allowance when comparing an eigenvalue against a cutoff.
constexpr double kCutoffSlack = 1e-10;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double checked_lambda(double lambda) {
    if (!(lambda >= -kNegativeTolerance)) {
        throw KernelDomainError("eigenvalue " + std::to_string(lambda) + " is negative");
    }
    return std::max(lambda, 0.0);
}

}  // namespace

void validate(const KernelSpec& spec) {
    if (!(spec.phi > 0.0)) throw KernelDomainError("phi must be positive");
    std::visit(overloaded{
                   [](const Tikhonov& t) {
                       if (!(t.gamma >= 0.0)) throw KernelDomainError("tikhonov gamma must be >= 0");
                   },
                   [](const Diffusion& d) {
                       if (!(d.gamma >= 0.0)) throw KernelDomainError("diffusion gamma must be >= 0");
                   },
                   [](const RandomWalk& r) {
                       if (!(r.a >= 2.0)) throw KernelDomainError("random-walk a must be >= 2");
                   },
                   [](const InverseCosine&) {},
                   [](const BandlimitedCutoff& c) {
                       if (!(c.omega >= 0.0)) throw KernelDomainError("cutoff omega must be >= 0");
                   },
               },
               spec.family);
}

Penalty r_value(const KernelFamily& family, double lambda) {
    const double lam = checked_lambda(lambda);
    return std::visit(
        overloaded{
            [&](const Tikhonov& t) { return Penalty{t.gamma * lam, false}; },
            [&](const Diffusion& d) { return Penalty{std::exp(d.gamma * lam / 2.0), false}; },
            [&](const RandomWalk& r) {
                if (!(lam < r.a)) {
                    throw KernelDomainError("random-walk kernel needs lambda < a (lambda=" +
                                            std::to_string(lam) + ", a=" + std::to_string(r.a) + ")");
                }
                return Penalty{1.0 / (r.a - lam), false};
            },
            [&](const InverseCosine&) {
                if (!(lam < 2.0)) {
                    throw KernelDomainError("inverse-cosine kernel needs lambda < 2 (lambda=" +
                                            std::to_string(lam) + ")");
                }
                return Penalty{1.0 / std::cos(lam * std::numbers::pi / 4.0), false};
            },
            [&](const BandlimitedCutoff& c) {
                return lam <= c.omega + kCutoffSlack ? Penalty{1.0, false} : Penalty{0.0, true};
            },
        },
        family);
}

double h_value(const KernelSpec& spec, double lambda) {
    if (!(spec.phi > 0.0)) throw KernelDomainError("phi must be positive");
    const Penalty r = r_value(spec.family, lambda);
    if (std::holds_alternative<BandlimitedCutoff>(spec.family)) return r.infinite ? 0.0 : 1.0;
    return 1.0 / (1.0 + r.value / spec.phi);
}

Vector h_diagonal(const KernelSpec& spec, const Vector& eigenvalues) {
    Vector gains(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) gains[i] = h_value(spec, eigenvalues[i]);
    return gains;
}

std::string_view family_name(const KernelFamily& family) {
    return std::visit(overloaded{
                          [](const Tikhonov&) { return std::string_view("tikhonov"); },
                          [](const Diffusion&) { return std::string_view("diffusion"); },
                          [](const RandomWalk&) { return std::string_view("random-walk"); },
                          [](const InverseCosine&) { return std::string_view("inverse-cosine"); },
                          [](const BandlimitedCutoff&) { return std::string_view("cutoff"); },
                      },
                      family);
}

std::string describe(const KernelSpec& spec) {
    std::ostringstream os;
    os << family_name(spec.family);
    std::visit(overloaded{
                   [&](const Tikhonov& t) { os << "(gamma=" << t.gamma << ")"; },
                   [&](const Diffusion& d) { os << "(gamma=" << d.gamma << ")"; },
                   [&](const RandomWalk& r) { os << "(a=" << r.a << ")"; },
                   [&](const InverseCosine&) {},
                   [&](const BandlimitedCutoff& c) { os << "(omega=" << c.omega << ")"; },
               },
               spec.family);
    os << " phi=" << spec.phi;
    return os.str();
}

KernelFamily make_family(std::string_view name, double gamma, double a, double omega) {
    if (name == "tikhonov") return Tikhonov{gamma};
    if (name == "diffusion") return Diffusion{gamma};
    if (name == "random-walk") return RandomWalk{a};
    if (name == "inverse-cosine") return InverseCosine{};
    if (name == "cutoff") return BandlimitedCutoff{omega};
    throw KernelDomainError("unknown kernel family '" + std::string(name) + "'");
}

}  // namespace gsimc
