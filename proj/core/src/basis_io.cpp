#include "gsimc/errors.hpp"
#include "gsimc/spectral.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace gsimc {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'S', 'I', 'M', 'C', 'B', 'A', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw IoError("basis file truncated");
    return v;
}

}  // namespace

void save_basis(const std::filesystem::path& path, const SpectralBasis& basis,
                std::uint64_t laplacian_hash) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write basis file: " + path.string());

    out.write(kMagic.data(), kMagic.size());
    put(out, kVersion);
    put(out, static_cast<std::uint64_t>(basis.n()));
    put(out, static_cast<std::uint64_t>(basis.k()));
    put(out, laplacian_hash);

    const auto* nys = std::get_if<NystromParams>(&basis.method);
    put(out, static_cast<std::uint8_t>(nys ? 1 : 0));
    const NystromParams p = nys ? *nys : NystromParams{};
    put(out, static_cast<std::uint64_t>(p.columns));
    put(out, static_cast<std::uint64_t>(p.rank));
    put(out, static_cast<std::uint64_t>(p.oversampling));
    put(out, static_cast<std::uint64_t>(p.power_iterations));
    put(out, p.seed);

    out.write(reinterpret_cast<const char*>(basis.eigenvalues.data()),
              static_cast<std::streamsize>(basis.eigenvalues.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(basis.eigenvectors.data()),
              static_cast<std::streamsize>(basis.eigenvectors.size() * sizeof(double)));
    if (!out) throw IoError("failed writing basis file: " + path.string());
}

LoadedBasis load_basis(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open basis file: " + path.string());

    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw IoError("not a basis file: " + path.string());
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion) throw IoError("unsupported basis file version " + std::to_string(version));

    const auto n = get<std::uint64_t>(in);
    const auto k = get<std::uint64_t>(in);
    LoadedBasis loaded;
    loaded.laplacian_hash = get<std::uint64_t>(in);

    const auto is_nystrom = get<std::uint8_t>(in);
    NystromParams p;
    p.columns = get<std::uint64_t>(in);
    p.rank = get<std::uint64_t>(in);
    p.oversampling = get<std::uint64_t>(in);
    p.power_iterations = get<std::uint64_t>(in);
    p.seed = get<std::uint64_t>(in);
    if (is_nystrom) {
        loaded.basis.method = p;
    } else {
        loaded.basis.method = ExactMethod{};
    }

    loaded.basis.eigenvalues.resize(static_cast<Eigen::Index>(k));
    loaded.basis.eigenvectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    in.read(reinterpret_cast<char*>(loaded.basis.eigenvalues.data()),
            static_cast<std::streamsize>(k * sizeof(double)));
    in.read(reinterpret_cast<char*>(loaded.basis.eigenvectors.data()),
            static_cast<std::streamsize>(n * k * sizeof(double)));
    if (!in) throw IoError("basis file truncated: " + path.string());
    return loaded;
}

}  // namespace gsimc
