#pragma once

#include "gsimc/bayes.hpp"
#include "gsimc/data.hpp"
#include "gsimc/graph.hpp"
#include "gsimc/kernels.hpp"
#include "gsimc/metrics.hpp"
#include "gsimc/theory.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

// JSON persistence for the artifacts passed between pipeline stages. Keys are
// written in sorted order with no timestamps, so identical inputs produce
// byte-identical files.
namespace gsimc::io {

std::string read_text(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: truncate and write, IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

// --- split ----------------------------------------------------------------

struct SplitManifest {
    std::vector<std::string> train_users;
    std::vector<std::string> val_users;
    std::vector<std::string> test_users;
    SplitRatios ratios;
    std::uint64_t seed = kDefaultSeed;
    PruneOptions prune;
    std::string source;  // dataset path as given
    std::size_t n_items = 0;
    std::size_t nnz = 0;
    std::size_t malformed_lines = 0;
};

SplitManifest make_manifest(const DatasetSplit& split);
std::string to_json(const SplitManifest& m);
SplitManifest split_from_json(const std::string& text);

// --- fitted model ---------------------------------------------------------

/// A fitted GS-IMC model: a reference to the basis cache plus the kernel.
struct ModelFile {
    std::string basis_path;
    std::uint64_t laplacian_hash = 0;
    LaplacianKind graph = LaplacianKind::Hypergraph;
    KernelSpec kernel;
    std::size_t rank = 0;
    std::string split_path;
};

std::string to_json(const ModelFile& m);
ModelFile model_from_json(const std::string& text);

std::string kernel_to_json(const KernelSpec& k);  // compact object text
KernelSpec kernel_from_json(const std::string& text);

// --- online state ---------------------------------------------------------

struct StateFile {
    std::string user;
    BgsUserState state;
    std::vector<std::string> items;  // item ids of state.observed, same order
};

std::string to_json(const StateFile& s);
StateFile state_from_json(const std::string& text);

// --- reports ---------------------------------------------------------------

std::string report_to_json(const MetricsReport& r, const std::string& model,
                           const KernelSpec& kernel);
std::string to_csv(const Theorem2Report& r);
std::string to_csv(const Theorem1Report& r);

// --- run manifest ----------------------------------------------------------

/// Config key/value pairs, seeds and versions describing one run.
std::string run_manifest(const std::string& command, const std::map<std::string, std::string>& config);

}  // namespace gsimc::io
