#include "gsimc/io.hpp"

#include "gsimc/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef GSIMC_VERSION
#define GSIMC_VERSION "unknown"
#endif

namespace gsimc::io {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json parse(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid ") + what + " JSON: " + e.what());
    }
}

template <typename F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed ") + what + ": " + e.what());
    }
}

void check_version(const json& j, const char* what) {
    const int v = j.at("format_version").get<int>();
    if (v != kFormatVersion) {
        throw ParseError(std::string(what) + ": unsupported format_version " + std::to_string(v));
    }
}

json vec_to_json(const Vector& v) { return std::vector<double>(v.begin(), v.end()); }

Vector vec_from_json(const json& j) {
    const auto xs = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

json kernel_json(const KernelSpec& k) {
    json j;
    j["family"] = std::string(family_name(k.family));
    j["phi"] = k.phi;
    std::visit(
        [&j](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Tikhonov> || std::is_same_v<T, Diffusion>) {
                j["gamma"] = f.gamma;
            } else if constexpr (std::is_same_v<T, RandomWalk>) {
                j["a"] = f.a;
            } else if constexpr (std::is_same_v<T, BandlimitedCutoff>) {
                j["omega"] = f.omega;
            }
        },
        k.family);
    return j;
}

KernelSpec kernel_from(const json& j) {
    KernelSpec k;
    k.family = make_family(j.at("family").get<std::string>(), j.value("gamma", 1.0), j.value("a", 4.0),
                           j.value("omega", 0.0));
    k.phi = j.at("phi").get<double>();
    validate(k);
    return k;
}

json metrics_json(const std::vector<CutoffMetrics>& ms) {
    json out = json::object();
    for (const auto& m : ms) {
        out[std::to_string(m.cutoff)] = {{"hr", m.hr_mean},
                                         {"hr_stderr", m.hr_stderr},
                                         {"ndcg", m.ndcg_mean},
                                         {"ndcg_stderr", m.ndcg_stderr}};
    }
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

SplitManifest make_manifest(const DatasetSplit& split) {
    SplitManifest m;
    m.train_users = split.train_users;
    m.val_users = split.val_users;
    m.test_users = split.test_users;
    m.ratios = split.ratios;
    m.seed = split.seed;
    m.n_items = split.items.size();
    return m;
}

std::string to_json(const SplitManifest& m) {
    json j;
    j["format_version"] = kFormatVersion;
    j["kind"] = "split";
    j["source"] = m.source;
    j["seed"] = m.seed;
    j["ratios"] = {m.ratios.train, m.ratios.validation, m.ratios.test};
    j["prune"] = {{"min_user_events", m.prune.min_user_events}, {"min_item_users", m.prune.min_item_users}};
    j["n_items"] = m.n_items;
    j["nnz"] = m.nnz;
    j["malformed_lines"] = m.malformed_lines;
    j["train_users"] = m.train_users;
    j["val_users"] = m.val_users;
    j["test_users"] = m.test_users;
    return j.dump(2) + "\n";
}

SplitManifest split_from_json(const std::string& text) {
    const auto j = parse(text, "split");
    return guarded("split", [&] {
        check_version(j, "split");
        SplitManifest m;
        m.source = j.at("source").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        const auto r = j.at("ratios").get<std::vector<unsigned>>();
        if (r.size() != 3) throw ParseError("split: ratios must have three entries");
        m.ratios = {r[0], r[1], r[2]};
        m.prune.min_user_events = j.at("prune").at("min_user_events").get<std::size_t>();
        m.prune.min_item_users = j.at("prune").at("min_item_users").get<std::size_t>();
        m.n_items = j.at("n_items").get<std::size_t>();
        m.nnz = j.at("nnz").get<std::size_t>();
        m.malformed_lines = j.value("malformed_lines", std::size_t{0});
        m.train_users = j.at("train_users").get<std::vector<std::string>>();
        m.val_users = j.at("val_users").get<std::vector<std::string>>();
        m.test_users = j.at("test_users").get<std::vector<std::string>>();
        return m;
    });
}

std::string kernel_to_json(const KernelSpec& k) { return kernel_json(k).dump(); }

KernelSpec kernel_from_json(const std::string& text) {
    const auto j = parse(text, "kernel");
    return guarded("kernel", [&] { return kernel_from(j); });
}

std::string to_json(const ModelFile& m) {
    json j;
    j["format_version"] = kFormatVersion;
    j["kind"] = "gsimc-model";
    j["basis"] = m.basis_path;
    j["laplacian_hash"] = m.laplacian_hash;
    j["graph"] = std::string(to_string(m.graph));
    j["kernel"] = kernel_json(m.kernel);
    j["rank"] = m.rank;
    j["split"] = m.split_path;
    return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text) {
    const auto j = parse(text, "model");
    return guarded("model", [&] {
        check_version(j, "model");
        ModelFile m;
        m.basis_path = j.at("basis").get<std::string>();
        m.laplacian_hash = j.at("laplacian_hash").get<std::uint64_t>();
        m.graph = parse_laplacian_kind(j.at("graph").get<std::string>());
        m.kernel = kernel_from(j.at("kernel"));
        m.rank = j.at("rank").get<std::size_t>();
        m.split_path = j.at("split").get<std::string>();
        return m;
    });
}

std::string to_json(const StateFile& s) {
    json j;
    j["format_version"] = kFormatVersion;
    j["kind"] = "bgsimc-state";
    j["user"] = s.user;
    j["k"] = s.state.x_hat.size();
    j["x_hat"] = vec_to_json(s.state.x_hat);
    j["p"] = vec_to_json(s.state.p_diag);
    j["rows"] = s.state.observed;
    j["items"] = s.items;
    return j.dump(2) + "\n";
}

StateFile state_from_json(const std::string& text) {
    const auto j = parse(text, "state");
    return guarded("state", [&] {
        check_version(j, "state");
        StateFile s;
        s.user = j.at("user").get<std::string>();
        const auto k = j.at("k").get<std::size_t>();
        s.state.x_hat = vec_from_json(j.at("x_hat"));
        s.state.p_diag = vec_from_json(j.at("p"));
        s.state.observed = j.at("rows").get<std::vector<ItemRow>>();
        s.items = j.at("items").get<std::vector<std::string>>();
        if (static_cast<std::size_t>(s.state.x_hat.size()) != k ||
            static_cast<std::size_t>(s.state.p_diag.size()) != k) {
            throw ParseError("state: x_hat/p length does not match k");
        }
        if (s.items.size() != s.state.observed.size()) throw ParseError("state: rows/items length mismatch");
        return s;
    });
}

std::string report_to_json(const MetricsReport& r, const std::string& model, const KernelSpec& kernel) {
    json j;
    j["model"] = model;
    j["kernel"] = kernel_json(kernel);
    std::vector<std::size_t> cutoffs;
    for (const auto& m : r.metrics) cutoffs.push_back(m.cutoff);
    j["cutoffs"] = cutoffs;
    j["metrics"] = metrics_json(r.metrics);
    j["counts"] = {{"users", r.user_count}, {"skipped", r.skipped_count}, {"unseen_targets", r.unseen_targets}};
    if (!r.degree_buckets.empty()) {
        json buckets = json::array();
        for (const auto& b : r.degree_buckets) {
            json jb;
            jb["min_degree"] = b.min_degree;
            jb["max_degree"] = b.max_degree ? json(*b.max_degree) : json(nullptr);
            jb["users"] = b.user_count;
            jb["metrics"] = metrics_json(b.metrics);
            buckets.push_back(jb);
        }
        j["degree_buckets"] = buckets;
    }
    return j.dump(2) + "\n";
}

std::string to_csv(const Theorem2Report& r) {
    std::ostringstream out;
    out << std::setprecision(10);
    out << "rho,phi,empirical_mse,mse_stderr,bound,margin,pass\n";
    for (const auto& row : r.rows) {
        out << row.rho << ',' << row.phi << ',' << row.empirical_mse << ',' << row.mse_stderr << ','
            << row.bound << ',' << row.margin() << ',' << (row.pass ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string to_csv(const Theorem1Report& r) {
    std::ostringstream out;
    out << std::setprecision(10);
    out << "k,error,bound,pass\n";
    if (!r.applicable) {
        out << "# not applicable: Lambda*R(omega)=" << r.contraction() << " >= 1\n";
        return out.str();
    }
    for (const auto& row : r.rows) {
        out << row.k << ',' << row.error << ',' << row.bound << ',' << (row.pass ? "true" : "false") << '\n';
    }
    return out.str();
}

std::string run_manifest(const std::string& command, const std::map<std::string, std::string>& config) {
    json cfg(config);
    const std::string canonical = cfg.dump();
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a(command + "\n" + canonical);
    json j;
    j["command"] = command;
    j["config"] = cfg;
    j["config_hash"] = hash.str();
    j["versions"] = {{"gsimc", GSIMC_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                   "." + std::to_string(EIGEN_MINOR_VERSION)}};
    return j.dump(2) + "\n";
}

}  // namespace gsimc::io
