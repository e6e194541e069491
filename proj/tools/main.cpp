// gsimc command-line front end: ingest -> eigen -> fit -> recommend/update/
// evaluate/spectrum, plus the theory verifiers.

#include "gsimc/bayes.hpp"
#include "gsimc/data.hpp"
#include "gsimc/errors.hpp"
#include "gsimc/graph.hpp"
#include "gsimc/io.hpp"
#include "gsimc/kernels.hpp"
#include "gsimc/metrics.hpp"
#include "gsimc/model.hpp"
#include "gsimc/spectral.hpp"
#include "gsimc/synthetic.hpp"
#include "gsimc/theory.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <numeric>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace gsimc;

namespace {

/// Bad invocation detected after parsing (exit 2).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::size_t threads = 0;
    std::uint64_t seed = kDefaultSeed;
};

struct KernelArgs {
    std::string family = "random-walk";
    double gamma = 1.0;
    double a = 4.0;
    double omega = 0.0;
    double phi = 10.0;

    void add_to(CLI::App* app) {
        app->add_option("--kernel", family, "tikhonov | diffusion | random-walk | inverse-cosine | cutoff")
            ->check(CLI::IsMember({"tikhonov", "diffusion", "random-walk", "inverse-cosine", "cutoff"}))
            ->capture_default_str();
        app->add_option("--gamma", gamma, "Tikhonov/diffusion scale")->capture_default_str();
        app->add_option("--a", a, "random-walk parameter (>= 2)")->capture_default_str();
        app->add_option("--omega", omega, "cutoff bandlimit")->capture_default_str();
        app->add_option("--phi", phi, "filter strength")->capture_default_str();
    }
    [[nodiscard]] KernelSpec spec() const {
        KernelSpec k{make_family(family, gamma, a, omega), phi};
        validate(k);
        return k;
    }
};

struct NoiseArgs {
    double sigma_eta = 1e-4;
    double sigma_nu = 1e-4;
    std::optional<double> p0;

    void add_to(CLI::App* app) {
        app->add_option("--sigma-eta", sigma_eta, "process noise variance")->capture_default_str();
        app->add_option("--sigma-nu", sigma_nu, "measurement noise variance")->capture_default_str();
        app->add_option("--p0", p0, "initial covariance (default: estimated from validation users)");
    }
};

std::vector<std::string> read_tokens(std::istream& in) {
    return {std::istream_iterator<std::string>(in), std::istream_iterator<std::string>()};
}

fs::path manifest_path(const fs::path& output) {
    if (fs::is_directory(output)) return output / "manifest.json";
    return fs::path(output.string() + ".manifest.json");
}

/// Every option of the invoked subcommand (and the globals) as strings.
std::map<std::string, std::string> collect_config(const CLI::App& root, const CLI::App& sub) {
    std::map<std::string, std::string> cfg;
    const auto add = [&cfg](const CLI::App& app, const std::string& prefix) {
        for (const auto* opt : app.get_options()) {
            const auto name = opt->get_single_name();
            if (name.empty() || name == "help" || name == "config") continue;
            std::string value;
            if (opt->count() > 0) {
                const auto& rs = opt->results();
                for (std::size_t i = 0; i < rs.size(); ++i) value += (i ? "," : "") + rs[i];
            } else {
                value = opt->get_default_str();
            }
            cfg[prefix + name] = value;
        }
    };
    add(root, "");
    add(sub, sub.get_name() + ".");
    return cfg;
}

void write_manifest(const CLI::App& root, const CLI::App& sub, const fs::path& output) {
    io::write_text(manifest_path(output), io::run_manifest(sub.get_name(), collect_config(root, sub)));
}

void require_file(const fs::path& p, const char* what) {
    if (!fs::exists(p)) throw UsageError(std::string(what) + " not found: " + p.string());
}

// --- shared loading ---------------------------------------------------------

struct DataContext {
    io::SplitManifest manifest;
    std::vector<Interaction> events;
    DatasetSplit split;
};

DataContext load_data(const fs::path& split_path) {
    require_file(split_path, "split file");
    DataContext ctx;
    ctx.manifest = io::split_from_json(io::read_text(split_path));
    require_file(ctx.manifest.source, "dataset");
    const auto log = load_interactions(ctx.manifest.source);
    ctx.events = prune_interactions(log.events, ctx.manifest.prune);
    ctx.split = make_split(ctx.events, ctx.manifest.train_users, ctx.manifest.val_users,
                           ctx.manifest.test_users, ctx.manifest.ratios, ctx.manifest.seed);
    if (ctx.split.items.size() != ctx.manifest.n_items) {
        throw ProtocolError("dataset " + ctx.manifest.source + " no longer matches the split (" +
                            std::to_string(ctx.split.items.size()) + " items, manifest says " +
                            std::to_string(ctx.manifest.n_items) + ")");
    }
    return ctx;
}

struct LoadedModel {
    io::ModelFile file;
    GsImcModel model;
};

LoadedModel load_model(const fs::path& model_path) {
    require_file(model_path, "model file");
    auto file = io::model_from_json(io::read_text(model_path));
    require_file(file.basis_path, "basis file");
    auto loaded = load_basis(file.basis_path);
    if (loaded.laplacian_hash != file.laplacian_hash) {
        throw ProtocolError("basis " + file.basis_path + " does not match the fitted model (hash mismatch)");
    }
    auto basis = file.rank < loaded.basis.k() ? truncate(loaded.basis, file.rank) : std::move(loaded.basis);
    auto model = GsImcModel::fit(std::move(basis), file.kernel);
    return {std::move(file), std::move(model)};
}

std::vector<ItemRow> map_items(const DatasetSplit& split, const std::vector<std::string>& ids) {
    std::vector<ItemRow> rows;
    for (const auto& id : ids) {
        if (const auto r = split.row_of(id)) {
            rows.push_back(*r);
        } else {
            std::cerr << "warning: unknown item '" << id << "' ignored\n";
        }
    }
    return rows;
}

void print_topn(std::ostream& out, const DatasetSplit& split, const std::vector<ItemRow>& recs) {
    for (const auto r : recs) out << split.items[r] << '\n';
}

std::vector<std::size_t> parse_cutoffs(const std::vector<std::size_t>& cs) {
    if (cs.empty()) throw UsageError("at least one cutoff is required");
    for (const auto c : cs) {
        if (c == 0) throw UsageError("cutoffs must be positive");
    }
    return cs;
}

Vector resolve_p0(const NoiseArgs& args, const GsImcModel& model, const DataContext& ctx) {
    if (args.p0) {
        if (!(*args.p0 > 0.0)) throw UsageError("--p0 must be positive");
        return Vector::Constant(static_cast<Eigen::Index>(model.rank()), *args.p0);
    }
    const auto val = make_eval_cohort(ctx.events, ctx.split.val_users, ctx.split);
    return estimate_p0(model, val.cases);
}

NoiseConfig make_noise(const NoiseArgs& args, std::size_t k) {
    auto noise = NoiseConfig::isotropic(k, args.sigma_eta, args.sigma_nu);
    noise.validate(k);
    return noise;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gsimc: inductive one-bit matrix completion via graph signal sampling"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file (flags override)");

    Globals g;
    app.add_option("--threads", g.threads, "worker threads (0 = all cores)")->capture_default_str();
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "parse a log and write the user split");
    std::string in_path, out_dir;
    std::vector<unsigned> ratios = {8, 1, 1};
    PruneOptions prune;
    bool strict = false;
    ingest->add_option("--input", in_path, "user<TAB>item<TAB>timestamp log")->required();
    ingest->add_option("--out", out_dir, "output directory")->required();
    ingest->add_option("--ratios", ratios, "train,validation,test")->delimiter(',')->expected(3)->capture_default_str();
    ingest->add_option("--min-user-events", prune.min_user_events, "drop users with fewer events");
    ingest->add_option("--min-item-users", prune.min_item_users, "drop items with fewer users");
    ingest->add_flag("--strict", strict, "fail on malformed lines");

    // eigen
    auto* eigen = app.add_subcommand("eigen", "build the item graph and its spectral basis");
    std::string split_path, basis_out, laplacian_out, graph_kind = "hypergraph", method = "exact";
    std::size_t k = 1000, columns = 0, oversampling = 10, power_iterations = 2;
    eigen->add_option("--split", split_path, "split.json from ingest")->required();
    eigen->add_option("--out", basis_out, "basis cache file")->required();
    eigen->add_option("--graph", graph_kind, "hypergraph | covariance")->capture_default_str();
    eigen->add_option("--method", method, "exact | nystrom")->capture_default_str();
    eigen->add_option("--k", k, "number of eigenpairs (clamped to the item count)")->capture_default_str();
    eigen->add_option("--columns", columns, "Nystrom sampled columns (default 2k)");
    eigen->add_option("--oversampling", oversampling, "Nystrom oversampling")->capture_default_str();
    eigen->add_option("--power-iterations", power_iterations, "Nystrom power iterations")->capture_default_str();
    eigen->add_option("--laplacian-out", laplacian_out, "also dump the Laplacian (Matrix Market)");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "bind a basis and a kernel into a model file");
    std::string basis_path, model_out;
    std::optional<std::size_t> rank;
    KernelArgs kernel_args;
    fit_cmd->add_option("--basis", basis_path, "basis cache from eigen")->required();
    fit_cmd->add_option("--split", split_path, "split.json the basis was built from")->required();
    fit_cmd->add_option("--graph", graph_kind, "graph the basis came from")->capture_default_str();
    fit_cmd->add_option("--rank", rank, "use only the first r eigenpairs");
    fit_cmd->add_option("--out", model_out, "model file")->required();
    kernel_args.add_to(fit_cmd);

    // recommend
    auto* recommend = app.add_subcommand("recommend", "top-N items for item ids read from stdin");
    std::string model_path, rec_out;
    std::size_t n_rec = 10;
    recommend->add_option("--model", model_path, "model file")->required();
    recommend->add_option("-n,--top", n_rec, "list length")->capture_default_str();
    recommend->add_option("--out", rec_out, "write the list here instead of stdout");

    // update
    auto* update_cmd = app.add_subcommand("update", "one online BGS-IMC update for a single user");
    std::string state_in, state_out, user = "anonymous", new_item;
    NoiseArgs noise_args;
    update_cmd->add_option("--model", model_path, "model file")->required();
    update_cmd->add_option("--state", state_in, "previous state (omit to initialize from stdin items)");
    update_cmd->add_option("--user", user, "user id for a fresh state")->capture_default_str();
    update_cmd->add_option("--item", new_item, "newly observed item id")->required();
    update_cmd->add_option("--out", state_out, "new state file")->required();
    update_cmd->add_option("-n,--top", n_rec, "list length")->capture_default_str();
    noise_args.add_to(update_cmd);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "leave-last-out HR/NDCG on held-out users");
    std::string eval_method = "gsimc", cohort_name = "test", report_out;
    std::vector<std::size_t> cutoffs = kDefaultCutoffs;
    bool degree_buckets = false;
    evaluate->add_option("--model", model_path, "model file")->required();
    evaluate->add_option("--method", eval_method, "gsimc | bgsimc")->capture_default_str();
    evaluate->add_option("--users", cohort_name, "test | val")->capture_default_str();
    evaluate->add_option("--cutoffs", cutoffs, "N values")->delimiter(',')->capture_default_str();
    evaluate->add_flag("--degree-buckets", degree_buckets, "break metrics down by target degree (100/2000/5000)");
    evaluate->add_option("--out", report_out, "report JSON")->required();
    noise_args.add_to(evaluate);

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "averaged graph Fourier energy of users");
    std::string spec_source = "predictions", spec_out;
    spectrum->add_option("--model", model_path, "model file")->required();
    spectrum->add_option("--users", cohort_name, "test | val")->capture_default_str();
    spectrum->add_option("--source", spec_source, "predictions | observations")->capture_default_str();
    spectrum->add_option("--out", spec_out, "CSV output")->required();

    // verify
    auto* verify = app.add_subcommand("verify", "check the recovery and filtering guarantees on synthetic graphs");
    std::string which, verify_out;
    std::size_t v_items = 200, v_users = 400, trials = 2000;
    double density = 0.03, unobserved_fraction = 0.05, omega_scale = 0.85;
    std::vector<double> rho_grid = {0.0, 0.05, 0.125, 0.3}, phi_grid = {1.0, 10.0, 100.0};
    std::vector<unsigned> k_powers = {1, 2, 4};
    KernelArgs verify_kernel;
    verify_kernel.family = "tikhonov";
    verify->add_option("--theorem", which, "sampling (Poincare interpolation) | noise (flip-noise MSE) | kalman")
        ->required()
        ->check(CLI::IsMember({"sampling", "noise", "kalman"}));
    verify->add_option("--items", v_items, "synthetic item count")->capture_default_str();
    verify->add_option("--graph-users", v_users, "synthetic user count")->capture_default_str();
    verify->add_option("--density", density, "synthetic rating density")->capture_default_str();
    verify->add_option("--trials", trials, "Monte-Carlo trials")->capture_default_str();
    verify->add_option("--rho", rho_grid, "flip rates")->delimiter(',')->capture_default_str();
    verify->add_option("--phi-grid", phi_grid, "filter strengths")->delimiter(',')->capture_default_str();
    verify->add_option("--k-powers", k_powers, "penalty powers")->delimiter(',')->capture_default_str();
    verify->add_option("--unobserved-fraction", unobserved_fraction, "share of vertices to interpolate")
        ->capture_default_str();
    verify->add_option("--omega-scale", omega_scale, "choose omega with Lambda * R(omega) = scale")->capture_default_str();
    verify->add_option("--out", verify_out, "CSV output (default stdout)");
    verify_kernel.add_to(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*ingest) {
            require_file(in_path, "dataset");
            const auto log = load_interactions(in_path, strict);
            if (log.malformed_lines > 0) {
                std::cerr << "warning: skipped " << log.malformed_lines << " malformed line(s), first at line "
                          << log.first_malformed_line << '\n';
            }
            const auto events = prune_interactions(log.events, prune);
            const auto split = split_users(events, {ratios[0], ratios[1], ratios[2]}, g.seed);
            auto m = io::make_manifest(split);
            m.source = fs::absolute(in_path).lexically_normal().string();
            m.prune = prune;
            m.malformed_lines = log.malformed_lines;
            m.nnz = build_matrix(events, split).nnz();
            fs::create_directories(out_dir);
            io::write_text(fs::path(out_dir) / "split.json", io::to_json(m));
            write_manifest(app, *ingest, out_dir);
            std::cout << "items " << m.n_items << ", train users " << m.train_users.size() << ", validation "
                      << m.val_users.size() << ", test " << m.test_users.size() << ", nnz " << m.nnz << '\n';
        } else if (*eigen) {
            const auto ctx = load_data(split_path);
            const auto r = build_matrix(ctx.events, ctx.split);
            const auto lap = build_laplacian(r, parse_laplacian_kind(graph_kind));
            const std::size_t kk = std::min(k, lap.size());
            if (kk < k) std::cerr << "note: k clamped to the item count " << kk << '\n';
            SpectralBasis basis;
            if (method == "exact") {
                basis = exact_eigs(lap, kk);
            } else if (method == "nystrom") {
                NystromParams p;
                p.rank = kk;
                p.columns = columns ? columns : std::min(lap.size(), 2 * kk);
                p.oversampling = oversampling;
                p.power_iterations = power_iterations;
                p.seed = g.seed;
                basis = nystrom_eigs(lap, p);
            } else {
                throw UsageError("unknown --method '" + method + "' (exact | nystrom)");
            }
            save_basis(basis_out, basis, content_hash(lap));
            if (!laplacian_out.empty()) {
                std::ofstream mm(laplacian_out);
                if (!mm) throw IoError("cannot write " + laplacian_out);
                write_matrix_market(mm, lap);
            }
            write_manifest(app, *eigen, basis_out);
            std::cout << "basis " << basis.n() << " x " << basis.k() << ", eigenvalues ["
                      << basis.eigenvalues[0] << ", " << basis.eigenvalues[basis.eigenvalues.size() - 1] << "]\n";
        } else if (*fit_cmd) {
            require_file(basis_path, "basis file");
            require_file(split_path, "split file");
            auto loaded = load_basis(basis_path);
            io::ModelFile mf;
            mf.basis_path = fs::absolute(basis_path).lexically_normal().string();
            mf.split_path = fs::absolute(split_path).lexically_normal().string();
            mf.laplacian_hash = loaded.laplacian_hash;
            mf.graph = parse_laplacian_kind(graph_kind);
            mf.kernel = kernel_args.spec();
            mf.rank = rank ? std::min(*rank, loaded.basis.k()) : loaded.basis.k();
            if (mf.rank == 0) throw UsageError("--rank must be positive");
            // Fail now, not at serving time, if the kernel does not cover the spectrum.
            (void)GsImcModel::fit(truncate(loaded.basis, mf.rank), mf.kernel);
            io::write_text(model_out, io::to_json(mf));
            write_manifest(app, *fit_cmd, model_out);
            std::cout << describe(mf.kernel) << ", rank " << mf.rank << '\n';
        } else if (*recommend) {
            if (n_rec == 0) throw UsageError("--top must be positive");
            const auto lm = load_model(model_path);
            const auto ctx = load_data(lm.file.split_path);
            const auto rows = map_items(ctx.split, read_tokens(std::cin));
            const auto recs = recommend_topn(reconstruct(lm.model, rows), n_rec);
            if (rec_out.empty()) {
                print_topn(std::cout, ctx.split, recs);
            } else {
                std::ostringstream ss;
                print_topn(ss, ctx.split, recs);
                io::write_text(rec_out, ss.str());
                write_manifest(app, *recommend, rec_out);
            }
        } else if (*update_cmd) {
            if (n_rec == 0) throw UsageError("--top must be positive");
            const auto lm = load_model(model_path);
            const auto ctx = load_data(lm.file.split_path);
            const auto& model = lm.model;
            const auto noise = make_noise(noise_args, model.rank());

            io::StateFile sf;
            if (!state_in.empty()) {
                require_file(state_in, "state file");
                sf = io::state_from_json(io::read_text(state_in));
                if (static_cast<std::size_t>(sf.state.x_hat.size()) != model.rank()) {
                    throw ProtocolError("state rank " + std::to_string(sf.state.x_hat.size()) +
                                        " does not match the model rank " + std::to_string(model.rank()));
                }
            } else {
                sf.user = user;
                const auto rows = map_items(ctx.split, read_tokens(std::cin));
                sf.state = init_state(model, rows, resolve_p0(noise_args, model, ctx));
            }
            const auto row = ctx.split.row_of(new_item);
            if (!row) throw ProtocolError("item '" + new_item + "' is not in the training item set");
            const ItemRow delta[] = {*row};
            auto result = update(model, sf.state, delta, noise);
            sf.state = std::move(result.state);
            sf.items.clear();
            for (const auto r : sf.state.observed) sf.items.push_back(ctx.split.items[r]);
            io::write_text(state_out, io::to_json(sf));
            write_manifest(app, *update_cmd, state_out);
            print_topn(std::cout, ctx.split, recommend_topn(result.prediction, n_rec));
        } else if (*evaluate) {
            const auto lm = load_model(model_path);
            const auto ctx = load_data(lm.file.split_path);
            const auto& users = cohort_name == "val" ? ctx.split.val_users : ctx.split.test_users;
            if (cohort_name != "val" && cohort_name != "test") throw UsageError("--users must be test or val");
            const auto cohort = make_eval_cohort(ctx.events, users, ctx.split);

            EvalOptions opts;
            opts.cutoffs = parse_cutoffs(cutoffs);
            opts.threads = g.threads;
            if (degree_buckets) {
                const auto r = build_matrix(ctx.events, ctx.split);
                std::vector<std::size_t> deg(r.n_items, 0);
                for (int c = 0; c < r.entries.outerSize(); ++c) {
                    for (SparseMatrix::InnerIterator it(r.entries, c); it; ++it) ++deg[static_cast<std::size_t>(it.row())];
                }
                opts.item_degrees = std::move(deg);
            }
            MetricsReport report;
            if (eval_method == "gsimc") {
                report = evaluate_gsimc(lm.model, cohort, opts);
            } else if (eval_method == "bgsimc") {
                const auto noise = make_noise(noise_args, lm.model.rank());
                report = evaluate_bgsimc(lm.model, noise, resolve_p0(noise_args, lm.model, ctx), cohort, opts);
            } else {
                throw UsageError("unknown --method '" + eval_method + "' (gsimc | bgsimc)");
            }
            io::write_text(report_out, io::report_to_json(report, eval_method, lm.model.kernel()));
            write_manifest(app, *evaluate, report_out);
            for (const auto& m : report.metrics) {
                std::cout << "HR@" << m.cutoff << " " << m.hr_mean << " (+-" << m.hr_stderr << ")  NDCG@"
                          << m.cutoff << " " << m.ndcg_mean << " (+-" << m.ndcg_stderr << ")\n";
            }
        } else if (*spectrum) {
            const auto lm = load_model(model_path);
            const auto ctx = load_data(lm.file.split_path);
            if (cohort_name != "val" && cohort_name != "test") throw UsageError("--users must be test or val");
            const auto& users = cohort_name == "val" ? ctx.split.val_users : ctx.split.test_users;
            const auto cohort = make_eval_cohort(ctx.events, users, ctx.split);
            std::vector<Vector> coeffs;
            for (const auto& c : cohort.cases) {
                if (spec_source == "predictions") {
                    coeffs.push_back(lm.model.fourier_prediction(c.context));
                } else if (spec_source == "observations") {
                    coeffs.push_back(gft_indicator(lm.model.basis(), c.context));
                } else {
                    throw UsageError("--source must be predictions or observations");
                }
            }
            const auto profile = spectrum_profile_from_coefficients(coeffs);
            std::ostringstream ss;
            write_spectrum_csv(ss, lm.model.basis().eigenvalues, profile);
            io::write_text(spec_out, ss.str());
            write_manifest(app, *spectrum, spec_out);
        } else if (*verify) {
            std::ostringstream csv;
            if (which == "kalman") {
                KalmanSimulation sim;
                sim.trials = trials;
                sim.seed = g.seed;
                const auto r = simulate_scalar_kalman(sim);
                csv << std::setprecision(10) << "quantity,value\n"
                    << "mean_error," << r.mean_error << "\nerror_stderr," << r.error_stderr
                    << "\nempirical_variance," << r.empirical_variance << "\ngain," << r.gain
                    << "\nposterior_at_gain," << r.posterior << '\n';
                for (const auto& [d, p] : r.perturbed) csv << "posterior_at_gain" << std::showpos << d << std::noshowpos << ',' << p << '\n';
                csv << "unbiased," << (r.unbiased() ? "true" : "false") << "\nminimal,"
                    << (r.minimal() ? "true" : "false") << '\n';
            } else {
                const auto r = random_rating_matrix(v_items, v_users, density, g.seed);
                const auto lap = hypergraph_laplacian(r);
                const auto basis = exact_eigs(lap, lap.size());
                const auto family = verify_kernel.spec().family;
                if (which == "noise") {
                    Theorem2Config cfg;
                    cfg.rho_grid = rho_grid;
                    cfg.phi_grid = phi_grid;
                    cfg.trials = trials;
                    cfg.seed = g.seed;
                    cfg.threads = g.threads;
                    const auto rep = verify_theorem2(basis, family, cfg);
                    csv << "# n=" << basis.n() << " lambda1=" << rep.lambda1 << " omega=" << rep.omega
                        << " nominal_omega=" << rep.nominal_omega << " nominal_residual=" << rep.nominal_residual
                        << '\n'
                        << io::to_csv(rep);
                } else {
                    // Unobserved set: the vertices whose Laplacian columns are largest.
                    const auto n = lap.size();
                    std::vector<ItemRow> order(n);
                    std::iota(order.begin(), order.end(), ItemRow{0});
                    const Vector norms = lap.matrix.colwise().norm();
                    std::stable_sort(order.begin(), order.end(), [&](ItemRow a, ItemRow b) {
                        return norms[static_cast<Eigen::Index>(a)] > norms[static_cast<Eigen::Index>(b)];
                    });
                    const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(unobserved_fraction * static_cast<double>(n)));
                    std::vector<ItemRow> unobserved(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
                    std::sort(unobserved.begin(), unobserved.end());
                    const double lambda = poincare_constant(lap.matrix, unobserved);
                    // Largest omega in the spectrum range with Lambda * R(omega) <= scale.
                    const double target = omega_scale / lambda;
                    const auto penalty = [&](double w) {
                        const auto p = r_value(family, w);
                        return p.infinite ? std::numeric_limits<double>::infinity() : p.value;
                    };
                    double lo = 0.0, hi = basis.eigenvalues[basis.eigenvalues.size() - 1];
                    if (penalty(hi) <= target) {
                        lo = hi;
                    } else {
                        for (int it = 0; it < 200; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            (penalty(mid) <= target ? lo : hi) = mid;
                        }
                    }
                    const double omega = lo;
                    const auto rep = verify_theorem1(lap.matrix, family, omega, unobserved, k_powers, g.seed);
                    csv << "# n=" << n << " unobserved=" << m << " Lambda=" << rep.poincare << " omega=" << omega
                        << " Lambda*R(omega)=" << rep.contraction()
                        << " nonincreasing=" << (rep.nonincreasing ? "true" : "false") << '\n'
                        << io::to_csv(rep);
                }
            }
            if (verify_out.empty()) {
                std::cout << csv.str();
            } else {
                io::write_text(verify_out, csv.str());
                write_manifest(app, *verify, verify_out);
            }
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
