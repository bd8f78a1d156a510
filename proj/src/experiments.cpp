#include "gmq/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gmq/bounds.hpp"
#include "gmq/distribution.hpp"
#include "gmq/errors.hpp"
#include "gmq/io.hpp"
#include "gmq/rng.hpp"
#include "gmq/simulator.hpp"

namespace gmq {
namespace {

using nlohmann::json;

constexpr double kBoundSlack = 1e-9;

int desk_size_limit(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::Tsp: return 8;
        case ProblemKind::MaxKColorableSubgraph: return 10;
        case ProblemKind::MaxCut: return 20;
        case ProblemKind::MaxKVertexCover: return 18;
    }
    return 0;
}

struct FleetEntry {
    ProblemInstance instance;
    std::size_t index = 0; // global, deterministic ordering
};

std::vector<FleetEntry> build_fleets(const ExperimentSpec& spec) {
    std::vector<FleetEntry> entries;
    for (const auto& fleet : spec.fleets) {
        for (const ProblemInstance& inst : make_fleet(fleet, spec.seed)) {
            if (!spec.allow_large && inst.n > desk_size_limit(inst.kind)) {
                throw ValidationError("experiment: size " + std::to_string(inst.n) + " for " +
                                      kind_name(inst.kind) +
                                      " exceeds the desk-scale limit; pass allow-large to override");
            }
            entries.push_back({inst, entries.size()});
        }
    }
    return entries;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path.string());
    out << content;
}

// Optimizes the depth sweep in ascending order, chaining warm starts across
// consecutive depths.
std::vector<OptimizationResult> sweep_depths(const ObjectiveDistribution& dist,
                                             const std::vector<int>& depths,
                                             ObjectiveKind objective, const OptimizerConfig& base,
                                             std::uint64_t seed) {
    std::vector<int> sorted = depths;
    std::sort(sorted.begin(), sorted.end());
    std::vector<OptimizationResult> results;
    results.reserve(sorted.size());
    const OptimizationResult* prev = nullptr;
    for (int p : sorted) {
        OptimizerConfig config = base;
        config.warm_start.reset();
        if (prev && prev->best_params.depth() == p - 1) {
            config.warm_start = prev->best_params;
        }
        results.push_back(optimize_parameters(dist, p, objective,
                                              config, mix_seed(seed, {0x7377ull, static_cast<std::uint64_t>(p)})));
        prev = &results.back();
    }
    return results;
}

struct Manifest {
    json j;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    Manifest(const ExperimentSpec& spec) {
        j["schema"] = kSchemaVersion;
        j["type"] = "experiment-manifest";
        j["experiment"] = experiment_name(spec.id);
        j["seed"] = spec.seed;
        j["workers"] = spec.workers;
        j["objective"] = objective_name(spec.objective);
        j["depths"] = spec.depths;
        json fleets = json::array();
        for (const auto& fleet : spec.fleets) {
            fleets.push_back(json{{"kind", kind_name(fleet.kind)},
                                  {"sizes", fleet.sizes},
                                  {"instances_per_size", fleet.instances_per_size}});
        }
        j["fleets"] = std::move(fleets);
        j["optimizer"] = json{{"restarts", spec.optimizer.restarts},
                              {"max_iters_per_layer", spec.optimizer.max_iters_per_layer},
                              {"tol", spec.optimizer.tol}};
    }

    void finish(const ExperimentSpec& spec, const std::vector<std::string>& statuses) {
        json st = json::array();
        std::size_t failures = 0;
        for (const auto& s : statuses) {
            st.push_back(s);
            if (s != "ok") ++failures;
        }
        j["instances"] = std::move(st);
        j["failures"] = failures;
        j["wall_time_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        save_json(j, spec.out_dir / "run.json");
        if (failures > 0) {
            throw AssertionFailure("experiment " + experiment_name(spec.id) + ": " +
                                   std::to_string(failures) + " instance(s) failed; see run.json");
        }
    }
};

void prepare_out_dir(const ExperimentSpec& spec) {
    std::filesystem::create_directories(spec.out_dir);
    const auto manifest = spec.out_dir / "run.json";
    if (std::filesystem::exists(manifest) && !spec.force) {
        throw ValidationError("experiment: " + manifest.string() +
                              " already exists; pass force to overwrite");
    }
}

// ---- per-experiment bodies -------------------------------------------------

// One optimized row per (instance, depth).
struct OptRow {
    std::string instance;
    int p = 0;
    StateMetrics metrics;
    double bound = 0.0;       // lambda_ub or alpha_ub
    double prediction = 0.0;  // lambda_hat or alpha_hat (fig3/fig7)
    double n = 0.0;
    ProblemKind kind = ProblemKind::MaxCut;
};

// Shared by fig1/fig3/fig4/fig7: optimize the fleet, keep per-row metrics
// plus the lambda/alpha ceilings; asserts the ceiling per row.
std::vector<std::vector<OptRow>> optimize_fleet(const ExperimentSpec& spec,
                                                const std::vector<FleetEntry>& entries,
                                                bool alpha_mode,
                                                std::vector<std::string>& statuses) {
    std::vector<std::vector<OptRow>> rows(entries.size());
    parallel_for(spec.workers, entries.size(), [&](std::size_t i) {
        const ProblemInstance& inst = entries[i].instance;
        try {
            const ObjectiveDistribution dist = distribution_of(inst);
            const double dist_rho = rho(dist);
            const std::uint64_t opt_seed =
                mix_seed(spec.seed, {0x6f70ull, static_cast<std::uint64_t>(inst.kind),
                                     static_cast<std::uint64_t>(inst.n), entries[i].index});
            auto sweep = sweep_depths(dist, spec.depths, spec.objective, spec.optimizer, opt_seed);
            std::vector<int> sorted = spec.depths;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t di = 0; di < sorted.size(); ++di) {
                OptRow row;
                row.instance = inst.id();
                row.p = sorted[di];
                row.metrics = sweep[di].best_metrics;
                row.n = inst.n;
                row.kind = inst.kind;
                if (alpha_mode) {
                    row.bound = alpha_ub(row.p, dist);
                    if (!row.metrics.alpha) {
                        throw AssertionFailure(inst.id() + ": alpha undefined for this distribution");
                    }
                    if (*row.metrics.alpha > row.bound + kBoundSlack) {
                        throw AssertionFailure(inst.id() + " p=" + std::to_string(row.p) +
                                               ": alpha exceeds mu bound");
                    }
                } else {
                    row.bound = lambda_ub(row.p, dist_rho);
                    if (row.metrics.lambda >= row.bound + kBoundSlack) {
                        throw AssertionFailure(inst.id() + " p=" + std::to_string(row.p) +
                                               ": lambda exceeds (2p+1)^2 rho");
                    }
                }
                rows[i].push_back(std::move(row));
            }
            statuses[i] = "ok";
        } catch (const std::exception& e) {
            statuses[i] = std::string("failed: ") + e.what();
        }
    });
    return rows;
}

void run_fig1(const ExperimentSpec& spec) {
    Manifest manifest(spec);
    auto entries = build_fleets(spec);
    std::vector<std::string> statuses(entries.size(), "pending");
    auto rows = optimize_fleet(spec, entries, /*alpha_mode=*/false, statuses);

    std::ostringstream csv;
    csv << "instance,p,lambda,lambda_ub\n";
    for (const auto& per_instance : rows) {
        for (const auto& row : per_instance) {
            csv << row.instance << "," << row.p << "," << format_double(row.metrics.lambda) << ","
                << format_double(row.bound) << "\n";
        }
    }
    write_text(spec.out_dir / "data.csv", csv.str());
    manifest.finish(spec, statuses);
}

void run_fig4(const ExperimentSpec& spec) {
    Manifest manifest(spec);
    auto entries = build_fleets(spec);
    std::vector<std::string> statuses(entries.size(), "pending");
    auto rows = optimize_fleet(spec, entries, /*alpha_mode=*/true, statuses);

    std::ostringstream csv;
    csv << "instance,p,alpha,alpha_ub\n";
    for (const auto& per_instance : rows) {
        for (const auto& row : per_instance) {
            csv << row.instance << "," << row.p << "," << format_double(*row.metrics.alpha) << ","
                << format_double(row.bound) << "\n";
        }
    }
    write_text(spec.out_dir / "data.csv", csv.str());
    manifest.finish(spec, statuses);
}

void run_fig2(const ExperimentSpec& spec) {
    Manifest manifest(spec);
    auto entries = build_fleets(spec);
    std::vector<std::string> statuses(entries.size(), "pending");
    std::vector<double> rhos(entries.size(), 0.0);
    parallel_for(spec.workers, entries.size(), [&](std::size_t i) {
        try {
            rhos[i] = rho(distribution_of(entries[i].instance));
            statuses[i] = "ok";
        } catch (const std::exception& e) {
            statuses[i] = std::string("failed: ") + e.what();
        }
    });

    std::ostringstream csv;
    csv << "instance,kind,n,rho,log_rho\n";
    std::map<ProblemKind, std::vector<std::pair<double, double>>> points;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& inst = entries[i].instance;
        if (statuses[i] != "ok") continue;
        csv << inst.id() << "," << kind_name(inst.kind) << "," << inst.n << ","
            << format_double(rhos[i]) << "," << format_double(std::log(rhos[i])) << "\n";
        points[inst.kind].emplace_back(inst.n, std::log(rhos[i]));
    }
    write_text(spec.out_dir / "rho.csv", csv.str());

    std::ostringstream fits;
    fits << "kind,theta1,theta2,r2\n";
    for (const auto& [kind, pts] : points) {
        RegressionModel model = fit_lambda_model(pts, kind_name(kind));
        if (model.theta[0] >= 0.0) {
            throw AssertionFailure("fig2: fitted log-rho slope is not negative for " +
                                   kind_name(kind));
        }
        fits << kind_name(kind) << "," << format_double(model.theta[0]) << ","
             << format_double(model.theta[1]) << "," << format_double(model.r2) << "\n";
        save_json(to_json(model), spec.out_dir / ("rho-" + kind_name(kind) + ".json"));
    }
    write_text(spec.out_dir / "fits.csv", fits.str());
    manifest.finish(spec, statuses);
}

void run_fig3(const ExperimentSpec& spec) {
    Manifest manifest(spec);
    auto entries = build_fleets(spec);
    std::vector<std::string> statuses(entries.size(), "pending");
    auto rows = optimize_fleet(spec, entries, /*alpha_mode=*/false, statuses);

    // Per-kind log-rho models fitted from this run's own fleet.
    std::map<ProblemKind, std::vector<std::pair<double, double>>> points;
    std::map<std::string, double> rho_by_instance;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (statuses[i] != "ok") continue;
        const auto& inst = entries[i].instance;
        const double r = rho(distribution_of(inst));
        rho_by_instance[inst.id()] = r;
        if (inst.kind != ProblemKind::Tsp) points[inst.kind].emplace_back(inst.n, std::log(r));
    }
    std::map<ProblemKind, RegressionModel> models;
    for (const auto& [kind, pts] : points) {
        models.emplace(kind, fit_lambda_model(pts, kind_name(kind)));
        save_json(to_json(models.at(kind)), spec.out_dir / ("rho-" + kind_name(kind) + ".json"));
    }

    std::ostringstream csv;
    csv << "instance,p,lambda,lambda_hat\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (const auto& row : rows[i]) {
            const double hat = row.kind == ProblemKind::Tsp
                                   ? tsp_lambda_ub(static_cast<int>(row.n), row.p)
                                   : predict_lambda_ub(models.at(row.kind), row.n, row.p);
            csv << row.instance << "," << row.p << "," << format_double(row.metrics.lambda) << ","
                << format_double(hat) << "\n";
        }
    }
    write_text(spec.out_dir / "pred.csv", csv.str());
    manifest.finish(spec, statuses);
}

struct MuGrid {
    // kind -> n -> averaged mu_r per depth grid point
    std::map<ProblemKind, std::map<int, std::vector<double>>> mu_bar;
    std::map<ProblemKind, double> mu1_mean; // mean mu_1 over training instances
    std::vector<double> r_values;           // 1/(2p+1)^2 per depth
};

MuGrid compute_mu_grid(const ExperimentSpec& spec, const std::vector<FleetEntry>& entries,
                       std::vector<std::string>& statuses) {
    MuGrid grid;
    for (int p : spec.depths) {
        grid.r_values.push_back(1.0 / ((2.0 * p + 1.0) * (2.0 * p + 1.0)));
    }
    std::vector<std::vector<double>> per_instance(entries.size());
    std::vector<double> mu1(entries.size(), 0.0);
    parallel_for(spec.workers, entries.size(), [&](std::size_t i) {
        try {
            const ObjectiveDistribution dist = distribution_of(entries[i].instance);
            for (double r : grid.r_values) per_instance[i].push_back(mu_r(dist, r));
            mu1[i] = mu_r(dist, 1.0);
            statuses[i] = "ok";
        } catch (const std::exception& e) {
            statuses[i] = std::string("failed: ") + e.what();
        }
    });
    std::map<std::pair<ProblemKind, int>, int> group_count;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (statuses[i] != "ok") continue;
        const auto& inst = entries[i].instance;
        auto& acc = grid.mu_bar[inst.kind][inst.n];
        if (acc.empty()) acc.assign(grid.r_values.size(), 0.0);
        for (std::size_t j = 0; j < grid.r_values.size(); ++j) acc[j] += per_instance[i][j];
        group_count[{inst.kind, inst.n}] += 1;
        grid.mu1_mean[inst.kind] += mu1[i];
    }
    std::map<ProblemKind, int> kind_count;
    for (const auto& [key, count] : group_count) {
        auto& acc = grid.mu_bar[key.first][key.second];
        for (double& v : acc) v /= count;
        kind_count[key.first] += count;
    }
    for (auto& [kind, sum] : grid.mu1_mean) sum /= kind_count[kind];
    return grid;
}

std::vector<MuSample> grid_samples(const MuGrid& grid, ProblemKind kind) {
    std::vector<MuSample> samples;
    for (const auto& [n, mus] : grid.mu_bar.at(kind)) {
        for (std::size_t j = 0; j < grid.r_values.size(); ++j) {
            samples.push_back({static_cast<double>(n), grid.r_values[j], mus[j]});
        }
    }
    return samples;
}

// The colorable-subgraph fleet has identical mu_1 across instances, so its
// model pins theta3; the other kinds use the full five-parameter surface.
RegressionModel fit_kind_model(const MuGrid& grid, ProblemKind kind) {
    const auto samples = grid_samples(grid, kind);
    if (kind == ProblemKind::MaxKColorableSubgraph) {
        return fit_mu_model(samples, ModelVariant::MuFixed, grid.mu1_mean.at(kind),
                            kind_name(kind));
    }
    return fit_mu_model(samples, ModelVariant::MuFull, std::nullopt, kind_name(kind));
}

void run_fig5(const ExperimentSpec& spec) {
    Manifest manifest(spec);
    auto entries = build_fleets(spec);
    std::vector<std::string> statuses(entries.size(), "pending");
    MuGrid grid = compute_mu_grid(spec, entries, statuses);

    std::ostringstream csv;
    csv << "kind,n,r,log_inv_r,mu_bar\n";
    for (const auto& [kind, by_n] : grid.mu_bar) {
        for (const auto& [n, mus] : by_n) {
            for (std::size_t j = 0; j < grid.r_values.size(); ++j) {
                csv << kind_name(kind) << "," << n << "," << format_double(grid.r_values[j]) << ","
                    << format_double(std::log(1.0 / grid.r_values[j])) << ","
                    << format_double(mus[j]) << "\n";
            }
        }
    }
    write_text(spec.out_dir / "mu.csv", csv.str());
    manifest.finish(spec, statuses);
}

void run_fig6(const ExperimentSpec& spec) {
    Manifest manifest(spec);
    auto entries = build_fleets(spec);
    std::vector<std::string> statuses(entries.size(), "pending");
    MuGrid grid = compute_mu_grid(spec, entries, statuses);

    std::ostringstream csv;
    csv << "kind,n,r,mu_bar,mu_hat\n";
    for (const auto& [kind, by_n] : grid.mu_bar) {
        RegressionModel model = fit_kind_model(grid, kind);
        save_json(to_json(model), spec.out_dir / ("mu-" + kind_name(kind) + ".json"));
        for (const auto& [n, mus] : by_n) {
            for (std::size_t j = 0; j < grid.r_values.size(); ++j) {
                csv << kind_name(kind) << "," << n << "," << format_double(grid.r_values[j]) << ","
                    << format_double(mus[j]) << ","
                    << format_double(mu_model_eval(model, n, grid.r_values[j])) << "\n";
            }
        }
    }
    write_text(spec.out_dir / "fit.csv", csv.str());
    manifest.finish(spec, statuses);
}

void run_fig7(const ExperimentSpec& spec) {
    Manifest manifest(spec);
    auto entries = build_fleets(spec);
    std::vector<std::string> statuses(entries.size(), "pending");

    // Training grid over the full depth range, then optimized alpha at the
    // sweep depths.
    ExperimentSpec grid_spec = spec;
    grid_spec.depths = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    MuGrid grid = compute_mu_grid(grid_spec, entries, statuses);
    std::map<ProblemKind, RegressionModel> models;
    for (const auto& [kind, _] : grid.mu_bar) {
        models.emplace(kind, fit_kind_model(grid, kind));
        save_json(to_json(models.at(kind)), spec.out_dir / ("mu-" + kind_name(kind) + ".json"));
    }

    auto rows = optimize_fleet(spec, entries, /*alpha_mode=*/true, statuses);
    std::ostringstream csv;
    csv << "instance,p,alpha,alpha_hat\n";
    for (const auto& per_instance : rows) {
        for (const auto& row : per_instance) {
            csv << row.instance << "," << row.p << "," << format_double(*row.metrics.alpha) << ","
                << format_double(predict_alpha_ub(models.at(row.kind), row.n, row.p)) << "\n";
        }
    }
    write_text(spec.out_dir / "pred.csv", csv.str());
    manifest.finish(spec, statuses);
}

void run_thm1(const ExperimentSpec& spec) {
    Manifest manifest(spec);
    const WitnessReport report =
        verify_theorem1_witness(spec.p_max, spec.witness_total, spec.grid_step);

    std::ostringstream csv;
    csv << "p,parity,endpoint_value,max_value,argmax_r,relax_value,script_value\n";
    for (const auto& row : report.rows) {
        // The subset expansion at the mapped maximizing configuration must
        // agree with the closed form.
        const std::size_t pd = static_cast<std::size_t>(row.p);
        std::vector<double> gammas(pd, std::numbers::pi), betas(pd, std::numbers::pi);
        std::vector<double> v(spec.witness_total);
        double z;
        if (row.parity == ZParity::Even) {
            for (std::size_t m = 0; m < v.size(); ++m) v[m] = 2.0 * static_cast<double>(m) + 1.0;
            z = 0.0; // v odd, z even -> r = -1
        } else {
            for (std::size_t m = 0; m < v.size(); ++m) v[m] = 2.0 * static_cast<double>(m);
            z = 1.0; // v even, z odd -> r = +1
        }
        const double relax = relax_g(gammas, betas, v, z, spec.witness_total);
        const double script = script_g(row.p, row.parity, row.parity == ZParity::Even ? -1.0 : 1.0,
                                       spec.witness_total);
        if (std::abs(relax - script) > 1e-12) {
            throw AssertionFailure("thm1-witness: relax_g disagrees with script_g at p = " +
                                   std::to_string(row.p));
        }
        csv << row.p << "," << (row.parity == ZParity::Even ? "even" : "odd") << ","
            << format_double(row.endpoint_value) << "," << format_double(row.max_value) << ","
            << format_double(row.argmax_r) << "," << format_double(relax) << ","
            << format_double(script) << "\n";
    }
    write_text(spec.out_dir / "witness.csv", csv.str());
    save_json(to_json(report), spec.out_dir / "witness.json");
    manifest.finish(spec, {});
}

} // namespace

std::string experiment_name(ExperimentId id) {
    switch (id) {
        case ExperimentId::Fig1LambdaVsBound: return "fig1-lambda-vs-bound";
        case ExperimentId::Fig2RhoScaling: return "fig2-rho-scaling";
        case ExperimentId::Fig3LambdaPrediction: return "fig3-lambda-prediction";
        case ExperimentId::Fig4AlphaVsBound: return "fig4-alpha-vs-bound";
        case ExperimentId::Fig5MuSurface: return "fig5-mu-surface";
        case ExperimentId::Fig6MuFit: return "fig6-mu-fit";
        case ExperimentId::Fig7AlphaPrediction: return "fig7-alpha-prediction";
        case ExperimentId::Thm1Witness: return "thm1-witness";
    }
    throw ValidationError("unknown experiment id");
}

ExperimentId experiment_from_name(const std::string& name) {
    for (ExperimentId id :
         {ExperimentId::Fig1LambdaVsBound, ExperimentId::Fig2RhoScaling,
          ExperimentId::Fig3LambdaPrediction, ExperimentId::Fig4AlphaVsBound,
          ExperimentId::Fig5MuSurface, ExperimentId::Fig6MuFit, ExperimentId::Fig7AlphaPrediction,
          ExperimentId::Thm1Witness}) {
        if (experiment_name(id) == name) return id;
    }
    throw ValidationError("unknown experiment: " + name);
}

int fleet_k(ProblemKind kind, int n) {
    switch (kind) {
        case ProblemKind::MaxKColorableSubgraph: return 3;
        case ProblemKind::MaxKVertexCover: return n / 2;
        default: return 0;
    }
}

std::vector<ProblemInstance> make_fleet(const FleetSpec& fleet, std::uint64_t master_seed) {
    if (fleet.instances_per_size < 1) throw ValidationError("fleet: need at least one instance");
    std::vector<ProblemInstance> instances;
    for (int n : fleet.sizes) {
        if (fleet.kind == ProblemKind::MaxKVertexCover && n % 2 != 0) {
            throw ValidationError("fleet: vertex-cover sizes must be even for k = n/2");
        }
        for (int i = 0; i < fleet.instances_per_size; ++i) {
            const std::uint64_t seed =
                mix_seed(master_seed, {0x666cull, static_cast<std::uint64_t>(fleet.kind),
                                       static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(i)});
            if (fleet.kind == ProblemKind::Tsp) {
                instances.push_back(gen_tsp(n, seed));
            } else {
                instances.push_back(gen_graph_instance(fleet.kind, n, fleet_k(fleet.kind, n),
                                                       default_edge_rule(fleet.kind), seed));
            }
        }
    }
    return instances;
}

ExperimentSpec default_spec(ExperimentId id, std::filesystem::path out_dir) {
    ExperimentSpec spec;
    spec.id = id;
    spec.out_dir = std::move(out_dir);
    spec.workers = std::max(1u, std::thread::hardware_concurrency());

    const FleetSpec tsp{ProblemKind::Tsp, {5, 6, 7, 8}, 10};
    const FleetSpec mkcs{ProblemKind::MaxKColorableSubgraph, {6, 7, 8, 9, 10}, 10};
    const FleetSpec mkcs_mu{ProblemKind::MaxKColorableSubgraph, {7, 8, 9, 10}, 10};
    const FleetSpec mkvc{ProblemKind::MaxKVertexCover, {10, 12, 14, 16}, 10};
    const FleetSpec mkvc_mu{ProblemKind::MaxKVertexCover, {12, 14, 16}, 10};
    const FleetSpec maxcut{ProblemKind::MaxCut, {12, 14, 16}, 10};

    switch (id) {
        case ExperimentId::Fig1LambdaVsBound:
        case ExperimentId::Fig3LambdaPrediction:
            spec.fleets = {tsp, mkcs, mkvc};
            spec.depths = {1, 2, 3, 4, 5};
            spec.objective = ObjectiveKind::MaxLambda;
            break;
        case ExperimentId::Fig2RhoScaling:
            spec.fleets = {mkcs, mkvc};
            spec.fleets[0].instances_per_size = 20;
            spec.fleets[1].instances_per_size = 20;
            spec.depths = {};
            break;
        case ExperimentId::Fig4AlphaVsBound:
            spec.fleets = {mkcs, maxcut, mkvc};
            spec.depths = {1, 2, 3, 4, 5};
            spec.objective = ObjectiveKind::MaxExpectation;
            break;
        case ExperimentId::Fig5MuSurface:
        case ExperimentId::Fig6MuFit:
            spec.fleets = {mkcs_mu, maxcut, mkvc_mu};
            spec.depths = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
            break;
        case ExperimentId::Fig7AlphaPrediction:
            spec.fleets = {mkcs_mu, maxcut, mkvc_mu};
            spec.depths = {1, 2, 3, 4, 5};
            spec.objective = ObjectiveKind::MaxExpectation;
            break;
        case ExperimentId::Thm1Witness:
            spec.depths = {};
            break;
    }
    return spec;
}

void parallel_for(int workers, std::size_t count, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const int w = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (w == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    threads.reserve(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t) {
        threads.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

void run_experiment(const ExperimentSpec& spec) {
    if (spec.out_dir.empty()) throw ValidationError("experiment: output directory required");
    prepare_out_dir(spec);
    switch (spec.id) {
        case ExperimentId::Fig1LambdaVsBound: return run_fig1(spec);
        case ExperimentId::Fig2RhoScaling: return run_fig2(spec);
        case ExperimentId::Fig3LambdaPrediction: return run_fig3(spec);
        case ExperimentId::Fig4AlphaVsBound: return run_fig4(spec);
        case ExperimentId::Fig5MuSurface: return run_fig5(spec);
        case ExperimentId::Fig6MuFit: return run_fig6(spec);
        case ExperimentId::Fig7AlphaPrediction: return run_fig7(spec);
        case ExperimentId::Thm1Witness: return run_thm1(spec);
    }
    throw ValidationError("unknown experiment id");
}

} // namespace gmq
