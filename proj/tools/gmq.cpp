// Command-line front end: generate instances, enumerate distributions,
// simulate and optimize circuits, compute bounds, fit models, run the
// experiment pipelines, and verify the grid witness.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmq/bounds.hpp"
#include "gmq/calibrate.hpp"
#include "gmq/distribution.hpp"
#include "gmq/errors.hpp"
#include "gmq/experiments.hpp"
#include "gmq/io.hpp"
#include "gmq/problems.hpp"
#include "gmq/simulator.hpp"

namespace {

using gmq::format_double;

constexpr int kExitValidation = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitAssertion = 4;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw gmq::ValidationError("cannot open for writing: " + out_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

gmq::ObjectiveDistribution load_distribution(const std::string& path) {
    return gmq::distribution_from_json(gmq::load_json(path));
}

gmq::PhaseFunction phase_from_flags(const std::string& phase, std::optional<double> th) {
    if (phase == "objective") return gmq::PhaseFunction::objective();
    if (phase == "threshold") {
        if (!th) throw gmq::ValidationError("threshold phase needs --th");
        return gmq::PhaseFunction::threshold(*th);
    }
    throw gmq::ValidationError("unknown phase function: " + phase);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact GM-QAOA analysis toolkit"};
    app.require_subcommand(1);

    // --- gen ---
    auto* gen = app.add_subcommand("gen", "generate a seeded problem instance");
    std::string gen_kind = "max-cut", gen_out;
    int gen_n = 8, gen_k = 0, gen_degree = 0;
    std::uint64_t gen_seed = 1;
    double gen_edge_prob = -1.0;
    gen->add_option("--kind", gen_kind, "tsp | max-cut | max-k-colorable-subgraph | max-k-vertex-cover");
    gen->add_option("--n", gen_n, "vertex / city count")->required();
    gen->add_option("--k", gen_k, "color count or cover size");
    gen->add_option("--seed", gen_seed, "generation seed");
    gen->add_option("--edge-prob", gen_edge_prob, "Erdos-Renyi edge probability");
    gen->add_option("--degree", gen_degree, "regular-graph degree");
    gen->add_option("--out", gen_out, "output JSON path (default stdout)");

    // --- dist ---
    auto* dist_cmd = app.add_subcommand("dist", "enumerate an instance into a distribution");
    std::string dist_in, dist_out, dist_format = "json";
    int dist_workers = 1;
    std::uint64_t dist_cap = gmq::kDefaultEnumerationCap;
    dist_cmd->add_option("--instance", dist_in, "instance JSON path")->required();
    dist_cmd->add_option("--workers", dist_workers, "enumeration workers");
    dist_cmd->add_option("--cap", dist_cap, "enumeration cap");
    dist_cmd->add_option("--format", dist_format, "json | csv");
    dist_cmd->add_option("--out", dist_out, "output path (default stdout)");

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "run a circuit on a distribution");
    std::string sim_dist, sim_circuit, sim_out, sim_format = "csv";
    sim->add_option("--dist", sim_dist, "distribution JSON path")->required();
    sim->add_option("--circuit", sim_circuit, "circuit JSON path")->required();
    sim->add_option("--format", sim_format, "csv | json");
    sim->add_option("--out", sim_out, "output path (default stdout)");

    // --- optimize ---
    auto* opt = app.add_subcommand("optimize", "tune circuit parameters");
    std::string opt_dist, opt_out, opt_objective = "lambda", opt_phase = "objective";
    int opt_p = 1, opt_restarts = 20, opt_max_iters = 500;
    double opt_tol = 1e-8;
    std::optional<double> opt_th;
    std::uint64_t opt_seed = 1;
    opt->add_option("--dist", opt_dist, "distribution JSON path")->required();
    opt->add_option("--p", opt_p, "circuit depth")->required();
    opt->add_option("--objective", opt_objective, "lambda | expectation | min-expectation");
    opt->add_option("--restarts", opt_restarts, "multi-start count");
    opt->add_option("--max-iters", opt_max_iters, "simplex iteration cap per layer");
    opt->add_option("--tol", opt_tol, "simplex convergence tolerance");
    opt->add_option("--phase", opt_phase, "objective | threshold");
    opt->add_option("--th", opt_th, "threshold value");
    opt->add_option("--seed", opt_seed, "optimizer seed");
    opt->add_option("--out", opt_out, "output JSON path (default stdout)");

    // --- bounds ---
    auto* bounds_cmd = app.add_subcommand("bounds", "performance upper bounds for a distribution");
    std::string bounds_dist, bounds_out, bounds_format = "csv";
    std::vector<int> bounds_p{1};
    bounds_cmd->add_option("--dist", bounds_dist, "distribution JSON path")->required();
    bounds_cmd->add_option("--p", bounds_p, "depths");
    bounds_cmd->add_option("--format", bounds_format, "csv | json");
    bounds_cmd->add_option("--out", bounds_out, "output path (default stdout)");

    // --- fit ---
    auto* fit = app.add_subcommand("fit", "fit a predictive model from CSV data");
    std::string fit_model = "lambda", fit_data, fit_out;
    std::optional<double> fit_mu1;
    fit->add_option("--model", fit_model, "lambda | mu-full | mu-fixed");
    fit->add_option("--data", fit_data, "CSV: n,rho for lambda; n,r,mu for mu models")->required();
    fit->add_option("--mu1", fit_mu1, "pinned theta3 for mu-fixed");
    fit->add_option("--out", fit_out, "output JSON path (default stdout)");

    // --- experiment ---
    auto* exp = app.add_subcommand("experiment", "run a full experiment pipeline");
    std::string exp_id, exp_out_dir;
    std::uint64_t exp_seed = 1;
    int exp_workers = 0, exp_instances = 0, exp_restarts = 0;
    std::vector<int> exp_depths, exp_sizes;
    bool exp_force = false, exp_allow_large = false;
    exp->add_option("--id", exp_id,
                    "fig1-lambda-vs-bound | fig2-rho-scaling | fig3-lambda-prediction | "
                    "fig4-alpha-vs-bound | fig5-mu-surface | fig6-mu-fit | "
                    "fig7-alpha-prediction | thm1-witness")
        ->required();
    exp->add_option("--out", exp_out_dir, "output directory")->required();
    exp->add_option("--seed", exp_seed, "master seed");
    exp->add_option("--workers", exp_workers, "worker threads (default: hardware)");
    exp->add_option("--depths", exp_depths, "override depth list");
    exp->add_option("--sizes", exp_sizes, "override every fleet's size list");
    exp->add_option("--instances", exp_instances, "override instances per size");
    exp->add_option("--restarts", exp_restarts, "override optimizer restarts");
    exp->add_flag("--force", exp_force, "overwrite an existing run");
    exp->add_flag("--allow-large", exp_allow_large, "accept sizes beyond desk scale");

    // --- verify ---
    auto* verify = app.add_subcommand("verify", "grid witness for the basis-probability maximum");
    int verify_p_max = 9;
    std::uint64_t verify_total = 1000;
    double verify_step = 1e-3;
    std::string verify_out;
    verify->add_option("--p-max", verify_p_max, "max depth");
    verify->add_option("--total", verify_total, "|F| used in the scan");
    verify->add_option("--grid-step", verify_step, "r grid step");
    verify->add_option("--out", verify_out, "output JSON path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            gmq::ProblemInstance instance;
            const gmq::ProblemKind kind = gmq::kind_from_name(gen_kind);
            if (kind == gmq::ProblemKind::Tsp) {
                instance = gmq::gen_tsp(gen_n, gen_seed);
            } else {
                gmq::EdgeRule rule = gmq::default_edge_rule(kind);
                if (gen_edge_prob >= 0.0) rule = gmq::EdgeRule::erdos_renyi(gen_edge_prob);
                if (gen_degree > 0) rule = gmq::EdgeRule::regular(gen_degree);
                int k = gen_k;
                if (k == 0) k = gmq::fleet_k(kind, gen_n);
                instance = gmq::gen_graph_instance(kind, gen_n, k, rule, gen_seed);
            }
            emit(gmq::to_json(instance).dump(2), gen_out);
        } else if (*dist_cmd) {
            const auto instance = gmq::instance_from_json(gmq::load_json(dist_in));
            const auto dist = gmq::distribution_of(instance, dist_workers, dist_cap);
            emit(dist_format == "csv" ? gmq::distribution_csv(dist) : gmq::to_json(dist).dump(2),
                 dist_out);
        } else if (*sim) {
            const auto dist = load_distribution(sim_dist);
            const auto params = gmq::circuit_from_json(gmq::load_json(sim_circuit));
            const auto [state, metrics] = gmq::run_circuit(dist, params);
            if (sim_format == "json") {
                nlohmann::json j{{"schema", gmq::kSchemaVersion},
                                 {"type", "metrics"},
                                 {"lambda", metrics.lambda},
                                 {"expectation", metrics.expectation}};
                if (std::isfinite(metrics.tts)) j["tts"] = metrics.tts;
                if (metrics.alpha) j["alpha"] = *metrics.alpha;
                emit(j.dump(2), sim_out);
            } else {
                emit(std::string(gmq::kMetricsCsvHeader) + "\n" +
                         gmq::metrics_csv_row(dist.provenance, params.depth(), metrics) + "\n",
                     sim_out);
            }
        } else if (*opt) {
            const auto dist = load_distribution(opt_dist);
            gmq::OptimizerConfig config;
            config.restarts = opt_restarts;
            config.max_iters_per_layer = opt_max_iters;
            config.tol = opt_tol;
            config.phase_fn = phase_from_flags(opt_phase, opt_th);
            const auto result = gmq::optimize_parameters(
                dist, opt_p, gmq::objective_from_name(opt_objective), config, opt_seed);
            emit(gmq::to_json(result).dump(2), opt_out);
        } else if (*bounds_cmd) {
            const auto dist = load_distribution(bounds_dist);
            if (bounds_format == "json") {
                nlohmann::json rows = nlohmann::json::array();
                for (int p : bounds_p) {
                    const auto report = gmq::bound_report(p, dist);
                    nlohmann::json row{{"p", report.p},
                                       {"basis_ub", report.basis_ub},
                                       {"lambda_ub", report.lambda_ub},
                                       {"context", report.context}};
                    if (report.alpha_ub) row["alpha_ub"] = *report.alpha_ub;
                    rows.push_back(std::move(row));
                }
                emit(nlohmann::json{{"schema", gmq::kSchemaVersion},
                                    {"type", "bound-report"},
                                    {"rows", std::move(rows)}}
                         .dump(2),
                     bounds_out);
            } else {
                std::ostringstream os;
                os << gmq::kBoundCsvHeader << "\n";
                for (int p : bounds_p) {
                    os << gmq::bound_csv_row(dist.provenance, gmq::bound_report(p, dist)) << "\n";
                }
                emit(os.str(), bounds_out);
            }
        } else if (*fit) {
            std::ifstream in(fit_data);
            if (!in) throw gmq::ValidationError("cannot open for reading: " + fit_data);
            std::string line;
            if (!std::getline(in, line)) throw gmq::ValidationError("fit: empty data file");
            gmq::RegressionModel model;
            if (fit_model == "lambda") {
                std::vector<std::pair<double, double>> points; // (n, log rho)
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    const auto f = split_csv_line(line);
                    if (f.size() < 2) throw gmq::ValidationError("fit: expected n,rho rows");
                    points.emplace_back(std::stod(f[0]), std::log(std::stod(f[1])));
                }
                model = gmq::fit_lambda_model(points, fit_data);
            } else {
                std::vector<gmq::MuSample> samples;
                while (std::getline(in, line)) {
                    if (line.empty()) continue;
                    const auto f = split_csv_line(line);
                    if (f.size() < 3) throw gmq::ValidationError("fit: expected n,r,mu rows");
                    samples.push_back({std::stod(f[0]), std::stod(f[1]), std::stod(f[2])});
                }
                model = gmq::fit_mu_model(samples, gmq::variant_from_name(fit_model), fit_mu1,
                                          fit_data);
            }
            emit(gmq::to_json(model).dump(2), fit_out);
        } else if (*exp) {
            gmq::ExperimentSpec spec =
                gmq::default_spec(gmq::experiment_from_name(exp_id), exp_out_dir);
            spec.seed = exp_seed;
            if (exp_workers > 0) spec.workers = exp_workers;
            if (!exp_depths.empty()) spec.depths = exp_depths;
            if (!exp_sizes.empty()) {
                for (auto& fleet : spec.fleets) fleet.sizes = exp_sizes;
            }
            if (exp_instances > 0) {
                for (auto& fleet : spec.fleets) fleet.instances_per_size = exp_instances;
            }
            if (exp_restarts > 0) spec.optimizer.restarts = exp_restarts;
            spec.force = exp_force;
            spec.allow_large = exp_allow_large;
            gmq::run_experiment(spec);
            std::cout << "experiment " << exp_id << " complete: " << spec.out_dir.string() << "\n";
        } else if (*verify) {
            const auto report = gmq::verify_theorem1_witness(verify_p_max, verify_total, verify_step);
            emit(gmq::to_json(report).dump(2), verify_out);
        }
    } catch (const gmq::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const gmq::WitnessError& e) {
        std::cerr << "witness violation: " << e.what() << "\n";
        return kExitAssertion;
    } catch (const gmq::AssertionFailure& e) {
        std::cerr << "assertion failure: " << e.what() << "\n";
        return kExitAssertion;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
