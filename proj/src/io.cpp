#include "gmq/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gmq/errors.hpp"

namespace gmq {
namespace {

using nlohmann::json;

void check_schema(const json& j, const std::string& type) {
    if (!j.contains("schema") || !j["schema"].is_number_integer()) {
        throw SchemaError("missing schema version in " + type + " file");
    }
    const int version = j["schema"].get<int>();
    if (version != kSchemaVersion) {
        throw SchemaError("schema-version mismatch for " + type + ": file has " +
                          std::to_string(version) + ", this build reads " +
                          std::to_string(kSchemaVersion) + "; migration required");
    }
}

PhaseFunction phase_from_json(const json& j) {
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "objective") return PhaseFunction::objective();
    if (variant == "threshold") return PhaseFunction::threshold(j.at("th").get<double>());
    throw ValidationError("unknown phase function variant: " + variant);
}

json phase_to_json(const PhaseFunction& fn) {
    if (fn.variant == PhaseFunction::Variant::Objective) {
        return json{{"variant", "objective"}};
    }
    return json{{"variant", "threshold"}, {"th", fn.th}};
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string orientation_name(Orientation o) {
    return o == Orientation::Maximize ? "maximize" : "minimize";
}

Orientation orientation_from_name(const std::string& name) {
    if (name == "maximize") return Orientation::Maximize;
    if (name == "minimize") return Orientation::Minimize;
    throw ValidationError("unknown orientation: " + name);
}

json to_json(const ProblemInstance& instance) {
    json j{{"schema", kSchemaVersion},
           {"type", "instance"},
           {"kind", kind_name(instance.kind)},
           {"n", instance.n},
           {"orientation", orientation_name(instance.orientation)},
           {"seed", instance.seed}};
    if (instance.kind == ProblemKind::MaxKColorableSubgraph ||
        instance.kind == ProblemKind::MaxKVertexCover) {
        j["k"] = instance.k;
    }
    if (instance.kind == ProblemKind::Tsp) {
        j["w"] = instance.w;
    } else {
        json edges = json::array();
        for (const auto& [u, v] : instance.edges) edges.push_back(json::array({u, v}));
        j["edges"] = std::move(edges);
    }
    return j;
}

ProblemInstance instance_from_json(const json& j) {
    check_schema(j, "instance");
    ProblemInstance instance;
    instance.kind = kind_from_name(j.at("kind").get<std::string>());
    instance.n = j.at("n").get<int>();
    instance.k = j.contains("k") ? j.at("k").get<int>() : 0;
    instance.orientation = orientation_from_name(j.at("orientation").get<std::string>());
    instance.seed = j.at("seed").get<std::uint64_t>();
    if (instance.kind == ProblemKind::Tsp) {
        instance.w = j.at("w").get<std::vector<std::vector<double>>>();
    } else {
        for (const auto& e : j.at("edges")) {
            instance.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        }
    }
    validate(instance);
    return instance;
}

json to_json(const ObjectiveDistribution& dist) {
    return json{{"schema", kSchemaVersion},
                {"type", "distribution"},
                {"orientation", orientation_name(dist.orientation)},
                {"values", dist.values},
                {"counts", dist.counts},
                {"total", dist.total},
                {"provenance", dist.provenance}};
}

ObjectiveDistribution distribution_from_json(const json& j) {
    check_schema(j, "distribution");
    ObjectiveDistribution dist;
    dist.orientation = orientation_from_name(j.at("orientation").get<std::string>());
    dist.values = j.at("values").get<std::vector<double>>();
    dist.counts = j.at("counts").get<std::vector<std::uint64_t>>();
    dist.total = j.at("total").get<std::uint64_t>();
    dist.provenance = j.value("provenance", std::string("external"));
    dist.validate();
    return dist;
}

json to_json(const CircuitParams& params) {
    return json{{"schema", kSchemaVersion},
                {"type", "circuit"},
                {"p", params.depth()},
                {"gammas", params.gammas},
                {"betas", params.betas},
                {"phase_fn", phase_to_json(params.phase_fn)}};
}

CircuitParams circuit_from_json(const json& j) {
    check_schema(j, "circuit");
    CircuitParams params;
    params.gammas = j.at("gammas").get<std::vector<double>>();
    params.betas = j.at("betas").get<std::vector<double>>();
    params.phase_fn = phase_from_json(j.at("phase_fn"));
    params.validate();
    if (j.contains("p") && j.at("p").get<int>() != params.depth()) {
        throw ValidationError("circuit: declared depth does not match parameter vectors");
    }
    return params;
}

json to_json(const RegressionModel& model) {
    return json{{"schema", kSchemaVersion},
                {"type", "model"},
                {"variant", variant_name(model.variant)},
                {"theta", model.theta},
                {"rmse", model.rmse},
                {"r2", model.r2},
                {"training", model.training},
                {"iterations", model.iterations},
                {"converged", model.converged}};
}

RegressionModel model_from_json(const json& j) {
    check_schema(j, "model");
    RegressionModel model;
    model.variant = variant_from_name(j.at("variant").get<std::string>());
    model.theta = j.at("theta").get<std::vector<double>>();
    model.rmse = j.at("rmse").get<double>();
    model.r2 = j.at("r2").get<double>();
    model.training = j.value("training", std::string{});
    model.iterations = j.value("iterations", 0);
    model.converged = j.value("converged", true);
    const std::size_t expected =
        model.variant == ModelVariant::Lambda ? 2 : (model.variant == ModelVariant::MuFull ? 5 : 3);
    if (model.theta.size() != expected) {
        throw ValidationError("model: theta length does not match the variant");
    }
    return model;
}

json to_json(const OptimizationResult& result) {
    json metrics{{"lambda", result.best_metrics.lambda},
                 {"expectation", result.best_metrics.expectation}};
    if (std::isfinite(result.best_metrics.tts)) metrics["tts"] = result.best_metrics.tts;
    if (result.best_metrics.alpha) metrics["alpha"] = *result.best_metrics.alpha;
    return json{{"schema", kSchemaVersion},
                {"type", "optimization-result"},
                {"objective", objective_name(result.objective_kind)},
                {"best_value", result.best_value},
                {"best_params", to_json(result.best_params)},
                {"restarts_used", result.restarts_used},
                {"evaluations", result.evaluations},
                {"trace", result.trace},
                {"metrics", std::move(metrics)}};
}

json to_json(const WitnessReport& report) {
    json rows = json::array();
    for (const auto& row : report.rows) {
        rows.push_back(json{{"p", row.p},
                            {"parity", row.parity == ZParity::Even ? "even" : "odd"},
                            {"endpoint_value", row.endpoint_value},
                            {"max_value", row.max_value},
                            {"argmax_r", row.argmax_r}});
    }
    return json{{"schema", kSchemaVersion},
                {"type", "witness-report"},
                {"p_max", report.p_max},
                {"total", report.total},
                {"grid_step", report.grid_step},
                {"rows", std::move(rows)}};
}

void save_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open for reading: " + path.string());
    json j;
    in >> j;
    return j;
}

std::string distribution_csv(const ObjectiveDistribution& dist) {
    std::ostringstream os;
    os << "value,count\n";
    for (std::size_t i = 0; i < dist.size(); ++i) {
        os << format_double(dist.values[i]) << "," << dist.counts[i] << "\n";
    }
    return os.str();
}

std::string metrics_csv_row(const std::string& instance_id, int p, const StateMetrics& m) {
    std::ostringstream os;
    os << instance_id << "," << p << "," << format_double(m.lambda) << ","
       << (m.alpha ? format_double(*m.alpha) : std::string{}) << ","
       << format_double(m.expectation) << "," << format_double(m.tts);
    return os.str();
}

std::string bound_csv_row(const std::string& instance_id, const BoundReport& report) {
    std::ostringstream os;
    os << instance_id << "," << report.p << "," << format_double(report.basis_ub) << ","
       << format_double(report.lambda_ub) << ","
       << (report.alpha_ub ? format_double(*report.alpha_ub) : std::string{});
    return os.str();
}

} // namespace gmq
