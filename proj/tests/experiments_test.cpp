#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "gmq/errors.hpp"
#include "gmq/experiments.hpp"
#include "gmq/calibrate.hpp"
#include "gmq/io.hpp"

using namespace gmq;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("gmq-exp-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ExperimentSpec mini_fig1(const std::filesystem::path& dir) {
    ExperimentSpec spec = default_spec(ExperimentId::Fig1LambdaVsBound, dir);
    spec.fleets = {{ProblemKind::Tsp, {5}, 2},
                   {ProblemKind::MaxKColorableSubgraph, {6}, 2},
                   {ProblemKind::MaxKVertexCover, {10}, 2}};
    spec.depths = {1, 2};
    spec.optimizer.restarts = 3;
    spec.workers = 2;
    return spec;
}

} // namespace

TEST_CASE("fleets are reproducible and ordered") {
    const FleetSpec fleet{ProblemKind::MaxKVertexCover, {10, 12}, 3};
    const auto a = make_fleet(fleet, 5);
    const auto b = make_fleet(fleet, 5);
    REQUIRE(a.size() == 6);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].edges == b[i].edges);
        CHECK(a[i].k == a[i].n / 2);
    }
    const auto c = make_fleet(fleet, 6);
    CHECK(a[0].edges != c[0].edges);
}

TEST_CASE("odd vertex-cover sizes are rejected") {
    CHECK_THROWS_AS(make_fleet({ProblemKind::MaxKVertexCover, {11}, 1}, 1), ValidationError);
}

TEST_CASE("parallel_for covers every index exactly once and rethrows") {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(4, hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(3, 16,
                                 [&](std::size_t i) {
                                     if (i == 7) throw ValidationError("boom");
                                 }),
                    ValidationError);
}

TEST_CASE("fig1 bundle satisfies the lambda bound on every row") {
    TempDir dir;
    auto spec = mini_fig1(dir.path);
    run_experiment(spec);

    const std::string csv = slurp(dir.path / "data.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "instance,p,lambda,lambda_ub");
    int rows = 0;
    while (std::getline(lines, line)) {
        std::stringstream ss(line);
        std::string instance, p, lambda, ub;
        std::getline(ss, instance, ',');
        std::getline(ss, p, ',');
        std::getline(ss, lambda, ',');
        std::getline(ss, ub, ',');
        CHECK(std::stod(lambda) < std::stod(ub) + 1e-9);
        ++rows;
    }
    CHECK(rows == 6 * 2); // six instances, two depths

    const auto manifest = load_json(dir.path / "run.json");
    CHECK(manifest.at("failures").get<int>() == 0);
    CHECK(manifest.at("experiment").get<std::string>() == "fig1-lambda-vs-bound");
}

TEST_CASE("experiment reruns are byte-identical and refuse to overwrite") {
    TempDir dir_a, dir_b;
    auto spec_a = mini_fig1(dir_a.path);
    auto spec_b = mini_fig1(dir_b.path);
    spec_b.workers = 1; // worker count must not change the bytes
    run_experiment(spec_a);
    run_experiment(spec_b);
    CHECK(slurp(dir_a.path / "data.csv") == slurp(dir_b.path / "data.csv"));

    CHECK_THROWS_AS(run_experiment(spec_a), ValidationError); // run.json exists
    spec_a.force = true;
    run_experiment(spec_a); // force overwrites
    CHECK(slurp(dir_a.path / "data.csv") == slurp(dir_b.path / "data.csv"));
}

TEST_CASE("desk-scale size limits guard the pipelines") {
    TempDir dir;
    auto spec = mini_fig1(dir.path);
    spec.fleets = {{ProblemKind::Tsp, {9}, 1}};
    CHECK_THROWS_AS(run_experiment(spec), ValidationError);
}

TEST_CASE("fig2 produces per-instance rho rows and negative-slope fits") {
    TempDir dir;
    ExperimentSpec spec = default_spec(ExperimentId::Fig2RhoScaling, dir.path);
    spec.fleets = {{ProblemKind::MaxKVertexCover, {10, 12}, 5}};
    spec.workers = 2;
    run_experiment(spec);

    const std::string fits = slurp(dir.path / "fits.csv");
    std::istringstream lines(fits);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "kind,theta1,theta2,r2");
    REQUIRE(std::getline(lines, row));
    std::stringstream ss(row);
    std::string kind, theta1;
    std::getline(ss, kind, ',');
    std::getline(ss, theta1, ',');
    CHECK(kind == "max-k-vertex-cover");
    CHECK(std::stod(theta1) < 0.0);

    const auto model = model_from_json(load_json(dir.path / "rho-max-k-vertex-cover.json"));
    CHECK(model.theta[0] == std::stod(theta1));
}

TEST_CASE("thm1 witness bundle agrees between both evaluator forms") {
    TempDir dir;
    ExperimentSpec spec = default_spec(ExperimentId::Thm1Witness, dir.path);
    spec.p_max = 3;
    spec.witness_total = 64;
    spec.grid_step = 1e-2;
    run_experiment(spec);

    const std::string csv = slurp(dir.path / "witness.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "p,parity,endpoint_value,max_value,argmax_r,relax_value,script_value");
    int rows = 0;
    while (std::getline(lines, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        REQUIRE(f.size() == 7);
        CHECK(std::stod(f[5]) == doctest::Approx(std::stod(f[6])).epsilon(1e-13));
        ++rows;
    }
    CHECK(rows == 6); // p in 1..3, both parities
}

TEST_CASE("experiment names round-trip") {
    for (ExperimentId id :
         {ExperimentId::Fig1LambdaVsBound, ExperimentId::Fig2RhoScaling,
          ExperimentId::Fig3LambdaPrediction, ExperimentId::Fig4AlphaVsBound,
          ExperimentId::Fig5MuSurface, ExperimentId::Fig6MuFit, ExperimentId::Fig7AlphaPrediction,
          ExperimentId::Thm1Witness}) {
        CHECK(experiment_from_name(experiment_name(id)) == id);
    }
    CHECK_THROWS_AS(experiment_from_name("fig9-unknown"), ValidationError);
}

TEST_CASE("fig6 fits the mu surface for every kind at reduced scale") {
    TempDir dir;
    ExperimentSpec spec = default_spec(ExperimentId::Fig6MuFit, dir.path);
    for (auto& fleet : spec.fleets) fleet.instances_per_size = 5;
    spec.workers = 2;
    run_experiment(spec);

    for (const auto& kind : {ProblemKind::MaxKColorableSubgraph, ProblemKind::MaxCut,
                             ProblemKind::MaxKVertexCover}) {
        const auto model =
            model_from_json(load_json(dir.path / ("mu-" + kind_name(kind) + ".json")));
        CHECK(model.converged);
        CHECK(model.rmse <= 0.08);
        // predictions are non-increasing in n over the training range
        const auto& sizes = kind == ProblemKind::MaxKColorableSubgraph
                                ? std::vector<int>{7, 8, 9, 10}
                                : std::vector<int>{12, 14, 16};
        for (int p = 1; p <= 5; ++p) {
            for (std::size_t i = 1; i < sizes.size(); ++i) {
                CHECK(predict_alpha_ub(model, sizes[i], p) <=
                      predict_alpha_ub(model, sizes[i - 1], p) + 1e-9);
            }
        }
    }
    const std::string fit_csv = slurp(dir.path / "fit.csv");
    CHECK(fit_csv.rfind("kind,n,r,mu_bar,mu_hat", 0) == 0);
}
