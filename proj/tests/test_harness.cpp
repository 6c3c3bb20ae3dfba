#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "plcgp/config.hpp"
#include "plcgp/error.hpp"
#include "plcgp/harness.hpp"
#include "plcgp/stats.hpp"

using namespace plcgp;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / ("plcgp_test_" + name);
    fs::remove_all(dir);
    return dir;
}

ExperimentConfig small_parity()
{
    ExperimentConfig c;
    c.problem.parity_bits = 3;
    c.num_nodes = 30;
    c.replications = 6;
    c.budget = 20'000;
    c.base_seed = 17;
    c.workers = 1;
    c.policy.prefer_larger = true;
    return c;
}
} // namespace

TEST_CASE("replication seeds are distinct and deterministic")
{
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1'000; ++i) seeds.insert(replication_seed(1, i));
    CHECK(seeds.size() == 1'000);
    CHECK(replication_seed(5, 3) == replication_seed(5, 3));
    CHECK(replication_seed(5, 3) != replication_seed(6, 3));
}

TEST_CASE("configuration text round-trips")
{
    ExperimentConfig c;
    c.problem.kind = ProblemKind::pagie;
    c.problem.sampling = SamplingMode::grid;
    c.policy.quasi_band = 0.1;
    c.policy.prefer_larger = true;
    c.policy.adaptive_mutation = true;
    c.policy.initial_mutation_rate = 0.03;
    c.policy.min_mutation_rate = 0.0001;
    c.budget = 123'456;
    c.base_seed = 0xdeadbeefcafeULL;
    c.output_dir = "out dir/x";
    c.record_traces = true;
    std::stringstream ss;
    write_config(ss, c);
    CHECK(read_config(ss) == c);

    ExperimentConfig d;
    CHECK_THROWS_AS(apply_key_value(d, "es.lambada", "4"), ConfigError);
    CHECK_THROWS_AS(apply_key_value(d, "es.lambda", "four"), ConfigError);
    CHECK_THROWS_AS(apply_key_value(d, "es.prefer_larger", "maybe"), ConfigError);
    CHECK_THROWS_AS(apply_key_value(d, "problem.kind", "xor"), ConfigError);
    apply_key_value(d, "es.lambda", "9");
    CHECK(d.policy.lambda == 9);
    std::stringstream comments("# header\n\nrun.seed = 12\n");
    CHECK(read_config(comments).base_seed == 12);
    std::stringstream broken("run.seed\n");
    CHECK_THROWS_AS(read_config(broken), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"), IoError);
}

TEST_CASE("configuration validation")
{
    auto c = small_parity();
    c.replications = 0;
    CHECK_THROWS_AS(run_replications(c), ConfigError);
    c = small_parity();
    c.problem.parity_bits = 1;
    CHECK_THROWS_AS(run_replications(c), ConfigError);
    c = small_parity();
    c.budget = 2;
    CHECK_THROWS_AS(run_replications(c), ConfigError);
}

TEST_CASE("identical configs give identical summaries regardless of worker count")
{
    auto c = small_parity();
    const auto a = run_replications(c);
    c.workers = 3;
    const auto b = run_replications(c);
    CHECK(to_rows(a.runs) == to_rows(b.runs));
    CHECK(a.aggregates == b.aggregates);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].record.final_chromosome == b.runs[i].record.final_chromosome);
    }
}

TEST_CASE("aggregation follows the table conventions")
{
    std::vector<RunRow> rows(4);
    rows[0].solved = true;
    rows[0].evaluations = 100;
    rows[0].generations = 10;
    rows[1].solved = false;
    rows[1].evaluations = 1'000'000;
    rows[2].solved = true;
    rows[2].evaluations = 300;
    rows[2].generations = 30;
    rows[3].solved = true;
    rows[3].evaluations = 200;
    rows[3].generations = 20;
    for (auto& r : rows) {
        r.functional_size = 10;
        r.final_fitness = r.solved ? 1.0 : 0.75;
        r.mean_recovery = std::numeric_limits<double>::quiet_NaN();
    }
    const auto a = aggregate(rows);
    CHECK(a.replications == 4);
    CHECK(a.solved == 3);
    CHECK(a.success_fraction == 0.75);
    CHECK(a.mean_evaluations == 200.0);
    CHECK(a.median_evaluations == 200.0);
    CHECK(a.mean_generations == 20.0);
    CHECK(a.mean_final_fitness == doctest::Approx(0.9375));
    CHECK(std::isnan(a.mean_recovery));
}

TEST_CASE("insufficient budget solves nothing")
{
    ExperimentConfig c;
    c.problem.parity_bits = 8;
    c.replications = 5;
    c.budget = c.policy.lambda;
    c.workers = 1;
    const auto s = run_replications(c);
    CHECK(s.aggregates.solved == 0);
    CHECK(s.aggregates.success_fraction == 0.0);
    CHECK(std::isnan(s.aggregates.mean_evaluations));
}

TEST_CASE("export layout, byte-identical re-export and CSV round trip")
{
    const auto dir = scratch("export");
    auto c = small_parity();
    c.replications = 30;
    c.budget = 2'000;
    c.record_traces = true;
    c.policy.adaptive_mutation = true;
    c.output_dir = dir.string();
    const auto s = run_replications(c);

    const auto runs = slurp(dir / "runs.csv");
    std::size_t lines = 0;
    for (char ch : runs) lines += ch == '\n' ? 1 : 0;
    CHECK(lines == 31);
    CHECK(fs::exists(dir / "config.cfg"));
    CHECK(fs::exists(dir / "chromosomes.txt"));
    CHECK(fs::exists(dir / "traces" / "rep_000.csv"));
    CHECK_FALSE(fs::exists(dir / "recovery.csv"));
    CHECK(load_config(dir / "config.cfg") == c);

    const auto json = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(json["replications"].size() == 30);
    CHECK(json["policy"] == "ES-PL-AM");
    CHECK(json["aggregates"]["solved"] == s.aggregates.solved);

    const auto rows = read_runs_csv(dir / "runs.csv");
    CHECK(rows == to_rows(s.runs));
    CHECK(aggregate(rows) == s.aggregates);

    std::ifstream chrom(dir / "chromosomes.txt");
    const auto saved = read_chromosomes(chrom);
    REQUIRE(saved.size() == 30);
    CHECK(saved[4] == s.runs[4].record.final_chromosome);

    const auto again = scratch("export_again");
    export_results(s, again);
    for (const auto* name : {"runs.csv", "summary.json", "chromosomes.txt", "config.cfg"}) {
        CHECK(slurp(dir / name) == slurp(again / name));
    }
    export_results(s, dir);
    CHECK(slurp(dir / "runs.csv") == runs);

    CHECK(column_values(rows, "evaluations", true).size() == s.aggregates.solved);
    CHECK_THROWS_AS(column_values(rows, "colour", false), ConfigError);
    fs::remove_all(dir);
    fs::remove_all(again);
}

TEST_CASE("dynamic experiments export recovery times")
{
    const auto dir = scratch("dynamic");
    ExperimentConfig c;
    c.problem.kind = ProblemKind::dynamic;
    c.problem.dynamic_inputs = 3;
    c.problem.epochs = 3;
    c.problem.epoch_length = 2'000;
    c.problem.flips = 2;
    c.num_nodes = 30;
    c.replications = 3;
    c.workers = 2;
    c.output_dir = dir.string();
    const auto s = run_replications(c);
    CHECK(fs::exists(dir / "recovery.csv"));
    for (const auto& r : s.runs) CHECK(r.record.recovery_times.size() == 3);
    const auto rows = read_runs_csv(dir / "runs.csv");
    CHECK(rows == to_rows(s.runs));
    fs::remove_all(dir);
}

TEST_CASE("unwritable output directory is an I/O error")
{
    const auto blocker = scratch("blocker");
    {
        std::ofstream(blocker) << "file, not a directory";
    }
    auto c = small_parity();
    c.replications = 1;
    c.output_dir = (blocker / "sub").string();
    CHECK_THROWS_AS(run_replications(c), IoError);
    fs::remove_all(blocker);
    CHECK_THROWS_AS(read_runs_csv("/nonexistent/runs.csv"), IoError);
}

TEST_CASE("sweeps")
{
    const auto dir = scratch("sweep");
    auto c = small_parity();
    c.replications = 3;
    c.budget = 3'000;
    c.output_dir = dir.string();
    const std::vector<std::size_t> lambdas{1, 4};
    const std::vector<double> rates{0.02, 0.04};
    const auto sweep = sweep_grid(c, lambdas, rates);
    CHECK(sweep.cells.size() == 4);
    CHECK(sweep.at(1, 0).config.policy.lambda == 1);
    CHECK(sweep.at(1, 0).config.policy.initial_mutation_rate == 0.04);
    CHECK(fs::exists(dir / "sweep.csv"));
    CHECK(fs::exists(dir / "table.txt"));
    CHECK(fs::exists(dir / "rate_0.04_lambda_4" / "runs.csv"));

    // A single cell equals the plain experiment.
    auto plain = small_parity();
    plain.replications = 3;
    plain.budget = 3'000;
    const std::vector<std::size_t> one_lambda{plain.policy.lambda};
    const std::vector<double> one_rate{plain.policy.initial_mutation_rate};
    const auto single = sweep_grid(plain, one_lambda, one_rate);
    CHECK(to_rows(single.cells[0].runs) == to_rows(run_replications(plain).runs));

    const std::vector<std::size_t> none;
    CHECK_THROWS_AS(sweep_grid(c, none, rates), ConfigError);
    fs::remove_all(dir);
}
