#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pboost/datagen.hpp"
#include "pboost/experiment.hpp"
#include "test_helpers.hpp"

using namespace pboost;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "pboost_experiment_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small_config(const std::string& setting, const std::string& variants, const fs::path& out) {
    ExperimentConfig cfg;
    cfg.setting = setting;
    cfg.variants = parse_variant_list(variants);
    cfg.lambda_tests = {100};
    cfg.replications = 2;
    cfg.per_cluster = 20;
    cfg.out_dir = out;
    cfg.seed = 5;
    return cfg;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PBOOST_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("variant tokens") {
    CHECK(parse_variant("PRUS-F").name() == "PRUS-F");
    CHECK(parse_variant("prus-f").name() == "PRUS-F");
    CHECK(parse_variant("PA").partition_driven());
    CHECK_FALSE(parse_variant("RB-F").partition_driven());
    std::set<std::uint64_t> ids;
    for (auto t : {"Ada", "Ada-F", "SMT", "SMT-F", "RUS", "RUS-F", "RB", "RB-F", "PRUS", "PRUS-F", "PCUS", "PCUS-F",
                   "PA", "PA-F"}) {
        CHECK(parse_variant(t).name() == t);
        ids.insert(parse_variant(t).id());
    }
    CHECK(ids.size() == 14);
    CHECK_ERROR_CODE(parse_variant("XGB"), ErrorCode::ConfigError);
    CHECK(parse_variant_list("RUS, PRUS-F,RUS").size() == 2);
    CHECK(parse_double_list("1:100, 50") == std::vector<double>{100, 50});
}

TEST_CASE("config files in both forms") {
    auto dir = scratch("config");
    std::ofstream(dir / "c.ini") << "# run\nsource = keel\nmanifest = m.ini\nvariants = RUS,PRUS-F\nlambda_tests = 1:50\n"
                                    "seed = 7\njobs = 2\n";
    auto a = load_config(dir / "c.ini");
    CHECK(a.source == SourceKind::Keel);
    CHECK(a.manifest == dir / "m.ini");
    CHECK(a.variants.size() == 2);
    CHECK(a.lambda_tests == std::vector<double>{50});
    CHECK(a.seed == 7);
    CHECK(a.jobs == 2);
    std::ofstream(dir / "c.json") << R"({"setting": "D2", "variants": ["PA-F"], "beta": 1.5, "ensemble_size": 4})";
    auto b = load_config(dir / "c.json");
    CHECK(b.setting == "D2");
    CHECK(b.variants.at(0).name() == "PA-F");
    CHECK(b.beta == 1.5);
    CHECK(b.ensemble_size == 4u);
    std::ofstream(dir / "bad.ini") << "variants = RUS\nunknown_key = 1\n";
    CHECK_ERROR_CODE(load_config(dir / "bad.ini"), ErrorCode::ConfigError);
    ExperimentConfig empty;
    CHECK_ERROR_CODE(empty.validate(), ErrorCode::ConfigError);
}

TEST_CASE("run writes the expected tables and is reproducible") {
    auto out1 = scratch("run1"), out2 = scratch("run2"), out3 = scratch("run3");
    auto cfg = small_config("D2", "RUS,PRUS-F", out1);
    auto data = prepare_datasets(cfg);
    auto s1 = run_experiment(cfg, data);
    CHECK(s1.failed == 0);
    CHECK(s1.tasks == 4);
    auto agg = read_simple_csv(out1 / "aggregate.csv");
    REQUIRE(agg.size() == 2);
    std::set<std::string> names{agg[0].at("variant"), agg[1].at("variant")};
    CHECK(names == std::set<std::string>{"RUS", "PRUS-F"});

    cfg.out_dir = out2;
    run_experiment(cfg, prepare_datasets(cfg));
    cfg.out_dir = out3;
    cfg.jobs = 2;
    run_experiment(cfg, prepare_datasets(cfg));
    for (const char* f : {"runs.csv", "aggregate.csv", "complexity.csv"}) {
        CHECK(slurp(out1 / f) == slurp(out2 / f));
        CHECK(slurp(out1 / f) == slurp(out3 / f));
    }
    CHECK(fs::exists(out1 / "pr" / "D2__PRUS-F__l100__r1.csv"));
}

TEST_CASE("aggregates equal an independent recomputation") {
    auto out = scratch("agg");
    auto cfg = small_config("D1", "RUS-F,PRUS", out);
    cfg.replications = 3;
    cfg.lambda_tests = {1, 100};
    run_experiment(cfg, prepare_datasets(cfg));
    auto runs = read_simple_csv(out / "runs.csv");
    auto agg = read_simple_csv(out / "aggregate.csv");
    CHECK(agg.size() == 4);
    for (const auto& a : agg) {
        for (const auto& m : kRunMetrics) {
            std::vector<double> v;
            for (const auto& r : runs)
                if (r.at("variant") == a.at("variant") && r.at("lambda_test") == a.at("lambda_test"))
                    v.push_back(std::stod(r.at(m)));
            REQUIRE(v.size() == 3);
            double mean = 0;
            for (double x : v) mean += x / 3;
            double var = 0;
            for (double x : v) var += (x - mean) * (x - mean) / 3;
            CHECK(std::stod(a.at(m + "_mean")) == doctest::Approx(mean).epsilon(1e-12));
            CHECK(std::stod(a.at(m + "_std")) == doctest::Approx(std::sqrt(var)).epsilon(1e-9));
        }
    }
}

TEST_CASE("partition-driven variants size the ensemble from the partitioning") {
    auto out = scratch("auto");
    auto cfg = small_config("D3", "PA,PRUS-F,PCUS,RUS", out);
    cfg.replications = 1;
    run_experiment(cfg, prepare_datasets(cfg));
    for (const auto& r : read_simple_csv(out / "complexity.csv")) {
        const auto v = r.at("variant");
        const auto members = std::stoul(r.at("members"));
        const auto mp = std::stoul(r.at("m_pos")), mn = std::stoul(r.at("m_neg"));
        if (v == "PA") CHECK(members == 20);
        if (v == "RUS") CHECK(members == 20);
        if (v == "PCUS") CHECK((members >= 2 && members <= 20));
        if (v == "PRUS-F") CHECK(std::stoul(r.at("n_tr")) == members * mp + mn);
    }
}

TEST_CASE("reports") {
    auto out = scratch("report");
    auto cfg = small_config("D2", "RUS,PRUS-F", out);
    cfg.replications = 1;
    run_experiment(cfg, prepare_datasets(cfg));
    emit_reports(out);
    const auto md = slurp(out / "summary.md");
    CHECK(md.find("| RUS |") != std::string::npos);
    CHECK(md.find("| PRUS-F |") != std::string::npos);
    CHECK(md.find("sum n_tr") != std::string::npos);
    auto empty = scratch("empty");
    CHECK_ERROR_CODE(emit_reports(empty), ErrorCode::MissingResults);
    CHECK_ERROR_CODE(emit_reports(empty / "nope"), ErrorCode::MissingResults);
}

TEST_CASE("csv source runs through the 2x5 protocol") {
    auto dir = scratch("csv");
    SynthConfig sc;
    sc.t_neg = 5;
    sc.per_cluster = 30;
    {
        std::ofstream f(dir / "d.csv");
        write_dataset_csv(f, gen_synthetic(sc));
    }
    ExperimentConfig cfg;
    cfg.source = SourceKind::Csv;
    cfg.csv = dir / "d.csv";
    cfg.variants = parse_variant_list("RUS-F,PRUS-F");
    cfg.replications = 2;
    cfg.out_dir = dir / "out";
    auto data = prepare_datasets(cfg);
    REQUIRE(data.size() == 1);
    CHECK(data[0].replications.size() == 2);
    auto s = run_experiment(cfg, data);
    CHECK(s.failed == 0);
    CHECK(read_simple_csv(cfg.out_dir / "runs.csv").size() == 4);
}

TEST_CASE("command line exit codes") {
    auto dir = scratch("cli");
    CHECK(run_cli("run --setting D1 --variants NOPE --out " + (dir / "a").string()) == 2);
    CHECK(run_cli("run --bogus-flag") == 2);
    CHECK(run_cli("report " + (dir / "missing").string()) == 3);
    CHECK(run_cli("gen --setting D9 --out " + (dir / "g.csv").string()) == 2);
    CHECK(run_cli("gen --setting D1 --seed 2 --out " + (dir / "g.csv").string()) == 0);
    CHECK(fs::file_size(dir / "g.csv") > 0);
    std::ofstream(dir / "c.ini") << "setting = D3\nvariants = RUS\nreplications = 1\nper_cluster = 20\n";
    CHECK(run_cli("run --config " + (dir / "c.ini").string() + " --out " + (dir / "r").string() +
                  " --lambda-tests 1:20 --jobs 2") == 0);
    CHECK(fs::exists(dir / "r" / "summary.md"));
    CHECK(run_cli("report " + (dir / "r").string()) == 0);
    CHECK(run_cli("run --setting D1 --variants RUS --csv /nonexistent.csv --out " + (dir / "x").string()) != 0);
}

}  // TEST_SUITE
