#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pboost/ingestion.hpp"
#include "test_helpers.hpp"

using namespace pboost;
namespace fs = std::filesystem;

namespace {

const char* kSmallKeel =
    "@relation toy\n"
    "@attribute a real [0.0, 9.0]\n"
    "@attribute b integer [0, 9]\n"
    "@attribute Class {positive, negative}\n"
    "@inputs a, b\n"
    "@outputs Class\n"
    "@data\n"
    "1.5, 2, positive\n"
    "0.5, 1, negative\n"
    "2.5, 3,  Positive \n"
    "3.5, 4, negative\n"
    "4.5, 5, negative\n";

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "pboost_ingestion_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_SUITE("ingestion") {

TEST_CASE("parse_keel reads a small file") {
    std::istringstream in(kSmallKeel);
    Dataset d = parse_keel(in);
    CHECK(d.size() == 5);
    CHECK(d.dims() == 2);
    CHECK(d.m_pos() == 2);
    CHECK(d.row(2)[0] == 2.5);
    CHECK(d.label(2) == Label::Positive);
}

TEST_CASE("parse_keel rejects bad input") {
    std::istringstream three("@relation t\n@attribute a real\n@attribute c {x, y, z}\n@data\n1, x\n2, y\n3, z\n");
    CHECK_ERROR_CODE(parse_keel(three), ErrorCode::MoreThanTwoClasses);
    std::istringstream observed("@relation t\n@attribute a real\n@attribute c {x, y}\n@data\n1, x\n2, y\n3, z\n");
    CHECK_ERROR_CODE(parse_keel(observed), ErrorCode::MoreThanTwoClasses);
    std::istringstream untyped("@relation t\n@attribute a\n@attribute c {p, n}\n@data\n1, p\n");
    CHECK_ERROR_CODE(parse_keel(untyped), ErrorCode::MalformedHeader);
    std::istringstream nominal("@relation t\n@attribute s {M, F}\n@attribute a real\n@attribute c {p, n}\n@data\nM, 1, p\n");
    CHECK_ERROR_CODE(parse_keel(nominal), ErrorCode::NonNumericAttribute);
    std::istringstream nominal2("@relation t\n@attribute s {M, F}\n@attribute a real\n@attribute c {positive, n}\n@data\nM, 1, positive\nF, 2, n\n");
    KeelOptions drop;
    drop.drop_nominal = true;
    Dataset dd = parse_keel(nominal2, drop);
    CHECK(dd.dims() == 1);
    CHECK(dd.row(1)[0] == 2.0);
    std::istringstream missing("@relation t\n@attribute a real\n@attribute c {p, n}\n@data\n?, p\n");
    CHECK_ERROR_CODE(parse_keel(missing), ErrorCode::MalformedData);
    std::istringstream arity("@relation t\n@attribute a real\n@attribute c {p, n}\n@data\n1, 2, p\n");
    CHECK_ERROR_CODE(parse_keel(arity), ErrorCode::MalformedData);
    std::istringstream no_data("@relation t\n@attribute a real\n@attribute c {p, n}\n");
    CHECK_ERROR_CODE(parse_keel(no_data), ErrorCode::MalformedHeader);
    std::istringstream text("@relation t\n@attribute a real\n@attribute c {p, n}\n@data\nabc, p\n");
    CHECK_ERROR_CODE(parse_keel(text), ErrorCode::NonNumericAttribute);
    CHECK_ERROR_CODE(parse_keel(fs::path("/nonexistent/x.dat")), ErrorCode::IoError);
}

TEST_CASE("parse_csv handles groups and label tokens") {
    std::istringstream in("x0,x1,group,label\n1,2,0,no\n3,4,-1,YES\n5,6,1,yes\n");
    Dataset d = parse_csv(in, "yes");
    CHECK(d.size() == 3);
    CHECK(d.dims() == 2);
    CHECK(d.m_pos() == 2);
    REQUIRE(d.group_ids().has_value());
    CHECK((*d.group_ids())[2] == 1);
    std::istringstream signs("a,label\n1,-1\n2,+1\n3,1\n");
    CHECK(parse_csv(signs).m_pos() == 2);
    std::istringstream three("a,label\n1,-1\n2,+1\n3,maybe\n");
    CHECK_ERROR_CODE(parse_csv(three), ErrorCode::MoreThanTwoClasses);
}

TEST_CASE("manifests in json and ini form") {
    {
        std::ofstream(scratch("toy.dat")) << kSmallKeel;
        std::ofstream(scratch("m.json")) << R"({"datasets": [{"name": "toy", "path": "toy.dat", "expected_lambda": 1.5}]})";
        std::ofstream(scratch("m.ini")) << "# comment\n[toy]\npath = toy.dat\npositive_label_token = positive\n";
    }
    auto j = read_manifest(scratch("m.json"));
    REQUIRE(j.size() == 1);
    CHECK(j[0].name == "toy");
    CHECK(j[0].path == scratch("toy.dat"));
    CHECK(j[0].expected_lambda == 1.5);
    CHECK(j[0].load().size() == 5);
    auto i = read_manifest(scratch("m.ini"));
    REQUIRE(i.size() == 1);
    CHECK(i[0].load().m_pos() == 2);
    std::ofstream(scratch("bad.ini")) << "[x]\npath = a.dat\nbogus_key = 1\n";
    CHECK_ERROR_CODE(read_manifest(scratch("bad.ini")), ErrorCode::ConfigError);
    DatasetManifest empty_token;
    empty_token.name = "x";
    empty_token.path = "a.dat";
    empty_token.positive_label_token = "";
    CHECK_ERROR_CODE(empty_token.validate(), ErrorCode::ConfigError);
}

TEST_CASE("bundled KEEL corpus parses with the expected imbalance") {
    auto entries = read_manifest(fs::path(PBOOST_DATA_DIR) / "keel" / "manifest.ini");
    CHECK(entries.size() == 22);
    for (const auto& m : entries) {
        INFO(m.name);
        Dataset d = m.load();
        REQUIRE(m.expected_lambda.has_value());
        CHECK(std::abs(d.lambda() - *m.expected_lambda) <= 0.02 * *m.expected_lambda);
        if (m.name == "vowel0") CHECK(d.lambda() == doctest::Approx(9.98).epsilon(0.01));
    }
}

TEST_CASE("2x5 folds examples") {
    Dataset d = th::random_dataset(20, 200, RngStream(71));
    auto reps = make_2x5_folds(d, 3);
    REQUIRE(reps.size() == 10);
    for (const auto& r : reps) {
        std::size_t pos = 0;
        for (auto i : r.train) pos += d.label(i) == Label::Positive;
        CHECK(pos == 8);
        CHECK(r.train.size() - pos == 80);
    }
    auto again = make_2x5_folds(d, 3);
    for (std::size_t k = 0; k < 10; ++k) {
        CHECK(again[k].train == reps[k].train);
        CHECK(again[k].test == reps[k].test);
    }
    for (std::size_t half = 0; half < 2; ++half) {
        std::set<std::size_t> vals, design;
        for (std::size_t f = 0; f < 5; ++f) {
            const auto& r = reps[half * 5 + f];
            vals.insert(r.validation.begin(), r.validation.end());
            std::set<std::size_t> test(r.test.begin(), r.test.end());
            for (std::size_t i = 0; i < d.size(); ++i)
                if (!test.count(i)) design.insert(i);
        }
        CHECK(vals == design);
    }
    CHECK_ERROR_CODE(make_2x5_folds(th::random_dataset(9, 100, RngStream(1)), 1), ErrorCode::TooFewSamples);
}

TEST_CASE("2x5 folds are disjoint and keep the skew") {
    RngStream rng(72);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t p = 10 + rng.below(20), n = p + rng.below(300);
        Dataset d = th::random_dataset(p, n, rng.child(t));
        for (const auto& r : make_2x5_folds(d, std::uint64_t(t))) {
            std::vector<int> seen(d.size(), 0);
            for (auto i : r.train) ++seen[i];
            for (auto i : r.validation) ++seen[i];
            for (auto i : r.test) ++seen[i];
            CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
            auto skew = [&](const std::vector<std::size_t>& idx) {
                std::size_t pp = 0;
                for (auto i : idx) pp += d.label(i) == Label::Positive;
                return double(pp) / double(idx.size());
            };
            CHECK(std::abs(skew(r.train) - skew(r.test)) < 0.1);
        }
    }
}

}  // TEST_SUITE
