#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "pboost/boosting.hpp"
#include "pboost/serialize.hpp"
#include "test_helpers.hpp"

using namespace pboost;

namespace {

class ScaledClassifier final : public Classifier {
public:
    ScaledClassifier(std::shared_ptr<const Classifier> inner, double scale) : inner_(std::move(inner)), scale_(scale) {}
    double decision_value(std::span<const double> x) const override { return scale_ * inner_->decision_value(x); }
    std::size_t n_sv() const override { return inner_->n_sv(); }
    std::string_view kind() const override { return "scaled"; }

private:
    std::shared_ptr<const Classifier> inner_;
    double scale_;
};

EnsembleMember member_with(std::shared_ptr<const Classifier> model, double alpha) {
    EnsembleMember m;
    m.model = std::move(model);
    m.alpha = alpha;
    m.loss = alpha / (1 + alpha);
    m.vote_weight = std::log(1 / alpha);
    return m;
}

std::shared_ptr<const Classifier> constant(Label l) { return std::make_shared<ConstantClassifier>(l); }

// Row index as the only feature, so a lookup table fixes every prediction.
Dataset six_samples() {
    return Dataset(Matrix::from_rows({{0}, {1}, {2}, {3}, {4}, {5}}), th::labels_of({1, 1, 1, -1, -1, -1}));
}

std::vector<double> normalized(std::vector<double> v) {
    const double s = std::accumulate(v.begin(), v.end(), 0.0);
    for (auto& x : v) x /= s;
    return v;
}

SvmLearner small_svm() { return SvmLearner(LearnerConfig{}); }

}  // namespace

TEST_SUITE("boosting") {

TEST_CASE("loss_fbeta examples") {
    CHECK(loss_fbeta({5, 0, 5, 0}, 2) == 0.0);
    CHECK(loss_fbeta({0.5, 0.1, 0.3, 0.1}, 2) == doctest::Approx(0.5 / 3.0));
    CHECK(loss_fbeta({0, 0.3, 0.7, 0}, 2) == 1.0);
    CHECK_ERROR_CODE(loss_fbeta({0, 0, 1, 0}, 2), ErrorCode::UndefinedMetric);
}

TEST_CASE("l_b examples") {
    CHECK(l_b_bound(100, 100, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(l_b_bound(100, 5000, 2) == doctest::Approx(5000.0 / 5500.0));
    CHECK(l_b_bound(100, 5000, 1e-9) == doctest::Approx(5000.0 / 5100.0));
    CHECK_ERROR_CODE(l_b_bound(0, 10, 2), ErrorCode::InvalidArgument);
}

TEST_CASE("alpha examples") {
    CHECK(alpha_from_loss(0.5) == doctest::Approx(1.0));
    CHECK(alpha_from_loss(0.25) == doctest::Approx(1.0 / 3.0));
    const double a = alpha_from_loss(0.0);
    CHECK(a == doctest::Approx(1e-10));
    CHECK(std::log(1 / a) == doctest::Approx(23.03).epsilon(1e-3));
    CHECK(std::isfinite(std::log(1 / alpha_from_loss(1.0))));
    CHECK_ERROR_CODE(LossFactorKind::fbeta(0), ErrorCode::InvalidArgument);
}

TEST_CASE("update_weights examples") {
    WeightVector w({0.2, 0.3, 0.5});
    auto y = th::labels_of({1, -1, -1});
    auto same = update_weights(w, y, y, 0.3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(same[i] == doctest::Approx(w[i]));
    auto one = update_weights(w, y, th::labels_of({-1, 1, -1}), 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(one[i] == doctest::Approx(w[i]));
    auto two = update_weights(WeightVector({0.5, 0.5}), th::labels_of({1, -1}), th::labels_of({1, 1}), 1.0 / 3.0);
    CHECK(two[0] == doctest::Approx(0.75));
    CHECK(two[1] == doctest::Approx(0.25));
    CHECK_ERROR_CODE(update_weights(w, th::labels_of({1}), y, 0.5), ErrorCode::LengthMismatch);
}

TEST_CASE("AdaBoost matches a hand trace on six samples") {
    Dataset d = six_samples();
    auto first = std::make_shared<oracle::TableClassifier>(
        std::map<double, int>{{0, 1}, {1, 1}, {2, -1}, {3, -1}, {4, -1}, {5, -1}});
    auto second = std::make_shared<oracle::TableClassifier>(
        std::map<double, int>{{0, -1}, {1, 1}, {2, 1}, {3, -1}, {4, -1}, {5, 1}});
    // A resample that misses a class bypasses the learner; find a stream
    // where both draws contain both classes.
    for (std::uint64_t seed = 0;; ++seed) {
        REQUIRE(seed < 100);
        oracle::ScriptedLearner learner({first, second});
        std::vector<IterationTrace> traces;
        BoostOptions opt;
        opt.observer = [&](const IterationTrace& t) { traces.push_back(t); };
        auto ens = run_boosting(BoostVariant::Ada, d, 2, learner, LossFactorKind::weighted_error(), RngStream(seed),
                                opt);
        if (learner.calls() != 2) continue;
        REQUIRE(traces.size() == 2);
        const std::vector<double> w0(6, 1.0 / 6.0);
        const auto w1 = normalized({1, 1, 0.2, 1, 1, 1});
        const auto w2 = normalized({0.625, 1, 0.2, 1, 1, 0.625});
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(std::abs(traces[0].weights_before[i] - w0[i]) <= 1e-9);
            CHECK(std::abs(traces[0].weights_after[i] - w1[i]) <= 1e-9);
            CHECK(std::abs(traces[1].weights_before[i] - w1[i]) <= 1e-9);
            CHECK(std::abs(traces[1].weights_after[i] - w2[i]) <= 1e-9);
        }
        REQUIRE(ens.size() == 2);
        CHECK(std::abs(ens.members[0].loss - 1.0 / 6.0) <= 1e-12);
        CHECK(std::abs(ens.members[0].alpha - 0.2) <= 1e-12);
        CHECK(std::abs(ens.members[1].loss - 2.0 / 5.2) <= 1e-12);
        CHECK(std::abs(ens.members[1].alpha - 0.625) <= 1e-12);
        break;
    }
}

TEST_CASE("always-positive learner hits l_b and is rejected") {
    Dataset d = th::random_dataset(100, 5000, RngStream(61));
    ConstantLearner always(Label::Positive);
    auto ens = run_boosting(BoostVariant::Rus, d, 1, always, LossFactorKind::fbeta(2), RngStream(1));
    REQUIRE(ens.logs.size() == 10);
    for (std::size_t a = 0; a < ens.logs.size(); ++a) {
        CHECK(std::abs(ens.logs[a].loss - 5000.0 / 5500.0) <= 1e-9);
        CHECK(ens.logs[a].retries == a);
    }
    CHECK(ens.logs[0].accepted);
    CHECK(ens.logs[0].exhausted);
    for (std::size_t a = 1; a < 10; ++a) CHECK_FALSE(ens.logs[a].accepted);
    CHECK(complexity_report(ens).exhausted == 1);
    CHECK(complexity_report(ens).discarded == 9);
}

TEST_CASE("Ada separates separable blobs") {
    Dataset d = th::random_dataset(30, 30, RngStream(62), 4.0);
    SvmLearner learner = small_svm();
    auto ens = run_boosting(BoostVariant::Ada, d, 3, learner, LossFactorKind::weighted_error(), RngStream(2));
    auto pred = predict_majority(ens, d.features());
    CHECK(f_beta(confusion(d.labels(), pred), 1) == 1.0);
}

TEST_CASE("pboost with one part uses every sample") {
    Dataset d = th::random_dataset(20, 60, RngStream(63), 1.0);
    Partitioning one;
    one.parts.push_back({});
    for (std::size_t i = 0; i < 60; ++i) one.parts[0].push_back(i);
    SvmLearner learner = small_svm();
    auto ens = pboost::pboost(d, one, learner, LossFactorKind::fbeta(2), RngStream(3));
    REQUIRE(ens.size() == 1);
    auto log = ens.accepted_logs().at(0);
    CHECK(log.n_tr == 80);
    CHECK(log.n_val == 80);
}

TEST_CASE("predict_score examples") {
    BoostedEnsemble e;
    e.members.push_back(member_with(constant(Label::Negative), 1.0 / 3.0));
    std::vector<double> x{0.0};
    CHECK(predict_score(e, x) == doctest::Approx(-std::log(3.0)));

    BoostedEnsemble cancel;
    cancel.members.push_back(member_with(constant(Label::Positive), 0.3));
    cancel.members.push_back(member_with(constant(Label::Negative), 0.3));
    CHECK(predict_score(cancel, x) == doctest::Approx(0.0));

    BoostedEnsemble flat;
    flat.members.push_back(member_with(constant(Label::Positive), 1.0));
    flat.members.push_back(member_with(constant(Label::Positive), 1.0));
    CHECK(predict_score(flat, x) == 0.0);

    CHECK_ERROR_CODE(predict_score(BoostedEnsemble{}, x), ErrorCode::EmptyEnsemble);
}

TEST_CASE("predict_majority examples") {
    std::vector<double> x{0.0};
    BoostedEnsemble all;
    all.members.push_back(member_with(constant(Label::Positive), 0.2));
    all.members.push_back(member_with(constant(Label::Positive), 0.4));
    CHECK(predict_majority(all, x) == Label::Positive);

    BoostedEnsemble tie;
    tie.members.push_back(member_with(constant(Label::Positive), 0.3));
    tie.members.push_back(member_with(constant(Label::Negative), 0.3));
    CHECK(predict_majority(tie, x) == Label::Positive);

    BoostedEnsemble dom;
    dom.members.push_back(member_with(constant(Label::Negative), 0.1));
    dom.members.push_back(member_with(constant(Label::Positive), 0.45));
    dom.members.push_back(member_with(constant(Label::Positive), 0.45));
    CHECK(predict_majority(dom, x) == Label::Negative);
}

TEST_CASE("complexity totals follow the per-variant formulas") {
    const std::size_t mp = 20, mn = 400, E = 3;
    Dataset d = th::random_dataset(mp, mn, RngStream(64), 1.0);
    SvmLearner learner = small_svm();
    auto run = [&](BoostVariant v) {
        return complexity_report(run_boosting(v, d, E, learner, LossFactorKind::weighted_error(), RngStream(4)));
    };
    auto ada = run(BoostVariant::Ada), rus_t = run(BoostVariant::Rus), smt = run(BoostVariant::Smt),
         rb = run(BoostVariant::Rb);
    CHECK(ada.n_tr == E * (mp + mn));
    CHECK(smt.n_tr == 2 * E * mn);
    CHECK(rus_t.n_tr == 2 * E * mp);
    CHECK(rb.n_tr == E * (mp + mn));
    for (const auto& t : {ada, rus_t, smt, rb}) {
        CHECK(t.members == E);
        CHECK(t.n_val == E * (mp + mn));
    }

    auto part = partition_ruswr(mn, mp, RngStream(5));
    auto ens = pboost::pboost(d, part, learner, LossFactorKind::fbeta(2), RngStream(6));
    auto prus = complexity_report(ens);
    const std::size_t pe = part.count();
    CHECK(prus.n_tr == pe * mp + mn);
    std::size_t direct = 0, running = mp;
    for (auto n : part.sizes()) {
        running += n;
        direct += running;
    }
    CHECK(prus.n_val == direct);
    if (pe >= 2) CHECK(prus.n_val < pe * (mp + mn));

    BoostedEnsemble single;
    single.members.push_back(member_with(constant(Label::Positive), 0.5));
    single.logs.push_back({0, 0, true, false, 7, 9, 3, 0.2});
    auto t = complexity_report(single);
    CHECK(t.members == 1);
    CHECK(t.n_tr == 7);
    CHECK(t.n_val == 9);
    CHECK(t.n_sv == 3);
    CHECK(t.sv_val == 27);
    CHECK(t.discarded == 0);

    std::ostringstream out;
    write_complexity_csv_header(out);
    write_complexity_csv_row(out, "x", t);
    CHECK(out.str() == "label,members,n_tr,n_val,sv_x_val,n_sv,discarded,discarded_n_tr,discarded_n_val,exhausted\n"
                       "x,1,7,9,27,3,0,0,0,0\n");
}

TEST_CASE("boosting loop invariants on random problems") {
    RngStream rng(65);
    SvmLearner learner = small_svm();
    const BoostVariant variants[] = {BoostVariant::Ada, BoostVariant::Rus, BoostVariant::Smt, BoostVariant::Rb};
    for (int t = 0; t < 100; ++t) {
        const std::size_t p = 6 + rng.below(10), n = p + 10 + rng.below(50);
        Dataset d = th::random_dataset(p, n, rng.child({std::uint64_t(t), 0}), rng.uniform(0.0, 1.5));
        const auto variant = variants[t % 4];
        const auto loss = t % 8 < 4 ? LossFactorKind::weighted_error() : LossFactorKind::fbeta(2);
        const double bound = loss_bound(loss, p, n);
        std::vector<IterationTrace> traces;
        BoostOptions opt;
        opt.max_attempts = 3;
        opt.observer = [&](const IterationTrace& tr) { traces.push_back(tr); };
        auto ens = run_boosting(variant, d, 1 + rng.below(4), learner, loss, rng.child({std::uint64_t(t), 1}), opt);
        CHECK(traces.size() == ens.size());
        for (const auto& tr : traces) {
            CHECK(std::accumulate(tr.weights_after.begin(), tr.weights_after.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(*std::min_element(tr.weights_after.begin(), tr.weights_after.end()) >= 0.0);
        }
        auto acc = ens.accepted_logs();
        REQUIRE(acc.size() == ens.size());
        std::size_t discarded = 0;
        for (const auto& log : ens.logs) discarded += !log.accepted;
        CHECK(ens.logs.size() == ens.size() + discarded);
        for (std::size_t e = 0; e < ens.size(); ++e) {
            const auto& m = ens.members[e];
            if (!acc[e].exhausted) CHECK(m.loss < bound);
            const double l = clamp_loss(m.loss);
            CHECK(std::abs(m.alpha - l / (1 - l)) <= 1e-12);
            CHECK(std::isfinite(m.vote_weight));
            if (m.loss != 0.5) CHECK((m.vote_weight > 0) == (m.loss < 0.5));
        }
        // Majority vote depends on signs only.
        BoostedEnsemble scaled = ens;
        for (auto& m : scaled.members) m.model = std::make_shared<ScaledClassifier>(m.model, rng.uniform(0.01, 100));
        CHECK(predict_majority(scaled, d.features()) == predict_majority(ens, d.features()));
    }
}

TEST_CASE("pboost temporary set and carried weight invariants") {
    RngStream rng(66);
    SvmLearner learner = small_svm();
    for (int t = 0; t < 100; ++t) {
        const std::size_t p = 4 + rng.below(10), n = 3 * p + rng.below(60);
        Dataset d = th::random_dataset(p, n, rng.child({std::uint64_t(t), 0}), rng.uniform(0.0, 1.5));
        auto part = partition_ruswr(n, p, rng.child({std::uint64_t(t), 1}));
        std::vector<IterationTrace> traces;
        BoostOptions opt;
        opt.max_attempts = 3;
        opt.observer = [&](const IterationTrace& tr) { traces.push_back(tr); };
        const auto loss = t % 2 ? LossFactorKind::fbeta(2) : LossFactorKind::weighted_error();
        auto ens = pboost::pboost(d, part, learner, loss, rng.child({std::uint64_t(t), 2}), opt);
        REQUIRE(traces.size() == part.count());
        auto acc = ens.accepted_logs();
        std::size_t expected = p;
        for (std::size_t e = 0; e < part.count(); ++e) {
            expected += part.parts[e].size();
            const auto& tr = traces[e];
            CHECK(tr.weights_before.size() == expected);
            CHECK(acc[e].n_val == expected);
            CHECK(acc[e].n_tr == p + part.parts[e].size());
            if (e > 0) CHECK(acc[e].n_val > acc[e - 1].n_val);
            std::vector<double> want;
            if (e == 0) {
                want.assign(expected, 1.0);
            } else {
                const auto& prev = traces[e - 1].weights_after;
                want = prev;
                const double w_ini = *std::max_element(prev.begin() + static_cast<std::ptrdiff_t>(p), prev.end());
                want.resize(expected, w_ini);
            }
            want = normalized(want);
            for (std::size_t i = 0; i < expected; ++i) CHECK(tr.weights_before[i] == doctest::Approx(want[i]).epsilon(1e-12));
            CHECK(std::accumulate(tr.weights_after.begin(), tr.weights_after.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("ensembles round-trip through json") {
    Dataset d = th::random_dataset(15, 45, RngStream(67), 1.0);
    SvmLearner learner = small_svm();
    auto ens = pboost::pboost(d, partition_ruswr(45, 15, RngStream(1)), learner, LossFactorKind::fbeta(2), RngStream(2));
    ens.members.push_back(member_with(constant(Label::Negative), 0.4));
    std::stringstream buf;
    write_ensemble_json(buf, ens);
    auto back = read_ensemble_json(buf);
    REQUIRE(back.size() == ens.size());
    CHECK(back.logs.size() == ens.logs.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        CHECK(predict_score(back, d.row(i)) == doctest::Approx(predict_score(ens, d.row(i))).epsilon(1e-12));
    std::stringstream bad("{\"members\": 3}");
    CHECK_ERROR_CODE(read_ensemble_json(bad), ErrorCode::MalformedData);
}

TEST_CASE("boosting runs are deterministic") {
    Dataset d = th::random_dataset(10, 40, RngStream(68), 1.0);
    SvmLearner learner = small_svm();
    auto a = run_boosting(BoostVariant::Rb, d, 3, learner, LossFactorKind::fbeta(2), RngStream(9));
    auto b = run_boosting(BoostVariant::Rb, d, 3, learner, LossFactorKind::fbeta(2), RngStream(9));
    CHECK(predict_scores(a, d.features()) == predict_scores(b, d.features()));
}

}  // TEST_SUITE
