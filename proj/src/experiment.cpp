#include "pboost/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pboost/error.hpp"
#include "pboost/serialize.hpp"

namespace pboost {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto p = s.find(',', start);
        auto item = trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (!item.empty()) out.push_back(item);
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

// Shortest round-trip representation, so CSVs are exact and stable.
std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double to_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    const char* first = value.data();
    if (!value.empty() && value[0] == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
        throw Error(ErrorCode::ConfigError, key + ": '" + value + "' is not a number");
    }
    return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
        throw Error(ErrorCode::ConfigError, key + ": '" + value + "' is not a nonnegative integer");
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& value) {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorCode::ConfigError, key + ": '" + value + "' is not a boolean");
}

}  // namespace

std::string VariantSpec::name() const {
    std::string s;
    switch (base) {
        case VariantBase::Ada: s = "Ada"; break;
        case VariantBase::Smt: s = "SMT"; break;
        case VariantBase::Rus: s = "RUS"; break;
        case VariantBase::Rb: s = "RB"; break;
        case VariantBase::Prus: s = "PRUS"; break;
        case VariantBase::Pcus: s = "PCUS"; break;
        case VariantBase::Pa: s = "PA"; break;
    }
    return fbeta ? s + "-F" : s;
}

std::uint64_t VariantSpec::id() const noexcept {
    return static_cast<std::uint64_t>(base) * 2 + (fbeta ? 1 : 0);
}

VariantSpec parse_variant(std::string_view token) {
    std::string t = upper(trim(token));
    VariantSpec v;
    if (t.size() > 2 && t.substr(t.size() - 2) == "-F") {
        v.fbeta = true;
        t.resize(t.size() - 2);
    }
    if (t == "ADA") {
        v.base = VariantBase::Ada;
    } else if (t == "SMT") {
        v.base = VariantBase::Smt;
    } else if (t == "RUS") {
        v.base = VariantBase::Rus;
    } else if (t == "RB") {
        v.base = VariantBase::Rb;
    } else if (t == "PRUS") {
        v.base = VariantBase::Prus;
    } else if (t == "PCUS") {
        v.base = VariantBase::Pcus;
    } else if (t == "PA") {
        v.base = VariantBase::Pa;
    } else {
        throw Error(ErrorCode::ConfigError, "unknown variant '" + std::string(token) + "'");
    }
    return v;
}

std::vector<VariantSpec> parse_variant_list(std::string_view comma_separated) {
    std::vector<VariantSpec> out;
    for (const auto& item : split_list(comma_separated)) {
        auto v = parse_variant(item);
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
    if (out.empty()) throw Error(ErrorCode::ConfigError, "variant list is empty");
    return out;
}

std::vector<double> parse_double_list(std::string_view comma_separated) {
    std::vector<double> out;
    for (const auto& item : split_list(comma_separated)) {
        // "1:100" is accepted as 100.
        auto colon = item.find(':');
        if (colon != std::string::npos) {
            double a = to_double("list", trim(std::string_view(item).substr(0, colon)));
            double b = to_double("list", trim(std::string_view(item).substr(colon + 1)));
            if (!(a > 0.0)) throw Error(ErrorCode::ConfigError, "bad ratio '" + item + "'");
            out.push_back(b / a);
        } else {
            out.push_back(to_double("list", item));
        }
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (variants.empty()) throw Error(ErrorCode::ConfigError, "no variants selected");
    if (ensemble_size && *ensemble_size == 0) throw Error(ErrorCode::ConfigError, "ensemble_size must be >= 1");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::ConfigError, "beta must be positive");
    for (double l : lambda_tests)
        if (!(l > 0.0)) throw Error(ErrorCode::ConfigError, "test skews must be positive");
    if (jobs == 0) throw Error(ErrorCode::ConfigError, "jobs must be >= 1");
    if (replications == 0 || replications > 10) throw Error(ErrorCode::ConfigError, "replications must be in 1..10");
    if (max_attempts == 0) throw Error(ErrorCode::ConfigError, "max_attempts must be >= 1");
    if (source == SourceKind::Keel && manifest.empty()) throw Error(ErrorCode::ConfigError, "KEEL source needs a manifest");
    if (source == SourceKind::Csv && csv.empty()) throw Error(ErrorCode::ConfigError, "CSV source needs a csv path");
    try {
        learner.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
}

void apply_config_value(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
    std::string key = trim(raw_key);
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string value = trim(raw_value);
    if (key == "source") {
        std::string v = upper(value);
        if (v == "SYNTHETIC") {
            cfg.source = SourceKind::Synthetic;
        } else if (v == "KEEL") {
            cfg.source = SourceKind::Keel;
        } else if (v == "CSV") {
            cfg.source = SourceKind::Csv;
        } else {
            throw Error(ErrorCode::ConfigError, "unknown source '" + value + "'");
        }
    } else if (key == "setting") {
        make_setting(value);  // validates the name
        cfg.setting = value;
    } else if (key == "manifest") {
        cfg.manifest = value;
        cfg.source = SourceKind::Keel;
    } else if (key == "datasets") {
        cfg.datasets = split_list(value);
    } else if (key == "csv") {
        cfg.csv = value;
        cfg.source = SourceKind::Csv;
    } else if (key == "positive_label_token") {
        cfg.positive_label_token = value;
    } else if (key == "variants") {
        cfg.variants = parse_variant_list(value);
    } else if (key == "ensemble_size") {
        if (value == "auto") {
            cfg.ensemble_size.reset();
        } else {
            cfg.ensemble_size = to_uint(key, value);
        }
    } else if (key == "beta") {
        cfg.beta = to_double(key, value);
    } else if (key == "lambda_tests") {
        cfg.lambda_tests = parse_double_list(value);
    } else if (key == "seed") {
        cfg.seed = to_uint(key, value);
    } else if (key == "out" || key == "out_dir") {
        cfg.out_dir = value;
    } else if (key == "jobs") {
        cfg.jobs = to_uint(key, value);
    } else if (key == "dump_models") {
        cfg.dump_models = to_bool(key, value);
    } else if (key == "replications") {
        cfg.replications = to_uint(key, value);
    } else if (key == "standardize") {
        cfg.standardize = to_bool(key, value);
    } else if (key == "c_penalty") {
        cfg.learner.c_penalty = to_double(key, value);
    } else if (key == "smo_tolerance") {
        cfg.learner.smo_tolerance = to_double(key, value);
    } else if (key == "max_passes") {
        cfg.learner.max_passes = to_uint(key, value);
    } else if (key == "cache_megabytes") {
        cfg.learner.cache_megabytes = to_uint(key, value);
    } else if (key == "max_attempts") {
        cfg.max_attempts = to_uint(key, value);
    } else if (key == "outer_span") {
        cfg.outer_span = to_double(key, value);
    } else if (key == "per_cluster") {
        cfg.per_cluster = to_uint(key, value);
    } else if (key == "t_neg") {
        cfg.t_neg = to_uint(key, value);
    } else {
        throw Error(ErrorCode::ConfigError, "unknown config key '" + raw_key + "'");
    }
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    ExperimentConfig cfg;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
        }
        for (auto& [k, v] : j.items()) {
            std::string value;
            if (v.is_array()) {
                for (const auto& item : v) {
                    if (!value.empty()) value += ',';
                    value += item.is_string() ? item.get<std::string>() : item.dump();
                }
            } else if (v.is_string()) {
                value = v.get<std::string>();
            } else {
                value = v.dump();
            }
            apply_config_value(cfg, k, value);
        }
    } else {
        std::istringstream lines(text);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(lines, line)) {
            ++line_no;
            auto t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            auto eq = t.find('=');
            if (eq == std::string::npos) {
                throw Error(ErrorCode::ConfigError, path.string() + ":" + std::to_string(line_no) + ": expected key=value");
            }
            apply_config_value(cfg, t.substr(0, eq), t.substr(eq + 1));
        }
    }
    const auto base = path.parent_path();
    if (!cfg.manifest.empty() && cfg.manifest.is_relative()) cfg.manifest = base / cfg.manifest;
    if (!cfg.csv.empty() && cfg.csv.is_relative()) cfg.csv = base / cfg.csv;
    return cfg;
}

std::vector<PreparedDataset> prepare_datasets(const ExperimentConfig& cfg) {
    std::vector<PreparedDataset> out;
    auto cap = [&](std::vector<Replication> reps) {
        if (reps.size() > cfg.replications) reps.resize(cfg.replications);
        return reps;
    };
    switch (cfg.source) {
        case SourceKind::Synthetic: {
            SynthConfig sc = make_setting(cfg.setting);
            sc.seed = cfg.seed;
            if (cfg.outer_span) sc.outer_span = *cfg.outer_span;
            if (cfg.per_cluster) sc.per_cluster = *cfg.per_cluster;
            if (cfg.t_neg) sc.t_neg = *cfg.t_neg;
            if (!cfg.lambda_tests.empty()) sc.lambda_tests = cfg.lambda_tests;
            try {
                sc.validate();
            } catch (const Error& e) {
                throw Error(ErrorCode::ConfigError, e.what());
            }
            PreparedDataset p;
            p.name = cfg.setting;
            p.data = gen_synthetic(sc);
            p.replications = cap(make_synthetic_replications(p.data, sc));
            p.lambda_train = sc.lambda_train;
            out.push_back(std::move(p));
            break;
        }
        case SourceKind::Keel: {
            auto entries = read_manifest(cfg.manifest);
            for (const auto& want : cfg.datasets) {
                if (std::none_of(entries.begin(), entries.end(), [&](const auto& m) { return m.name == want; })) {
                    throw Error(ErrorCode::ConfigError, "dataset '" + want + "' is not in the manifest");
                }
            }
            for (const auto& m : entries) {
                if (!cfg.datasets.empty() &&
                    std::find(cfg.datasets.begin(), cfg.datasets.end(), m.name) == cfg.datasets.end())
                    continue;
                PreparedDataset p;
                p.name = m.name;
                p.data = m.load();
                p.data.require_both_classes();
                if (m.expected_lambda && std::abs(p.data.lambda() / *m.expected_lambda - 1.0) > 0.02) {
                    throw Error(ErrorCode::MalformedData, m.name + ": imbalance " + num(p.data.lambda()) +
                                                              " differs from the expected " + num(*m.expected_lambda));
                }
                p.replications = cap(make_2x5_folds(p.data, cfg.seed));
                p.lambda_train = p.data.lambda();
                out.push_back(std::move(p));
            }
            break;
        }
        case SourceKind::Csv: {
            PreparedDataset p;
            p.name = cfg.csv.stem().string();
            p.data = parse_csv(cfg.csv, cfg.positive_label_token);
            p.data.require_both_classes();
            p.replications = cap(make_2x5_folds(p.data, cfg.seed));
            p.lambda_train = p.data.lambda();
            out.push_back(std::move(p));
            break;
        }
    }
    return out;
}

Dataset standardize_with(const Dataset& data, std::span<const std::size_t> train_rows) {
    const std::size_t d = data.dims();
    std::vector<double> mean(d, 0.0);
    std::vector<double> sd(d, 0.0);
    if (train_rows.empty()) throw Error(ErrorCode::InvalidArgument, "no rows to fit standardization on");
    for (std::size_t i : train_rows)
        for (std::size_t k = 0; k < d; ++k) mean[k] += data.row(i)[k];
    for (double& m : mean) m /= static_cast<double>(train_rows.size());
    for (std::size_t i : train_rows)
        for (std::size_t k = 0; k < d; ++k) sd[k] += (data.row(i)[k] - mean[k]) * (data.row(i)[k] - mean[k]);
    for (double& s : sd) {
        s = std::sqrt(s / static_cast<double>(train_rows.size()));
        if (!(s > 0.0)) s = 1.0;
    }
    Matrix x = data.features();
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < d; ++k) x(i, k) = (x(i, k) - mean[k]) / sd[k];
    return Dataset(std::move(x), data.labels(), data.group_ids());
}

namespace {

// Score-fusion and majority-vote outputs of an ensemble over a matrix,
// evaluating each member once per row.
void ensemble_outputs(const BoostedEnsemble& e, const Matrix& x, std::vector<double>& scores,
                      std::vector<Label>& majority) {
    scores.assign(x.rows(), 0.0);
    std::vector<double> votes(x.rows(), 0.0);
    for (const auto& m : e.members) {
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double dv = m.model->decision_value(x.row(i));
            scores[i] += dv * m.vote_weight;
            votes[i] += to_int(label_from_sign(dv)) * m.vote_weight;
        }
    }
    majority.resize(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) majority[i] = votes[i] >= 0.0 ? Label::Positive : Label::Negative;
}

template <typename T>
std::vector<T> gather(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
    std::vector<T> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

std::vector<std::size_t> skew_subset(const Dataset& d, std::optional<double> lambda, RngStream rng) {
    if (!lambda) {
        std::vector<std::size_t> all(d.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
    }
    return subsample_to_skew_indices(d, std::min(*lambda, d.lambda()), std::move(rng));
}

std::string lambda_label(std::optional<double> lambda) { return lambda ? num(*lambda) : "natural"; }

}  // namespace

TaskResult run_task(const ExperimentConfig& cfg, const PreparedDataset& ds, std::size_t dataset_index,
                    std::size_t replication, const VariantSpec& variant) {
    TaskResult res;
    res.dataset = ds.name;
    res.replication = replication;
    res.variant = variant.name();
    const Replication& rep = ds.replications.at(replication);
    const Dataset data = cfg.standardize ? standardize_with(ds.data, rep.train) : ds.data;
    const Dataset train = data.subset(rep.train);
    const Dataset val = data.subset(rep.validation);
    const Dataset test = data.subset(rep.test);
    res.train_pos = train.m_pos();
    res.train_neg = train.m_neg();

    const RngStream root(cfg.seed);
    const RngStream rng = root.child({dataset_index, 0, replication, variant.id()});
    const SvmLearner learner(cfg.learner);
    const LossFactorKind loss = variant.fbeta ? LossFactorKind::fbeta(cfg.beta) : LossFactorKind::weighted_error();
    BoostOptions options;
    options.max_attempts = cfg.max_attempts;

    BoostedEnsemble ensemble;
    if (!variant.partition_driven()) {
        const std::size_t e = cfg.ensemble_size.value_or(std::max<std::size_t>(1, round_half_up(ds.lambda_train)));
        BoostVariant bv = BoostVariant::Ada;
        if (variant.base == VariantBase::Smt) bv = BoostVariant::Smt;
        if (variant.base == VariantBase::Rus) bv = BoostVariant::Rus;
        if (variant.base == VariantBase::Rb) bv = BoostVariant::Rb;
        ensemble = run_boosting(bv, train, e, learner, loss, rng.child(1), options);
    } else {
        Partitioning part;
        if (variant.base == VariantBase::Prus) {
            part = partition_ruswr(train.m_neg(), train.m_pos(), rng.child(0));
        } else if (variant.base == VariantBase::Pcus) {
            Matrix neg = train.features().select_rows(train.negative_indices());
            part = partition_cus(neg, default_k_range(neg), rng.child(0)).partitioning;
        } else {
            part = partition_apriori(train);
        }
        ensemble = pboost(train, part, learner, loss, rng.child(1), options);
    }
    res.complexity = complexity_report(ensemble);

    std::vector<double> val_scores, test_scores;
    std::vector<Label> val_major, test_major;
    ensemble_outputs(ensemble, val.features(), val_scores, val_major);
    ensemble_outputs(ensemble, test.features(), test_scores, test_major);

    std::vector<std::optional<double>> lambdas;
    if (cfg.lambda_tests.empty()) {
        lambdas.push_back(std::nullopt);
    } else {
        for (double l : cfg.lambda_tests) lambdas.emplace_back(l);
    }
    for (const auto& lambda : lambdas) {
        const std::uint64_t key = lambda ? static_cast<std::uint64_t>(std::llround(*lambda * 1000.0)) : 0;
        const RngStream eval_rng = root.child({dataset_index, 1, replication, key});
        const auto vi = skew_subset(val, lambda, eval_rng.child(0));
        const auto ti = skew_subset(test, lambda, eval_rng.child(1));
        const auto vs = gather(val_scores, vi);
        const auto vl = gather(val.labels(), vi);
        const auto ts = gather(test_scores, ti);
        const auto tl = gather(test.labels(), ti);
        const auto tm = gather(test_major, ti);

        RunRow row;
        row.dataset = ds.name;
        row.replication = replication;
        row.variant = res.variant;
        row.lambda_label = lambda_label(lambda);
        row.members = ensemble.size();
        std::size_t tpos = static_cast<std::size_t>(std::count(tl.begin(), tl.end(), Label::Positive));
        row.lambda_actual = static_cast<double>(tl.size() - tpos) / static_cast<double>(tpos);
        row.threshold = select_threshold_max_fbeta(vs, vl, cfg.beta).threshold;
        const auto c = confusion_at_threshold(ts, tl, row.threshold);
        row.f_op = f_beta(c, cfg.beta);
        row.f_d = f_beta(confusion(tl, tm), cfg.beta);
        row.g_mean = g_mean(c);
        row.expected_cost = expected_cost(c, static_cast<double>(tpos) / static_cast<double>(tl.size()), 1.0, 1.0);
        auto pr = pr_curve_and_aupr(ts, tl);
        row.aupr = pr.aupr;
        res.rows.push_back(row);
        res.curves.push_back(std::move(pr.curve));
    }
    if (cfg.dump_models) res.ensemble = std::move(ensemble);
    return res;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows) {
    std::vector<AggregateRow> out;
    std::vector<std::vector<const RunRow*>> members;
    for (const auto& r : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const AggregateRow& a) {
            return a.dataset == r.dataset && a.variant == r.variant && a.lambda_label == r.lambda_label;
        });
        if (it == out.end()) {
            out.push_back({r.dataset, r.variant, r.lambda_label, 0, {}});
            members.emplace_back();
            it = std::prev(out.end());
        }
        members[static_cast<std::size_t>(it - out.begin())].push_back(&r);
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        const auto& rs = members[g];
        out[g].n = rs.size();
        for (const auto& metric : kRunMetrics) {
            auto get = [&](const RunRow* r) {
                if (metric == "f_op") return r->f_op;
                if (metric == "f_d") return r->f_d;
                if (metric == "g_mean") return r->g_mean;
                if (metric == "expected_cost") return r->expected_cost;
                return r->aupr;
            };
            double mean = 0.0;
            for (const auto* r : rs) mean += get(r);
            mean /= static_cast<double>(rs.size());
            double var = 0.0;
            for (const auto* r : rs) var += (get(r) - mean) * (get(r) - mean);
            out[g].stats[metric] = {mean, std::sqrt(var / static_cast<double>(rs.size()))};
        }
    }
    return out;
}

namespace {

std::string safe_name(std::string s) {
    for (char& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_')) c = '_';
    return s;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
    return out;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg, const std::vector<PreparedDataset>& data) {
    cfg.validate();
    struct Task {
        std::size_t dataset;
        std::size_t replication;
        VariantSpec variant;
    };
    std::vector<Task> tasks;
    for (std::size_t d = 0; d < data.size(); ++d)
        for (std::size_t r = 0; r < data[d].replications.size(); ++r)
            for (const auto& v : cfg.variants) tasks.push_back({d, r, v});

    std::error_code ec;
    fs::create_directories(cfg.out_dir / "pr", ec);
    if (cfg.dump_models) fs::create_directories(cfg.out_dir / "models", ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + cfg.out_dir.string() + ": " + ec.message());

    std::vector<TaskResult> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            const auto& task = tasks[t];
            try {
                results[t] = run_task(cfg, data[task.dataset], task.dataset, task.replication, task.variant);
            } catch (const std::exception& e) {
                results[t].dataset = data[task.dataset].name;
                results[t].replication = task.replication;
                results[t].variant = task.variant.name();
                results[t].error = e.what();
            }
        }
    };
    const std::size_t n_workers = std::min(cfg.jobs, std::max<std::size_t>(tasks.size(), 1));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Single collector: everything below runs in task order.
    ExperimentSummary summary;
    summary.tasks = tasks.size();
    auto runs = open_out(cfg.out_dir / "runs.csv");
    runs << "dataset,replication,variant,lambda_test,lambda_actual,members,threshold,f_op,f_d,g_mean,expected_cost,aupr\n";
    auto cx = open_out(cfg.out_dir / "complexity.csv");
    write_complexity_csv_header(cx, "dataset,replication,variant,m_pos,m_neg");
    std::vector<RunRow> all_rows;
    for (const auto& res : results) {
        if (res.error) {
            ++summary.failed;
            summary.errors.push_back(res.dataset + " r" + std::to_string(res.replication) + " " + res.variant + ": " +
                                     *res.error);
            continue;
        }
        for (std::size_t k = 0; k < res.rows.size(); ++k) {
            const auto& r = res.rows[k];
            runs << r.dataset << ',' << r.replication << ',' << r.variant << ',' << r.lambda_label << ','
                 << num(r.lambda_actual) << ',' << r.members << ',' << num(r.threshold) << ',' << num(r.f_op) << ','
                 << num(r.f_d) << ',' << num(r.g_mean) << ',' << num(r.expected_cost) << ',' << num(r.aupr) << '\n';
            auto pr = open_out(cfg.out_dir / "pr" /
                               (safe_name(r.dataset) + "__" + safe_name(r.variant) + "__l" + safe_name(r.lambda_label) +
                                "__r" + std::to_string(r.replication) + ".csv"));
            write_pr_curve_csv(pr, res.curves[k]);
            all_rows.push_back(r);
        }
        write_complexity_csv_row(cx,
                                 res.dataset + ',' + std::to_string(res.replication) + ',' + res.variant + ',' +
                                     std::to_string(res.train_pos) + ',' + std::to_string(res.train_neg),
                                 res.complexity);
        if (res.ensemble) {
            auto mj = open_out(cfg.out_dir / "models" /
                               (safe_name(res.dataset) + "__" + safe_name(res.variant) + "__r" +
                                std::to_string(res.replication) + ".json"));
            write_ensemble_json(mj, *res.ensemble);
        }
    }

    auto agg = open_out(cfg.out_dir / "aggregate.csv");
    agg << "dataset,variant,lambda_test,n";
    for (const auto& m : kRunMetrics) agg << ',' << m << "_mean," << m << "_std";
    agg << '\n';
    for (const auto& a : aggregate(all_rows)) {
        agg << a.dataset << ',' << a.variant << ',' << a.lambda_label << ',' << a.n;
        for (const auto& m : kRunMetrics) agg << ',' << num(a.stats.at(m).first) << ',' << num(a.stats.at(m).second);
        agg << '\n';
    }
    if (summary.failed > 0) {
        auto err = open_out(cfg.out_dir / "errors.txt");
        for (const auto& e : summary.errors) err << e << '\n';
    }
    return summary;
}

std::vector<std::map<std::string, std::string>> read_simple_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingResults, "missing " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::MissingResults, path.string() + " is empty");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(trim(cell));
    }
    std::vector<std::map<std::string, std::string>> out;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::map<std::string, std::string> rec;
        std::size_t k = 0;
        while (std::getline(ss, cell, ',') && k < header.size()) rec[header[k++]] = trim(cell);
        if (k != header.size()) throw Error(ErrorCode::MalformedData, path.string() + ": short row");
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string pm(const std::map<std::string, std::string>& rec, const std::string& metric) {
    return fixed2(std::stod(rec.at(metric + "_mean"))) + " ± " + fixed2(std::stod(rec.at(metric + "_std")));
}

}  // namespace

void emit_reports(const fs::path& run_dir) {
    if (!fs::is_directory(run_dir)) throw Error(ErrorCode::MissingResults, run_dir.string() + " is not a directory");
    const auto agg = read_simple_csv(run_dir / "aggregate.csv");
    const auto cx = read_simple_csv(run_dir / "complexity.csv");
    if (agg.empty()) throw Error(ErrorCode::MissingResults, "aggregate.csv has no rows");

    std::vector<std::string> datasets;
    for (const auto& r : agg)
        if (std::find(datasets.begin(), datasets.end(), r.at("dataset")) == datasets.end())
            datasets.push_back(r.at("dataset"));

    std::ostringstream md;
    md << "# Results\n\n";
    md << "Mean ± population std over replications. F_op uses the validation-selected threshold on the fused score; "
          "F_D uses majority voting.\n";
    for (const auto& ds : datasets) {
        md << "\n## " << ds << "\n\n";
        md << "| variant | lambda_test | n | F_op | F_D | G-mean | EC | AUPR |\n";
        md << "|---|---|---|---|---|---|---|---|\n";
        for (const auto& r : agg) {
            if (r.at("dataset") != ds) continue;
            md << "| " << r.at("variant") << " | " << r.at("lambda_test") << " | " << r.at("n") << " | "
               << pm(r, "f_op") << " | " << pm(r, "f_d") << " | " << pm(r, "g_mean") << " | "
               << pm(r, "expected_cost") << " | " << pm(r, "aupr") << " |\n";
        }

        // Complexity: mean totals per variant over replications.
        std::vector<std::string> variants;
        std::map<std::string, std::vector<const std::map<std::string, std::string>*>> by_variant;
        for (const auto& r : cx) {
            if (r.at("dataset") != ds) continue;
            if (!by_variant.count(r.at("variant"))) variants.push_back(r.at("variant"));
            by_variant[r.at("variant")].push_back(&r);
        }
        if (variants.empty()) continue;
        md << "\n### Training and validation cost\n\n";
        md << "| variant | M+ | M- | E | sum n_tr | sum n_val | sum n_sv | sum n_sv*n_val | discarded attempts |\n";
        md << "|---|---|---|---|---|---|---|---|---|\n";
        for (const auto& v : variants) {
            const auto& rs = by_variant[v];
            auto mean = [&](const char* col) {
                double s = 0.0;
                for (const auto* r : rs) s += std::stod(r->at(col));
                return s / static_cast<double>(rs.size());
            };
            auto fmt1 = [](double x) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.1f", x);
                return std::string(buf);
            };
            md << "| " << v << " | " << fmt1(mean("m_pos")) << " | " << fmt1(mean("m_neg")) << " | "
               << fmt1(mean("members")) << " | " << fmt1(mean("n_tr")) << " | " << fmt1(mean("n_val")) << " | "
               << fmt1(mean("n_sv")) << " | " << fmt1(mean("sv_x_val")) << " | " << fmt1(mean("discarded")) << " |\n";
        }
    }
    std::size_t curves = 0;
    if (fs::is_directory(run_dir / "pr"))
        for ([[maybe_unused]] const auto& entry : fs::directory_iterator(run_dir / "pr")) ++curves;
    md << "\nPR curves: " << curves << " files under `pr/` (columns threshold, recall, precision).\n";

    std::ofstream out(run_dir / "summary.md");
    if (!out) throw Error(ErrorCode::IoError, "cannot write summary.md");
    out << md.str();
}

}  // namespace pboost
