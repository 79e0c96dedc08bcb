#include "pboost/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <string>

#include "pboost/error.hpp"

namespace pboost {

void SynthConfig::validate() const {
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
    if (t_neg < 1) throw Error(ErrorCode::InvalidArgument, "t_neg must be >= 1");
    if (per_cluster < 1) throw Error(ErrorCode::InvalidArgument, "per_cluster must be >= 1");
    if (!(outer_span >= 0.0)) throw Error(ErrorCode::InvalidArgument, "outer_span must be >= 0");
    if (!(lambda_train > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_train must be positive");
    for (double l : lambda_tests)
        if (!(l > 0.0)) throw Error(ErrorCode::InvalidArgument, "test skews must be positive");
}

std::vector<std::vector<double>> synthetic_cluster_means(const SynthConfig& cfg) {
    cfg.validate();
    RngStream rng = RngStream(cfg.seed).child(1);
    std::vector<std::vector<double>> means;
    means.reserve(cfg.t_neg);
    for (std::size_t j = 0; j < cfg.t_neg; ++j) {
        double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        double radius = cfg.delta + rng.uniform() * cfg.outer_span;
        means.push_back({radius * std::cos(angle), radius * std::sin(angle)});
    }
    return means;
}

Dataset gen_synthetic(const SynthConfig& cfg) {
    const auto means = synthetic_cluster_means(cfg);
    RngStream root(cfg.seed);
    const std::size_t n = cfg.per_cluster * (1 + cfg.t_neg);
    Matrix x(0, 2);
    std::vector<Label> y;
    std::vector<std::int64_t> groups;
    y.reserve(n);
    groups.reserve(n);

    RngStream pos_rng = root.child(0);
    for (std::size_t i = 0; i < cfg.per_cluster; ++i) {
        const double row[2] = {pos_rng.normal(), pos_rng.normal()};
        x.append_row(row);
        y.push_back(Label::Positive);
        groups.push_back(kNoGroup);
    }
    for (std::size_t j = 0; j < cfg.t_neg; ++j) {
        RngStream c_rng = root.child({2, j});
        for (std::size_t i = 0; i < cfg.per_cluster; ++i) {
            const double row[2] = {means[j][0] + c_rng.normal(), means[j][1] + c_rng.normal()};
            x.append_row(row);
            y.push_back(Label::Negative);
            groups.push_back(static_cast<std::int64_t>(j));
        }
    }
    return Dataset(std::move(x), std::move(y), std::move(groups));
}

SynthConfig make_setting(std::string_view name) {
    SynthConfig cfg;
    if (name == "D1") {
        cfg.lambda_train = 50.0;
        cfg.delta = 0.2;
    } else if (name == "D2") {
        cfg.lambda_train = 50.0;
        cfg.delta = 0.1;
    } else if (name == "D3") {
        cfg.lambda_train = 20.0;
        cfg.delta = 0.2;
    } else {
        throw Error(ErrorCode::UnknownSetting, "unknown synthetic setting '" + std::string(name) + "'");
    }
    return cfg;
}

std::vector<Replication> make_synthetic_replications(const Dataset& data, const SynthConfig& cfg) {
    cfg.validate();
    if (!data.group_ids()) throw Error(ErrorCode::MissingGroupIds, "synthetic data must carry group ids");
    const auto& gid = *data.group_ids();
    std::map<std::int64_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < data.size(); ++i) groups[gid[i]].push_back(i);
    const auto train_clusters = static_cast<std::int64_t>(round_half_up(cfg.lambda_train));
    constexpr std::size_t kFolds = 5;

    RngStream rng = RngStream(cfg.seed).child(3);
    // halves[h][g] and folds[h][g][f] hold row indices of group g.
    std::vector<std::vector<std::size_t>> halves[2];
    std::vector<std::vector<std::vector<std::size_t>>> folds[2];
    std::vector<std::int64_t> keys;
    for (auto& [g, rows] : groups) {
        if (rows.size() < 2 * kFolds) {
            throw Error(ErrorCode::TooFewSamples, "group " + std::to_string(g) + " has fewer than 10 rows");
        }
        keys.push_back(g);
        RngStream g_rng = rng.child(static_cast<std::uint64_t>(g + 1));
        std::vector<std::size_t> order = rows;
        g_rng.shuffle(order);
        const std::size_t cut = (order.size() + 1) / 2;
        std::vector<std::size_t> parts[2] = {{order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut)},
                                             {order.begin() + static_cast<std::ptrdiff_t>(cut), order.end()}};
        for (int h = 0; h < 2; ++h) {
            std::vector<std::vector<std::size_t>> f(kFolds);
            const std::size_t base = parts[h].size() / kFolds;
            const std::size_t extra = parts[h].size() % kFolds;
            std::size_t pos = 0;
            for (std::size_t k = 0; k < kFolds; ++k) {
                const std::size_t len = base + (k < extra ? 1 : 0);
                f[k].assign(parts[h].begin() + static_cast<std::ptrdiff_t>(pos),
                            parts[h].begin() + static_cast<std::ptrdiff_t>(pos + len));
                pos += len;
            }
            halves[h].push_back(std::move(parts[h]));
            folds[h].push_back(std::move(f));
        }
    }

    std::vector<Replication> out;
    for (int h = 0; h < 2; ++h) {
        for (std::size_t f = 0; f < kFolds; ++f) {
            Replication r;
            for (std::size_t gi = 0; gi < keys.size(); ++gi) {
                const bool in_train = keys[gi] < train_clusters;
                for (std::size_t k = 0; k < kFolds; ++k) {
                    auto& dst = k == f ? r.validation : r.train;
                    if (k != f && !in_train) continue;
                    dst.insert(dst.end(), folds[h][gi][k].begin(), folds[h][gi][k].end());
                }
                r.test.insert(r.test.end(), halves[1 - h][gi].begin(), halves[1 - h][gi].end());
            }
            std::sort(r.train.begin(), r.train.end());
            std::sort(r.validation.begin(), r.validation.end());
            std::sort(r.test.begin(), r.test.end());
            out.push_back(std::move(r));
        }
    }
    return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    for (std::size_t d = 0; d < data.dims(); ++d) out << 'x' << d << ',';
    if (data.group_ids()) out << "group,";
    out << "label\n";
    out.precision(17);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.row(i)) out << v << ',';
        if (data.group_ids()) out << (*data.group_ids())[i] << ',';
        out << to_int(data.label(i)) << '\n';
    }
}

}  // namespace pboost
