#include "pboost/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

#include "pboost/error.hpp"

namespace pboost {

std::vector<std::size_t> rus(std::span<const std::size_t> indices, std::size_t n, RngStream rng) {
    if (n > indices.size()) {
        throw Error(ErrorCode::SubsetTooLarge, "cannot draw " + std::to_string(n) + " of " +
                                                   std::to_string(indices.size()));
    }
    std::vector<std::size_t> pool(indices.begin(), indices.end());
    // Partial Fisher-Yates: the first n slots end up uniform without replacement.
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(n);
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::vector<std::size_t> weighted_sample_without_replacement(const WeightVector& w, std::size_t n,
                                                             RngStream rng) {
    const std::size_t m = w.size();
    if (n > m) {
        throw Error(ErrorCode::SubsetTooLarge, "cannot draw " + std::to_string(n) + " of " +
                                                   std::to_string(m));
    }
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (n == m) return all;
    if (n == 0) return {};

    std::vector<std::size_t> weighted;
    std::vector<std::size_t> unweighted;
    for (std::size_t i = 0; i < m; ++i) (w[i] > 0.0 ? weighted : unweighted).push_back(i);
    if (weighted.size() <= n) {
        auto extra = rus(unweighted, n - weighted.size(), rng.child(1));
        weighted.insert(weighted.end(), extra.begin(), extra.end());
        std::sort(weighted.begin(), weighted.end());
        return weighted;
    }

    // Inclusion probabilities n w_i / W, with entries above 1 capped and the
    // remainder redistributed.
    std::vector<double> pi(m, 0.0);
    std::vector<bool> capped(m, false);
    std::size_t n_capped = 0;
    while (true) {
        double rest = 0.0;
        for (std::size_t i : weighted)
            if (!capped[i]) rest += w[i];
        const double share = static_cast<double>(n - n_capped);
        bool changed = false;
        for (std::size_t i : weighted) {
            if (capped[i]) continue;
            pi[i] = share * w[i] / rest;
            if (pi[i] >= 1.0) {
                pi[i] = 1.0;
                capped[i] = true;
                ++n_capped;
                changed = true;
            }
        }
        if (!changed) break;
    }

    std::vector<std::size_t> order = weighted;
    RngStream order_rng = rng.child(0);
    order_rng.shuffle(order);
    double target = rng.uniform();
    double cumulative = 0.0;
    std::vector<bool> taken(m, false);
    std::vector<std::size_t> out;
    out.reserve(n);
    for (std::size_t i : order) {
        cumulative += pi[i];
        if (out.size() < n && target < cumulative) {
            out.push_back(i);
            taken[i] = true;
            target += 1.0;
        }
    }
    if (out.size() < n) {
        // Rounding shortfall: take the most probable remaining entries.
        std::vector<std::size_t> rest;
        for (std::size_t i : weighted)
            if (!taken[i]) rest.push_back(i);
        std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) { return pi[a] > pi[b]; });
        for (std::size_t k = 0; out.size() < n; ++k) out.push_back(rest[k]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Matrix smote(const Matrix& minority, std::size_t n_new, std::size_t k_neighbors, RngStream rng) {
    Matrix out(0, minority.cols());
    if (n_new == 0) return out;
    const std::size_t n = minority.rows();
    if (n < 2) throw Error(ErrorCode::TooFewPositives, "SMOTE needs at least two samples");
    if (k_neighbors == 0) throw Error(ErrorCode::InvalidArgument, "k_neighbors must be >= 1");
    const std::size_t k = std::min(k_neighbors, n - 1);

    std::vector<std::vector<std::size_t>> neighbours(n);
    std::vector<std::pair<double, std::size_t>> dists;
    dists.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        dists.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dists.emplace_back(squared_distance(minority.row(i), minority.row(j)), j);
        }
        std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k), dists.end());
        for (std::size_t t = 0; t < k; ++t) neighbours[i].push_back(dists[t].second);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    std::vector<double> row(minority.cols());
    for (std::size_t s = 0; s < n_new; ++s) {
        std::size_t base = order[s % n];
        std::size_t nn = neighbours[base][static_cast<std::size_t>(rng.below(k))];
        double u = rng.uniform();
        auto x = minority.row(base);
        auto y = minority.row(nn);
        for (std::size_t d = 0; d < row.size(); ++d) row[d] = x[d] + u * (y[d] - x[d]);
        out.append_row(row);
    }
    return out;
}

std::vector<std::size_t> Partitioning::sizes() const {
    std::vector<std::size_t> out;
    out.reserve(parts.size());
    for (const auto& p : parts) out.push_back(p.size());
    return out;
}

std::size_t Partitioning::total() const noexcept {
    std::size_t t = 0;
    for (const auto& p : parts) t += p.size();
    return t;
}

void Partitioning::validate(std::size_t n_negatives) const {
    if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "partitioning has no parts");
    std::vector<bool> seen(n_negatives, false);
    std::size_t covered = 0;
    for (const auto& p : parts) {
        if (p.empty()) throw Error(ErrorCode::InvalidArgument, "partitioning has an empty part");
        for (std::size_t i : p) {
            if (i >= n_negatives || seen[i]) {
                throw Error(ErrorCode::InvalidArgument, "partitioning is not a disjoint cover");
            }
            seen[i] = true;
            ++covered;
        }
    }
    if (covered != n_negatives) {
        throw Error(ErrorCode::InvalidArgument, "partitioning covers " + std::to_string(covered) +
                                                    " of " + std::to_string(n_negatives) + " negatives");
    }
}

Partitioning partition_ruswr(std::size_t neg_count, std::size_t m_pos, RngStream rng) {
    if (m_pos == 0) throw Error(ErrorCode::InvalidArgument, "M+ must be positive");
    const std::size_t lo = (m_pos + 1) / 2;
    const std::size_t hi = 2 * m_pos;
    if (neg_count < lo) {
        throw Error(ErrorCode::TooFewNegatives, std::to_string(neg_count) +
                                                    " negatives cannot fill a part of at least " +
                                                    std::to_string(lo));
    }
    std::vector<std::size_t> order(neg_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream shuffle_rng = rng.child(0);
    shuffle_rng.shuffle(order);

    // While more than 2 M+ remain, cap each draw so that at least ceil(M+/2)
    // are left; the final part then takes the rest and stays in range.
    RngStream size_rng = rng.child(1);
    std::vector<std::size_t> sizes;
    std::size_t remaining = neg_count;
    while (remaining > hi) {
        const std::size_t top = std::min(hi, remaining - lo);
        sizes.push_back(static_cast<std::size_t>(
            size_rng.integer(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(top))));
        remaining -= sizes.back();
    }
    sizes.push_back(remaining);

    Partitioning p;
    std::size_t pos = 0;
    for (std::size_t s : sizes) {
        std::vector<std::size_t> part(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                      order.begin() + static_cast<std::ptrdiff_t>(pos + s));
        std::sort(part.begin(), part.end());
        p.parts.push_back(std::move(part));
        pos += s;
    }
    return p;
}

std::size_t count_distinct_rows(const Matrix& features) {
    std::vector<std::size_t> idx(features.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto less = [&](std::size_t a, std::size_t b) {
        auto ra = features.row(a);
        auto rb = features.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    };
    std::sort(idx.begin(), idx.end(), less);
    std::size_t distinct = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k == 0 || less(idx[k - 1], idx[k])) ++distinct;
    }
    return distinct;
}

namespace {

constexpr std::size_t kMaxLloydIterations = 300;

void assign(const Matrix& x, const Matrix& centroids, std::vector<std::size_t>& assignments,
            std::vector<double>& d2) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t c = 0; c < centroids.rows(); ++c) {
            double d = squared_distance(x.row(i), centroids.row(c));
            if (d < best) {
                best = d;
                arg = c;
            }
        }
        assignments[i] = arg;
        d2[i] = best;
    }
}

// Moves each empty cluster onto the point farthest from its current centroid.
bool reseed_empty(const Matrix& x, Matrix& centroids, std::vector<std::size_t>& assignments,
                  std::vector<double>& d2) {
    const std::size_t k = centroids.rows();
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : assignments) ++counts[a];
    bool moved = false;
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] > 0) continue;
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            if (counts[assignments[i]] > 1 && d2[i] > far_d) {
                far_d = d2[i];
                far = i;
            }
        }
        auto src = x.row(far);
        std::copy(src.begin(), src.end(), centroids.row(c).begin());
        --counts[assignments[far]];
        assignments[far] = c;
        d2[far] = 0.0;
        counts[c] = 1;
        moved = true;
    }
    return moved;
}

Matrix cluster_means(const Matrix& x, const std::vector<std::size_t>& assignments, const Matrix& previous) {
    Matrix means(previous.rows(), x.cols(), 0.0);
    std::vector<std::size_t> counts(previous.rows(), 0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto r = x.row(i);
        auto m = means.row(assignments[i]);
        for (std::size_t d = 0; d < r.size(); ++d) m[d] += r[d];
        ++counts[assignments[i]];
    }
    for (std::size_t c = 0; c < previous.rows(); ++c) {
        auto m = means.row(c);
        if (counts[c] == 0) {
            auto p = previous.row(c);
            std::copy(p.begin(), p.end(), m.begin());
        } else {
            for (double& v : m) v /= static_cast<double>(counts[c]);
        }
    }
    return means;
}

}  // namespace

KMeansResult kmeans(const Matrix& features, std::size_t k, RngStream rng) {
    const std::size_t n = features.rows();
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    if (k > count_distinct_rows(features)) {
        throw Error(ErrorCode::TooManyClusters,
                    "k=" + std::to_string(k) + " exceeds the number of distinct rows");
    }

    Matrix centroids(0, features.cols());
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::size_t next = static_cast<std::size_t>(rng.below(n));
    for (std::size_t c = 0; c < k; ++c) {
        centroids.append_row(features.row(next));
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_distance(features.row(i), centroids.row(c)));
            if (nearest[i] > far_d) {
                far_d = nearest[i];
                next = i;
            }
        }
    }

    KMeansResult result;
    result.k = k;
    std::vector<std::size_t> assignments(n, 0);
    std::vector<double> d2(n, 0.0);
    std::vector<std::size_t> previous;
    for (std::size_t iter = 0; iter < kMaxLloydIterations; ++iter) {
        assign(features, centroids, assignments, d2);
        reseed_empty(features, centroids, assignments, d2);
        result.objective_trace.push_back(std::accumulate(d2.begin(), d2.end(), 0.0));
        result.iterations = iter + 1;
        if (assignments == previous) break;
        previous = assignments;
        centroids = cluster_means(features, assignments, centroids);
    }
    result.centroids = cluster_means(features, assignments, centroids);
    result.assignments = std::move(assignments);
    return result;
}

double dunn_index(const Matrix& features, std::span<const std::size_t> assignments) {
    if (assignments.size() != features.rows()) {
        throw Error(ErrorCode::LengthMismatch, "assignments vs feature rows");
    }
    std::vector<std::size_t> ids(assignments.begin(), assignments.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() < 2) throw Error(ErrorCode::SingleCluster, "Dunn index needs two clusters");

    double min_between = std::numeric_limits<double>::infinity();
    double max_within = 0.0;
    for (std::size_t i = 0; i < features.rows(); ++i) {
        auto xi = features.row(i);
        for (std::size_t j = i + 1; j < features.rows(); ++j) {
            double d2 = squared_distance(xi, features.row(j));
            if (assignments[i] == assignments[j]) {
                max_within = std::max(max_within, d2);
            } else {
                min_between = std::min(min_between, d2);
            }
        }
    }
    if (max_within == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(min_between) / std::sqrt(max_within);
}

CusResult partition_cus(const Matrix& neg_features, std::span<const std::size_t> k_range, RngStream rng) {
    if (k_range.empty()) throw Error(ErrorCode::InvalidArgument, "k_range is empty");
    CusResult result;
    double best = -1.0;
    std::vector<std::size_t> best_assign;
    for (std::size_t k : k_range) {
        auto km = kmeans(neg_features, k, rng.child(k));
        double dunn = k >= 2 ? dunn_index(neg_features, km.assignments) : 0.0;
        result.dunn.push_back(dunn);
        if (dunn > best || (dunn == best && k < result.chosen_k)) {
            best = dunn;
            result.chosen_k = k;
            best_assign = std::move(km.assignments);
        }
    }
    result.partitioning.parts.assign(result.chosen_k, {});
    for (std::size_t i = 0; i < best_assign.size(); ++i) {
        result.partitioning.parts[best_assign[i]].push_back(i);
    }
    return result;
}

std::vector<std::size_t> default_k_range(const Matrix& neg_features) {
    std::size_t upper = std::min<std::size_t>(20, neg_features.rows() / 2);
    upper = std::min(upper, count_distinct_rows(neg_features));
    std::vector<std::size_t> out;
    for (std::size_t k = 2; k <= upper; ++k) out.push_back(k);
    return out;
}

Partitioning partition_apriori(std::span<const std::int64_t> negative_group_ids) {
    std::map<std::int64_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < negative_group_ids.size(); ++i) {
        if (negative_group_ids[i] < 0) {
            throw Error(ErrorCode::MissingGroupIds, "negative sample " + std::to_string(i) +
                                                        " has no group id");
        }
        groups[negative_group_ids[i]].push_back(i);
    }
    Partitioning p;
    for (auto& [id, members] : groups) p.parts.push_back(std::move(members));
    return p;
}

Partitioning partition_apriori(const Dataset& data) {
    if (!data.group_ids()) throw Error(ErrorCode::MissingGroupIds, "dataset carries no group ids");
    std::vector<std::int64_t> ids;
    for (std::size_t i : data.negative_indices()) ids.push_back((*data.group_ids())[i]);
    return partition_apriori(ids);
}

BalancedSample random_balance_to(const Dataset& data, std::size_t target_pos, RngStream rng,
                                 std::size_t k_neighbors) {
    data.require_both_classes();
    const std::size_t m = data.size();
    if (target_pos > m) throw Error(ErrorCode::InvalidArgument, "target exceeds dataset size");
    const std::size_t target_neg = m - target_pos;
    const auto pos = data.positive_indices();
    const auto neg = data.negative_indices();

    // The class above its target is reduced with rus; the other grows by smote.
    std::vector<std::size_t> keep_pos = pos;
    std::vector<std::size_t> keep_neg = neg;
    Matrix synth_pos(0, data.dims());
    Matrix synth_neg(0, data.dims());
    if (target_pos >= pos.size()) {
        if (target_pos > pos.size() && pos.size() < 2) {
            throw Error(ErrorCode::TooFewPositives, "SMOTE needs at least two positives");
        }
        keep_neg = rus(neg, target_neg, rng.child(0));
        synth_pos = smote(data.features().select_rows(pos), target_pos - pos.size(), k_neighbors,
                          rng.child(1));
    } else {
        if (neg.size() < 2) throw Error(ErrorCode::TooFewNegatives, "SMOTE needs at least two negatives");
        keep_pos = rus(pos, target_pos, rng.child(0));
        synth_neg = smote(data.features().select_rows(neg), target_neg - neg.size(), k_neighbors,
                          rng.child(1));
    }

    Matrix features(0, data.dims());
    std::vector<Label> labels;
    std::vector<std::int64_t> groups;
    BalancedSample out;
    auto take_real = [&](std::size_t i) {
        features.append_row(data.row(i));
        labels.push_back(data.label(i));
        groups.push_back(data.group_ids() ? (*data.group_ids())[i] : kNoGroup);
        out.origin.emplace_back(i);
    };
    auto take_synth = [&](const Matrix& rows, Label label) {
        for (std::size_t r = 0; r < rows.rows(); ++r) {
            features.append_row(rows.row(r));
            labels.push_back(label);
            groups.push_back(kNoGroup);
            out.origin.emplace_back(std::nullopt);
        }
    };
    for (std::size_t i : keep_pos) take_real(i);
    take_synth(synth_pos, Label::Positive);
    for (std::size_t i : keep_neg) take_real(i);
    take_synth(synth_neg, Label::Negative);

    std::optional<std::vector<std::int64_t>> group_ids;
    if (data.group_ids()) group_ids = std::move(groups);
    out.data = Dataset(std::move(features), std::move(labels), std::move(group_ids));
    return out;
}

BalancedSample random_balance_traced(const Dataset& data, RngStream rng, std::size_t k_neighbors) {
    data.require_both_classes();
    if (data.size() < 4) throw Error(ErrorCode::TooFewSamples, "random balance needs at least 4 rows");
    auto target = static_cast<std::size_t>(rng.child(0).integer(2, static_cast<std::int64_t>(data.size()) - 2));
    return random_balance_to(data, target, rng.child(1), k_neighbors);
}

Dataset random_balance(const Dataset& data, RngStream rng, std::size_t k_neighbors) {
    return random_balance_traced(data, std::move(rng), k_neighbors).data;
}

void write_partitioning_csv(std::ostream& out, const Partitioning& p,
                            std::span<const std::size_t> negative_rows) {
    out << "negative_index,part\n";
    std::vector<std::pair<std::size_t, std::size_t>> rows;
    for (std::size_t e = 0; e < p.parts.size(); ++e)
        for (std::size_t i : p.parts[e]) rows.emplace_back(negative_rows.empty() ? i : negative_rows[i], e);
    std::sort(rows.begin(), rows.end());
    for (auto [i, e] : rows) out << i << ',' << e << '\n';
}

}  // namespace pboost
