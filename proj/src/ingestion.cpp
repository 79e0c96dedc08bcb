#include "pboost/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pboost/error.hpp"

namespace pboost {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t p = s.find(sep, start);
        out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return out;
}

bool parse_double(const std::string& token, double& value) {
    if (token.empty()) return false;
    const char* first = token.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
    return ec == std::errc() && ptr == token.data() + token.size();
}

std::ifstream open_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return in;
}

struct Attribute {
    std::string name;
    bool nominal = false;
    std::vector<std::string> values;
};

Attribute parse_attribute(const std::string& line, std::size_t line_no) {
    // line starts with "@attribute"
    std::string rest = trim(std::string_view(line).substr(10));
    Attribute a;
    std::size_t name_end = 0;
    if (!rest.empty() && (rest[0] == '\'' || rest[0] == '"')) {
        name_end = rest.find(rest[0], 1);
        if (name_end == std::string::npos) {
            throw Error(ErrorCode::MalformedHeader, "unterminated attribute name on line " + std::to_string(line_no));
        }
        a.name = rest.substr(1, name_end - 1);
        ++name_end;
    } else {
        while (name_end < rest.size() && !std::isspace(static_cast<unsigned char>(rest[name_end])) &&
               rest[name_end] != '{')
            ++name_end;
        a.name = rest.substr(0, name_end);
    }
    std::string type = trim(std::string_view(rest).substr(name_end));
    if (a.name.empty() || type.empty()) {
        throw Error(ErrorCode::MalformedHeader, "malformed @attribute on line " + std::to_string(line_no));
    }
    if (type[0] == '{') {
        auto close = type.find('}');
        if (close == std::string::npos) {
            throw Error(ErrorCode::MalformedHeader, "unterminated value list on line " + std::to_string(line_no));
        }
        a.nominal = true;
        for (auto& v : split(std::string_view(type).substr(1, close - 1), ','))
            if (!v.empty()) a.values.push_back(v);
        return a;
    }
    std::string kind = lower(type.substr(0, type.find_first_of(" \t[")));
    if (kind != "real" && kind != "integer" && kind != "numeric") {
        throw Error(ErrorCode::MalformedHeader, "unknown attribute type '" + kind + "' on line " +
                                                    std::to_string(line_no));
    }
    return a;
}

}  // namespace

Dataset parse_keel(std::istream& in, const KeelOptions& options) {
    std::vector<Attribute> attrs;
    std::string line;
    std::size_t line_no = 0;
    bool in_data = false;
    bool saw_relation = false;
    std::optional<std::string> output_name;
    std::size_t class_col = 0;
    std::vector<std::size_t> feature_cols;
    const std::string positive = lower(trim(options.positive_token));

    Matrix x;
    std::vector<Label> y;
    std::set<std::string> tokens;
    std::vector<double> row;

    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '%') continue;
        if (!in_data) {
            if (t[0] != '@') {
                throw Error(ErrorCode::MalformedHeader, "expected a header directive on line " + std::to_string(line_no));
            }
            std::string key = lower(t.substr(0, t.find_first_of(" \t{")));
            if (key == "@relation") {
                saw_relation = true;
            } else if (key == "@attribute") {
                attrs.push_back(parse_attribute(t, line_no));
            } else if (key == "@inputs" || key == "@input") {
                continue;
            } else if (key == "@outputs" || key == "@output") {
                output_name = trim(std::string_view(t).substr(key.size()));
            } else if (key == "@data") {
                if (attrs.size() < 2) throw Error(ErrorCode::MalformedHeader, "need at least one input and a class");
                class_col = attrs.size() - 1;
                if (output_name) {
                    auto it = std::find_if(attrs.begin(), attrs.end(),
                                           [&](const Attribute& a) { return a.name == *output_name; });
                    if (it == attrs.end()) {
                        throw Error(ErrorCode::MalformedHeader, "@outputs names unknown attribute " + *output_name);
                    }
                    class_col = static_cast<std::size_t>(it - attrs.begin());
                }
                if (!attrs[class_col].nominal) {
                    throw Error(ErrorCode::MalformedHeader, "class attribute must be nominal");
                }
                if (attrs[class_col].values.size() > 2) {
                    throw Error(ErrorCode::MoreThanTwoClasses,
                                "class attribute declares " + std::to_string(attrs[class_col].values.size()) + " values");
                }
                for (std::size_t c = 0; c < attrs.size(); ++c) {
                    if (c == class_col) continue;
                    if (attrs[c].nominal) {
                        if (options.drop_nominal) continue;
                        throw Error(ErrorCode::NonNumericAttribute, "attribute '" + attrs[c].name + "' is nominal");
                    }
                    feature_cols.push_back(c);
                }
                if (feature_cols.empty()) throw Error(ErrorCode::MalformedHeader, "no numeric attributes");
                x = Matrix(0, feature_cols.size());
                row.resize(feature_cols.size());
                in_data = true;
            } else {
                throw Error(ErrorCode::MalformedHeader, "unknown directive " + key + " on line " + std::to_string(line_no));
            }
            continue;
        }
        auto cells = split(t, ',');
        if (cells.size() != attrs.size()) {
            throw Error(ErrorCode::MalformedData, "line " + std::to_string(line_no) + " has " +
                                                      std::to_string(cells.size()) + " fields, expected " +
                                                      std::to_string(attrs.size()));
        }
        for (std::size_t k = 0; k < feature_cols.size(); ++k) {
            const auto& cell = cells[feature_cols[k]];
            if (cell == "?") throw Error(ErrorCode::MalformedData, "missing value on line " + std::to_string(line_no));
            if (!parse_double(cell, row[k])) {
                throw Error(ErrorCode::NonNumericAttribute, "'" + cell + "' is not numeric on line " +
                                                                std::to_string(line_no));
            }
        }
        std::string cls = lower(cells[class_col]);
        if (cls == "?" || cls.empty()) throw Error(ErrorCode::MalformedData, "missing class on line " + std::to_string(line_no));
        tokens.insert(cls);
        if (tokens.size() > 2) throw Error(ErrorCode::MoreThanTwoClasses, "more than two class tokens in data");
        x.append_row(row);
        y.push_back(cls == positive ? Label::Positive : Label::Negative);
    }
    if (!in_data) {
        throw Error(ErrorCode::MalformedHeader, saw_relation || !attrs.empty() ? "missing @data section"
                                                                              : "empty or non-KEEL input");
    }
    return Dataset(std::move(x), std::move(y));
}

Dataset parse_keel(const std::filesystem::path& path, const KeelOptions& options) {
    auto in = open_file(path);
    try {
        return parse_keel(in, options);
    } catch (const Error& e) {
        throw Error(e.code(), path.filename().string() + ": " + e.what());
    }
}

Dataset parse_csv(std::istream& in, const std::string& positive_token) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::MalformedHeader, "empty CSV input");
    auto header = split(line, ',');
    if (header.size() < 2) throw Error(ErrorCode::MalformedHeader, "CSV needs feature and label columns");
    const std::size_t label_col = header.size() - 1;
    std::optional<std::size_t> group_col;
    for (std::size_t c = 0; c < label_col; ++c)
        if (lower(header[c]) == "group") group_col = c;
    const std::size_t dims = label_col - (group_col ? 1 : 0);
    if (dims == 0) throw Error(ErrorCode::MalformedHeader, "CSV has no feature columns");

    const std::string positive = lower(trim(positive_token));
    Matrix x(0, dims);
    std::vector<Label> y;
    std::vector<std::int64_t> groups;
    std::set<std::string> tokens;
    std::vector<double> row(dims);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::MalformedData, "line " + std::to_string(line_no) + " has the wrong field count");
        }
        std::size_t k = 0;
        for (std::size_t c = 0; c < label_col; ++c) {
            double v = 0.0;
            if (!parse_double(cells[c], v)) {
                throw Error(cells[c] == "?" ? ErrorCode::MalformedData : ErrorCode::NonNumericAttribute,
                            "'" + cells[c] + "' is not numeric on line " + std::to_string(line_no));
            }
            if (group_col && c == *group_col) {
                groups.push_back(static_cast<std::int64_t>(v));
            } else {
                row[k++] = v;
            }
        }
        std::string cls = lower(cells[label_col]);
        if (cls == "+1") cls = "1";
        tokens.insert(cls);
        if (tokens.size() > 2) throw Error(ErrorCode::MoreThanTwoClasses, "more than two label values");
        x.append_row(row);
        y.push_back(cls == positive || cls == "1" || cls == "+1" ? Label::Positive : Label::Negative);
    }
    std::optional<std::vector<std::int64_t>> g;
    if (group_col) g = std::move(groups);
    return Dataset(std::move(x), std::move(y), std::move(g));
}

Dataset parse_csv(const std::filesystem::path& path, const std::string& positive_token) {
    auto in = open_file(path);
    return parse_csv(in, positive_token);
}

void DatasetManifest::validate() const {
    if (name.empty()) throw Error(ErrorCode::ConfigError, "manifest entry without a name");
    if (path.empty()) throw Error(ErrorCode::ConfigError, "manifest entry '" + name + "' has no path");
    if (trim(positive_label_token).empty()) {
        throw Error(ErrorCode::ConfigError, "manifest entry '" + name + "' has an empty positive label token");
    }
    if (expected_lambda && !(*expected_lambda > 0.0)) {
        throw Error(ErrorCode::ConfigError, "manifest entry '" + name + "' has a nonpositive expected_lambda");
    }
}

Dataset DatasetManifest::load() const {
    validate();
    if (format == DataFormat::Csv) return parse_csv(path, positive_label_token);
    return parse_keel(path, KeelOptions{positive_label_token, drop_nominal});
}

namespace {

void set_manifest_field(DatasetManifest& m, const std::string& key, const std::string& value) {
    if (key == "name") {
        m.name = value;
    } else if (key == "path") {
        m.path = value;
    } else if (key == "positive_label_token" || key == "positive") {
        m.positive_label_token = value;
    } else if (key == "expected_lambda") {
        double v = 0.0;
        if (!parse_double(value, v)) throw Error(ErrorCode::ConfigError, "expected_lambda must be a number");
        m.expected_lambda = v;
    } else if (key == "format") {
        auto f = lower(value);
        if (f == "keel") {
            m.format = DataFormat::Keel;
        } else if (f == "csv") {
            m.format = DataFormat::Csv;
        } else {
            throw Error(ErrorCode::ConfigError, "unknown format '" + value + "'");
        }
    } else if (key == "drop_nominal") {
        auto v = lower(value);
        if (v != "true" && v != "false" && v != "1" && v != "0") {
            throw Error(ErrorCode::ConfigError, "drop_nominal must be true or false");
        }
        m.drop_nominal = v == "true" || v == "1";
    } else {
        throw Error(ErrorCode::ConfigError, "unknown manifest key '" + key + "'");
    }
}

std::string json_scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
}

}  // namespace

std::vector<DatasetManifest> read_manifest(const std::filesystem::path& path) {
    auto in = open_file(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::vector<DatasetManifest> out;

    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
        }
        const nlohmann::json& list = j.is_object() && j.contains("datasets") ? j.at("datasets") : j;
        auto add = [&](const nlohmann::json& obj) {
            if (!obj.is_object()) throw Error(ErrorCode::ConfigError, "manifest entries must be objects");
            DatasetManifest m;
            for (auto& [k, v] : obj.items()) set_manifest_field(m, k, json_scalar(v));
            out.push_back(std::move(m));
        };
        if (list.is_array()) {
            for (const auto& obj : list) add(obj);
        } else {
            add(list);
        }
    } else {
        std::istringstream lines(text);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(lines, line)) {
            ++line_no;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[' && t.back() == ']') {
                out.emplace_back();
                out.back().name = trim(std::string_view(t).substr(1, t.size() - 2));
                continue;
            }
            auto eq = t.find('=');
            if (eq == std::string::npos) {
                throw Error(ErrorCode::ConfigError, path.string() + ":" + std::to_string(line_no) + ": expected key=value");
            }
            if (out.empty()) out.emplace_back();
            set_manifest_field(out.back(), trim(std::string_view(t).substr(0, eq)),
                               trim(std::string_view(t).substr(eq + 1)));
        }
    }
    for (auto& m : out) {
        if (m.path.is_relative()) m.path = path.parent_path() / m.path;
        m.validate();
    }
    if (out.empty()) throw Error(ErrorCode::ConfigError, path.string() + " lists no datasets");
    return out;
}

std::vector<Replication> make_2x5_folds(const Dataset& data, std::uint64_t seed) {
    if (data.m_pos() < 10 || data.m_neg() < 10) {
        throw Error(ErrorCode::TooFewSamples, "2x5-fold protocol needs at least 10 samples per class");
    }
    RngStream rng(seed);
    const auto halves = stratified_kfold(data, 2, rng.child(0));
    std::vector<Replication> out;
    for (std::size_t h = 0; h < 2; ++h) {
        const auto& design = halves[h].held_out;
        const auto& test = halves[1 - h].held_out;
        const Dataset design_data = data.subset(design);
        for (const auto& fold : stratified_kfold(design_data, 5, rng.child(1 + h))) {
            Replication r;
            for (std::size_t i : fold.train) r.train.push_back(design[i]);
            for (std::size_t i : fold.held_out) r.validation.push_back(design[i]);
            r.test = test;
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace pboost
