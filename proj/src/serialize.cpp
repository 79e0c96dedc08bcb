#include "pboost/serialize.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "pboost/error.hpp"

namespace pboost {

using nlohmann::json;

namespace {

json model_json(const Classifier& model) {
    if (const auto* svm = dynamic_cast<const SvmModel*>(&model)) {
        json sv = json::array();
        for (std::size_t r = 0; r < svm->support_vectors().rows(); ++r) {
            auto row = svm->support_vectors().row(r);
            sv.push_back(std::vector<double>(row.begin(), row.end()));
        }
        return {{"kind", "svm"},
                {"kappa", svm->kappa()},
                {"bias", svm->bias()},
                {"converged", svm->converged()},
                {"iterations", svm->iterations()},
                {"dual_coefficients", svm->dual_coefficients()},
                {"support_vectors", std::move(sv)}};
    }
    if (const auto* c = dynamic_cast<const ConstantClassifier*>(&model)) {
        return {{"kind", "constant"}, {"label", to_int(c->label())}};
    }
    throw Error(ErrorCode::InvalidArgument, "cannot serialize model of kind " + std::string(model.kind()));
}

std::shared_ptr<const Classifier> model_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        return std::make_shared<ConstantClassifier>(label_from_sign(j.at("label").get<double>()));
    }
    if (kind != "svm") throw Error(ErrorCode::MalformedData, "unknown model kind " + kind);
    Matrix sv;
    for (const auto& row : j.at("support_vectors")) sv.append_row(row.get<std::vector<double>>());
    return std::make_shared<SvmModel>(std::move(sv), j.at("dual_coefficients").get<std::vector<double>>(),
                                      j.at("bias").get<double>(), j.at("kappa").get<double>(),
                                      j.at("converged").get<bool>(), j.at("iterations").get<std::size_t>());
}

}  // namespace

void write_ensemble_json(std::ostream& out, const BoostedEnsemble& ensemble) {
    json members = json::array();
    for (const auto& m : ensemble.members) {
        members.push_back({{"alpha", m.alpha},
                           {"loss", m.loss},
                           {"vote_weight", m.vote_weight},
                           {"model", model_json(*m.model)}});
    }
    json logs = json::array();
    for (const auto& l : ensemble.logs) {
        logs.push_back({{"iteration", l.iteration},
                        {"retries", l.retries},
                        {"accepted", l.accepted},
                        {"exhausted", l.exhausted},
                        {"n_tr", l.n_tr},
                        {"n_val", l.n_val},
                        {"n_sv", l.n_sv},
                        {"loss", l.loss}});
    }
    out << json{{"members", std::move(members)}, {"logs", std::move(logs)}}.dump() << '\n';
}

BoostedEnsemble read_ensemble_json(std::istream& in) {
    try {
        json j = json::parse(in);
        BoostedEnsemble e;
        for (const auto& m : j.at("members")) {
            EnsembleMember member;
            member.alpha = m.at("alpha").get<double>();
            member.loss = m.at("loss").get<double>();
            member.vote_weight = m.at("vote_weight").get<double>();
            member.model = model_from_json(m.at("model"));
            e.members.push_back(std::move(member));
        }
        for (const auto& l : j.at("logs")) {
            IterationLog log;
            log.iteration = l.at("iteration").get<std::size_t>();
            log.retries = l.at("retries").get<std::size_t>();
            log.accepted = l.at("accepted").get<bool>();
            log.exhausted = l.at("exhausted").get<bool>();
            log.n_tr = l.at("n_tr").get<std::size_t>();
            log.n_val = l.at("n_val").get<std::size_t>();
            log.n_sv = l.at("n_sv").get<std::size_t>();
            log.loss = l.at("loss").get<double>();
            e.logs.push_back(log);
        }
        return e;
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::MalformedData, std::string("ensemble JSON: ") + ex.what());
    }
}

}  // namespace pboost
