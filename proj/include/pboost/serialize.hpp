#pragma once

#include <iosfwd>

#include "pboost/boosting.hpp"

namespace pboost {

/// JSON record with every member (alpha, loss, vote weight and the model
/// itself) and every iteration log.
void write_ensemble_json(std::ostream& out, const BoostedEnsemble& ensemble);
/// Inverse of write_ensemble_json. Throws MalformedData.
BoostedEnsemble read_ensemble_json(std::istream& in);

}  // namespace pboost
