#include <cmath>

#include "vecdraw/error.hpp"
#include "vecdraw/metrics.hpp"

namespace vecdraw {

bool preservation_check(const SvgDocument& partial, const SvgDocument& output) {
    if (partial.paths.size() > output.paths.size()) return false;
    for (std::size_t i = 0; i < partial.paths.size(); ++i) {
        if (serialize_path_element(partial.paths[i]) != serialize_path_element(output.paths[i])) return false;
    }
    return true;
}

std::size_t select_best(const std::vector<double>& values, bool higher_better) {
    if (values.empty()) throw Error(ErrorCode::EmptyCandidateSet, "no candidates to select from");
    std::size_t best = 0;
    bool have = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (std::isnan(v)) continue;
        if (!have || (higher_better ? v > values[best] : v < values[best])) {
            best = i;
            have = true;
        }
    }
    return best;
}

std::size_t select_best(const std::vector<Score>& scores) {
    if (scores.empty()) throw Error(ErrorCode::EmptyCandidateSet, "no candidates to select from");
    std::vector<double> values;
    values.reserve(scores.size());
    for (const auto& s : scores) {
        if (s.metric != scores.front().metric) {
            throw Error(ErrorCode::InvalidArgument, "cannot rank " + s.metric + " against " + scores.front().metric);
        }
        values.push_back(s.value);
    }
    return select_best(values, higher_is_better(scores.front().metric));
}

}  // namespace vecdraw
