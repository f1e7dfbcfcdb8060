#ifndef SPOTTER_GENPRECON_H
#define SPOTTER_GENPRECON_H

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spotter/fluents.h"
#include "spotter/operators.h"
#include "spotter/rl.h"

namespace spotter {

class EffectMismatch : public std::runtime_error {
public:
    explicit EffectMismatch(const std::string &what) : std::runtime_error(what) {}
};

inline constexpr uint32_t kNoDetection = UINT32_MAX;

// Detections of interned states, grouped into classes so that states with
// equal detections share one entry. class_of is indexed by StateId.
struct DetectionView {
    std::vector<uint32_t> class_of;
    std::vector<FluentState> classes;

    uint32_t detection_class(StateId id) const {
        return id < class_of.size() ? class_of[id] : kNoDetection;
    }
};

// Deduplicated detections of the states in the learner's q-table.
std::vector<FluentState> been_states(const TabularLearner &learner,
                                     const DetectionView &view);

// Mean greedy value over the q-table states whose detection covers the
// partial state; 0 when none does.
double value_of(const PartialFluentState &pfs, const TabularLearner &learner,
                const DetectionView &view);

struct PreconditionCandidate {
    PartialFluentState literals;
    double avg_value = 0.0;
    std::size_t support = 0; // states contributing to the average
};

/*
  Graph search over candidate precondition sets. Seeds are the reachable
  states whose average value beats tau; expansion intersects a node with
  each visited ("been") detection and admits above-threshold results.
  `budget` caps the number of expanded nodes; 0 returns the seeds alone.
  The search is anytime: a larger budget only extends the output.
*/
std::vector<PreconditionCandidate> gen_precon(
    const TabularLearner &learner, const DetectionView &view,
    const std::vector<PartialFluentState> &sigma_reach, double tau,
    std::size_t budget);

// a dominates b: same effects, strictly fewer (subset) preconditions.
bool dominates(const Operator &a, const Operator &b);

} // namespace spotter

#endif
