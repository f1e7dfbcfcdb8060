#include "spotter/genprecon.h"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace spotter {

namespace {

struct ClassAggregates {
    std::vector<double> sum;    // greedy-value mass per detection class
    std::vector<std::size_t> count;
    std::vector<uint32_t> seen; // classes with count > 0, canonical order

    // States are drawn from the q-table itself: a state the learner has
    // acted from has an entry, a state only ever arrived at does not.
    ClassAggregates(const TabularLearner &learner, const DetectionView &view) {
        sum.assign(view.classes.size(), 0.0);
        count.assign(view.classes.size(), 0);
        for (const auto &[id, row] : learner.q) {
            uint32_t cls = view.detection_class(id);
            if (cls == kNoDetection)
                continue;
            sum[cls] += *std::max_element(row.begin(), row.end());
            count[cls] += 1;
        }
        for (uint32_t cls = 0; cls < count.size(); ++cls)
            if (count[cls] > 0)
                seen.push_back(cls);
        std::sort(seen.begin(), seen.end(), [&](uint32_t a, uint32_t b) {
            return view.classes[a] < view.classes[b];
        });
    }

    // (mean value, supporting state count) for states covering pfs.
    std::pair<double, std::size_t> value(const PartialFluentState &pfs,
                                         const DetectionView &view) const {
        double total = 0.0;
        std::size_t states = 0;
        for (uint32_t cls : seen) {
            if (pfs.subset_of(view.classes[cls])) {
                total += sum[cls];
                states += count[cls];
            }
        }
        if (states == 0)
            return {0.0, 0};
        return {total / static_cast<double>(states), states};
    }
};

} // namespace

std::vector<FluentState> been_states(const TabularLearner &learner,
                                     const DetectionView &view) {
    ClassAggregates agg(learner, view);
    std::vector<FluentState> out;
    out.reserve(agg.seen.size());
    for (uint32_t cls : agg.seen)
        out.push_back(view.classes[cls]);
    return out;
}

double value_of(const PartialFluentState &pfs, const TabularLearner &learner,
                const DetectionView &view) {
    ClassAggregates agg(learner, view);
    return agg.value(pfs, view).first;
}

std::vector<PreconditionCandidate> gen_precon(
    const TabularLearner &learner, const DetectionView &view,
    const std::vector<PartialFluentState> &sigma_reach, double tau,
    std::size_t budget) {
    ClassAggregates agg(learner, view);

    std::vector<PreconditionCandidate> accepted;
    std::unordered_set<PartialFluentState, PartialFluentStateHash> member;
    std::deque<PartialFluentState> queue;

    auto admit = [&](const PartialFluentState &pfs, double value, std::size_t support) {
        if (member.count(pfs))
            return;
        member.insert(pfs);
        queue.push_back(pfs);
        accepted.push_back({pfs, value, support});
    };

    // Seed with the above-threshold reachable states (canonical order).
    std::vector<PartialFluentState> seeds = sigma_reach;
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    for (const PartialFluentState &seed : seeds) {
        auto [value, support] = agg.value(seed, view);
        if (value > tau)
            admit(seed, value, support);
    }

    std::size_t expanded = 0;
    while (!queue.empty() && expanded < budget) {
        PartialFluentState node = queue.front();
        queue.pop_front();
        ++expanded;
        for (uint32_t cls : agg.seen) {
            PartialFluentState common = node.intersect(view.classes[cls]);
            if (member.count(common))
                continue;
            auto [value, support] = agg.value(common, view);
            if (value > tau)
                admit(common, value, support);
        }
    }
    return accepted;
}

bool dominates(const Operator &a, const Operator &b) {
    if (a.eff != b.eff)
        throw EffectMismatch("domination compares operators with equal effects: " +
                             a.name + " vs " + b.name);
    return a.pre != b.pre && a.pre.subset_of(b.pre);
}

} // namespace spotter
