#pragma once

#include <cstdint>
#include <vector>

#include "loadfair/core.hpp"

namespace loadfair::centers {

enum class Provenance { Exhaustive, MetricSampled, EuclideanSampled };

struct CenterList {
    std::vector<CenterSet> sets;
    Provenance provenance = Provenance::Exhaustive;
    std::uint64_t seed = 0;
};

struct GenConfig {
    // metric rounds draw ceil(sample_factor * (k/eps) * ln(max(k/eps, 2))) points
    double sample_factor = 4.0;
    // euclidean rounds draw ceil(euclid_factor * (k/eps^3) * ln(max(k/eps, 2)))
    double euclid_factor = 2.0;
    // at most this many facilities enter the pool per sampled point
    int per_sample_facilities = 4;
    // list size cap: ceil((cap_base * k / eps)^k)
    double cap_base = 8.0;
};

std::uint64_t list_cap(int k, double eps, const GenConfig& cfg = {});
int metric_samples_per_round(int k, double eps, const GenConfig& cfg = {});
int euclidean_samples_per_round(int k, double eps, const GenConfig& cfg = {});

// All k-subsets of F, each exactly once, lexicographic by facility index.
CenterList exhaustive_centers(const Instance& inst, std::uint64_t cap = 200000);

// Iterative distance sampling over the facilities: k rounds, each sampling
// points proportionally to their distance to the partial set (uniform in
// round one), mapping samples to nearby facilities, and branching over the
// round's pool. Reproducible from (instance, eps, seed).
CenterList metric_candidate_centers(const Instance& inst, double eps, std::uint64_t seed,
                                    const GenConfig& cfg = {});

// Coordinate-center generation: per round a uniform + distance-sampled
// point sample, subsets of a secondary subsample each contributing their
// best in-subset point, branching as above.
CenterList euclidean_candidate_centers(const Instance& inst, double eps, std::uint64_t seed,
                                       const GenConfig& cfg = {});

// JSON round-trip (facility ids or raw coordinates) so sampled lists can be
// replayed without re-running the generator.
std::string center_list_to_json(const Instance& inst, const CenterList& list);
CenterList center_list_from_json(const Instance& inst, const std::string& text);

}  // namespace loadfair::centers
