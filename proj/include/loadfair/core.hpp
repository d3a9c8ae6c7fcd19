#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "loadfair/errors.hpp"
#include "loadfair/rational.hpp"

namespace loadfair {

struct PointRec {
    std::string id;
    std::vector<double> coords;  // empty when the metric is explicit
    int group = 0;               // 0-based, in [0, num_groups)
};

struct FacilityRec {
    std::string id;
    std::vector<double> coords;
};

enum class MetricType { Euclidean, Explicit };

// An (alpha,beta)-fair min-load clustering instance. Immutable after
// load_/validate; solvers only read it, so concurrent trials are safe.
struct Instance {
    std::vector<PointRec> points;
    std::vector<FacilityRec> facilities;
    MetricType metric = MetricType::Euclidean;
    // Explicit metric over points then facilities, size (|P|+|F|)^2.
    std::vector<std::vector<double>> matrix;
    int k = 1;
    std::vector<Rational> alpha;
    std::vector<Rational> beta;

    int num_points() const { return static_cast<int>(points.size()); }
    int num_facilities() const { return static_cast<int>(facilities.size()); }
    int num_groups() const { return static_cast<int>(alpha.size()); }

    double point_facility_distance(int p, int f) const;
    double point_point_distance(int p, int q) const;

    // Point indices per group, ascending.
    const std::vector<std::vector<int>>& groups() const;

    // alpha == 1 and beta == 0 for every group: the fairness constraints
    // accept every assignment.
    bool fairness_vacuous() const;

    int facility_index(const std::string& id) const;  // -1 when unknown

private:
    mutable std::vector<std::vector<int>> group_cache_;
};

// Validates all instance invariants; throws ValidationError naming the
// offending field. Triangle-inequality validation of explicit matrices is
// O(n^3) and can be skipped for large inputs.
void validate_instance(const Instance& inst, bool check_triangle = true);

// ---- centers ----

// A cluster center: either one of the instance's facilities or, in the
// Euclidean mode, a free coordinate produced by a generator.
struct Center {
    int facility = -1;           // index into inst.facilities when >= 0
    std::vector<double> coords;  // used when facility < 0

    bool operator==(const Center& o) const { return facility == o.facility && coords == o.coords; }
};

using CenterSet = std::vector<Center>;

double center_distance(const Instance& inst, const Center& c, int point_idx);
std::string center_label(const Instance& inst, const Center& c, int position);
CenterSet centers_from_facilities(const Instance& inst, const std::vector<int>& facility_indices);

// ---- assignments ----

struct Assignment {
    CenterSet centers;
    std::vector<int> center_of;  // point index -> index into centers
};

// max over centers of the sum of true distances of assigned points.
double assignment_cost(const Instance& inst, const Assignment& a);

// Per-center true load and per-group counts, indexed like a.centers.
struct CenterLoad {
    double load = 0.0;
    long size = 0;
    std::vector<long> group_counts;
};
std::vector<CenterLoad> center_loads(const Instance& inst, const Assignment& a);

struct FairnessViolation {
    int center;
    int group;
    long group_count;
    long cluster_size;
    bool upper;  // true: count > alpha*size, false: count < beta*size
};

struct FairnessReport {
    bool fair = true;
    std::vector<FairnessViolation> violations;
};

// Exact rational comparison per used center and group:
//   beta_g * |cluster| <= |cluster ∩ P_g| <= alpha_g * |cluster|.
FairnessReport check_fairness(const Instance& inst, const Assignment& a);

// ---- clusterings ----

struct Clustering {
    std::vector<std::vector<int>> blocks;  // disjoint cover of the point indices
    std::vector<Center> centers;           // optional, one per block when present
};

double cluster_cost(const Instance& inst, const std::vector<int>& block, const Center& c);
// min over permutations of max_i cost_{c_j}(block_{i_j}); |C| == blocks required.
double clustering_cost_with_centers(const Instance& inst, const Clustering& cl, const CenterSet& cs);

// ---- serialization ----

Instance load_instance_json(std::istream& in, bool check_triangle = true);
Instance load_instance_json_file(const std::string& path, bool check_triangle = true);
// Points CSV: id,group,x1,...,xd. Facilities CSV: id,x1,...,xd.
// k/alpha/beta are not representable in the CSVs and are passed alongside.
Instance load_instance_csv(std::istream& points_csv, std::istream& facilities_csv, int k,
                           const std::vector<Rational>& alpha, const std::vector<Rational>& beta);
void save_instance_json(const Instance& inst, std::ostream& out);
std::string instance_digest(const Instance& inst);  // fnv1a64 over canonical JSON

}  // namespace loadfair
