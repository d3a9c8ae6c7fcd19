#include "loadfair/centers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "json.hpp"
#include "loadfair/rng.hpp"

namespace loadfair::centers {

std::uint64_t list_cap(int k, double eps, const GenConfig& cfg) {
    const double v = std::pow(cfg.cap_base * k / eps, k);
    if (v > 5e8) return 500'000'000ULL;
    return static_cast<std::uint64_t>(std::ceil(v));
}

int metric_samples_per_round(int k, double eps, const GenConfig& cfg) {
    const double ratio = std::max(static_cast<double>(k) / eps, 2.0);
    return static_cast<int>(std::ceil(cfg.sample_factor * (k / eps) * std::log(ratio)));
}

int euclidean_samples_per_round(int k, double eps, const GenConfig& cfg) {
    const double ratio = std::max(static_cast<double>(k) / eps, 2.0);
    return static_cast<int>(
        std::ceil(cfg.euclid_factor * (k / (eps * eps * eps)) * std::log(ratio)));
}

CenterList exhaustive_centers(const Instance& inst, std::uint64_t cap) {
    const int nf = inst.num_facilities();
    const int k = inst.k;
    if (k > nf) throw ValidationError("k exceeds |F|");
    std::uint64_t count = 1;
    for (int i = 0; i < k; ++i) {
        count = count * static_cast<std::uint64_t>(nf - i) / (i + 1);
        if (count > cap)
            throw CapExceededError("exhaustive center list exceeds the cap; use a sampled mode");
    }
    CenterList list;
    list.provenance = Provenance::Exhaustive;
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    for (;;) {
        list.sets.push_back(centers_from_facilities(inst, pick));
        int i = k - 1;
        while (i >= 0 && pick[i] == nf - k + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return list;
}

namespace {

// distance of point j to the nearest chosen facility, +inf when none chosen
double partial_distance_fac(const Instance& inst, const std::vector<int>& chosen, int j) {
    if (chosen.empty()) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (int f : chosen) best = std::min(best, inst.point_facility_distance(j, f));
    return best;
}

}  // namespace

CenterList metric_candidate_centers(const Instance& inst, double eps, std::uint64_t seed,
                                    const GenConfig& cfg) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("epsilon must lie in (0,1)");
    const int k = inst.k;
    const int n = inst.num_points();
    const int nf = inst.num_facilities();
    if (k > nf) throw ValidationError("k exceeds |F|");

    CenterList list;
    list.provenance = Provenance::MetricSampled;
    list.seed = seed;
    const std::uint64_t cap = list_cap(k, eps, cfg);
    const int m = metric_samples_per_round(k, eps, cfg);
    std::set<std::vector<int>> emitted;

    std::vector<int> chosen;
    std::function<void(Rng)> descend = [&](Rng rng) {
        if (list.sets.size() >= cap) return;
        if (static_cast<int>(chosen.size()) == k) {
            std::vector<int> key = chosen;
            std::sort(key.begin(), key.end());
            if (emitted.insert(key).second) list.sets.push_back(centers_from_facilities(inst, key));
            return;
        }
        // Distance-weighted sample (uniform before the first pick).
        std::vector<double> weights(n, 1.0);
        if (!chosen.empty())
            for (int j = 0; j < n; ++j) weights[j] = partial_distance_fac(inst, chosen, j);
        std::vector<int> pool;
        std::set<int> in_pool(chosen.begin(), chosen.end());
        for (int s = 0; s < m; ++s) {
            const int p = rng.sample_discrete(weights);
            const double dd = partial_distance_fac(inst, chosen, p);
            // nearby facilities of the sample, nearest first
            std::vector<std::pair<double, int>> cand;
            for (int f = 0; f < nf; ++f) cand.emplace_back(inst.point_facility_distance(p, f), f);
            std::sort(cand.begin(), cand.end());
            int taken = 0;
            for (const auto& [df, f] : cand) {
                const bool nearest = taken == 0;
                if (!nearest && df > dd) break;
                if (taken >= cfg.per_sample_facilities) break;
                ++taken;
                if (in_pool.insert(f).second) pool.push_back(f);
            }
        }
        std::sort(pool.begin(), pool.end());
        if (pool.empty()) {
            for (int f = 0; f < nf; ++f)
                if (!in_pool.count(f)) {
                    pool.push_back(f);
                    break;
                }
        }
        for (int f : pool) {
            if (list.sets.size() >= cap) return;
            chosen.push_back(f);
            descend(rng.split());
            chosen.pop_back();
        }
    };
    descend(Rng(seed));
    return list;
}

CenterList euclidean_candidate_centers(const Instance& inst, double eps, std::uint64_t seed,
                                       const GenConfig& cfg) {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("epsilon must lie in (0,1)");
    if (inst.metric != MetricType::Euclidean || inst.points[0].coords.empty())
        throw ValidationError("euclidean center generation requires coordinates");
    const int k = inst.k;
    const int n = inst.num_points();

    CenterList list;
    list.provenance = Provenance::EuclideanSampled;
    list.seed = seed;
    const std::uint64_t cap = list_cap(k, eps, cfg);
    const int m = euclidean_samples_per_round(k, eps, cfg);
    const int subset_size = static_cast<int>(std::ceil(2.0 / eps));
    const int secondary = subset_size + 2;

    double diameter = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) diameter = std::max(diameter, inst.point_point_distance(a, b));

    auto dist_to_centers = [&](const std::vector<Center>& cs, int j) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : cs) best = std::min(best, center_distance(inst, c, j));
        return best;
    };

    std::vector<Center> chosen;
    std::function<void(Rng)> descend = [&](Rng rng) {
        if (list.sets.size() >= cap) return;
        if (static_cast<int>(chosen.size()) == k) {
            list.sets.push_back(chosen);
            return;
        }
        // half uniform, half distance-weighted once centers exist
        std::vector<double> weights(n, 1.0);
        if (!chosen.empty())
            for (int j = 0; j < n; ++j) weights[j] = dist_to_centers(chosen, j);
        std::vector<int> sample;
        for (int s = 0; s < m; ++s) {
            const bool uniform = chosen.empty() || s % 2 == 0;
            sample.push_back(uniform ? static_cast<int>(rng.next_below(n))
                                     : rng.sample_discrete(weights));
        }
        // secondary subsample: first distinct draws
        std::vector<int> distinct;
        for (int p : sample)
            if (std::find(distinct.begin(), distinct.end(), p) == distinct.end())
                distinct.push_back(p);
        if (static_cast<int>(distinct.size()) > secondary) distinct.resize(secondary);
        const int q = std::min<int>(subset_size, static_cast<int>(distinct.size()));

        // every size-q subset contributes its best in-subset 1-median point
        std::vector<int> pool;
        std::vector<int> comb(q);
        for (int i = 0; i < q; ++i) comb[i] = i;
        if (q > 0) {
            for (;;) {
                int best_p = -1;
                double best_cost = std::numeric_limits<double>::infinity();
                for (int a = 0; a < q; ++a) {
                    double c = 0.0;
                    for (int b = 0; b < q; ++b)
                        c += inst.point_point_distance(distinct[comb[a]], distinct[comb[b]]);
                    if (c < best_cost - 1e-15 ||
                        (c <= best_cost + 1e-15 && (best_p < 0 || distinct[comb[a]] < best_p))) {
                        best_cost = c;
                        best_p = distinct[comb[a]];
                    }
                }
                if (std::find(pool.begin(), pool.end(), best_p) == pool.end())
                    pool.push_back(best_p);
                int i = q - 1;
                while (i >= 0 && comb[i] == static_cast<int>(distinct.size()) - q + i) --i;
                if (i < 0) break;
                ++comb[i];
                for (int j2 = i + 1; j2 < q; ++j2) comb[j2] = comb[j2 - 1] + 1;
            }
        }
        std::sort(pool.begin(), pool.end());
        for (int p : pool) {
            if (list.sets.size() >= cap) return;
            Center c;
            c.coords = inst.points[p].coords;
            bool dup = false;
            for (const auto& prev : chosen) dup |= prev.coords == c.coords;
            if (dup) {
                // degenerate cloud: offset along the first axis keeps the
                // set distinct without moving it meaningfully
                c.coords[0] += std::max(diameter, 1.0) * 1e-9 *
                               static_cast<double>(chosen.size() + 1);
            }
            chosen.push_back(c);
            descend(rng.split());
            chosen.pop_back();
        }
        if (pool.empty() && !chosen.empty()) {
            // all mass already covered; reuse the first chosen center offset
            Center c = chosen.front();
            c.coords[0] += std::max(diameter, 1.0) * 1e-9 * static_cast<double>(chosen.size() + 1);
            chosen.push_back(c);
            descend(rng.split());
            chosen.pop_back();
        }
    };
    descend(Rng(seed));
    return list;
}

std::string center_list_to_json(const Instance& inst, const CenterList& list) {
    nlohmann::json doc;
    doc["provenance"] = list.provenance == Provenance::Exhaustive        ? "exhaustive"
                        : list.provenance == Provenance::MetricSampled   ? "metric_sampled"
                                                                         : "euclidean_sampled";
    doc["seed"] = list.seed;
    nlohmann::json sets = nlohmann::json::array();
    for (const auto& cs : list.sets) {
        nlohmann::json set = nlohmann::json::array();
        for (const auto& c : cs) {
            if (c.facility >= 0)
                set.push_back(inst.facilities[c.facility].id);
            else
                set.push_back(c.coords);
        }
        sets.push_back(set);
    }
    doc["sets"] = sets;
    return doc.dump(2);
}

CenterList center_list_from_json(const Instance& inst, const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("center list JSON: ") + e.what());
    }
    CenterList list;
    const std::string prov = doc.value("provenance", "exhaustive");
    list.provenance = prov == "metric_sampled"      ? Provenance::MetricSampled
                      : prov == "euclidean_sampled" ? Provenance::EuclideanSampled
                                                    : Provenance::Exhaustive;
    list.seed = doc.value("seed", std::uint64_t{0});
    for (const auto& set : doc.at("sets")) {
        CenterSet cs;
        for (const auto& entry : set) {
            Center c;
            if (entry.is_string()) {
                c.facility = inst.facility_index(entry.get<std::string>());
                if (c.facility < 0)
                    throw ParseError("unknown facility id '" + entry.get<std::string>() + "'");
            } else {
                for (const auto& v : entry) c.coords.push_back(v.get<double>());
            }
            cs.push_back(std::move(c));
        }
        list.sets.push_back(std::move(cs));
    }
    return list;
}

}  // namespace loadfair::centers
