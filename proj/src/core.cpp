#include "loadfair/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace loadfair {

using nlohmann::json;

double Instance::point_facility_distance(int p, int f) const {
    if (metric == MetricType::Explicit) return matrix[p][num_points() + f];
    const auto& a = points[p].coords;
    const auto& b = facilities[f].coords;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double Instance::point_point_distance(int p, int q) const {
    if (metric == MetricType::Explicit) return matrix[p][q];
    const auto& a = points[p].coords;
    const auto& b = points[q].coords;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

const std::vector<std::vector<int>>& Instance::groups() const {
    if (group_cache_.empty()) {
        group_cache_.assign(num_groups(), {});
        for (int j = 0; j < num_points(); ++j) group_cache_[points[j].group].push_back(j);
    }
    return group_cache_;
}

bool Instance::fairness_vacuous() const {
    for (const auto& a : alpha)
        if (!(a == Rational(1, 1))) return false;
    for (const auto& b : beta)
        if (!(b == Rational(0, 1))) return false;
    return true;
}

int Instance::facility_index(const std::string& id) const {
    for (int f = 0; f < num_facilities(); ++f)
        if (facilities[f].id == id) return f;
    return -1;
}

void validate_instance(const Instance& inst, bool check_triangle) {
    if (inst.points.empty()) throw ValidationError("no points");
    if (inst.facilities.empty()) throw ValidationError("no facilities");
    if (inst.k < 1) throw ValidationError("k must be >= 1");
    const int ell = inst.num_groups();
    if (ell < 1) throw ValidationError("alpha is empty (need at least one group)");
    if (static_cast<int>(inst.beta.size()) != ell)
        throw ValidationError("alpha and beta sizes differ");
    for (int g = 0; g < ell; ++g) {
        const auto& a = inst.alpha[g];
        const auto& b = inst.beta[g];
        if (a.num < 0 || !(a <= Rational(1, 1)))
            throw ValidationError("alpha[" + std::to_string(g) + "] outside [0,1]");
        if (b.num < 0 || !(b <= Rational(1, 1)))
            throw ValidationError("beta[" + std::to_string(g) + "] outside [0,1]");
        if (!(b <= a))
            throw ValidationError("beta[" + std::to_string(g) + "] exceeds alpha[" +
                                  std::to_string(g) + "]");
    }
    std::set<std::string> ids;
    for (const auto& p : inst.points)
        if (!ids.insert(p.id).second) throw ValidationError("duplicate point id '" + p.id + "'");
    ids.clear();
    for (const auto& f : inst.facilities)
        if (!ids.insert(f.id).second) throw ValidationError("duplicate facility id '" + f.id + "'");
    for (const auto& p : inst.points)
        if (p.group < 0 || p.group >= ell)
            throw ValidationError("point '" + p.id + "' has unknown group " +
                                  std::to_string(p.group));
    // Builds the lazy group cache while still single-threaded; the instance
    // is read concurrently by parallel solver trials afterwards.
    (void)inst.groups();

    if (inst.metric == MetricType::Euclidean) {
        std::size_t dim = inst.points[0].coords.size();
        if (dim == 0) throw ValidationError("euclidean metric requires point coordinates");
        for (const auto& p : inst.points)
            if (p.coords.size() != dim)
                throw ValidationError("point '" + p.id + "' has inconsistent dimension");
        for (const auto& f : inst.facilities)
            if (f.coords.size() != dim)
                throw ValidationError("facility '" + f.id + "' has inconsistent dimension");
        return;
    }

    const std::size_t n = inst.points.size() + inst.facilities.size();
    if (inst.matrix.size() != n) throw ValidationError("matrix must be (|P|+|F|) square");
    for (const auto& row : inst.matrix)
        if (row.size() != n) throw ValidationError("matrix must be (|P|+|F|) square");
    for (std::size_t i = 0; i < n; ++i) {
        if (inst.matrix[i][i] != 0.0)
            throw ValidationError("matrix diagonal nonzero at " + std::to_string(i));
        for (std::size_t j = 0; j < n; ++j) {
            const double d = inst.matrix[i][j];
            if (!(d >= 0.0) || !std::isfinite(d))
                throw ValidationError("matrix entry (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") negative or non-finite");
            if (d != inst.matrix[j][i])
                throw ValidationError("matrix asymmetric at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
        }
    }
    if (check_triangle) {
        // Tolerance absorbs representation noise in matrices produced by
        // closure constructions.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t m = 0; m < n; ++m)
                    if (inst.matrix[i][j] >
                        inst.matrix[i][m] + inst.matrix[m][j] + 1e-9 * (1.0 + inst.matrix[i][j]))
                        throw ValidationError("triangle inequality violated at (" +
                                              std::to_string(i) + "," + std::to_string(j) + "," +
                                              std::to_string(m) + ")");
    }
}

double center_distance(const Instance& inst, const Center& c, int point_idx) {
    if (c.facility >= 0) return inst.point_facility_distance(point_idx, c.facility);
    const auto& a = inst.points[point_idx].coords;
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - c.coords[i];
        s += d * d;
    }
    return std::sqrt(s);
}

std::string center_label(const Instance& inst, const Center& c, int position) {
    if (c.facility >= 0) return inst.facilities[c.facility].id;
    return "e" + std::to_string(position);
}

CenterSet centers_from_facilities(const Instance& inst, const std::vector<int>& facility_indices) {
    CenterSet cs;
    cs.reserve(facility_indices.size());
    for (int f : facility_indices) {
        if (f < 0 || f >= inst.num_facilities())
            throw ValidationError("facility index out of range: " + std::to_string(f));
        cs.push_back(Center{f, {}});
    }
    return cs;
}

double assignment_cost(const Instance& inst, const Assignment& a) {
    if (static_cast<int>(a.center_of.size()) != inst.num_points())
        throw ValidationError("assignment is not total over the points");
    std::vector<double> load(a.centers.size(), 0.0);
    for (int j = 0; j < inst.num_points(); ++j) {
        const int c = a.center_of[j];
        if (c < 0 || c >= static_cast<int>(a.centers.size()))
            throw ValidationError("point '" + inst.points[j].id + "' mapped to unknown center");
        load[c] += center_distance(inst, a.centers[c], j);
    }
    double best = 0.0;
    for (double l : load) best = std::max(best, l);
    return best;
}

std::vector<CenterLoad> center_loads(const Instance& inst, const Assignment& a) {
    std::vector<CenterLoad> out(a.centers.size());
    for (auto& cl : out) cl.group_counts.assign(inst.num_groups(), 0);
    for (int j = 0; j < inst.num_points(); ++j) {
        const int c = a.center_of[j];
        out[c].load += center_distance(inst, a.centers[c], j);
        out[c].size += 1;
        out[c].group_counts[inst.points[j].group] += 1;
    }
    return out;
}

FairnessReport check_fairness(const Instance& inst, const Assignment& a) {
    const auto loads = center_loads(inst, a);
    FairnessReport rep;
    for (std::size_t c = 0; c < loads.size(); ++c) {
        if (loads[c].size == 0) continue;
        for (int g = 0; g < inst.num_groups(); ++g) {
            const long cnt = loads[c].group_counts[g];
            const long size = loads[c].size;
            if (!inst.alpha[g].le_times(cnt, size))
                rep.violations.push_back({static_cast<int>(c), g, cnt, size, true});
            if (!inst.beta[g].ge_times(cnt, size))
                rep.violations.push_back({static_cast<int>(c), g, cnt, size, false});
        }
    }
    rep.fair = rep.violations.empty();
    return rep;
}

double cluster_cost(const Instance& inst, const std::vector<int>& block, const Center& c) {
    double s = 0.0;
    for (int j : block) s += center_distance(inst, c, j);
    return s;
}

double clustering_cost_with_centers(const Instance& inst, const Clustering& cl,
                                    const CenterSet& cs) {
    const int k = static_cast<int>(cl.blocks.size());
    if (static_cast<int>(cs.size()) != k)
        throw ValidationError("clustering/centers size mismatch");
    std::vector<std::vector<double>> cost(k, std::vector<double>(k, 0.0));
    for (int b = 0; b < k; ++b)
        for (int c = 0; c < k; ++c) cost[b][c] = cluster_cost(inst, cl.blocks[b], cs[c]);
    // Bottleneck matching over subsets; k stays small in this code path.
    const int full = 1 << k;
    std::vector<double> best(full, std::numeric_limits<double>::infinity());
    best[0] = 0.0;
    for (int mask = 0; mask < full; ++mask) {
        if (!std::isfinite(best[mask])) continue;
        int b = __builtin_popcount(static_cast<unsigned>(mask));
        if (b >= k) continue;
        for (int c = 0; c < k; ++c) {
            if (mask & (1 << c)) continue;
            const int nm = mask | (1 << c);
            best[nm] = std::min(best[nm], std::max(best[mask], cost[b][c]));
        }
    }
    return best[full - 1];
}

// ---- JSON ----

namespace {

Rational rational_from_json(const json& v, const std::string& field) {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number()) return Rational::from_double(v.get<double>());
    throw ParseError("field '" + field + "' must be a number or 'p/q' string");
}

std::vector<double> coords_from_json(const json& v) {
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ParseError("coords must be numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace

Instance load_instance_json(std::istream& in, bool check_triangle) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("instance JSON: ") + e.what());
    }
    Instance inst;
    try {
        if (!doc.contains("points") || !doc["points"].is_array())
            throw ParseError("missing 'points' array");
        for (const auto& p : doc["points"]) {
            PointRec rec;
            rec.id = p.at("id").get<std::string>();
            rec.group = p.value("group", 0);
            if (p.contains("coords")) rec.coords = coords_from_json(p["coords"]);
            inst.points.push_back(std::move(rec));
        }
        if (!doc.contains("facilities") || !doc["facilities"].is_array())
            throw ParseError("missing 'facilities' array");
        for (const auto& f : doc["facilities"]) {
            FacilityRec rec;
            rec.id = f.at("id").get<std::string>();
            if (f.contains("coords")) rec.coords = coords_from_json(f["coords"]);
            inst.facilities.push_back(std::move(rec));
        }
        const auto& metric = doc.at("metric");
        const std::string type = metric.at("type").get<std::string>();
        if (type == "euclidean") {
            inst.metric = MetricType::Euclidean;
        } else if (type == "explicit") {
            inst.metric = MetricType::Explicit;
            if (!metric.contains("matrix")) throw ParseError("explicit metric without 'matrix'");
            for (const auto& row : metric["matrix"]) {
                std::vector<double> r;
                for (const auto& x : row) r.push_back(x.get<double>());
                inst.matrix.push_back(std::move(r));
            }
        } else {
            throw ParseError("metric.type must be 'euclidean' or 'explicit'");
        }
        inst.k = doc.at("k").get<int>();
        for (const auto& a : doc.at("alpha")) inst.alpha.push_back(rational_from_json(a, "alpha"));
        for (const auto& b : doc.at("beta")) inst.beta.push_back(rational_from_json(b, "beta"));
    } catch (const json::exception& e) {
        throw ParseError(std::string("instance JSON: ") + e.what());
    }
    validate_instance(inst, check_triangle);
    return inst;
}

Instance load_instance_json_file(const std::string& path, bool check_triangle) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return load_instance_json(in, check_triangle);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

Instance load_instance_csv(std::istream& points_csv, std::istream& facilities_csv, int k,
                           const std::vector<Rational>& alpha,
                           const std::vector<Rational>& beta) {
    Instance inst;
    inst.k = k;
    inst.alpha = alpha;
    inst.beta = beta;
    std::string line;
    int lineno = 0;
    while (std::getline(points_csv, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < 3)
            throw ParseError("points CSV line " + std::to_string(lineno) +
                             ": need id,group,x1,...");
        PointRec rec;
        rec.id = cells[0];
        try {
            rec.group = std::stoi(cells[1]);
            for (std::size_t i = 2; i < cells.size(); ++i)
                rec.coords.push_back(std::stod(cells[i]));
        } catch (const std::exception&) {
            throw ParseError("points CSV line " + std::to_string(lineno) + ": bad number");
        }
        inst.points.push_back(std::move(rec));
    }
    lineno = 0;
    while (std::getline(facilities_csv, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < 2)
            throw ParseError("facilities CSV line " + std::to_string(lineno) + ": need id,x1,...");
        FacilityRec rec;
        rec.id = cells[0];
        try {
            for (std::size_t i = 1; i < cells.size(); ++i)
                rec.coords.push_back(std::stod(cells[i]));
        } catch (const std::exception&) {
            throw ParseError("facilities CSV line " + std::to_string(lineno) + ": bad number");
        }
        inst.facilities.push_back(std::move(rec));
    }
    inst.metric = MetricType::Euclidean;
    validate_instance(inst);
    return inst;
}

namespace {

json instance_to_json(const Instance& inst) {
    json doc;
    doc["points"] = json::array();
    for (const auto& p : inst.points) {
        json jp;
        jp["id"] = p.id;
        jp["group"] = p.group;
        if (!p.coords.empty()) jp["coords"] = p.coords;
        doc["points"].push_back(jp);
    }
    doc["facilities"] = json::array();
    for (const auto& f : inst.facilities) {
        json jf;
        jf["id"] = f.id;
        if (!f.coords.empty()) jf["coords"] = f.coords;
        doc["facilities"].push_back(jf);
    }
    if (inst.metric == MetricType::Euclidean) {
        doc["metric"] = {{"type", "euclidean"}};
    } else {
        doc["metric"] = {{"type", "explicit"}, {"matrix", inst.matrix}};
    }
    doc["k"] = inst.k;
    json ja = json::array(), jb = json::array();
    for (const auto& a : inst.alpha) ja.push_back(a.str());
    for (const auto& b : inst.beta) jb.push_back(b.str());
    doc["alpha"] = ja;
    doc["beta"] = jb;
    return doc;
}

}  // namespace

void save_instance_json(const Instance& inst, std::ostream& out) {
    out << std::setprecision(17) << instance_to_json(inst).dump(2) << "\n";
}

std::string instance_digest(const Instance& inst) {
    const std::string canonical = instance_to_json(inst).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace loadfair
