#include "clustersym/network_io.hpp"

#include "clustersym/errors.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>

namespace clustersym {

namespace {

using nlohmann::json;

void only_keys(const json& j, std::string_view what, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) {
        throw ParseError(std::string(what) + " must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw ParseError(std::string(what) + " has unknown field '" + key + "'");
        }
    }
}

const json& required(const json& j, const char* key, std::string_view what) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ParseError(std::string(what) + " is missing '" + key + "'");
    }
    return *it;
}

double number(const json& j, std::string_view what) {
    if (!j.is_number()) {
        throw ParseError(std::string(what) + " must be a number");
    }
    const double x = j.get<double>();
    if (!std::isfinite(x)) {
        throw ParseError(std::string(what) + " must be finite");
    }
    return x;
}

int positive_id(const json& j, std::string_view what) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 1 || j.get<std::int64_t>() > 1'000'000) {
        throw ParseError(std::string(what) + " must be a positive integer");
    }
    return static_cast<int>(j.get<std::int64_t>());
}

Tail tail_from_json(const json& j, std::string_view what) {
    if (j.is_string()) {
        if (j == "vertical") {
            return Tail::vertical();
        }
        if (j == "horizontal") {
            return Tail::horizontal();
        }
        throw ParseError(std::string(what) + " must be \"vertical\", \"horizontal\" or {\"slope\": s}");
    }
    only_keys(j, what, {"slope"});
    const double s = number(required(j, "slope", what), std::string(what) + ".slope");
    if (s < 0.0) {
        throw ParseError(std::string(what) + " slope must be nonnegative");
    }
    return Tail::with_slope(s);
}

json tail_to_json(const Tail& t) {
    switch (t.kind) {
        case Tail::Kind::Vertical:
            return "vertical";
        case Tail::Kind::Horizontal:
            return "horizontal";
        case Tail::Kind::Slope:
            break;
    }
    return json{{"slope", t.slope}};
}

std::optional<std::string> class_label(const json& j, std::string_view what) {
    auto it = j.find("class");
    if (it == j.end()) {
        return std::nullopt;
    }
    if (!it->is_string()) {
        throw ParseError(std::string(what) + ".class must be a string");
    }
    return it->get<std::string>();
}

}  // namespace

json relation_to_json(const MonotoneRelation& r) {
    json verts = json::array();
    for (const Point& p : r.vertices()) {
        verts.push_back(json::array({p.u, p.y}));
    }
    return json{{"vertices", verts}, {"left_tail", tail_to_json(r.left_tail())}, {"right_tail", tail_to_json(r.right_tail())}};
}

MonotoneRelation relation_from_json(const json& j) {
    if (!j.is_object()) {
        throw ParseError("relation literal must be an object");
    }
    if (j.contains("affine")) {
        only_keys(j, "relation", {"affine"});
        const json& a = j["affine"];
        only_keys(a, "affine", {"a", "b"});
        const double slope = number(required(a, "a", "affine"), "affine.a");
        const double offset = number(required(a, "b", "affine"), "affine.b");
        if (slope < 0.0) {
            throw InvalidRelation("affine slope must be nonnegative");
        }
        return MonotoneRelation::affine(slope, offset);
    }
    if (j.contains("named")) {
        only_keys(j, "relation", {"named"});
        if (!j["named"].is_string()) {
            throw ParseError("named relation must be a string");
        }
        return named_relation(j["named"].get<std::string>());
    }
    only_keys(j, "relation", {"vertices", "left_tail", "right_tail"});
    const json& verts = required(j, "vertices", "relation");
    if (!verts.is_array() || verts.empty()) {
        throw ParseError("relation vertices must be a nonempty array");
    }
    std::vector<Point> pts;
    for (const json& p : verts) {
        if (!p.is_array() || p.size() != 2) {
            throw ParseError("relation vertex must be a pair [u, y]");
        }
        pts.push_back({number(p[0], "vertex u"), number(p[1], "vertex y")});
    }
    return MonotoneRelation::canonicalize(std::move(pts), tail_from_json(required(j, "left_tail", "relation"), "left_tail"),
                                          tail_from_json(required(j, "right_tail", "relation"), "right_tail"));
}

Attachment attachment_from_json(const json& j) {
    if (j.is_object() && j.contains("model")) {
        only_keys(j, "model reference", {"model", "params"});
        if (!j["model"].is_string()) {
            throw ParseError("model name must be a string");
        }
        std::map<std::string, double> params;
        if (auto it = j.find("params"); it != j.end()) {
            if (!it->is_object()) {
                throw ParseError("model params must be an object");
            }
            for (const auto& [key, value] : it->items()) {
                params[key] = number(value, "model parameter '" + key + "'");
            }
        }
        return Attachment::from_model(make_builtin_model(j["model"].get<std::string>(), params), j);
    }
    return Attachment::from_relation(relation_from_json(j), j);
}

double draw_common_input(const CommonRandomInput& range, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return range.low + (range.high - range.low) * unit;
}

Network parse_network(const json& j, std::uint64_t seed) {
    only_keys(j, "network", {"vertices", "edges", "assumption", "common_random_input"});
    const json& jv = required(j, "vertices", "network");
    const json& je = required(j, "edges", "network");
    if (!jv.is_array() || jv.empty()) {
        throw ParseError("vertices must be a nonempty array");
    }
    if (!je.is_array()) {
        throw ParseError("edges must be an array");
    }
    const json& ja = required(j, "assumption", "network");
    Assumption assumption;
    if (ja == "A1") {
        assumption = Assumption::OutputStrictAgents;
    } else if (ja == "A2") {
        assumption = Assumption::OutputStrictControllers;
    } else {
        throw ParseError("assumption must be \"A1\" or \"A2\"");
    }

    const std::size_t n = jv.size();
    const std::size_t m = je.size();
    std::vector<std::optional<Attachment>> agents(n);
    std::vector<double> w(n, 0.0);
    for (const json& v : jv) {
        only_keys(v, "vertex", {"id", "agent", "w", "class"});
        const int id = positive_id(required(v, "id", "vertex"), "vertex id");
        const std::string what = "vertex " + std::to_string(id);
        if (static_cast<std::size_t>(id) > n || agents[static_cast<std::size_t>(id - 1)]) {
            throw ParseError(what + ": ids must be 1.." + std::to_string(n) + " without repeats");
        }
        Attachment a = attachment_from_json(required(v, "agent", what));
        a.label = class_label(v, what);
        agents[static_cast<std::size_t>(id - 1)] = std::move(a);
        if (auto it = v.find("w"); it != v.end()) {
            w[static_cast<std::size_t>(id - 1)] = number(*it, what + ".w");
        }
    }
    std::vector<std::optional<Attachment>> controllers(m);
    std::vector<Edge> edges(m);
    for (const json& e : je) {
        only_keys(e, "edge", {"id", "head", "tail", "controller", "class"});
        const int id = positive_id(required(e, "id", "edge"), "edge id");
        const std::string what = "edge " + std::to_string(id);
        if (static_cast<std::size_t>(id) > m || controllers[static_cast<std::size_t>(id - 1)]) {
            throw ParseError(what + ": ids must be 1.." + std::to_string(m) + " without repeats");
        }
        const int head = positive_id(required(e, "head", what), what + ".head");
        const int tail = positive_id(required(e, "tail", what), what + ".tail");
        if (static_cast<std::size_t>(head) > n || static_cast<std::size_t>(tail) > n) {
            throw ParseError(what + " references a missing vertex");
        }
        edges[static_cast<std::size_t>(id - 1)] = {head - 1, tail - 1};
        Attachment a = attachment_from_json(required(e, "controller", what));
        a.label = class_label(e, what);
        controllers[static_cast<std::size_t>(id - 1)] = std::move(a);
    }

    std::optional<CommonRandomInput> random;
    if (auto it = j.find("common_random_input"); it != j.end()) {
        only_keys(*it, "common_random_input", {"low", "high"});
        CommonRandomInput r;
        r.low = number(required(*it, "low", "common_random_input"), "common_random_input.low");
        r.high = number(required(*it, "high", "common_random_input"), "common_random_input.high");
        if (r.high < r.low) {
            throw ParseError("common_random_input needs low <= high");
        }
        r.seed = seed;
        r.value = draw_common_input(r, seed);
        r.declared = w;
        for (double& wi : w) {
            wi += r.value;
        }
        random = std::move(r);
    }

    std::vector<Attachment> ag;
    std::vector<Attachment> ct;
    for (auto& a : agents) {
        ag.push_back(std::move(*a));
    }
    for (auto& c : controllers) {
        ct.push_back(std::move(*c));
    }
    Network net(Graph(static_cast<int>(n), std::move(edges)), std::move(ag), std::move(ct), std::move(w), assumption);
    net.set_random_input(std::move(random));
    return net;
}

Network load_network(const std::filesystem::path& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return parse_network(j, seed);
}

json network_to_json(const Network& net) {
    const auto& random = net.random_input();
    const std::vector<double>& w = random ? random->declared : net.exogenous();
    json jv = json::array();
    for (int i = 0; i < net.vertex_count(); ++i) {
        const Attachment& a = net.agents()[static_cast<std::size_t>(i)];
        json v = {{"id", i + 1},
                  {"agent", a.literal.is_null() ? relation_to_json(a.relation) : a.literal},
                  {"w", w[static_cast<std::size_t>(i)]}};
        if (a.label) {
            v["class"] = *a.label;
        }
        jv.push_back(std::move(v));
    }
    json je = json::array();
    for (int e = 0; e < net.edge_count(); ++e) {
        const Attachment& a = net.controllers()[static_cast<std::size_t>(e)];
        json v = {{"id", e + 1},
                  {"head", net.graph().edge(e).head + 1},
                  {"tail", net.graph().edge(e).tail + 1},
                  {"controller", a.literal.is_null() ? relation_to_json(a.relation) : a.literal}};
        if (a.label) {
            v["class"] = *a.label;
        }
        je.push_back(std::move(v));
    }
    json j = {{"assumption", net.assumption() == Assumption::OutputStrictAgents ? "A1" : "A2"},
              {"vertices", std::move(jv)},
              {"edges", std::move(je)}};
    if (random) {
        j["common_random_input"] = {{"low", random->low}, {"high", random->high}};
    }
    return j;
}

std::string serialize_network(const Network& net) {
    return network_to_json(net).dump(2) + "\n";
}

}  // namespace clustersym
