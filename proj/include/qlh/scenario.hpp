#ifndef QLH_SCENARIO_HPP
#define QLH_SCENARIO_HPP

#include <qlh/curve.hpp>

#include <json.hpp>

#include <fstream>
#include <memory>
#include <string>

namespace qlh {

using json = nlohmann::ordered_json;

struct ScenarioFlags {
    bool sign_twist = false;        // (-1)^d convention for even r
    bool twisted_lift = false;      // use beta^I - delta*ell when mu+mu' < 0
    int weight_bound = 2;           // base Novikov order kept in connection matrices
};

// Bundle data (S, F, F') for a split local P^r flop, or (S, F) for a plain
// split projective bundle.
struct Scenario {
    std::string name;
    BundleKind kind = BundleKind::DoubleBundle;
    int r = 1;
    std::string base_id = "p1";
    BaseAlgebra base;
    std::vector<std::vector<int>> degF, degFp;  // (r+1) x ngens
    Box box;
    ScenarioFlags flags;

    std::shared_ptr<TotalAlgebra> algebra;

    void build() {
        algebra = std::make_shared<TotalAlgebra>(kind, base, r, degF, degFp);
    }

    const TotalAlgebra& alg() const { return *algebra; }
    CurveOps curves() const { return CurveOps(algebra.get()); }

    // The flop partner (S, F', F). Only defined for the double bundle.
    Scenario flop_partner() const {
        if (kind != BundleKind::DoubleBundle)
            throw std::domain_error("flop partner requires double bundle data");
        Scenario s(*this);
        s.name = name + "'";
        std::swap(s.degF, s.degFp);
        s.build();
        return s;
    }
};

namespace detail {

inline void require(bool cond, const std::string& path, const std::string& msg) {
    if (!cond) throw std::invalid_argument("scenario error at " + path + ": " + msg);
}

inline std::vector<std::vector<int>> parse_degrees(const json& j, const std::string& path, int r,
                                                   int ngens) {
    require(j.is_array(), path, "expected an array of per-bundle degree vectors");
    require(static_cast<int>(j.size()) == r + 1,
            path, "expected r+1 = " + std::to_string(r + 1) + " degree vectors, got " +
                      std::to_string(j.size()));
    std::vector<std::vector<int>> out;
    for (size_t i = 0; i < j.size(); ++i) {
        const auto& row = j[i];
        std::string rp = path + "[" + std::to_string(i) + "]";
        require(row.is_array(), rp, "expected an integer vector");
        require(static_cast<int>(row.size()) == ngens,
                rp, "expected one degree per base curve generator (" + std::to_string(ngens) + ")");
        std::vector<int> v;
        for (auto& e : row) {
            require(e.is_number_integer(), rp, "degrees must be integers");
            v.push_back(e.get<int>());
        }
        out.push_back(std::move(v));
    }
    return out;
}

inline BaseAlgebra parse_base(const json& j, const std::string& path) {
    if (j.is_string()) {
        std::string id = j.get<std::string>();
        if (id == "point") return BaseAlgebra::point();
        if (id == "p1") return BaseAlgebra::p1();
        require(false, path, "unknown base id '" + id + "' (expected point, p1, or a table)");
    }
    require(j.is_object(), path, "expected a base id or an explicit table");
    BaseAlgebra b;
    b.id = "custom";
    b.rank = j.at("rank").get<int>();
    b.dim = j.at("dim").get<int>();
    b.ngens = j.at("ngens").get<int>();
    for (auto& n : j.at("names")) b.names.push_back(n.get<std::string>());
    for (auto& d : j.at("degrees")) b.degrees.push_back(d.get<int>());
    require(static_cast<int>(b.names.size()) == b.rank, path + ".names", "size mismatch");
    require(static_cast<int>(b.degrees.size()) == b.rank, path + ".degrees", "size mismatch");
    b.mult.assign(b.rank, std::vector<CohClass>(b.rank));
    const auto& m = j.at("mult");
    for (int i = 0; i < b.rank; ++i)
        for (int k = 0; k < b.rank; ++k) {
            CohClass c;
            for (auto& e : m[i][k]) c.push_back(rat_from_string(e.get<std::string>()));
            require(static_cast<int>(c.size()) == b.rank, path + ".mult", "row size mismatch");
            b.mult[i][k] = std::move(c);
        }
    for (auto& e : j.at("integral")) b.integral.push_back(rat_from_string(e.get<std::string>()));
    for (auto& e : j.at("divisor_gens")) b.divisor_gens.push_back(e.get<int>());
    require(static_cast<int>(b.divisor_gens.size()) == b.ngens, path + ".divisor_gens",
            "one divisor generator per curve generator");
    for (auto& e : j.at("c1_degrees")) b.c1_degrees.push_back(e.get<int>());
    if (j.contains("qde"))
        for (auto& e : j.at("qde")) {
            BaseQdeEntry q;
            q.i = e.at("i").get<int>();
            q.j = e.at("j").get<int>();
            q.k = e.at("k").get<int>();
            for (auto& bb : e.at("beta_bar")) q.beta_bar.push_back(bb.get<int>());
            q.value = rat_from_string(e.at("value").get<std::string>());
            b.qde.push_back(std::move(q));
        }
    return b;
}

}  // namespace detail

inline Scenario scenario_from_json(const json& j) {
    using detail::require;
    Scenario s;
    require(j.is_object(), "$", "expected a JSON object");
    s.name = j.value("name", std::string("scenario"));
    std::string kind = j.value("kind", std::string("flop"));
    require(kind == "flop" || kind == "bundle", "$.kind", "expected 'flop' or 'bundle'");
    s.kind = kind == "flop" ? BundleKind::DoubleBundle : BundleKind::SingleBundle;
    require(j.contains("r"), "$.r", "missing");
    s.r = j.at("r").get<int>();
    require(s.r >= 1, "$.r", "fiber dimension must be >= 1");
    s.base = detail::parse_base(j.at("base"), "$.base");
    s.base_id = s.base.id;
    s.degF = detail::parse_degrees(j.at("F"), "$.F", s.r, s.base.ngens);
    if (s.kind == BundleKind::DoubleBundle) {
        require(j.contains("Fprime"), "$.Fprime", "missing bundle data for F'");
        s.degFp = detail::parse_degrees(j.at("Fprime"), "$.Fprime", s.r, s.base.ngens);
    } else {
        s.degFp.assign(s.r + 1, std::vector<int>(std::max(s.base.ngens, 0), 0));
    }
    if (j.contains("box")) {
        const auto& b = j.at("box");
        s.box.bs = b.value("bs", s.box.bs);
        s.box.d2 = b.value("d2", s.box.d2);
        s.box.dmax = b.value("dmax", s.box.dmax);
        s.box.dmargin = b.value("dmargin", s.box.dmargin);
        require(s.box.bs >= 0 && s.box.dmax >= 1, "$.box", "box bounds must be positive");
    }
    if (j.contains("flags")) {
        const auto& f = j.at("flags");
        s.flags.sign_twist = f.value("sign_twist", false);
        std::string lift = f.value("lift", std::string("iminimal"));
        require(lift == "iminimal" || lift == "twisted", "$.flags.lift",
                "expected 'iminimal' or 'twisted'");
        s.flags.twisted_lift = lift == "twisted";
        s.flags.weight_bound = f.value("weight_bound", 2);
    }
    s.build();
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("scenario parse error in " + path + ": " + e.what());
    }
    return scenario_from_json(j);
}

// Built-in scenarios used by the bundled data files and the test suite.
inline Scenario scenario_hirzebruch() {
    json j = {{"name", "hirzebruch"},
              {"kind", "bundle"},
              {"r", 1},
              {"base", "p1"},
              {"F", {{0}, {1}}}};
    return scenario_from_json(j);
}

inline Scenario scenario_p1flop_00_01() {
    json j = {{"name", "p1flop_00_01"},
              {"kind", "flop"},
              {"r", 1},
              {"base", "p1"},
              {"F", {{0}, {0}}},
              {"Fprime", {{0}, {1}}}};
    return scenario_from_json(j);
}

inline Scenario scenario_simple_flop(int r) {
    std::vector<std::vector<int>> zero(r + 1, std::vector<int>{});
    json F = json::array();
    for (int i = 0; i <= r; ++i) F.push_back(json::array());
    json j = {{"name", "simple_flop_r" + std::to_string(r)},
              {"kind", "flop"},
              {"r", r},
              {"base", "point"},
              {"F", F},
              {"Fprime", F}};
    return scenario_from_json(j);
}

}  // namespace qlh

#endif
