#include <qlh/scenario.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace qlh;

namespace {

std::mt19937 rng(77);

CohClass random_class(const TotalAlgebra& A) {
    std::uniform_int_distribution<int> c(-3, 3);
    CohClass v = A.zero();
    for (auto& x : v) x = Rational(c(rng));
    return v;
}

}  // namespace

TEST_CASE("hirzebruch surface ring") {
    Scenario s = scenario_hirzebruch();
    const TotalAlgebra& A = s.alg();
    REQUIRE(A.rank() == 4);
    CHECK(A.basis_name(0) == "1");
    CHECK(A.basis_name(1) == "h");
    CHECK(A.basis_name(2) == "p");
    CHECK(A.basis_name(3) == "p*h");

    CohClass h = A.h_class();
    CohClass p = A.base_embed(A.base().basis_class(1));

    SECTION("relation h(h+p) = 0") {
        CHECK(coh_is_zero(A.mul(h, coh_add(h, p))));
        CohClass h2 = A.mul(h, h);
        CohClass hp = A.mul(h, p);
        CHECK(h2 == coh_scale(rat(-1), hp));
    }
    SECTION("identity element") {
        CohClass a = random_class(A);
        CHECK(A.mul(A.unit(), a) == a);
    }
    SECTION("pairing values") {
        CHECK(A.pairing(A.unit(), A.mul(h, p)) == 1);
        CHECK(A.pairing(h, h) == -1);
        CHECK(A.pairing(h, p) == 1);
        CHECK(A.pairing(p, p) == 0);
    }
}

TEST_CASE("p1 flop total ring") {
    Scenario s = scenario_p1flop_00_01();
    const TotalAlgebra& A = s.alg();
    REQUIRE(A.rank() == 12);

    // basis order fixed by the golden data layout
    std::vector<std::string> want = {"1",    "h",    "xi",     "p",      "h*xi",   "p*h",
                                     "xi^2", "p*xi", "h*xi^2", "p*h*xi", "p*xi^2", "p*h*xi^2"};
    for (int i = 0; i < 12; ++i) CHECK(A.basis_name(i) == want[i]);

    CohClass h = A.h_class(), xi = A.xi_class();
    CohClass p = A.base_embed(A.base().basis_class(1));

    SECTION("Chern relations vanish") {
        CHECK(coh_is_zero(A.mul(h, h)));  // f_F = h^2
        CohClass xmh = coh_add(xi, coh_scale(rat(-1), h));
        CohClass f = A.mul(xi, A.mul(xmh, coh_add(xmh, p)));
        CHECK(coh_is_zero(f));
    }
    SECTION("pairing is nondegenerate and degree-orthogonal") {
        for (int a = 0; a < 12; ++a)
            for (int b = 0; b < 12; ++b)
                if (A.degree(a) + A.degree(b) != A.dim())
                    CHECK(A.pairing(A.basis_class(a), A.basis_class(b)) == 0);
        CHECK(A.pairing(A.unit(), A.basis_class(11)) == 1);
    }
    SECTION("associativity on all basis triples") {
        for (int a = 0; a < 12; ++a)
            for (int b = 0; b < 12; ++b)
                for (int c = 0; c < 12; ++c) {
                    CohClass lhs = A.mul(A.mul(A.basis_class(a), A.basis_class(b)), A.basis_class(c));
                    CohClass rhs = A.mul(A.basis_class(a), A.mul(A.basis_class(b), A.basis_class(c)));
                    REQUIRE(lhs == rhs);
                }
    }
    SECTION("commutativity on random elements") {
        for (int t = 0; t < 10; ++t) {
            CohClass a = random_class(A), b = random_class(A);
            CHECK(A.mul(a, b) == A.mul(b, a));
        }
    }
    SECTION("reduction order does not matter") {
        std::uniform_int_distribution<int> li(0, 4), mi(0, 5), bi(0, 1);
        for (int t = 0; t < 40; ++t) {
            std::map<std::tuple<int, int, int>, Rational> raw;
            for (int k = 0; k < 3; ++k)
                raw[std::make_tuple(bi(rng), li(rng), mi(rng))] += Rational(bi(rng) ? 1 : -2);
            CHECK(A.normal_form(raw, false) == A.normal_form(raw, true));
        }
    }
}

TEST_CASE("flop correspondence on cohomology") {
    Scenario s = scenario_p1flop_00_01();
    Scenario sp = s.flop_partner();
    const TotalAlgebra& A = s.alg();
    const TotalAlgebra& B = sp.alg();

    CohClass h = A.h_class(), xi = A.xi_class();
    CohClass hp = B.h_class(), xip = B.xi_class();

    SECTION("divisors map as h -> xi' - h', xi -> xi'") {
        CHECK(flop_map(A, B, h) == coh_add(xip, coh_scale(rat(-1), hp)));
        CHECK(flop_map(A, B, xi) == xip);
        CHECK(flop_map(A, B, A.unit()) == B.unit());
    }
    SECTION("T4 = h*xi maps to (xi'-h')xi'") {
        CohClass img = flop_map(A, B, A.basis_class(4));
        CohClass expect = B.mul(coh_add(xip, coh_scale(rat(-1), hp)), xip);
        CHECK(img == expect);
    }
    SECTION("graded iso preserving the Poincare pairing, exhaustively") {
        std::vector<CohClass> img;
        for (int e = 0; e < 12; ++e) img.push_back(flop_map(A, B, A.basis_class(e)));
        for (int a = 0; a < 12; ++a)
            for (int b = 0; b < 12; ++b)
                CHECK(B.pairing(img[a], img[b]) == A.pairing(A.basis_class(a), A.basis_class(b)));
    }
    SECTION("not a ring map; defect killed by xi'") {
        CohClass lhs = flop_map(A, B, A.mul(h, h));  // = T(0) = 0
        CohClass rhs = B.mul(flop_map(A, B, h), flop_map(A, B, h));
        CohClass defect = coh_add(lhs, coh_scale(rat(-1), rhs));
        CHECK_FALSE(coh_is_zero(defect));
        CHECK(coh_is_zero(B.mul(xip, defect)));
    }
    SECTION("T' after T is the identity") {
        for (int e = 0; e < 12; ++e) {
            CohClass back = flop_map(B, A, flop_map(A, B, A.basis_class(e)));
            CHECK(back == A.basis_class(e));
        }
    }
}

TEST_CASE("explicit base table round trip") {
    json mult = json::array({json::array({json::array({"1", "0"}), json::array({"0", "1"})}),
                             json::array({json::array({"0", "1"}), json::array({"0", "0"})})});
    json qde = json::array(
        {json{{"i", 1}, {"j", 1}, {"k", 0}, {"beta_bar", json::array({1})}, {"value", "1"}}});
    json base = {{"rank", 2},
                 {"dim", 1},
                 {"ngens", 1},
                 {"names", {"1", "p"}},
                 {"degrees", {0, 1}},
                 {"mult", mult},
                 {"integral", {"0", "1"}},
                 {"divisor_gens", {1}},
                 {"c1_degrees", {2}},
                 {"qde", qde}};
    json j = {{"name", "custom"}, {"kind", "flop"}, {"r", 1},
              {"base", base},     {"F", {{0}, {0}}}, {"Fprime", {{0}, {1}}}};
    Scenario s = scenario_from_json(j);
    Scenario ref = scenario_p1flop_00_01();
    REQUIRE(s.alg().rank() == 12);
    for (int a = 0; a < 12; ++a)
        for (int b = 0; b < 12; ++b)
            CHECK(s.alg().pairing(s.alg().basis_class(a), s.alg().basis_class(b)) ==
                  ref.alg().pairing(ref.alg().basis_class(a), ref.alg().basis_class(b)));
}

TEST_CASE("scenario validation errors") {
    json bad = {{"name", "x"}, {"kind", "flop"},    {"r", 1},
                {"base", "p1"}, {"F", {{0}, {0}, {0}}}, {"Fprime", {{0}, {1}}}};
    CHECK_THROWS_WITH(scenario_from_json(bad), Catch::Matchers::ContainsSubstring("$.F"));
    json bad2 = {{"name", "x"}, {"kind", "flop"}, {"r", 1}, {"base", "p1"}, {"F", {{0}, {0}}}};
    CHECK_THROWS_WITH(scenario_from_json(bad2), Catch::Matchers::ContainsSubstring("Fprime"));
}
