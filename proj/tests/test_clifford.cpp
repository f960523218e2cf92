#include <catch2/catch_amalgamated.hpp>

#include "isopar/clifford.hpp"
#include "isopar/sampling.hpp"

using namespace isopar;

namespace {

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs_entry(); }

const CommutationEntry& entry(const std::vector<CommutationEntry>& t, int p) { return t.at(static_cast<std::size_t>(p)); }

void require_product(const std::optional<SignedGenerator>& got, int sign, int index) {
    REQUIRE(got.has_value());
    CHECK(got->sign == sign);
    CHECK(got->index == index);
}

}  // namespace

TEST_CASE("standard system m=2 with the block E_2", "[clifford]") {
    for (int n : {0, 1, 2}) {
        const int r = 2 * n + 2;
        const CliffordSystem sys = build_standard_system(2, r);
        REQUIRE(sys.generators.size() == 3);
        CHECK(sys.dim == static_cast<std::size_t>(2 * r));
        CHECK(verify_clifford(sys).max_residual() < 1e-14);

        // A_2 = [[0, -E_2], [E_2, 0]] with E_2 = [[0, -I], [I, 0]]
        const auto ur = static_cast<std::size_t>(r), h = ur / 2;
        Matrix e2(ur, ur);
        e2.set_block(0, h, -Matrix::identity(h));
        e2.set_block(h, 0, Matrix::identity(h));
        Matrix a2(2 * ur, 2 * ur);
        a2.set_block(0, ur, -e2);
        a2.set_block(ur, 0, e2);
        CHECK(max_diff(sys.generators[2].matrix(), a2) == 0.0);
    }
}

TEST_CASE("standard systems m=1 and m=3", "[clifford]") {
    const CliffordSystem s1 = build_standard_system(1, 2);
    REQUIRE(s1.generators.size() == 2);
    CHECK(s1.dim == 4);
    CHECK(verify_clifford(s1).max_residual() == 0.0);

    const CliffordSystem s3 = build_standard_system(3, 4);
    REQUIRE(s3.generators.size() == 4);
    CHECK(verify_clifford(s3).max_residual() < 1e-12);
}

TEST_CASE("unsupported standard systems", "[clifford]") {
    CHECK_THROWS_AS(build_standard_system(2, 3), ConstructionError);
    CHECK_THROWS_AS(build_standard_system(3, 6), ConstructionError);
    CHECK_THROWS_AS(build_standard_system(4, 8), ConstructionError);
    CHECK_THROWS_AS(build_standard_system(0, 4), ConstructionError);
    CHECK_THROWS_WITH(build_standard_system(3, 6), Catch::Matchers::ContainsSubstring("divisible by 4"));
}

TEST_CASE("Ozeki-Takeuchi systems", "[clifford]") {
    const CliffordSystem s = build_ozeki_takeuchi_system(1);
    REQUIRE(s.generators.size() == 4);
    CHECK(s.dim == 16);
    CHECK(s.tag == CliffordTag::OzekiTakeuchi);
    const CliffordReport rep = verify_clifford(s);
    CHECK(rep.max_residual() < 1e-14);
    const Matrix& a2 = s.generators[2].matrix();
    const Matrix& a3 = s.generators[3].matrix();
    CHECK(max_diff(a2 * a3, -(a3 * a2)) == 0.0);

    const CliffordSystem s2 = build_ozeki_takeuchi_system(2);
    CHECK(s2.dim == 24);
    for (const auto& a : s2.generators) CHECK(max_diff(a.matrix() * a.matrix(), Matrix::identity(24)) == 0.0);
    CHECK(verify_clifford(s2).max_residual() < 1e-14);

    CHECK_THROWS_AS(build_ozeki_takeuchi_system(0), ConstructionError);
}

TEST_CASE("quaternion block relations", "[clifford]") {
    const Matrix d1 = quaternion_block(1), d2 = quaternion_block(2), d3 = quaternion_block(3);
    CHECK(max_diff(d1 * d2, d3) == 0.0);
    CHECK(max_diff(d2 * d1, -d3) == 0.0);
    CHECK(max_diff(d2 * d3, d1) == 0.0);
    CHECK(max_diff(d3 * d2, -d1) == 0.0);
    CHECK(max_diff(d3 * d1, d2) == 0.0);
    CHECK(max_diff(d1 * d3, -d2) == 0.0);
    const Matrix d0 = quaternion_block(0);
    for (const Matrix& d : {d1, d2, d3}) CHECK(max_diff(d0 * d, d * d0) == 0.0);
    CHECK_THROWS_AS(quaternion_block(4), RangeError);
}

TEST_CASE("complex structures", "[clifford]") {
    const ComplexStructure jb = build_complex_structure(ComplexTag::BlockStandard, 4);
    const Matrix expect_b{{0, 0, -1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, 1, 0, 0}};
    CHECK(max_diff(jb.matrix(), expect_b) == 0.0);

    const Matrix d0{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}};
    const Matrix d1{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}};
    Matrix right(8, 8), left(8, 8);
    right.set_block(0, 0, d0);
    right.set_block(4, 4, d0);
    left.set_block(0, 0, d1);
    left.set_block(4, 4, d1);
    CHECK(max_diff(build_complex_structure(ComplexTag::RightMultI, 8).matrix(), right) == 0.0);
    CHECK(max_diff(build_complex_structure(ComplexTag::LeftMultI, 8).matrix(), left) == 0.0);

    CHECK_THROWS_AS(build_complex_structure(ComplexTag::BlockStandard, 3), ConstructionError);
    CHECK_THROWS_AS(build_complex_structure(ComplexTag::RightMultI, 6), ConstructionError);
    CHECK_THROWS_AS(build_complex_structure(ComplexTag::Custom, 4), ConstructionError);
    CHECK_THROWS_AS(ComplexStructure::from_matrix(Matrix::identity(4)), ConstructionError);
    Matrix half = 0.5 * expect_b;
    CHECK_THROWS_AS(ComplexStructure::from_matrix(half), ConstructionError);
}

TEST_CASE("complex structures square to -I and are skew", "[clifford][property]") {
    for (ComplexTag tag : {ComplexTag::BlockStandard, ComplexTag::RightMultI, ComplexTag::LeftMultI}) {
        for (std::size_t dim : {8u, 16u, 24u}) {
            const ComplexStructure j = build_complex_structure(tag, dim);
            CHECK(max_diff(j.matrix() * j.matrix(), -Matrix::identity(dim)) < 1e-12);
            for (std::uint64_t i = 0; i < 100; ++i) {
                const Vector v = random_sphere_point(42, i, dim);
                CHECK(dot(j.apply(v), v) == Catch::Approx(0.0).margin(1e-15));
            }
        }
    }
}

TEST_CASE("commutation table: standard system under block J", "[clifford]") {
    const CliffordSystem sys = build_standard_system(3, 4);
    const ComplexStructure j = build_complex_structure(ComplexTag::BlockStandard, sys.dim);
    const auto t = check_commutation_table(sys, j);
    REQUIRE(t.size() == 4);
    CHECK(entry(t, 0).relation == Commutation::Anticommute);
    require_product(entry(t, 0).right_product, -1, 1);  // A0 J = -A1
    require_product(entry(t, 0).left_product, 1, 1);    // J A0 = A1
    CHECK(entry(t, 1).relation == Commutation::Anticommute);
    require_product(entry(t, 1).right_product, 1, 0);   // A1 J = A0
    require_product(entry(t, 1).left_product, -1, 0);
    for (int p : {2, 3}) CHECK(entry(t, p).relation == Commutation::Commute);

    CHECK_THROWS_AS(check_commutation_table(sys, build_complex_structure(ComplexTag::BlockStandard, 4)),
                    RangeError);
}

TEST_CASE("commutation table: Ozeki-Takeuchi system under J and J'", "[clifford]") {
    const CliffordSystem sys = build_ozeki_takeuchi_system(1);
    const auto tr = check_commutation_table(sys, build_complex_structure(ComplexTag::RightMultI, sys.dim));
    for (const auto& e : tr) CHECK(e.relation == Commutation::Commute);

    const auto tl = check_commutation_table(sys, build_complex_structure(ComplexTag::LeftMultI, sys.dim));
    CHECK(entry(tl, 0).relation == Commutation::Commute);
    CHECK(entry(tl, 1).relation == Commutation::Commute);
    CHECK(entry(tl, 2).relation == Commutation::Anticommute);
    CHECK(entry(tl, 3).relation == Commutation::Anticommute);
    require_product(entry(tl, 2).left_product, 1, 3);    // J' A2 = A3
    require_product(entry(tl, 2).right_product, -1, 3);  // A2 J' = -A3
    require_product(entry(tl, 3).left_product, -1, 2);   // J' A3 = -A2
    require_product(entry(tl, 3).right_product, 1, 2);
}

TEST_CASE("skew and symmetric products on the Ozeki-Takeuchi system", "[clifford][property]") {
    const CliffordSystem sys = build_ozeki_takeuchi_system(1);
    const Matrix j = build_complex_structure(ComplexTag::RightMultI, sys.dim).matrix();
    for (std::size_t p = 0; p < 4; ++p) {
        const Matrix jap = j * sys.generators[p].matrix();
        CHECK(max_diff(jap.transpose(), -jap) == 0.0);
        for (std::size_t q = 0; q < 4; ++q) {
            if (p == q) continue;
            const Matrix m = sys.generators[p].matrix() * j * sys.generators[q].matrix();
            CHECK(max_diff(m.transpose(), m) == 0.0);
        }
    }
}

TEST_CASE("verify_clifford sees a corrupted generator", "[clifford]") {
    CliffordSystem sys = build_standard_system(2, 4);
    Matrix a1 = sys.generators[1].matrix();
    a1(0, 4) += 1e-3;
    a1(4, 0) += 1e-3;
    sys.generators[1] = SymmetricMatrix(a1, SymmetryPolicy::Reject);
    const double res = verify_clifford(sys).max_residual();
    CHECK(res > 0.9e-3);
    CHECK(res < 3e-3);
}
