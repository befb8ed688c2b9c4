#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "ribbon/synthetic.hpp"
#include "ribbon/varifold.hpp"

using namespace ribbon;
using namespace ribbon::testing;

namespace {

// long double reference implementation of the face-Dirac double loop
long double inner_oracle(double sigma, const TriMesh& a, const TriMesh& b) {
    const long double s2 = static_cast<long double>(sigma) * sigma;
    long double total = 0.0L;
    for (Eigen::Index f = 0; f < a.face_count(); ++f) {
        const Vec3 ca = (a.vertices.row(a.faces(f, 0)) + a.vertices.row(a.faces(f, 1)) +
                         a.vertices.row(a.faces(f, 2))) / 3.0;
        const Vec3 wna = weighted_face_normal(a.vertices.row(a.faces(f, 0)),
                                              a.vertices.row(a.faces(f, 1)),
                                              a.vertices.row(a.faces(f, 2)));
        const long double area_a = wna.norm();
        for (Eigen::Index g = 0; g < b.face_count(); ++g) {
            const Vec3 cb = (b.vertices.row(b.faces(g, 0)) + b.vertices.row(b.faces(g, 1)) +
                             b.vertices.row(b.faces(g, 2))) / 3.0;
            const Vec3 wnb = weighted_face_normal(b.vertices.row(b.faces(g, 0)),
                                                  b.vertices.row(b.faces(g, 1)),
                                                  b.vertices.row(b.faces(g, 2)));
            const long double area_b = wnb.norm();
            const long double chi = std::exp(
                -static_cast<long double>((ca - cb).squaredNorm()) / (2.0L * s2));
            const long double dot = wna.dot(wnb);
            total += chi * (area_a * area_b + dot * dot / (area_a * area_b));
        }
    }
    return total;
}

TriMesh small_random_mesh(unsigned seed) {
    return jittered_plate(3, 3, 0.25, seed);  // 8 faces
}

}  // namespace

TEST_CASE("single triangle against itself with a wide kernel") {
    TriMesh t;
    t.vertices.resize(3, 3);
    t.vertices << 0, 0, 0, 0.1, 0, 0, 0, 0.1, 0;
    t.faces.resize(1, 3);
    t.faces << 0, 1, 2;
    const double area = 0.005;
    const VarifoldSpec spec{KernelSpec{100.0}};
    CHECK(varifold_inner(spec, t, t) == doctest::Approx(2.0 * area * area).epsilon(1e-10));
}

TEST_CASE("two parallel identical triangles: closed-form cross term") {
    TriMesh a;
    a.vertices.resize(3, 3);
    a.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    a.faces.resize(1, 3);
    a.faces << 0, 1, 2;
    TriMesh b = a;
    const double d = 0.7;
    b.vertices.col(2).array() += d;
    const double sigma = 1.3;
    const VarifoldSpec spec{KernelSpec{sigma}};
    const double area = 0.5;
    const double expected = 2.0 * area * area * std::exp(-d * d / (2 * sigma * sigma));
    CHECK(varifold_inner(spec, a, b) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("inner product matches the long double oracle on 50 random pairs") {
    for (unsigned seed = 0; seed < 50; ++seed) {
        const TriMesh a = small_random_mesh(1000 + seed);
        const TriMesh b = small_random_mesh(2000 + seed);
        const VarifoldSpec spec{KernelSpec{1.0 + 0.05 * seed}};
        const long double oracle = inner_oracle(spec.spatial.sigma, a, b);
        const double got = varifold_inner(spec, a, b);
        CHECK(std::abs(got - static_cast<double>(oracle)) <=
              1e-12 * static_cast<double>(oracle));
    }
}

TEST_CASE("distance of a mesh to itself is zero") {
    const TriMesh a = small_random_mesh(7);
    const VarifoldSpec spec{KernelSpec{1.2}};
    const double aa = varifold_inner(spec, a, a);
    CHECK(std::abs(varifold_distance(spec, a, a)) <= 1e-10 * aa);
}

TEST_CASE("distance is insensitive to face order and winding flips") {
    const TriMesh a = small_random_mesh(17);
    TriMesh b = small_random_mesh(18);
    const VarifoldSpec spec{KernelSpec{0.9}};
    const double base = varifold_distance(spec, a, b);

    TriMesh permuted = b;
    permuted.faces.row(0).swap(permuted.faces.row(5));
    permuted.faces.row(2).swap(permuted.faces.row(7));
    CHECK(varifold_distance(spec, a, permuted) == doctest::Approx(base).epsilon(1e-12));

    TriMesh flipped = b;
    flipped.faces.col(1).swap(flipped.faces.col(2));
    CHECK(varifold_distance(spec, a, flipped) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("distance is rigid-motion invariant") {
    const TriMesh a = small_random_mesh(31);
    const TriMesh b = small_random_mesh(32);
    const VarifoldSpec spec{KernelSpec{1.1}};
    const double base = varifold_distance(spec, a, b);
    const RigidMotion motion = random_rigid(33);
    CHECK(varifold_distance(spec, apply_rigid(a, motion), apply_rigid(b, motion)) ==
          doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("plate pair far apart: cross term vanishes") {
    const VarifoldSpec spec{KernelSpec{0.5}};
    const SyntheticPair p = make_plate_pair(6, 5.0, 4 * 0.5);
    const double aa = varifold_inner(spec, p.pair.inner, p.pair.inner);
    const double bb = varifold_inner(spec, p.pair.outer, p.pair.outer);
    const double d = varifold_distance(spec, p.pair.inner, p.pair.outer);
    CHECK(d == doctest::Approx(aa + bb).epsilon(2e-3));
}

TEST_CASE("gradient vanishes at a perfect match") {
    const TriMesh a = small_random_mesh(41);
    const VarifoldSpec spec{KernelSpec{1.0}};
    const Points g = varifold_distance_gradient(spec, a, a);
    const double scale = bounding_box_diagonal(a.vertices);
    CHECK(g.cwiseAbs().maxCoeff() < 1e-8 * scale);
}

TEST_CASE("gradient matches central finite differences") {
    const VarifoldSpec spec{KernelSpec{0.8}};
    for (unsigned seed = 0; seed < 5; ++seed) {
        TriMesh a = small_random_mesh(50 + seed);
        const TriMesh b = small_random_mesh(60 + seed);
        const Points grad = varifold_distance_gradient(spec, a, b);
        const double h = 1e-6 * bounding_box_diagonal(a.vertices);
        double max_rel = 0.0;
        const double gscale = grad.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < a.vertex_count(); ++i) {
            for (int d = 0; d < 3; ++d) {
                const double saved = a.vertices(i, d);
                a.vertices(i, d) = saved + h;
                const double fp = varifold_distance(spec, a, b);
                a.vertices(i, d) = saved - h;
                const double fm = varifold_distance(spec, a, b);
                a.vertices(i, d) = saved;
                const double fd = (fp - fm) / (2 * h);
                max_rel = std::max(max_rel, std::abs(fd - grad(i, d)) /
                                                std::max(std::abs(fd), 1e-6 * gscale));
            }
        }
        CHECK(max_rel < 1e-5);
    }
}

TEST_CASE("gradient of a translated copy points back along the offset") {
    const TriMesh b = small_random_mesh(71);
    TriMesh a = b;
    a.vertices.col(0).array() += 0.05;
    const VarifoldSpec spec{KernelSpec{1.0}};
    const Points g = varifold_distance_gradient(spec, a, b);
    const Vec3 mean = g.colwise().mean();
    CHECK(mean.x() > 0.0);                       // decreasing x reduces the distance
    CHECK(std::abs(mean.x()) > 5.0 * std::abs(mean.y()));
    CHECK(std::abs(mean.x()) > 5.0 * std::abs(mean.z()));
}
