#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "ribbon/kernel.hpp"

using namespace ribbon;
using namespace ribbon::testing;

namespace {

ControlField random_field(int count, unsigned seed, double spread = 2.0, double coeff = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    ControlField cf;
    cf.centers.resize(count, 3);
    cf.coeffs.resize(count, 3);
    for (int i = 0; i < count; ++i)
        for (int d = 0; d < 3; ++d) {
            cf.centers(i, d) = spread * unit(rng);
            cf.coeffs(i, d) = coeff * unit(rng);
        }
    return cf;
}

}  // namespace

TEST_CASE("kernel closed-form values") {
    const KernelSpec spec{1.3};
    const Vec3 x(0.4, -0.2, 1.0);
    CHECK(k_eval(spec, x, x) == 1.0);
    const Vec3 y = x + Vec3(spec.sigma, 0, 0);
    CHECK(k_eval(spec, x, y) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    const Vec3 z = x + Vec3(0, 3.0 * spec.sigma, 0);
    CHECK(k_eval(spec, x, z) == doctest::Approx(std::exp(-4.5)).epsilon(1e-14));
    // symmetry is exact
    CHECK(k_eval(spec, x, y) == k_eval(spec, y, x));
}

TEST_CASE("field evaluation: single center and zero coefficients") {
    const KernelSpec spec{0.8};
    ControlField cf;
    cf.centers.resize(1, 3);
    cf.centers << 0.3, 0.1, -0.5;
    cf.coeffs.resize(1, 3);
    cf.coeffs << 1, 0, 0;
    CHECK((field_eval(spec, cf, cf.centers.row(0)) - Vec3(1, 0, 0)).norm() == 0.0);
    cf.coeffs.setZero();
    CHECK(field_eval(spec, cf, Vec3(1, 1, 1)).norm() == 0.0);
}

TEST_CASE("field evaluation matches a naive double loop") {
    const KernelSpec spec{1.1};
    const ControlField cf = random_field(5, 21);
    std::mt19937 rng(22);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 x(unit(rng), unit(rng), unit(rng));
        Vec3 naive = Vec3::Zero();
        for (int i = 0; i < 5; ++i) {
            const double d2 = (x - Vec3(cf.centers.row(i))).squaredNorm();
            naive += std::exp(-d2 / (2.0 * spec.sigma * spec.sigma)) * Vec3(cf.coeffs.row(i));
        }
        const Vec3 v = field_eval(spec, cf, x);
        CHECK((v - naive).norm() <= 1e-14 * std::max(1.0, naive.norm()));
    }
}

TEST_CASE("field jacobian: decay, peak, and finite differences") {
    const KernelSpec spec{0.9};
    const ControlField cf = random_field(6, 31);

    // far from all centers the jacobian vanishes
    const Vec3 far(30.0, 0.0, 0.0);
    CHECK(field_jacobian(spec, cf, far).cwiseAbs().maxCoeff() < 1e-20);

    // gradient of the Gaussian vanishes at its peak
    ControlField one;
    one.centers.resize(1, 3);
    one.centers << 0.2, 0.4, 0.6;
    one.coeffs.resize(1, 3);
    one.coeffs << 1.0, -2.0, 0.5;
    CHECK(field_jacobian(spec, one, one.centers.row(0)).cwiseAbs().maxCoeff() == 0.0);

    std::mt19937 rng(32);
    std::uniform_real_distribution<double> unit(-1.5, 1.5);
    const double h = 1e-5 * spec.sigma;
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 x(unit(rng), unit(rng), unit(rng));
        const Eigen::Matrix3d jac = field_jacobian(spec, cf, x);
        Eigen::Matrix3d fd;
        for (int b = 0; b < 3; ++b) {
            Vec3 e = Vec3::Zero();
            e[b] = h;
            fd.col(b) = (field_eval(spec, cf, x + e) - field_eval(spec, cf, x - e)) / (2 * h);
        }
        CHECK((jac - fd).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, jac.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("gram quadratic form: closed forms and positivity") {
    const KernelSpec spec{1.7};
    Points centers(2, 3);
    centers << 0, 0, 0, spec.sigma, 0, 0;
    Points coeffs(2, 3);

    coeffs.setZero();
    CHECK(gram_apply(spec, centers, coeffs) == 0.0);

    Points one_center(1, 3);
    one_center << 4, 5, 6;
    Points one_coeff(1, 3);
    one_coeff << 2, 0, 0;
    CHECK(gram_apply(spec, one_center, one_coeff) == doctest::Approx(4.0).epsilon(1e-14));

    coeffs << 1, 0, 0, 1, 0, 0;
    CHECK(gram_apply(spec, centers, coeffs) ==
          doctest::Approx(2.0 + 2.0 * std::exp(-0.5)).epsilon(1e-14));

    for (unsigned seed = 0; seed < 20; ++seed) {
        const ControlField cf = random_field(7, 500 + seed);
        const double q = gram_apply(spec, cf.centers, cf.coeffs);
        CHECK(q > 0.0);
    }
}

TEST_CASE("translation equivariance") {
    const KernelSpec spec{1.2};
    const ControlField cf = random_field(6, 77);
    const Vec3 shift(3.0, -1.0, 2.5);
    ControlField moved = cf;
    moved.centers.rowwise() += shift.transpose();
    std::mt19937 rng(78);
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Vec3 x(unit(rng), unit(rng), unit(rng));
        CHECK((field_eval(spec, cf, x) - field_eval(spec, moved, x + shift)).norm() < 1e-14);
        CHECK((field_jacobian(spec, cf, x) - field_jacobian(spec, moved, x + shift))
                  .cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK(gram_apply(spec, cf.centers, cf.coeffs) ==
          doctest::Approx(gram_apply(spec, moved.centers, cf.coeffs)).epsilon(1e-14));
}

TEST_CASE("shared-point field pullback matches finite differences") {
    const KernelSpec spec{1.0};
    const int n = 6;
    const ControlField cf = random_field(n, 91);
    Points cot(n, 3);
    std::mt19937 rng(92);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < 3; ++d) cot(i, d) = unit(rng);

    // scalar s = sum_i cot_i . v(p_i) with centers == queries == p
    auto scalar = [&](const Points& p, const Points& a) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            s += cot.row(i).dot(field_eval(spec, ControlField{p, a}, p.row(i)));
        return s;
    };

    const FieldPullback pb = field_eval_pullback_shared(spec, cf.centers, cf.coeffs, cot);
    const double h = 1e-6;
    for (int i = 0; i < n; ++i) {
        for (int d = 0; d < 3; ++d) {
            Points pp = cf.centers, pm = cf.centers;
            pp(i, d) += h;
            pm(i, d) -= h;
            const double fd = (scalar(pp, cf.coeffs) - scalar(pm, cf.coeffs)) / (2 * h);
            CHECK(pb.d_points(i, d) == doctest::Approx(fd).epsilon(1e-6));
            Points ap = cf.coeffs, am = cf.coeffs;
            ap(i, d) += h;
            am(i, d) -= h;
            const double fda = (scalar(cf.centers, ap) - scalar(cf.centers, am)) / (2 * h);
            CHECK(pb.d_coeffs(i, d) == doctest::Approx(fda).epsilon(1e-6));
        }
    }
}
