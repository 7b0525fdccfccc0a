#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <ougrad/linalg.hpp>
#include <ougrad/quadrature.hpp>
#include <ougrad/stats.hpp>

using namespace ougrad;
using Catch::Approx;

TEST_CASE("matrix basics", "[linalg]") {
    Mat a(2, 2, {1.0, 2.0, 3.0, 4.0});
    REQUIRE(a(0, 1) == 2.0);
    REQUIRE(a(1, 0) == 3.0);
    const Mat at = a.transpose();
    REQUIRE(at(0, 1) == 3.0);

    const Mat i2 = Mat::identity(2);
    const Mat p = a * i2;
    REQUIRE(p(1, 1) == 4.0);

    Vec x{1.0, -1.0};
    const Vec y = a * x;
    REQUIRE(y[0] == Approx(-1.0));
    REQUIRE(y[1] == Approx(-1.0));
}

TEST_CASE("expm matches closed forms", "[linalg]") {
    // diagonal
    Mat d(2, 2, {0.3, 0.0, 0.0, -1.2});
    const Mat ed = expm(d);
    REQUIRE(ed(0, 0) == Approx(std::exp(0.3)).epsilon(1e-14));
    REQUIRE(ed(1, 1) == Approx(std::exp(-1.2)).epsilon(1e-14));
    REQUIRE(ed(0, 1) == Approx(0.0).margin(1e-15));

    // rotation generator: expm([[0,-w],[w,0]]) is the rotation by w
    const double w = 1.1;
    Mat r(2, 2, {0.0, -w, w, 0.0});
    const Mat er = expm(r);
    REQUIRE(er(0, 0) == Approx(std::cos(w)).epsilon(1e-13));
    REQUIRE(er(1, 0) == Approx(std::sin(w)).epsilon(1e-13));

    // group property at large norm (scaling and squaring path)
    Mat big(2, 2, {3.0, 1.0, 0.0, 2.5});
    const Mat e1 = expm(big);
    const Mat eh = expm(0.5 * big);
    const Mat sq = eh * eh;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) REQUIRE(sq(i, j) == Approx(e1(i, j)).epsilon(1e-12));
}

TEST_CASE("symmetric eigensolver and psd factor", "[linalg]") {
    Mat s(2, 2, {2.0, 1.0, 1.0, 2.0});
    const SymEig e = sym_eig(s);
    REQUIRE(e.values[0] == Approx(1.0).epsilon(1e-12));
    REQUIRE(e.values[1] == Approx(3.0).epsilon(1e-12));

    const Mat l = psd_factor(s);
    const Mat llt = l * l.transpose();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) REQUIRE(llt(i, j) == Approx(s(i, j)).margin(1e-12));
}

TEST_CASE("operator norm and contraction rate", "[linalg]") {
    Mat a(2, 2, {0.0, 2.0, 0.0, 0.0});
    REQUIRE(op_norm(a) == Approx(2.0).epsilon(1e-12));

    Mat mi(2, 2, {-1.0, 0.0, 0.0, -1.0});
    REQUIRE(contraction_rate(mi) == Approx(1.0).epsilon(1e-12));
    Mat pi(2, 2, {1.0, 0.0, 0.0, 1.0});
    REQUIRE(contraction_rate(pi) == Approx(-1.0).epsilon(1e-12));
    // only the symmetric part matters
    Mat rot(2, 2, {0.0, -5.0, 5.0, 0.0});
    REQUIRE(contraction_rate(rot) == Approx(0.0).margin(1e-12));
}

TEST_CASE("quadrature on analytic integrals", "[linalg]") {
    const QuadResult g = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0, {});
    REQUIRE(g.converged);
    REQUIRE(g.value == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));

    const QuadResult e = integrate_semi_infinite([](double x) { return std::exp(-2.0 * x); }, 0.0, {});
    REQUIRE(e.converged);
    REQUIRE(e.value == Approx(0.5).epsilon(1e-10));
}

TEST_CASE("line fit recovers slope and intercept", "[linalg]") {
    Vec x{1.0, 2.0, 3.0, 4.0, 5.0};
    Vec y;
    for (const double v : x) y.push_back(-0.5 * v + 2.0);
    const LineFit f = fit_line(x, y);
    REQUIRE(f.slope == Approx(-0.5).epsilon(1e-12));
    REQUIRE(f.intercept == Approx(2.0).epsilon(1e-12));
    REQUIRE(f.residual_rms == Approx(0.0).margin(1e-12));
}

TEST_CASE("accumulator merge equals single pass", "[linalg]") {
    Accumulator whole, a, b;
    for (int i = 0; i < 100; ++i) {
        const double v = std::sin(0.37 * i);
        whole.add(v);
        (i < 37 ? a : b).add(v);
    }
    a.merge(b);
    REQUIRE(a.count() == whole.count());
    REQUIRE(a.mean() == Approx(whole.mean()).epsilon(1e-13));
    REQUIRE(a.std_error() == Approx(whole.std_error()).epsilon(1e-12));
}
