#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "thirdq/fock.hpp"
#include "thirdq/hermite.hpp"

using namespace thirdq::fock;

namespace {

// Dense mirror of a sparse operator; the reference implementation all
// sparse arithmetic is checked against.
Eigen::MatrixXcd dense(const OperatorMatrix& op) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(op.dim()),
                                                static_cast<Eigen::Index>(op.dim()));
    for (const auto& [key, value] : op.entries()) {
        m(static_cast<Eigen::Index>(key.first), static_cast<Eigen::Index>(key.second)) = value;
    }
    return m;
}

double dense_diff(const OperatorMatrix& op, const Eigen::MatrixXcd& ref) {
    return (dense(op) - ref).cwiseAbs().maxCoeff();
}

int total_occupation(const Occupation& occ) {
    int total = 0;
    for (int m : occ) {
        total += m;
    }
    return total;
}

}  // namespace

TEST_CASE("basis size follows the stars-and-bars count") {
    CHECK(ModeSpace(6, 4).dim() == 330);
    CHECK(ModeSpace(1, 1).dim() == 3);
    CHECK(ModeSpace(2, 2).dim() == 10);
    CHECK(ModeSpace(3, 1).dim() == 5);
}

TEST_CASE("basis is ordered by total occupation, then lexicographically") {
    const ModeSpace space(2, 2);
    REQUIRE(space.dim() == 10);
    CHECK(space.occupation(0) == Occupation{0, 0, 0});
    CHECK(space.occupation(1) == Occupation{0, 0, 1});
    CHECK(space.occupation(2) == Occupation{0, 1, 0});
    CHECK(space.occupation(3) == Occupation{1, 0, 0});
    CHECK(space.occupation(4) == Occupation{0, 0, 2});
    CHECK(space.occupation(9) == Occupation{2, 0, 0});
    for (std::size_t i = 1; i < space.dim(); ++i) {
        const int prev = total_occupation(space.occupation(i - 1));
        const int cur = total_occupation(space.occupation(i));
        CHECK(prev <= cur);
        if (prev == cur) {
            CHECK(space.occupation(i - 1) < space.occupation(i));
        }
    }
}

TEST_CASE("two spaces with equal cutoffs index identically") {
    const ModeSpace a(5, 3);
    const ModeSpace b(5, 3);
    CHECK(a == b);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        CHECK(b.index_of(a.occupation(i)) == i);
    }
}

TEST_CASE("index_of rejects truncated-away occupations") {
    const ModeSpace space(2, 2);
    CHECK(space.index_of(Occupation{0, 0, 3}) == std::nullopt);
    CHECK(space.index_of(Occupation{1, 1, 1}) == std::nullopt);
    CHECK(space.index_of(Occupation{1, 0}) == std::nullopt);
    CHECK(space.index_of(Occupation{0, 1, 0, 0}) == std::nullopt);
    CHECK(space.index_of(Occupation{0, 1, 1}).has_value());
}

TEST_CASE("vacuum sits at index zero") {
    const ModeSpace space(6, 4);
    CHECK(space.vacuum_index() == 0);
    CHECK(space.occupation(0) == Occupation(7, 0));
}

TEST_CASE("single-oscillaton sector lookup") {
    const ModeSpace space(2, 2);
    CHECK(space.single_index(0) == 3);
    CHECK(space.single_index(1) == 2);
    CHECK(space.single_index(2) == 1);
    CHECK(space.single_sector() == std::vector<std::size_t>{3, 2, 1});
    CHECK_THROWS_WITH_AS(space.single_index(-1), "level out of bounds", std::invalid_argument);
    CHECK_THROWS_WITH_AS(space.single_index(3), "level out of bounds", std::invalid_argument);
}

TEST_CASE("cutoff validation") {
    CHECK_THROWS_WITH_AS(ModeSpace(0, 4), "level cutoff must be at least 1",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(ModeSpace(6, 0), "oscillaton cutoff must be at least 1",
                         std::invalid_argument);
}

TEST_CASE("sparse entries accumulate and prune exact zeros") {
    OperatorMatrix op(4);
    CHECK(op.nnz() == 0);
    CHECK(op.at(2, 3) == Complex{0.0, 0.0});
    op.add(1, 2, Complex{0.5, -1.0});
    op.add(1, 2, Complex{0.25, 0.0});
    CHECK(op.nnz() == 1);
    CHECK(op.at(1, 2) == Complex{0.75, -1.0});
    op.add(1, 2, Complex{-0.75, 1.0});
    CHECK(op.nnz() == 0);
    op.add(0, 0, Complex{0.0, 0.0});
    CHECK(op.nnz() == 0);
    CHECK_THROWS_WITH_AS(op.add(4, 0, Complex{1.0, 0.0}), "operator entry outside matrix",
                         std::out_of_range);
    CHECK_THROWS_WITH_AS(op.add(0, 0, Complex{std::nan(""), 0.0}),
                         "operator amplitude not finite", std::invalid_argument);
}

TEST_CASE("identity has one unit entry per row") {
    const auto id = OperatorMatrix::identity(5);
    CHECK(id.nnz() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(id.at(i, i) == Complex{1.0, 0.0});
    }
    CHECK(id.max_abs() == 1.0);
}

TEST_CASE("sparse arithmetic matches the dense oracle") {
    const ModeSpace space(3, 3);
    const auto c0 = build_annihilation(space, 0);
    const auto c1d = build_creation(space, 1);
    const auto sum = c0 + c1d;
    const auto diff = c0 - c1d;
    const auto prod = c0 * c1d;
    CHECK(dense_diff(sum, dense(c0) + dense(c1d)) == 0.0);
    CHECK(dense_diff(diff, dense(c0) - dense(c1d)) == 0.0);
    CHECK(dense_diff(prod, dense(c0) * dense(c1d)) < 1e-14);
    CHECK(dense_diff(c0.adjoint(), dense(c0).adjoint()) == 0.0);
    CHECK(dense_diff(c0.scaled(Complex{0.5, 2.0}), dense(c0) * Complex{0.5, 2.0}) == 0.0);
    CHECK(c0.max_abs() == dense(c0).cwiseAbs().maxCoeff());
    CHECK(sum.max_abs_diff(diff) ==
          doctest::Approx((dense(sum) - dense(diff)).cwiseAbs().maxCoeff()).epsilon(1e-15));

    OperatorMatrix wrong_dim(3);
    CHECK_THROWS_WITH_AS(c0 + wrong_dim, "operator dimension mismatch", std::invalid_argument);
    CHECK_THROWS_WITH_AS(c0 * wrong_dim, "operator dimension mismatch", std::invalid_argument);
}

TEST_CASE("apply agrees with dense matrix-vector product") {
    const ModeSpace space(3, 3);
    const auto c0 = build_annihilation(space, 0);
    std::vector<Complex> vec(space.dim());
    for (std::size_t i = 0; i < vec.size(); ++i) {
        vec[i] = Complex{std::sin(0.1 * static_cast<double>(i)),
                         std::cos(0.2 * static_cast<double>(i))};
    }
    const auto out = c0.apply(vec);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(vec.size()));
    for (std::size_t i = 0; i < vec.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = vec[i];
    }
    const Eigen::VectorXcd ref = dense(c0) * v;
    for (std::size_t i = 0; i < vec.size(); ++i) {
        CHECK(std::abs(out[i] - ref(static_cast<Eigen::Index>(i))) < 1e-14);
    }
    CHECK_THROWS_WITH_AS(c0.apply(std::vector<Complex>(3)), "operator dimension mismatch",
                         std::invalid_argument);
}

TEST_CASE("restriction picks out the expected submatrix") {
    const ModeSpace space(2, 2);
    const auto c0 = build_annihilation(space, 0);
    const std::vector<std::size_t> kept{0, 3, 9};  // vacuum, |1_0>, |2_0>
    const auto sub = c0.restricted(kept);
    CHECK(sub.dim() == 3);
    CHECK(sub.at(0, 1) == Complex{1.0, 0.0});
    CHECK(sub.at(1, 2) == Complex{std::sqrt(2.0), 0.0});
    CHECK(sub.nnz() == 2);
}

TEST_CASE("adjoint is an involution, bit for bit") {
    const ModeSpace space(3, 3);
    auto op = build_annihilation(space, 1).scaled(Complex{0.3, -0.7});
    op.add(0, 0, Complex{1.5, 2.5});
    CHECK(op.adjoint().adjoint() == op);
}

TEST_CASE("ladder amplitudes carry the square-root rule") {
    const ModeSpace space(2, 3);
    const auto c0 = build_annihilation(space, 0);
    // Vacuum is annihilated: its column is empty.
    for (std::size_t row = 0; row < space.dim(); ++row) {
        CHECK(c0.at(row, space.vacuum_index()) == Complex{0.0, 0.0});
    }
    const auto two = space.index_of(Occupation{2, 0, 0});
    const auto one = space.index_of(Occupation{1, 0, 0});
    const auto three = space.index_of(Occupation{3, 0, 0});
    REQUIRE(two.has_value());
    REQUIRE(one.has_value());
    REQUIRE(three.has_value());
    CHECK(c0.at(*one, *two) == Complex{std::sqrt(2.0), 0.0});
    CHECK(c0.at(*two, *three) == Complex{std::sqrt(3.0), 0.0});
    // Spectator levels are untouched.
    const auto mixed_in = space.index_of(Occupation{1, 1, 0});
    const auto mixed_out = space.index_of(Occupation{0, 1, 0});
    CHECK(c0.at(*mixed_out, *mixed_in) == Complex{1.0, 0.0});
    CHECK_THROWS_WITH_AS(build_annihilation(space, 3), "level out of bounds",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(build_annihilation(space, -1), "level out of bounds",
                         std::invalid_argument);
}

TEST_CASE("interior projector matches a brute-force predicate") {
    const ModeSpace space(4, 3);
    for (int margin : {1, 2}) {
        CAPTURE(margin);
        const InteriorProjector proj(space, margin);
        std::vector<std::size_t> expected;
        for (std::size_t i = 0; i < space.dim(); ++i) {
            const Occupation& occ = space.occupation(i);
            bool keep = total_occupation(occ) <= space.osc_cutoff() - margin;
            for (std::size_t n = 0; n < occ.size(); ++n) {
                if (occ[n] != 0 && static_cast<int>(n) > space.level_cutoff() - margin) {
                    keep = false;
                }
            }
            if (keep) {
                expected.push_back(i);
            }
        }
        CHECK(proj.kept_indices() == expected);
        CHECK(proj.margin() == margin);
    }
    CHECK_THROWS_WITH_AS(InteriorProjector(space, 0), "interior margin must be at least 1",
                         std::invalid_argument);
}

TEST_CASE("canonical commutator holds on the interior") {
    const ModeSpace space(6, 4);
    const InteriorProjector interior(space, 1);
    const auto c0 = build_annihilation(space, 0);
    const auto comm = commutator(c0, c0.adjoint()).restricted(interior.kept_indices());
    const auto id = OperatorMatrix::identity(interior.kept_indices().size());
    CHECK(comm.max_abs_diff(id) < 1e-12);
}

TEST_CASE("distinct-level operators commute on the interior") {
    const ModeSpace space(6, 4);
    const InteriorProjector interior(space, 1);
    const auto c0 = build_annihilation(space, 0);
    const auto c1 = build_annihilation(space, 1);
    CHECK(commutator(c0, c1.adjoint()).restricted(interior.kept_indices()).max_abs() == 0.0);
    CHECK(commutator(c0, c1).restricted(interior.kept_indices()).max_abs() == 0.0);
}

TEST_CASE("commutator of an operator with itself or the identity vanishes") {
    const ModeSpace space(3, 2);
    const auto c0 = build_annihilation(space, 0);
    CHECK(commutator(c0, c0).nnz() == 0);
    CHECK(commutator(OperatorMatrix::identity(space.dim()), c0).nnz() == 0);
    OperatorMatrix small(2);
    CHECK_THROWS_WITH_AS(commutator(c0, small), "operator dimension mismatch",
                         std::invalid_argument);
}

TEST_CASE("mixing normalization keeps the algebra canonical") {
    CHECK(mixing_params(0.0).beta == 1.0);
    CHECK(mixing_params(0.0).gamma == 0.0);
    CHECK(mixing_params(0.1).beta == doctest::Approx(1.0101182331495618983).epsilon(1e-15));
    CHECK(mixing_params(0.01).beta == doctest::Approx(1.0001000116682113283).epsilon(1e-15));
    CHECK(mixing_params(0.5).beta == doctest::Approx(1.3604468816094679181).epsilon(1e-15));
    for (int i = 0; i <= 20; ++i) {
        const double gamma = -0.7 + 1.4 * i / 20.0;
        const MixingParams p = mixing_params(gamma);
        CHECK(p.gamma == gamma);
        CHECK(p.beta * p.beta * std::cos(2.0 * gamma) == doctest::Approx(1.0).epsilon(1e-14));
    }
    const double quarter_pi = 0.78539816339744830962;
    CHECK_THROWS_WITH_AS(mixing_params(quarter_pi), "mixing angle outside hyperbolic domain",
                         std::domain_error);
    CHECK_THROWS_WITH_AS(mixing_params(-quarter_pi), "mixing angle outside hyperbolic domain",
                         std::domain_error);
    CHECK_THROWS_WITH_AS(mixing_params(1.0), "mixing angle outside hyperbolic domain",
                         std::domain_error);
    CHECK_THROWS_WITH_AS(mixing_params(std::nan("")), "mixing angle outside hyperbolic domain",
                         std::domain_error);
}

TEST_CASE("zero-angle transform is the identity map on operators") {
    const ModeSpace space(4, 3);
    const auto c = build_annihilation(space, 0);
    const auto [cp, cpd] = bogoliubov_transform(c, c.adjoint(), mixing_params(0.0));
    CHECK(cp == c);
    CHECK(cpd == c.adjoint());
}

TEST_CASE("transformed operators stay canonical on the interior") {
    const ModeSpace space(6, 4);
    const InteriorProjector interior(space, 1);
    const auto c = build_annihilation(space, 0);
    const auto id = OperatorMatrix::identity(interior.kept_indices().size());
    for (double gamma : {-0.4, -0.1, 0.05, 0.3}) {
        CAPTURE(gamma);
        const auto [cp, cpd] = bogoliubov_transform(c, c.adjoint(), mixing_params(gamma));
        CHECK(cpd == cp.adjoint());
        const auto comm = commutator(cp, cpd).restricted(interior.kept_indices());
        CHECK(comm.max_abs_diff(id) < 1e-12);
    }
}

TEST_CASE("opposite-angle transform inverts the mixing") {
    const ModeSpace space(6, 4);
    const auto c = build_annihilation(space, 2);
    const auto [cp, cpd] = bogoliubov_transform(c, c.adjoint(), mixing_params(0.3));
    const auto [back, backd] = bogoliubov_transform(cp, cpd, mixing_params(-0.3));
    // The composition is linear in the operators, so recovery holds on
    // the full matrix, not just the interior.
    CHECK(back.max_abs_diff(c) < 1e-12);
    CHECK(backd.max_abs_diff(c.adjoint()) < 1e-12);
}

TEST_CASE("transform validates its operand pair") {
    const ModeSpace space(3, 2);
    const auto c = build_annihilation(space, 0);
    OperatorMatrix small(3);
    CHECK_THROWS_WITH_AS(bogoliubov_transform(c, small, mixing_params(0.1)),
                         "operator dimension mismatch", std::invalid_argument);
    CHECK_THROWS_WITH_AS(bogoliubov_transform(c, c, mixing_params(0.1)),
                         "operator pair is not an adjoint pair", std::invalid_argument);
}

TEST_CASE("generalized photon operator reduces to the textbook ladder") {
    const ModeSpace space(6, 4);
    const auto [a, ad] = build_photon_ops(space);
    // On the one-oscillaton sector a' |1_n> = sqrt(n) |1_{n-1}>, with
    // amplitudes that are bit-identical to std::sqrt(n).
    for (int n = 0; n <= space.level_cutoff(); ++n) {
        for (int m = 0; m <= space.level_cutoff(); ++m) {
            const Complex got = a.at(space.single_index(n), space.single_index(m));
            const Complex expected =
                (n + 1 == m) ? Complex{std::sqrt(static_cast<double>(m)), 0.0}
                             : Complex{0.0, 0.0};
            CAPTURE(n);
            CAPTURE(m);
            CHECK(got == expected);
        }
    }
    // Vacuum is annihilated and a'^dag is the exact adjoint.
    for (std::size_t row = 0; row < space.dim(); ++row) {
        CHECK(a.at(row, space.vacuum_index()) == Complex{0.0, 0.0});
    }
    CHECK(ad == a.adjoint());
}

TEST_CASE("photon operators are canonical on the single-oscillaton interior") {
    const ModeSpace space(6, 4);
    const auto [a, ad] = build_photon_ops(space);
    // Keep the one-oscillaton states below the level cutoff; the topmost
    // level has no rung above it and truncation breaks the identity there.
    std::vector<std::size_t> sector = space.single_sector();
    sector.pop_back();
    const auto comm = commutator(a, ad).restricted(sector);
    CHECK(comm.max_abs_diff(OperatorMatrix::identity(sector.size())) < 1e-12);
}

TEST_CASE("field operator matrix elements are the eigenfunctions") {
    const ModeSpace space(6, 4);
    for (double x : {-1.3, 0.0, 0.4, 2.1}) {
        const auto psi = field_operator(space, x);
        // <vac| psi(x) |1_n> = phi_n(x), reproduced bit for bit.
        for (int n = 0; n <= space.level_cutoff(); ++n) {
            CHECK(psi.at(space.vacuum_index(), space.single_index(n)) ==
                  Complex{oscillator_eigenfunction(n, x), 0.0});
        }
        // The vacuum column vanishes.
        std::vector<Complex> vac(space.dim(), Complex{0.0, 0.0});
        vac[space.vacuum_index()] = Complex{1.0, 0.0};
        for (const Complex& amp : psi.apply(vac)) {
            CHECK(amp == Complex{0.0, 0.0});
        }
    }
    CHECK_THROWS_AS(field_operator(space, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
}

TEST_CASE("field matrix elements are orthonormal under quadrature") {
    // Integrating <vac|psi(x)|1_n> <vac|psi(x)|1_m> over x recovers the
    // eigenfunction Gram matrix; the exp(-x^2/2) factors of the matrix
    // elements are restored into the quadrature weight.
    const ModeSpace space(6, 2);
    const auto rule = gauss_hermite(36);
    constexpr int kMax = 6;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(kMax + 1, kMax + 1);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double x = rule.nodes[k];
        const auto psi = field_operator(space, x);
        const double restore = std::exp(0.5 * x * x);
        Eigen::VectorXd elems(kMax + 1);
        for (int n = 0; n <= kMax; ++n) {
            elems(n) = psi.at(space.vacuum_index(), space.single_index(n)).real() * restore;
        }
        gram += rule.weights[k] * elems * elems.transpose();
    }
    CHECK((gram - Eigen::MatrixXd::Identity(kMax + 1, kMax + 1)).cwiseAbs().maxCoeff() < 1e-8);
}
