#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "diqkd/bounds.hpp"
#include "diqkd/qmat.hpp"
#include "helpers.hpp"

using namespace diqkd;
using qmat::cplx;
using qmat::DensityMatrix;
using qmat::Matrix;
using qmat::PlanarMeasurement;
using test_helpers::random_density;
using test_helpers::random_hermitian;
using test_helpers::random_pure;

namespace {

const double kPi = std::numbers::pi;

DensityMatrix phi_plus_state() {
    return qmat::bell_diagonal_state(qmat::BellDiagonalSpectrum(1.0, 0.0, 0.0, 0.0));
}

DensityMatrix attack_state(double s) {
    const double c = std::sqrt((s / 2.0) * (s / 2.0) - 1.0);
    return qmat::bell_diagonal_state(
        qmat::BellDiagonalSpectrum(0.5 * (1.0 + c), 0.0, 0.5 * (1.0 - c), 0.0));
}

}  // namespace

TEST_CASE("kron identities and hand-expanded products") {
    const Matrix id2 = Matrix::identity(2);
    CHECK(frobenius_distance(kron(id2, id2), Matrix::identity(4)) == doctest::Approx(0.0));

    const Matrix zz = kron(qmat::pauli_z(), qmat::pauli_z());
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double expected = (i == j) ? ((i == 0 || i == 3) ? 1.0 : -1.0) : 0.0;
            CHECK(zz(i, j).real() == doctest::Approx(expected));
            CHECK(zz(i, j).imag() == 0.0);
        }

    // sigma_x (x) sigma_z maps |00> to |10>.
    const Matrix xz = kron(qmat::pauli_x(), qmat::pauli_z());
    std::vector<cplx> e00{1.0, 0.0, 0.0, 0.0};
    const std::vector<cplx> out = xz.apply(e00);
    CHECK(std::abs(out[0]) == doctest::Approx(0.0));
    CHECK(std::abs(out[1]) == doctest::Approx(0.0));
    CHECK(out[2] == cplx(1.0, 0.0));
    CHECK(std::abs(out[3]) == doctest::Approx(0.0));

    CHECK(kron(Matrix::identity(3), Matrix::identity(5)).dim() == 15);
}

TEST_CASE("eigh on Pauli matrices") {
    const auto ez = eigh(qmat::pauli_z());
    CHECK(ez.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(ez.eigenvalues[1] == doctest::Approx(-1.0));
    CHECK(std::abs(ez.eigenvectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(ez.eigenvectors(1, 1)) == doctest::Approx(1.0));

    const auto ex = eigh(qmat::pauli_x());
    CHECK(ex.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(ex.eigenvalues[1] == doctest::Approx(-1.0));
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            CHECK(std::abs(ex.eigenvectors(i, k)) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("eigh reconstruction and orthonormality on random Hermitian inputs") {
    std::mt19937_64 rng(42);
    for (int dim : {2, 3, 5, 8, 13, 16}) {
        for (int rep = 0; rep < 20; ++rep) {
            const Matrix h = random_hermitian(dim, rng);
            const auto e = eigh(h);
            for (std::size_t k = 1; k < e.eigenvalues.size(); ++k) {
                CHECK(e.eigenvalues[k - 1] >= e.eigenvalues[k]);
            }
            Matrix recon(dim);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    cplx acc(0.0, 0.0);
                    for (int k = 0; k < dim; ++k)
                        acc += e.eigenvectors(i, k) *
                               e.eigenvalues[static_cast<std::size_t>(k)] *
                               std::conj(e.eigenvectors(j, k));
                    recon(i, j) = acc;
                }
            CHECK(frobenius_distance(recon, h) <= 1e-10 * std::max(1.0, h.frobenius_norm()));
            const Matrix gram = e.eigenvectors.adjoint() * e.eigenvectors;
            CHECK(frobenius_distance(gram, Matrix::identity(dim)) <= 1e-10);
        }
    }
}

TEST_CASE("eigh rejects non-Hermitian input") {
    Matrix m(2);
    m(0, 1) = cplx(1.0, 0.0);  // strictly upper triangular
    CHECK_THROWS_AS(eigh(m), NotHermitianError);
}

TEST_CASE("eigh of the rank-two attack state") {
    for (double s : {2.2, 2.4, 2.7}) {
        const double c = std::sqrt((s / 2.0) * (s / 2.0) - 1.0);
        const auto e = eigh(attack_state(s).op());
        CHECK(e.eigenvalues[0] == doctest::Approx(0.5 * (1.0 + c)).epsilon(1e-12));
        CHECK(e.eigenvalues[1] == doctest::Approx(0.5 * (1.0 - c)).epsilon(1e-12));
        CHECK(std::abs(e.eigenvalues[2]) <= 1e-12);
        CHECK(std::abs(e.eigenvalues[3]) <= 1e-12);
    }
}

TEST_CASE("partial trace basics") {
    const std::array<int, 2> dims{2, 2};
    const std::array<int, 1> keep_a{0};

    const DensityMatrix half = qmat::partial_trace(phi_plus_state(), dims, keep_a);
    CHECK(frobenius_distance(half.op(), Matrix::identity(2) * 0.5) <= 1e-12);

    // Product state: tracing out the second factor returns the first.
    std::mt19937_64 rng(7);
    const DensityMatrix rho_a = random_density(2, rng);
    const DensityMatrix rho_b = random_density(3, rng);
    const DensityMatrix joint(kron(rho_a.op(), rho_b.op()));
    const std::array<int, 2> dims23{2, 3};
    const DensityMatrix back = qmat::partial_trace(joint, dims23, keep_a);
    CHECK(frobenius_distance(back.op(), rho_a.op()) <= 1e-12);

    const std::array<int, 2> bad_dims{3, 3};
    CHECK_THROWS_AS(qmat::partial_trace(joint, bad_dims, keep_a), DimensionError);
    const std::array<int, 0> empty_keep{};
    CHECK_THROWS_AS(qmat::partial_trace(joint, dims23, empty_keep), DimensionError);
}

TEST_CASE("planar measurement angles normalize into [0, 2 pi)") {
    CHECK(PlanarMeasurement(-kPi / 4.0).angle ==
          doctest::Approx(2.0 * kPi - kPi / 4.0).epsilon(1e-15));
    CHECK(PlanarMeasurement(5.0 * kPi).angle == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(frobenius_distance(qmat::observable(PlanarMeasurement(-kPi / 4.0)),
                             qmat::observable(PlanarMeasurement(7.0 * kPi / 4.0))) <= 1e-12);
}

TEST_CASE("born probabilities require a 2*2*dE layout") {
    std::vector<cplx> amps(6, cplx(0.0, 0.0));
    amps[0] = 1.0;
    CHECK_THROWS_AS(qmat::born_probabilities(qmat::PureState(std::move(amps)),
                                             PlanarMeasurement(0.0), PlanarMeasurement(0.0)),
                    DimensionError);
}

TEST_CASE("purify / partial_trace round trip") {
    std::mt19937_64 rng(11);
    SUBCASE("attack state at S = 2.4") {
        const DensityMatrix rho = attack_state(2.4);
        const qmat::PureState psi = purify(rho);
        const std::array<int, 2> dims{4, 4};
        const std::array<int, 1> keep{0};
        const DensityMatrix back = qmat::partial_trace(qmat::density(psi), dims, keep);
        CHECK(frobenius_distance(back.op(), rho.op()) <= 1e-12);
    }
    SUBCASE("random states, d <= 4") {
        for (int dim : {2, 3, 4}) {
            for (int rep = 0; rep < 25; ++rep) {
                const DensityMatrix rho = random_density(dim, rng);
                const qmat::PureState psi = purify(rho);
                const std::array<int, 2> dims{dim, dim};
                const std::array<int, 1> keep{0};
                const DensityMatrix back = qmat::partial_trace(qmat::density(psi), dims, keep);
                CHECK(frobenius_distance(back.op(), rho.op()) <= 1e-12);
            }
        }
    }
}

TEST_CASE("purify canonical cases") {
    // Pure input purifies to a product state.
    Matrix e00(2);
    e00(0, 0) = 1.0;
    const qmat::PureState psi = purify(DensityMatrix(std::move(e00)));
    CHECK(std::abs(psi.amplitudes()[0]) == doctest::Approx(1.0));
    for (int k = 1; k < 4; ++k) CHECK(std::abs(psi.amplitudes()[static_cast<std::size_t>(k)]) <= 1e-12);

    // Maximally mixed qubit purifies to a maximally entangled pair.
    const qmat::PureState bell = purify(DensityMatrix(Matrix::identity(2) * 0.5));
    const std::array<int, 2> dims{2, 2};
    const std::array<int, 1> keep_env{1};
    const DensityMatrix env = qmat::partial_trace(qmat::density(bell), dims, keep_env);
    CHECK(qmat::von_neumann_entropy(env) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("marginal entropies of a pure bipartite state agree") {
    std::mt19937_64 rng(13);
    for (const auto& [da, db] : std::vector<std::pair<int, int>>{{2, 2}, {2, 4}, {3, 3}, {4, 4}}) {
        for (int rep = 0; rep < 10; ++rep) {
            const qmat::PureState psi = random_pure(da * db, rng);
            const std::array<int, 2> dims{da, db};
            const std::array<int, 1> keep_a{0};
            const std::array<int, 1> keep_b{1};
            const double sa = qmat::von_neumann_entropy(qmat::partial_trace(qmat::density(psi), dims, keep_a));
            const double sb = qmat::von_neumann_entropy(qmat::partial_trace(qmat::density(psi), dims, keep_b));
            CHECK(std::abs(sa - sb) <= 1e-10);
        }
    }

    // Environment marginal of a purified Bell-diagonal state has entropy H(lambda).
    std::mt19937_64 rng2(17);
    for (int rep = 0; rep < 20; ++rep) {
        const qmat::BellDiagonalSpectrum lam = test_helpers::random_spectrum(rng2);
        const qmat::PureState psi = purify(qmat::bell_diagonal_state(lam));
        const std::array<int, 2> dims{4, 4};
        const std::array<int, 1> keep_env{1};
        const double se =
            qmat::von_neumann_entropy(qmat::partial_trace(qmat::density(psi), dims, keep_env));
        CHECK(se == doctest::Approx(qmat::shannon_entropy(lam.values())).epsilon(1e-10));
    }
}

TEST_CASE("binary entropy") {
    CHECK(qmat::binary_entropy(0.5) == 1.0);
    CHECK(qmat::binary_entropy(0.0) == 0.0);
    CHECK(qmat::binary_entropy(1.0) == 0.0);
    for (double p : {0.01, 0.11, 0.3, 0.49}) {
        CHECK(qmat::binary_entropy(p) == doctest::Approx(qmat::binary_entropy(1.0 - p)));
    }
    CHECK_NOTHROW(qmat::binary_entropy(-1e-13));
    CHECK_NOTHROW(qmat::binary_entropy(1.0 + 1e-13));
    CHECK_THROWS_AS(qmat::binary_entropy(-1e-9), DomainError);
    CHECK_THROWS_AS(qmat::binary_entropy(1.1), DomainError);

    // 1 - 2 h(q) changes sign near q = 0.11 (the tomographic-scenario threshold).
    CHECK(1.0 - 2.0 * qmat::binary_entropy(0.1095) > 0.0);
    CHECK(1.0 - 2.0 * qmat::binary_entropy(0.1105) < 0.0);
}

TEST_CASE("von Neumann entropy") {
    std::mt19937_64 rng(19);
    CHECK(qmat::von_neumann_entropy(phi_plus_state()) <= 1e-12);
    CHECK(qmat::von_neumann_entropy(DensityMatrix(Matrix::identity(2) * 0.5)) ==
          doctest::Approx(1.0));

    const double c = std::sqrt(0.44);
    CHECK(qmat::von_neumann_entropy(attack_state(2.4)) ==
          doctest::Approx(qmat::binary_entropy(0.5 * (1.0 + c))).epsilon(1e-12));
    CHECK(qmat::binary_entropy(0.5 * (1.0 + c)) == doctest::Approx(0.65388756420546124));

    for (int dim : {2, 3, 4, 8}) {
        for (int rep = 0; rep < 10; ++rep) {
            const double s = qmat::von_neumann_entropy(random_density(dim, rng));
            CHECK(s >= 0.0);
            CHECK(s <= std::log2(static_cast<double>(dim)) + 1e-12);
        }
    }
}

TEST_CASE("planar observables") {
    CHECK(frobenius_distance(qmat::observable(PlanarMeasurement(0.0)), qmat::pauli_z()) <=
          1e-15);
    CHECK(frobenius_distance(qmat::observable(PlanarMeasurement(kPi / 2.0)), qmat::pauli_x()) <=
          1e-15);

    const Matrix diag = qmat::observable(PlanarMeasurement(kPi / 4.0));
    Matrix expected = qmat::pauli_z() + qmat::pauli_x();
    expected *= cplx(1.0 / std::sqrt(2.0), 0.0);
    CHECK(frobenius_distance(diag, expected) <= 1e-15);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (int rep = 0; rep < 100; ++rep) {
        const PlanarMeasurement m(angle(rng));
        const Matrix o = qmat::observable(m);
        CHECK(o.hermiticity_defect() <= 1e-15);
        CHECK(std::abs(o.trace()) <= 1e-15);
        CHECK(frobenius_distance(o * o, Matrix::identity(2)) <= 1e-14);
    }
}

TEST_CASE("correlators") {
    const DensityMatrix phi = phi_plus_state();
    CHECK(qmat::correlator(phi, PlanarMeasurement(0.0), PlanarMeasurement(0.0)) ==
          doctest::Approx(1.0));
    CHECK(std::abs(qmat::correlator(phi, PlanarMeasurement(0.0), PlanarMeasurement(kPi / 2))) <=
          1e-12);

    // Rank-two attack state with its defining settings: <A1 B1> = 1/sqrt(1+C^2)
    // and <A1 B2> = C^2/sqrt(1+C^2); at S = 2.2 these are 10/11 and 21/110.
    const DensityMatrix rho = attack_state(2.2);
    const double c = std::sqrt(0.21);
    const PlanarMeasurement a1(std::atan(c));
    const qmat::CorrelatorResult r1 =
        qmat::correlator_full(rho, a1, PlanarMeasurement(0.0));
    CHECK(r1.ab == doctest::Approx(10.0 / 11.0).epsilon(1e-12));
    CHECK(std::abs(r1.a) <= 1e-14);
    CHECK(std::abs(r1.b) <= 1e-14);
    const double r2 = qmat::correlator(rho, a1, PlanarMeasurement(kPi / 2.0));
    CHECK(r2 == doctest::Approx(21.0 / 110.0).epsilon(1e-12));
}

TEST_CASE("chsh value") {
    const PlanarMeasurement b1(0.0);
    const PlanarMeasurement b2(kPi / 2.0);
    const PlanarMeasurement a_plus(kPi / 4.0);
    const PlanarMeasurement a_minus(-kPi / 4.0);

    CHECK(qmat::chsh_value(phi_plus_state(), a_plus, a_minus, b1, b2) ==
          doctest::Approx(2.0 * std::numbers::sqrt2).epsilon(1e-12));

    // Product states never violate the classical bound.
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (int rep = 0; rep < 500; ++rep) {
        const DensityMatrix prod(
            kron(random_density(2, rng).op(), random_density(2, rng).op()));
        const double s =
            qmat::chsh_value(prod, PlanarMeasurement(angle(rng)), PlanarMeasurement(angle(rng)),
                             PlanarMeasurement(angle(rng)), PlanarMeasurement(angle(rng)));
        CHECK(std::abs(s) <= 2.0 + 1e-9);
    }

    // The attack state reaches its target with the defining settings.
    const double s = 2.2;
    const double c = std::sqrt(0.21);
    CHECK(qmat::chsh_value(attack_state(s), PlanarMeasurement(std::atan(c)),
                           PlanarMeasurement(-std::atan(c)), b1, b2) ==
          doctest::Approx(s).epsilon(1e-9));

    // No state or settings beat the Tsirelson bound.
    for (int rep = 0; rep < 2000; ++rep) {
        const double val = qmat::chsh_value(random_density(4, rng),
                                            PlanarMeasurement(angle(rng)),
                                            PlanarMeasurement(angle(rng)),
                                            PlanarMeasurement(angle(rng)),
                                            PlanarMeasurement(angle(rng)));
        CHECK(std::abs(val) <= 2.0 * std::numbers::sqrt2 + 1e-9);
    }
}

TEST_CASE("born probabilities") {
    SUBCASE("purified Bell pair with matching measurements") {
        const qmat::PureState psi = purify(phi_plus_state());
        const auto table =
            qmat::born_probabilities(psi, PlanarMeasurement(0.0), PlanarMeasurement(0.0));
        CHECK(table.p[0][0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(table.p[1][1] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(table.p[0][1]) <= 1e-12);
        CHECK(std::abs(table.p[1][0]) <= 1e-12);
    }
    SUBCASE("completeness on random inputs") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
        for (int rep = 0; rep < 50; ++rep) {
            const qmat::PureState psi = test_helpers::random_pure(16, rng);
            const auto table = qmat::born_probabilities(psi, PlanarMeasurement(angle(rng)),
                                                        PlanarMeasurement(angle(rng)));
            const double total =
                table.p[0][0] + table.p[0][1] + table.p[1][0] + table.p[1][1];
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("conditional eavesdropper states of the attack purification are pure") {
        for (double s : {2.1, 2.4, 2.8}) {
            const qmat::PureState psi = purify(attack_state(s));
            const auto table =
                qmat::born_probabilities(psi, PlanarMeasurement(0.0), PlanarMeasurement(0.0));
            for (int b = 0; b < 2; ++b) {
                REQUIRE(table.rho_e_given_b[static_cast<std::size_t>(b)].has_value());
                CHECK(qmat::von_neumann_entropy(
                          *table.rho_e_given_b[static_cast<std::size_t>(b)]) <= 1e-9);
            }
        }
    }
    SUBCASE("zero-probability branch is flagged undefined") {
        std::vector<cplx> amps(8, cplx(0.0, 0.0));
        amps[0] = 1.0;  // |0>|0>|0> with a 2-dimensional third system
        const auto table = qmat::born_probabilities(qmat::PureState(std::move(amps)),
                                                    PlanarMeasurement(0.0),
                                                    PlanarMeasurement(0.0));
        CHECK(table.p_b[0] == doctest::Approx(1.0));
        CHECK(table.rho_e_given_b[0].has_value());
        CHECK_FALSE(table.rho_e_given_b[1].has_value());
    }
}

TEST_CASE("twirls") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

    SUBCASE("Bell-diagonal states are fixed points of the y twirl") {
        for (int rep = 0; rep < 20; ++rep) {
            const DensityMatrix rho =
                qmat::bell_diagonal_state(test_helpers::random_spectrum(rng));
            CHECK(frobenius_distance(qmat::y_twirl(rho).op(), rho.op()) <= 1e-12);
        }
    }
    SUBCASE("y twirl of |00><00|") {
        Matrix m(4);
        m(0, 0) = 1.0;
        const DensityMatrix out = qmat::y_twirl(DensityMatrix(std::move(m)));
        Matrix expected(4);
        expected(0, 0) = 0.5;
        expected(3, 3) = 0.5;
        CHECK(frobenius_distance(out.op(), expected) <= 1e-12);
    }
    SUBCASE("real twirl fixes real states") {
        const DensityMatrix rho = attack_state(2.5);
        CHECK(frobenius_distance(qmat::real_twirl(rho).op(), rho.op()) <= 1e-12);
    }
    SUBCASE("both twirls preserve planar statistics; composition preserves CHSH") {
        for (int rep = 0; rep < 1000; ++rep) {
            const DensityMatrix rho = random_density(4, rng);
            const PlanarMeasurement a(angle(rng)), b(angle(rng));

            const DensityMatrix ry = qmat::y_twirl(rho);
            CHECK(qmat::correlator(ry, a, b) ==
                  doctest::Approx(qmat::correlator(rho, a, b)).epsilon(1e-12));

            const qmat::CorrelatorResult before = qmat::correlator_full(rho, a, b);
            const qmat::CorrelatorResult after = qmat::correlator_full(qmat::real_twirl(rho), a, b);
            CHECK(after.ab == doctest::Approx(before.ab).epsilon(1e-12));
            CHECK(after.a == doctest::Approx(before.a).epsilon(1e-12));
            CHECK(after.b == doctest::Approx(before.b).epsilon(1e-12));

            const PlanarMeasurement a2(angle(rng)), b2(angle(rng));
            const DensityMatrix twirled = qmat::real_twirl(qmat::y_twirl(rho));
            CHECK(std::abs(qmat::chsh_value(twirled, a, a2, b, b2) -
                           qmat::chsh_value(rho, a, a2, b, b2)) <= 1e-12);
        }
    }
    SUBCASE("idempotence, trace preservation, commutation with sy (x) sy") {
        const Matrix yy = kron(qmat::pauli_y(), qmat::pauli_y());
        for (int rep = 0; rep < 50; ++rep) {
            const DensityMatrix rho = random_density(4, rng);
            const DensityMatrix once = qmat::y_twirl(rho);
            CHECK(frobenius_distance(qmat::y_twirl(once).op(), once.op()) <= 1e-12);
            CHECK(once.op().trace().real() == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(frobenius_distance(once.op() * yy, yy * once.op()) <= 1e-12);

            const DensityMatrix real_once = qmat::real_twirl(rho);
            CHECK(frobenius_distance(qmat::real_twirl(real_once).op(), real_once.op()) <= 1e-12);
            CHECK(frobenius_distance(real_once.op(), real_once.op().conjugate()) <= 1e-12);
        }
    }
}

TEST_CASE("Bell spectra") {
    CHECK_THROWS_AS(qmat::BellDiagonalSpectrum(0.5, 0.5, 0.5, -0.5), DomainError);
    CHECK_THROWS_AS(qmat::BellDiagonalSpectrum(0.3, 0.3, 0.3, 0.3), DomainError);

    const qmat::BellDiagonalSpectrum lam(0.1, 0.4, 0.2, 0.3);
    const qmat::BellDiagonalSpectrum canon = lam.canonical();
    CHECK(canon.is_ordered());
    CHECK(canon.phi_plus == doctest::Approx(0.4));
    CHECK(canon.phi_minus == doctest::Approx(0.3));
    CHECK(canon.psi_plus == doctest::Approx(0.2));
    CHECK(canon.psi_minus == doctest::Approx(0.1));

    // The canonical assignment maximizes the reachable violation over
    // relabelings: pairing the extremes dominates every other pairing.
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 200; ++rep) {
        const auto spectrum = test_helpers::random_spectrum(rng);
        const auto v = spectrum.values();
        double best = 0.0;
        const int perms[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
        for (const auto& p : perms) {
            std::array<double, 4> sorted = v;
            std::sort(sorted.begin(), sorted.end(), std::greater<double>());
            const double a = sorted[static_cast<std::size_t>(p[0])];
            const double b = sorted[static_cast<std::size_t>(p[1])];
            const double c = sorted[static_cast<std::size_t>(p[2])];
            const double d = sorted[static_cast<std::size_t>(p[3])];
            best = std::max(best, std::hypot(a - b, c - d));
        }
        CHECK(bounds::s_lambda(spectrum.canonical()) ==
              doctest::Approx(2.0 * std::numbers::sqrt2 * best).epsilon(1e-12));
    }

    // State construction round trip.
    for (int rep = 0; rep < 50; ++rep) {
        const auto spectrum = test_helpers::random_spectrum(rng);
        const DensityMatrix rho = qmat::bell_diagonal_state(spectrum);
        const auto back = qmat::bell_spectrum(rho);
        CHECK(back.phi_plus == doctest::Approx(spectrum.phi_plus).epsilon(1e-12));
        CHECK(back.psi_minus == doctest::Approx(spectrum.psi_minus).epsilon(1e-12));
        CHECK(back.phi_minus == doctest::Approx(spectrum.phi_minus).epsilon(1e-12));
        CHECK(back.psi_plus == doctest::Approx(spectrum.psi_plus).epsilon(1e-12));
        CHECK(qmat::max_bell_offdiagonal(rho) <= 1e-12);
    }
}

TEST_CASE("density matrix validation") {
    Matrix bad_trace = Matrix::identity(2);
    CHECK_THROWS_AS(DensityMatrix{std::move(bad_trace)}, DomainError);

    Matrix non_hermitian(2);
    non_hermitian(0, 0) = 0.5;
    non_hermitian(1, 1) = 0.5;
    non_hermitian(0, 1) = cplx(0.3, 0.0);
    non_hermitian(1, 0) = cplx(0.1, 0.0);
    CHECK_THROWS_AS(DensityMatrix{std::move(non_hermitian)}, NotHermitianError);

    Matrix negative(2);
    negative(0, 0) = 1.2;
    negative(1, 1) = -0.2;
    CHECK_THROWS_AS(DensityMatrix{std::move(negative)}, DomainError);
}
