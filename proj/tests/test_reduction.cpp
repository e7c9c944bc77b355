#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "diqkd/attack.hpp"
#include "diqkd/bounds.hpp"
#include "diqkd/reduction.hpp"
#include "helpers.hpp"

using namespace diqkd;
using qmat::cplx;
using qmat::DensityMatrix;
using qmat::Matrix;
using reduction::DichotomicObservable;
using test_helpers::plant_observables;
using test_helpers::random_unitary;

namespace {

const double kPi = std::numbers::pi;

std::vector<double> recovered_angles(const reduction::BlockDecomposition& decomposition) {
    std::vector<double> angles;
    for (const auto& block : decomposition.blocks) {
        if (block.rank == 2) angles.push_back(block.theta);
    }
    std::sort(angles.begin(), angles.end());
    return angles;
}

}  // namespace

TEST_CASE("dichotomic validation") {
    CHECK_NOTHROW(DichotomicObservable(qmat::pauli_z()));
    CHECK_NOTHROW(DichotomicObservable(qmat::pauli_x()));

    Matrix not_involution(2);
    not_involution(0, 0) = 1.0;
    not_involution(1, 1) = 0.5;
    CHECK_THROWS_AS(DichotomicObservable(std::move(not_involution)), NotDichotomicError);

    Matrix not_hermitian(2);
    not_hermitian(0, 1) = 1.0;
    CHECK_THROWS_AS(DichotomicObservable(std::move(not_hermitian)), NotHermitianError);
}

TEST_CASE("single qubit pair: sigma_z and sigma_x") {
    const auto decomposition = reduction::jordan_blocks(DichotomicObservable(qmat::pauli_z()),
                                                        DichotomicObservable(qmat::pauli_x()));
    REQUIRE(decomposition.blocks.size() == 1);
    CHECK(decomposition.blocks[0].rank == 2);
    CHECK(decomposition.blocks[0].theta == doctest::Approx(kPi / 2.0).epsilon(1e-12));
}

TEST_CASE("identical observables commute into rank-1 blocks") {
    std::mt19937_64 rng(3);
    for (int dim : {2, 4, 6}) {
        const Matrix frame = random_unitary(dim, rng);
        std::vector<double> diag(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) diag[static_cast<std::size_t>(i)] = (i % 2 == 0) ? 1.0 : -1.0;
        const Matrix a = frame * Matrix::diagonal(diag) * frame.adjoint();
        const DichotomicObservable obs(a);
        const auto decomposition = reduction::jordan_blocks(obs, obs);
        CHECK(static_cast<int>(decomposition.blocks.size()) == dim);
        int plus = 0;
        for (const auto& block : decomposition.blocks) {
            CHECK(block.rank == 1);
            CHECK(block.a1_outcome == block.a2_outcome);
            if (block.a1_outcome == 1) ++plus;
        }
        CHECK(plus == dim / 2);
        CHECK(reduction::verify_pinching(obs, obs, decomposition) <= 1e-9);
    }
}

TEST_CASE("construct-then-recover: planted angles in d = 8") {
    std::mt19937_64 rng(5);
    const std::vector<double> planted{kPi / 7.0, kPi / 3.0, 4.0 * kPi / 5.0};
    for (int rep = 0; rep < 25; ++rep) {
        const Matrix frame = random_unitary(8, rng);
        const auto pair = plant_observables(8, planted, {{1, 1}, {-1, 1}}, frame);
        const DichotomicObservable a1(pair.a1);
        const DichotomicObservable a2(pair.a2);
        const auto decomposition = reduction::jordan_blocks(a1, a2);

        std::vector<double> expected = planted;
        std::sort(expected.begin(), expected.end());
        const std::vector<double> angles = recovered_angles(decomposition);
        REQUIRE(angles.size() == expected.size());
        for (std::size_t i = 0; i < angles.size(); ++i) {
            CHECK(std::abs(angles[i] - expected[i]) <= 1e-8);
        }

        int rank1 = 0;
        for (const auto& block : decomposition.blocks) {
            if (block.rank == 1) ++rank1;
        }
        CHECK(rank1 == 2);
        CHECK(reduction::verify_pinching(a1, a2, decomposition) <= 1e-9);
    }
}

TEST_CASE("pinching deviation on random d = 16 pairs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(0.05, kPi - 0.05);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> thetas;
        for (int k = 0; k < 7; ++k) thetas.push_back(angle(rng));
        const auto pair =
            plant_observables(16, thetas, {{1, -1}, {-1, -1}}, random_unitary(16, rng));
        const DichotomicObservable a1(pair.a1);
        const DichotomicObservable a2(pair.a2);
        const auto decomposition = reduction::jordan_blocks(a1, a2);
        CHECK(reduction::verify_pinching(a1, a2, decomposition) <= 1e-9);

        // Completeness and orthogonality of the projector family.
        Matrix sum(16);
        for (const auto& block : decomposition.blocks) sum += block.projector();
        CHECK(frobenius_distance(sum, Matrix::identity(16)) <= 1e-10);
        for (std::size_t i = 0; i < decomposition.blocks.size(); ++i) {
            for (std::size_t j = i + 1; j < decomposition.blocks.size(); ++j) {
                const Matrix prod = decomposition.blocks[i].projector() *
                                    decomposition.blocks[j].projector();
                CHECK(prod.frobenius_norm() <= 1e-10);
            }
        }
    }
}

TEST_CASE("strategy reduction: single maximally entangled block") {
    const auto spec = attack::build_optimal_attack(bounds::kTsirelson, 0.0);
    const DichotomicObservable a1(qmat::observable(spec.a1));
    const DichotomicObservable a2(qmat::observable(spec.a2));
    const DichotomicObservable b1(qmat::observable(spec.b1));
    const DichotomicObservable b2(qmat::observable(spec.b2));
    const auto reduced = reduction::reduce_strategy(spec.rho_ab, a1, a2, b1, b2);
    REQUIRE(reduced.terms.size() == 1);
    CHECK(reduced.terms[0].weight == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(reduced.terms[0].chsh == doctest::Approx(bounds::kTsirelson).epsilon(1e-9));
    CHECK(reduced.global_chsh == doctest::Approx(bounds::kTsirelson).epsilon(1e-9));
}

TEST_CASE("strategy reduction: planted block mixture on d = 4 per side") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        // Two planted qubit strategies, mixed with weights 0.3 / 0.7 on the
        // matching block pairs, then hidden by local unitaries.
        const double theta_a1 = 0.9, theta_a2 = 2.0;
        const double theta_b1 = 0.6, theta_b2 = 2.4;
        const auto spec1 = attack::build_optimal_attack(2.3, 0.0);
        const auto spec2 = attack::build_optimal_attack(2.7, 0.0);

        // Alice blocks: angles theta_a1, theta_a2; Bob blocks likewise.
        const Matrix frame_a = random_unitary(4, rng);
        const Matrix frame_b = random_unitary(4, rng);
        const auto alice = plant_observables(4, {theta_a1, theta_a2}, {}, frame_a);
        const auto bob = plant_observables(4, {theta_b1, theta_b2}, {}, frame_b);

        // States living on (block1, block1) and (block2, block2). In planted
        // coordinates block k of Alice spans rows {2k, 2k+1}.
        Matrix joint(16);
        const auto embed = [&joint](const Matrix& rho4, int block_a, int block_b,
                                    double weight) {
            for (int ia = 0; ia < 2; ++ia)
                for (int ib = 0; ib < 2; ++ib)
                    for (int ja = 0; ja < 2; ++ja)
                        for (int jb = 0; jb < 2; ++jb) {
                            const int row = (2 * block_a + ia) * 4 + (2 * block_b + ib);
                            const int col = (2 * block_a + ja) * 4 + (2 * block_b + jb);
                            joint(row, col) += weight * rho4(ia * 2 + ib, ja * 2 + jb);
                        }
        };
        embed(spec1.rho_ab.op(), 0, 0, 0.3);
        embed(spec2.rho_ab.op(), 1, 1, 0.7);
        const Matrix frame = kron(frame_a, frame_b);
        const DensityMatrix rho(frame * joint * frame.adjoint());

        const auto reduced = reduction::reduce_strategy(
            rho, DichotomicObservable(alice.a1), DichotomicObservable(alice.a2),
            DichotomicObservable(bob.a1), DichotomicObservable(bob.a2));

        REQUIRE(reduced.terms.size() == 2);
        std::array<double, 2> weights{reduced.terms[0].weight, reduced.terms[1].weight};
        std::sort(weights.begin(), weights.end());
        CHECK(weights[0] == doctest::Approx(0.3).epsilon(1e-9));
        CHECK(weights[1] == doctest::Approx(0.7).epsilon(1e-9));
        CHECK(reduced.total_weight == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(reduced.weighted_chsh - reduced.global_chsh) <= 1e-9);
        for (const auto& term : reduced.terms) {
            CHECK(std::abs(term.chsh) <= bounds::kTsirelson + 1e-9);
        }
    }
}

TEST_CASE("strategy reduction: random strategies decompose consistently") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> angle(0.05, kPi - 0.05);
    for (int rep = 0; rep < 8; ++rep) {
        const auto alice = plant_observables(4, {angle(rng), angle(rng)}, {},
                                             random_unitary(4, rng));
        const auto bob =
            plant_observables(4, {angle(rng)}, {{1, 1}, {-1, -1}}, random_unitary(4, rng));
        const DensityMatrix rho = test_helpers::random_density(16, rng);

        const auto reduced = reduction::reduce_strategy(
            rho, DichotomicObservable(alice.a1), DichotomicObservable(alice.a2),
            DichotomicObservable(bob.a1), DichotomicObservable(bob.a2));

        CHECK(reduced.total_weight == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(reduced.weighted_chsh - reduced.global_chsh) <= 1e-9);

        // Every block obeys the violation bound after twirling to the
        // symmetric family: the twirls keep the block's planar statistics.
        for (const auto& term : reduced.terms) {
            const DensityMatrix twirled = qmat::real_twirl(qmat::y_twirl(term.state));
            const double chi = attack::holevo_exact(twirled, term.b1);
            CHECK(chi <= bounds::holevo_bound(std::abs(term.chsh)) + 1e-9);
            const double s_twirled =
                qmat::chsh_value(twirled, term.a1, term.a2, term.b1, term.b2);
            CHECK(s_twirled == doctest::Approx(term.chsh).epsilon(1e-10));
        }
    }
}

TEST_CASE("dimension mismatches are rejected") {
    const DichotomicObservable z2(qmat::pauli_z());
    std::mt19937_64 rng(17);
    const auto planted = plant_observables(4, {1.0, 2.0}, {}, random_unitary(4, rng));
    CHECK_THROWS_AS(reduction::jordan_blocks(z2, DichotomicObservable(planted.a1)),
                    DimensionError);
    const DensityMatrix rho = test_helpers::random_density(4, rng);
    CHECK_THROWS_AS(reduction::reduce_strategy(rho, DichotomicObservable(planted.a1),
                                               DichotomicObservable(planted.a2),
                                               DichotomicObservable(planted.a1),
                                               DichotomicObservable(planted.a2)),
                    DimensionError);
}
