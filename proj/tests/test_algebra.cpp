#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "brute_force.hpp"
#include "mbs/clebsch_gordan.hpp"
#include "mbs/collective_ops.hpp"
#include "mbs/coupled_basis.hpp"
#include "mbs/errors.hpp"
#include "mbs/serialize.hpp"

using namespace mbs;

namespace {

const HalfInt kHalf = half_twice(1);

BlockSystem four_blocks(int spin_twice) {
    return BlockSystem({{half_twice(spin_twice), Membership::AC},
                        {half_twice(spin_twice), Membership::AD},
                        {half_twice(spin_twice), Membership::BC},
                        {half_twice(spin_twice), Membership::BD}});
}

} // namespace

TEST_CASE("clebsch_gordan pinned values") {
    // Two-spin singlet component with the Condon-Shortley sign.
    CHECK(clebsch_gordan(kHalf, kHalf, kHalf, -kHalf, 0, 0) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(clebsch_gordan(kHalf, -kHalf, kHalf, kHalf, 0, 0) ==
          doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
    // Stretched states.
    for (int t1 = 1; t1 <= 5; ++t1)
        for (int t2 = 1; t2 <= 5; ++t2) {
            const HalfInt j1 = half_twice(t1), j2 = half_twice(t2);
            CHECK(clebsch_gordan(j1, j1, j2, j2, j1 + j2, j1 + j2) == doctest::Approx(1.0));
        }
    // <1 0 1 0 | 2 0>; the brute-force basis comparison below pins the rest.
    CHECK(clebsch_gordan(1, 0, 1, 0, 2, 0) ==
          doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));

    CHECK(clebsch_gordan(1, 0, 1, 1, 2, 0) == 0.0); // M != m1+m2
    CHECK(clebsch_gordan(2, 0, kHalf, kHalf, kHalf, kHalf) == 0.0); // J < |j1-j2|
    CHECK(clebsch_gordan(1, 1, 1, -1, 3, 0) == 0.0);           // J > j1+j2
}

TEST_CASE("clebsch_gordan malformed input") {
    CHECK_THROWS_AS(clebsch_gordan(half_twice(-1), 0, 1, 0, 1, 0), std::domain_error);
    CHECK_THROWS_AS(clebsch_gordan(1, 2, 1, 0, 2, 2), std::domain_error);
    CHECK_THROWS_AS(clebsch_gordan(1, kHalf, 1, 0, 2, kHalf), std::domain_error);
}

TEST_CASE("clebsch_gordan orthogonality, all j <= 5/2") {
    for (int t1 = 0; t1 <= 5; ++t1)
        for (int t2 = 0; t2 <= 5; ++t2) {
            const HalfInt j1 = half_twice(t1), j2 = half_twice(t2);
            for (int tj = std::abs(t1 - t2); tj <= t1 + t2; tj += 2)
                for (int tjp = std::abs(t1 - t2); tjp <= t1 + t2; tjp += 2)
                    for (int tm = -tj; tm <= tj; tm += 2)
                        for (int tmp = -tjp; tmp <= tjp; tmp += 2) {
                            double sum = 0.0;
                            for (int tm1 = -t1; tm1 <= t1; tm1 += 2) {
                                const int tm2 = tm - tm1;
                                if (std::abs(tm2) > t2)
                                    continue;
                                if (tmp != tm)
                                    continue;
                                sum += clebsch_gordan(j1, half_twice(tm1), j2, half_twice(tm2),
                                                      half_twice(tj), half_twice(tm)) *
                                       clebsch_gordan(j1, half_twice(tm1), j2, half_twice(tm2),
                                                      half_twice(tjp), half_twice(tmp));
                            }
                            const double expected = (tj == tjp && tm == tmp) ? 1.0 : 0.0;
                            CHECK(std::abs(sum - expected) < 1e-12);
                        }
        }
}

TEST_CASE("couple_chain: four spin-1/2 blocks") {
    const BlockSystem system = four_blocks(1);
    const CoupledBasis basis = couple_chain(system, Scheme::AB);
    REQUIRE(basis.dimension() == 16);

    // Orthonormality.
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t k = i; k < 16; ++k) {
            const double g = dot(basis.state(i).amplitudes, basis.state(k).amplitudes);
            CHECK(std::abs(g - (i == k ? 1.0 : 0.0)) < 1e-10);
        }

    // Each state is a (J^2, J_z) eigenvector of the dense oracle operators.
    const Eigen::MatrixXd j2 = oracle::total_j_squared(system);
    const Eigen::MatrixXd jz = oracle::collective(system, {1, 1, 1, 1}, 'z');
    const Eigen::MatrixXd u = oracle::basis_matrix(basis);
    for (std::size_t i = 0; i < 16; ++i) {
        const CoupledState& st = basis.state(i);
        const Eigen::VectorXd v = u.col(i);
        const double jj = st.j.value() * (st.j.value() + 1.0);
        CHECK((j2 * v - jj * v).norm() < 1e-10);
        CHECK((jz * v - st.m.value() * v).norm() < 1e-10);
    }

    // Multiplicities against brute-force diagonalization of J^2.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j2);
    std::map<int, int> brute; // 2J -> count of eigenvalues J(J+1)
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double jj = es.eigenvalues()[k];
        const int twice_j = static_cast<int>(std::lround(std::sqrt(4.0 * jj + 1.0) - 1.0));
        ++brute[twice_j];
    }
    std::map<int, int> counted;
    for (const CoupledState& st : basis.states())
        ++counted[st.j.twice()];
    CHECK(counted == brute);
    CHECK(counted[0] == 2 * 1); // n(0) = 2 multiplets
    CHECK(counted[2] == 3 * 3); // n(1) = 3
    CHECK(counted[4] == 1 * 5); // n(2) = 1

    // alpha carries exactly the top-level pair for single-block classes.
    for (const CoupledState& st : basis.states())
        CHECK(st.alpha.size() == 2);
}

TEST_CASE("couple_chain: four spin-7/2 blocks") {
    const CoupledBasis basis = couple_chain(four_blocks(7), Scheme::AB);
    REQUIRE(basis.dimension() == 4096);
    std::set<int> j1s, j2s;
    for (const CoupledState& st : basis.states()) {
        j1s.insert(st.top_j1().twice());
        j2s.insert(st.top_j2().twice());
    }
    CHECK(j1s == std::set<int>{0, 2, 4, 6, 8, 10, 12, 14});
    CHECK(j2s == std::set<int>{0, 2, 4, 6, 8, 10, 12, 14});
}

TEST_CASE("couple_chain: single block") {
    const BlockSystem system({{half_twice(5), Membership::BC}});
    const CoupledBasis basis = couple_chain(system, Scheme::AB);
    REQUIRE(basis.dimension() == 6);
    for (const CoupledState& st : basis.states()) {
        CHECK(st.j == half_twice(5));
        CHECK(st.top_j1() == HalfInt(0)); // subset A is empty
        CHECK(st.top_j2() == half_twice(5));
    }
}

TEST_CASE("couple_chain: dimension cap") {
    CHECK_THROWS_AS(couple_chain(four_blocks(7), Scheme::AB, 1000), DimensionCapError);
}

TEST_CASE("couple_chain: multi-block classes keep chain labels") {
    // Six spin-1/2 blocks, two of them sharing class AC.
    const BlockSystem system({{kHalf, Membership::AC},
                              {kHalf, Membership::AC},
                              {kHalf, Membership::AD},
                              {kHalf, Membership::BC},
                              {kHalf, Membership::BD},
                              {kHalf, Membership::BD}});
    const CoupledBasis basis = couple_chain(system, Scheme::AB);
    REQUIRE(basis.dimension() == 64);
    for (const CoupledState& st : basis.states()) {
        // (j_AC, j_BD, j_A, j_B): one chain label per composite class.
        REQUIRE(st.alpha.size() == 4);
        CHECK((st.alpha[0] == HalfInt(0) || st.alpha[0] == HalfInt(1)));
    }
    // Orthonormality survives the longer tree.
    for (std::size_t i = 0; i < basis.dimension(); ++i)
        for (std::size_t k = i; k < basis.dimension(); ++k) {
            const double g = dot(basis.state(i).amplitudes, basis.state(k).amplitudes);
            CHECK(std::abs(g - (i == k ? 1.0 : 0.0)) < 1e-10);
        }
}

TEST_CASE("collective_ladder: total lowering amplitudes") {
    const BlockSystem system = four_blocks(1);
    const CoupledBasis basis = couple_chain(system, Scheme::AB);
    const SparseOperator jm = total_lowering(basis);
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const CoupledState& st = basis.state(i);
        for (const auto& e : jm.column(i)) {
            const CoupledState& dst = basis.state(e.row);
            CHECK(dst.j == st.j);
            CHECK(dst.alpha == st.alpha);
            CHECK(dst.m == st.m - HalfInt(1));
            const double expected = std::sqrt(st.j.value() * (st.j.value() + 1.0) -
                                              st.m.value() * (st.m.value() - 1.0));
            CHECK(e.value == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("collective_ladder: two-block singlet image") {
    const BlockSystem system({{kHalf, Membership::AC}, {kHalf, Membership::BC}});
    const CoupledBasis basis = couple_chain(system, Scheme::AB);
    const SparseOperator op = subset_raising_difference(basis, Scheme::AB);
    const auto singlet = basis.find(HalfInt(0), HalfInt(0), {kHalf, kHalf});
    const auto triplet_top = basis.find(HalfInt(1), HalfInt(1), {kHalf, kHalf});
    REQUIRE(singlet);
    REQUIRE(triplet_top);
    // (I1+ - I2+)|0,0> = -sqrt(2) |1,1> from the explicit singlet expansion.
    CHECK(op.coeff(*triplet_top, *singlet) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("collective_ladder: weight vector validation") {
    const CoupledBasis basis = couple_chain(four_blocks(1), Scheme::AB);
    const std::vector<double> short_w = {1.0, -1.0};
    CHECK_THROWS_AS(collective_ladder(basis, short_w, LadderDirection::Raise),
                    std::invalid_argument);
}

TEST_CASE("collective_ladder matches dense oracle, incl. sector structure") {
    const BlockSystem system = four_blocks(1);
    const CoupledBasis basis = couple_chain(system, Scheme::AB);
    const Eigen::MatrixXd u = oracle::basis_matrix(basis);

    const std::vector<double> ab = system.signed_weights(Scheme::AB);
    const std::vector<double> cd = system.signed_weights(Scheme::CD);
    const Eigen::MatrixXd dense_ab = u.transpose() * oracle::collective(system, ab, '+') * u;
    const Eigen::MatrixXd dense_cd = u.transpose() * oracle::collective(system, cd, '+') * u;

    const SparseOperator op_ab = subset_raising_difference(basis, Scheme::AB);
    const SparseOperator op_cd = subset_raising_difference(basis, Scheme::CD);
    for (std::size_t r = 0; r < 16; ++r)
        for (std::size_t c = 0; c < 16; ++c) {
            CHECK(std::abs(op_ab.coeff(r, c) - dense_ab(r, c)) < 1e-12);
            CHECK(std::abs(op_cd.coeff(r, c) - dense_cd(r, c)) < 1e-12);
        }

    // j_A+ - j_B+ never mixes (j_A, j_B) sectors: check on the dense oracle
    // so the statement is independent of how the sparse path restricts
    // candidates.
    for (std::size_t r = 0; r < 16; ++r)
        for (std::size_t c = 0; c < 16; ++c)
            if (basis.state(r).alpha != basis.state(c).alpha)
                CHECK(std::abs(dense_ab(r, c)) < 1e-12);
}

TEST_CASE("ladder commutation [J+, J-] = 2 Jz") {
    for (int spin_twice : {1, 3}) {
        const BlockSystem system = four_blocks(spin_twice);
        const CoupledBasis basis = couple_chain(system, Scheme::AB);
        const SparseOperator jm = total_lowering(basis);

        Eigen::MatrixXd m_lower = Eigen::MatrixXd::Zero(basis.dimension(), basis.dimension());
        for (const auto& e : jm.entries())
            m_lower(e.row, e.col) = e.value;
        const Eigen::MatrixXd m_raise = m_lower.transpose();
        const Eigen::MatrixXd comm = m_raise * m_lower - m_lower * m_raise;
        for (std::size_t i = 0; i < basis.dimension(); ++i)
            for (std::size_t k = 0; k < basis.dimension(); ++k) {
                const double expected = i == k ? 2.0 * basis.state(i).m.value() : 0.0;
                CHECK(std::abs(comm(i, k) - expected) < 1e-10);
            }
    }
}

TEST_CASE("overlap_transform: four spin-1/2 pair singlets") {
    const BlockSystem system = four_blocks(1);
    const CoupledBasis ab = couple_chain(system, Scheme::AB);
    const CoupledBasis cd = couple_chain(system, Scheme::CD);
    const SparseOperator u = overlap_transform(ab, cd);

    const auto from = ab.find(HalfInt(0), HalfInt(0), {HalfInt(0), HalfInt(0)});
    const auto to = cd.find(HalfInt(0), HalfInt(0), {HalfInt(0), HalfInt(0)});
    REQUIRE(from);
    REQUIRE(to);
    // Hand oracle: blocks (1,2,3,4) = (AC,AD,BC,BD); the AB state is
    // singlet(1,2) x singlet(3,4), the CD state singlet(1,3) x singlet(2,4),
    // with singlet(i,k) = (|ud> - |du>)/sqrt(2). Expanding both in the 16
    // product kets leaves an overlap of magnitude 1/2.
    CHECK(std::abs(u.coeff(*to, *from)) == doctest::Approx(0.5).epsilon(1e-12));

    // Orthogonality and (J,M) block structure.
    Eigen::MatrixXd ud = Eigen::MatrixXd::Zero(16, 16);
    for (const auto& e : u.entries()) {
        CHECK(cd.state(e.row).j == ab.state(e.col).j);
        CHECK(cd.state(e.row).m == ab.state(e.col).m);
        ud(e.row, e.col) = e.value;
    }
    CHECK((ud * ud.transpose() - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() <
          1e-10);

    CHECK_THROWS_AS(overlap_transform(ab, couple_chain(four_blocks(3), Scheme::CD)),
                    std::invalid_argument);
}

TEST_CASE("serialization round trips") {
    const BlockSystem system = four_blocks(1);
    const CoupledBasis basis = couple_chain(system, Scheme::AB);

    const CoupledBasis back = coupled_basis_from_json(coupled_basis_to_json(basis));
    REQUIRE(back.dimension() == basis.dimension());
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        CHECK(back.state(i).j == basis.state(i).j);
        CHECK(back.state(i).m == basis.state(i).m);
        CHECK(back.state(i).alpha == basis.state(i).alpha);
        CHECK(dot(back.state(i).amplitudes, basis.state(i).amplitudes) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }

    const SparseOperator op = subset_raising_difference(basis, Scheme::AB);
    const SparseOperator op_back = sparse_operator_from_json(sparse_operator_to_json(op));
    CHECK(op_back.entries().size() == op.entries().size());
    for (std::size_t k = 0; k < op.entries().size(); ++k) {
        CHECK(op_back.entries()[k].row == op.entries()[k].row);
        CHECK(op_back.entries()[k].col == op.entries()[k].col);
        CHECK(op_back.entries()[k].value == op.entries()[k].value);
    }

    const BlockSystem sys_back = block_system_from_json(block_system_to_json(system));
    CHECK(sys_back == system);
}
