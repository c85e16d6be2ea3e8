#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "pfchan/pf.hpp"
#include "pfchan/schur.hpp"

using namespace pfchan;
using namespace pfchan::testing;

namespace {

PFWitness identity_witness(Index n) {
    PFWitness w;
    w.n = n;
    w.block_dims = {1};
    w.block_weights = RVec::Ones(1);
    w.ops = {Mat::Ones(1, 1)};
    w.kraus = {Mat::Identity(n, n)};
    return w;
}

Frame standard_frame(Index d) {
    Frame f;
    f.weights = RVec::Constant(d, 1.0 / static_cast<double>(d));
    for (Index s = 0; s < d; ++s) {
        RVec e = RVec::Zero(d);
        e[s] = 1.0;
        f.vectors.push_back(e);
    }
    return f;
}

Channel diagonal_kraus_channel() {
    return Channel::from_kraus({matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)});
}

// Channel mixing the identity with the quarter-turn rotation: Choi rank 2
// with a -1/2 entry, the genuinely non-PF shape at rank 2.
Channel rotation_mixture() {
    Mat rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;
    const double a = std::sqrt(0.5);
    return Channel::from_kraus({a * Mat::Identity(2, 2), a * rot});
}

} // namespace

TEST_CASE("verify_witness", "[pf]") {
    Tolerance tol;
    SECTION("identity channel with the trivial witness") {
        Channel ch = Channel::from_kraus({Mat::Identity(3, 3)});
        WitnessReport rep = verify_witness(ch, identity_witness(3), tol);
        REQUIRE(rep.ok);
        REQUIRE(rep.map_residual <= tol.residual);
    }
    SECTION("depolarizing with the projection witness") {
        Channel ch = depolarizing(2);
        PFWitness w = abelian_witness_from_frame(ch, standard_frame(4), tol);
        WitnessReport rep = verify_witness(ch, w, tol);
        REQUIRE(rep.ok);
    }
    SECTION("a witness for the wrong channel fails") {
        Channel ch = werner_holevo();
        WitnessReport rep = verify_witness(ch, identity_witness(3), tol);
        REQUIRE_FALSE(rep.ok);
    }
    SECTION("tampered weights are rejected") {
        Channel ch = depolarizing(2);
        PFWitness w = abelian_witness_from_frame(ch, standard_frame(4), tol);
        w.block_weights[0] = 0.5;
        REQUIRE_FALSE(verify_witness(ch, w, tol).ok);
    }
}

TEST_CASE("abelian_witness_from_frame", "[pf]") {
    Tolerance tol;
    SECTION("diagonal Kraus channel with the standard frame") {
        Channel ch = diagonal_kraus_channel();
        PFWitness w = abelian_witness_from_frame(ch, standard_frame(2), tol);
        REQUIRE(w.m() == 2);
        REQUIRE(w.kind() == "abelian");
        REQUIRE(verify_witness(ch, w, tol).ok);
    }
    SECTION("depolarizing n=2 with the four standard basis vectors") {
        Channel ch = depolarizing(2);
        PFWitness w = abelian_witness_from_frame(ch, standard_frame(4), tol);
        REQUIRE(w.m() == 4);
        REQUIRE(verify_witness(ch, w, tol).ok);
    }
    SECTION("Werner-Holevo rejects every frame vector") {
        REQUIRE_THROWS_AS(abelian_witness_from_frame(werner_holevo(), standard_frame(3), tol),
                          FrameNotInCone);
    }
    SECTION("a non-resolution is rejected") {
        Frame f = standard_frame(2);
        f.vectors[1] = f.vectors[0];
        REQUIRE_THROWS_AS(abelian_witness_from_frame(diagonal_kraus_channel(), f, tol),
                          FrameNotResolution);
    }
}

TEST_CASE("decide_rank2 on fixed channels", "[pf]") {
    Tolerance tol;
    SECTION("diagonal Kraus channel is PF with an orthonormal frame") {
        PFDecision dec = decide_rank2(diagonal_kraus_channel(), tol);
        REQUIRE(dec.verdict == Verdict::pf);
        REQUIRE(dec.witness.has_value());
        REQUIRE(verify_witness(diagonal_kraus_channel(), *dec.witness, tol).ok);
    }
    SECTION("identity/swap-off-diagonal mixture is PF") {
        const double a = std::sqrt(0.5);
        Mat sw(2, 2);
        sw << 0.0, 1.0, 1.0, 0.0;
        Channel ch = Channel::from_kraus({a * Mat::Identity(2, 2), a * sw});
        // brute-force entry scan: the Choi matrix is entrywise nonnegative
        REQUIRE(ch.choi().real().minCoeff() >= -tol.entry_zero);
        REQUIRE(max_imag(ch.choi()) <= tol.entry_zero);
        PFDecision dec = decide_rank2(ch, tol);
        REQUIRE(dec.verdict == Verdict::pf);
        REQUIRE(verify_witness(ch, *dec.witness, tol).ok);
    }
    SECTION("identity/rotation mixture is not PF with a -1/2 Choi entry") {
        Channel ch = rotation_mixture();
        REQUIRE(ch.choi_rank(tol) == 2);
        PFDecision dec = decide_rank2(ch, tol);
        REQUIRE(dec.verdict == Verdict::not_pf);
        REQUIRE(dec.certificate.type == Certificate::Type::negative_choi_entry);
        REQUIRE(dec.certificate.value == Catch::Approx(-0.5));
    }
    SECTION("wrong rank is refused") {
        REQUIRE_THROWS_AS(decide_rank2(depolarizing(2), tol), WrongRank);
        REQUIRE_THROWS_AS(decide_rank2(Channel::from_kraus({Mat::Identity(2, 2)}), tol),
                          WrongRank);
    }
}

TEST_CASE("decide_rank2 matches the sign test on random rank-2 channels", "[pf][slow]") {
    Tolerance tol;
    std::mt19937_64 rng(160913);
    int pf_count = 0, not_pf_count = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Index n = 2 + static_cast<Index>(trial % 2);
        Channel ch = random_rank2_real_channel(n, rng);
        PFDecision dec = decide_rank2(ch, tol);
        bool nonneg = ch.choi().real().minCoeff() >= -tol.entry_zero;
        REQUIRE((dec.verdict == Verdict::pf) == nonneg);
        if (dec.verdict == Verdict::pf) {
            ++pf_count;
            WitnessReport rep = verify_witness(ch, *dec.witness, tol);
            REQUIRE(rep.ok);
            REQUIRE(rep.map_residual <= 1e-8);
        } else {
            ++not_pf_count;
        }
    }
    INFO("pf " << pf_count << ", not_pf " << not_pf_count);
    REQUIRE(not_pf_count > 0);
}

TEST_CASE("is_cp_choi", "[pf]") {
    Tolerance tol;
    SECTION("permutation mixtures certify Yes with sqrt(q) P Kraus") {
        std::mt19937_64 rng(2718);
        Channel ch = random_permutation_mixture(3, 3, rng);
        PFDecision dec = is_cp_choi(ch, tol);
        REQUIRE(dec.verdict == Verdict::pf);
        REQUIRE_FALSE(dec.nonneg_kraus.empty());
        for (const Mat& l : dec.nonneg_kraus)
            REQUIRE(l.real().minCoeff() >= -tol.entry_zero);
        REQUIRE(verify_witness(ch, *dec.witness, tol).ok);
    }
    SECTION("depolarizing certifies Yes") {
        PFDecision dec = is_cp_choi(depolarizing(3), tol);
        REQUIRE(dec.verdict == Verdict::pf);
        Mat rebuilt = Mat::Zero(9, 9);
        for (const Mat& l : dec.nonneg_kraus) {
            CVec v = vec(l);
            rebuilt += v * v.adjoint();
        }
        REQUIRE(max_abs_diff(rebuilt, depolarizing(3).choi()) <= 1e-8);
    }
    SECTION("a nonnegative Choi given only via from_choi is found by search") {
        // depolarizing passed through its Choi matrix: the stored Kraus come
        // from eigenvectors and are not entrywise nonnegative, so the
        // rotation search has to do the work
        Channel ch = Channel::from_choi(depolarizing(2).choi(), 2, tol);
        bool eigen_kraus_nonneg = true;
        for (const Mat& k : ch.kraus())
            if (k.real().minCoeff() < -tol.entry_zero) eigen_kraus_nonneg = false;
        if (!eigen_kraus_nonneg) {
            PFDecision dec = is_cp_choi(ch, tol, {}, 7);
            REQUIRE(dec.verdict == Verdict::pf);
            for (const Mat& l : dec.nonneg_kraus)
                REQUIRE(l.real().minCoeff() >= -tol.entry_zero);
            REQUIRE(verify_witness(ch, *dec.witness, tol).ok);
        }
    }
    SECTION("Schur channel of the pentagon matrix returns No via the Gram certificate") {
        CorrelationMatrix w(pentagon_gram(), tol);
        Channel ch = schur_channel(w, tol);
        REQUIRE(ch.choi().real().minCoeff() >= -tol.entry_zero);  // DNN Choi
        PFDecision dec = is_cp_choi(ch, tol);
        REQUIRE(dec.verdict == Verdict::not_pf);
        REQUIRE(dec.certificate.type == Certificate::Type::non_cpsd_gram);
        REQUIRE(dec.certificate.gram.found);
        REQUIRE(dec.certificate.gram.gram_dnn);
    }
    SECTION("negative Choi entry certifies No directly") {
        PFDecision dec = is_cp_choi(werner_holevo(), tol);
        REQUIRE(dec.verdict == Verdict::not_pf);
        REQUIRE(dec.certificate.type == Certificate::Type::negative_choi_entry);
    }
    SECTION("zero budget yields an honest Unknown") {
        Channel ch = Channel::from_choi(depolarizing(2).choi(), 2, tol);
        bool eigen_kraus_nonneg = true;
        for (const Mat& k : ch.kraus())
            if (k.real().minCoeff() < -tol.entry_zero) eigen_kraus_nonneg = false;
        if (!eigen_kraus_nonneg) {
            CpSearchBudget budget;
            budget.restarts = 0;
            PFDecision dec = is_cp_choi(ch, tol, budget);
            REQUIRE(dec.verdict == Verdict::unknown);
            REQUIRE(dec.certificate.type == Certificate::Type::budget_exhausted);
        }
    }
    SECTION("is_cp_choi is deterministic for a fixed seed") {
        Channel ch = Channel::from_choi(depolarizing(2).choi(), 2, tol);
        PFDecision a = is_cp_choi(ch, tol, {}, 42);
        PFDecision b = is_cp_choi(ch, tol, {}, 42);
        REQUIRE(a.verdict == b.verdict);
        REQUIRE(a.nonneg_kraus.size() == b.nonneg_kraus.size());
        for (size_t i = 0; i < a.nonneg_kraus.size(); ++i)
            REQUIRE(max_abs_diff(a.nonneg_kraus[i], b.nonneg_kraus[i]) == 0.0);
    }
}

TEST_CASE("compose_witnesses", "[pf]") {
    Tolerance tol;
    SECTION("composing with the identity witness keeps the channel") {
        Channel ch = diagonal_kraus_channel();
        PFWitness w = abelian_witness_from_frame(ch, standard_frame(2), tol);
        PFWitness composed = compose_witnesses(identity_witness(2), w, tol);
        Channel comp = Channel::from_kraus(
            compose_kraus(Channel::from_kraus({Mat::Identity(2, 2)}), ch), tol);
        REQUIRE(verify_witness(comp, composed, tol).ok);
        // the composed channel acts exactly like the original
        std::mt19937_64 rng(5);
        Mat x = random_gaussian_complex(2, 2, rng);
        REQUIRE(max_abs_diff(comp.apply(x), ch.apply(x)) <= 1e-12);
    }
    SECTION("two diagonal-Kraus channels compose with dimension m1*m2") {
        Channel a = diagonal_kraus_channel();
        Channel b = diagonal_kraus_channel();
        PFWitness wa = abelian_witness_from_frame(a, standard_frame(2), tol);
        PFWitness wb = abelian_witness_from_frame(b, standard_frame(2), tol);
        PFWitness composed = compose_witnesses(wa, wb, tol);
        REQUIRE(composed.m() == 4);
        REQUIRE(composed.kind() == "abelian");
        Channel comp = Channel::from_kraus(compose_kraus(a, b), tol);
        WitnessReport rep = verify_witness(comp, composed, tol);
        REQUIRE(rep.ok);
        REQUIRE(rep.map_residual <= 1e-8);
    }
    SECTION("depolarizing composed with itself is depolarizing") {
        Channel dep = depolarizing(2);
        PFWitness w = abelian_witness_from_frame(dep, standard_frame(4), tol);
        PFWitness composed = compose_witnesses(w, w, tol);
        Channel comp = Channel::from_kraus(compose_kraus(dep, dep), tol);
        for (Index i = 0; i < 2; ++i)
            for (Index j = 0; j < 2; ++j) {
                Mat unit = matrix_unit(2, i, j);
                REQUIRE(max_abs_diff(comp.apply(unit), dep.apply(unit)) <= 1e-12);
            }
        REQUIRE(verify_witness(comp, composed, tol).ok);
    }
}

TEST_CASE("convex_combine_witnesses", "[pf]") {
    Tolerance tol;
    SECTION("lambda = 1/2 of a channel with itself verifies against it") {
        Channel ch = diagonal_kraus_channel();
        PFWitness w = abelian_witness_from_frame(ch, standard_frame(2), tol);
        PFWitness mixed = convex_combine_witnesses(w, w, 0.5, tol);
        Channel comb = Channel::from_kraus(convex_combine_kraus(ch, ch, 0.5), tol);
        REQUIRE(mixed.m() == 4);
        REQUIRE(verify_witness(comb, mixed, tol).ok);
        std::mt19937_64 rng(9);
        Mat x = random_gaussian_complex(2, 2, rng);
        REQUIRE(max_abs_diff(comb.apply(x), ch.apply(x)) <= 1e-12);
    }
    SECTION("identity mixed with depolarizing") {
        Channel id = Channel::from_kraus({Mat::Identity(2, 2)});
        Channel dep = depolarizing(2);
        PFWitness wi = identity_witness(2);
        PFWitness wd = abelian_witness_from_frame(dep, standard_frame(4), tol);
        PFWitness mixed = convex_combine_witnesses(wi, wd, 0.5, tol);
        Channel comb = Channel::from_kraus(convex_combine_kraus(id, dep, 0.5), tol);
        REQUIRE(verify_witness(comb, mixed, tol).ok);
        // X -> (X + Tr(X) I/2)/2 on matrix units
        for (Index i = 0; i < 2; ++i)
            for (Index j = 0; j < 2; ++j) {
                Mat unit = matrix_unit(2, i, j);
                Mat expected = 0.5 * unit +
                               0.5 * unit.trace() * Mat::Identity(2, 2) / 2.0;
                REQUIRE(max_abs_diff(comb.apply(unit), expected) <= 1e-12);
            }
    }
    SECTION("lambda = 0.3 of two permutation channels") {
        std::mt19937_64 rng(1001);
        Channel a = random_permutation_mixture(3, 2, rng);
        Channel b = random_permutation_mixture(3, 2, rng);
        PFDecision da = is_cp_choi(a, tol), db = is_cp_choi(b, tol);
        REQUIRE(da.verdict == Verdict::pf);
        REQUIRE(db.verdict == Verdict::pf);
        PFWitness mixed = convex_combine_witnesses(*da.witness, *db.witness, 0.3, tol);
        Channel ca = Channel::from_kraus(da.witness->kraus, tol);
        Channel cb = Channel::from_kraus(db.witness->kraus, tol);
        Channel comb = Channel::from_kraus(convex_combine_kraus(ca, cb, 0.3), tol);
        REQUIRE(verify_witness(comb, mixed, tol).ok);
    }
    SECTION("lambda outside (0,1) is rejected") {
        PFWitness w = identity_witness(2);
        REQUIRE_THROWS_AS(convex_combine_witnesses(w, w, 0.0, tol), LambdaOutOfRange);
        REQUIRE_THROWS_AS(convex_combine_witnesses(w, w, 1.0, tol), LambdaOutOfRange);
    }
}

TEST_CASE("witness combinators verify on random abelian-witnessed pairs", "[pf][slow]") {
    Tolerance tol;
    std::mt19937_64 rng(73003);
    for (int trial = 0; trial < 50; ++trial) {
        Index n = 2 + static_cast<Index>(trial % 2);
        Channel a = random_permutation_mixture(n, 2 + static_cast<Index>(rng() % 2), rng);
        Channel b = random_permutation_mixture(n, 2 + static_cast<Index>(rng() % 2), rng);
        PFDecision da = is_cp_choi(a, tol), db = is_cp_choi(b, tol);
        REQUIRE(da.verdict == Verdict::pf);
        REQUIRE(db.verdict == Verdict::pf);

        PFWitness composed = compose_witnesses(*da.witness, *db.witness, tol);
        Channel ca = Channel::from_kraus(da.witness->kraus, tol);
        Channel cb = Channel::from_kraus(db.witness->kraus, tol);
        Channel comp = Channel::from_kraus(compose_kraus(ca, cb), tol);
        WitnessReport rep = verify_witness(comp, composed, tol);
        REQUIRE(rep.ok);
        REQUIRE(rep.map_residual <= 1e-8);

        double lambda = 0.25 + 0.5 * static_cast<double>(trial) / 50.0;
        PFWitness mixed = convex_combine_witnesses(*da.witness, *db.witness, lambda, tol);
        Channel comb = Channel::from_kraus(convex_combine_kraus(ca, cb, lambda), tol);
        WitnessReport rep2 = verify_witness(comb, mixed, tol);
        REQUIRE(rep2.ok);
        REQUIRE(rep2.map_residual <= 1e-8);
    }
}

TEST_CASE("spectrahedron_contains", "[pf]") {
    Tolerance tol;
    Channel ch = diagonal_kraus_channel();
    PFWitness w = abelian_witness_from_frame(ch, standard_frame(2), tol);
    SECTION("zero always belongs") {
        REQUIRE(spectrahedron_contains(w, RVec::Zero(2), tol));
    }
    SECTION("standard basis directions for the orthonormal frame") {
        RVec e1(2);
        e1 << 1.0, 0.0;
        REQUIRE(spectrahedron_contains(w, e1, tol));
    }
    SECTION("an indefinite operator direction fails") {
        PFWitness bad = w;
        Mat a = Mat::Zero(2, 2);
        a(0, 0) = std::sqrt(2.0);
        a(1, 1) = -std::sqrt(2.0);
        bad.ops[0] = a;
        RVec e1(2);
        e1 << 1.0, 0.0;
        REQUIRE_FALSE(spectrahedron_contains(bad, e1, tol));
    }
}

TEST_CASE("numerical_range_point", "[pf]") {
    Tolerance tol;
    Channel ch = diagonal_kraus_channel();
    PFWitness w = abelian_witness_from_frame(ch, standard_frame(2), tol);
    SECTION("basis vectors read off scaled frame vectors") {
        CVec e0 = CVec::Zero(2);
        e0[0] = 1.0;
        RVec p = numerical_range_point(w, e0, tol);
        // (A_i)_{00} = sqrt(d) v_0[i] with v_0 = (1,0), d = 2
        REQUIRE(p[0] == Catch::Approx(std::sqrt(2.0)));
        REQUIRE(p[1] == Catch::Approx(0.0).margin(1e-14));
    }
    SECTION("m = 1 witnesses return the scalar tuple") {
        PFWitness w1 = identity_witness(3);
        CVec x = CVec::Ones(1);
        RVec p = numerical_range_point(w1, x, tol);
        REQUIRE(p.size() == 1);
        REQUIRE(p[0] == Catch::Approx(1.0));
    }
    SECTION("non-unit vectors are rejected") {
        CVec x = CVec::Ones(2);
        REQUIRE_THROWS_AS(numerical_range_point(w, x, tol), NotUnitVector);
    }
    SECTION("random points land in NC(K)") {
        std::mt19937_64 rng(606);
        for (int trial = 0; trial < 100; ++trial) {
            CVec x = random_gaussian_complex(2, 1, rng).col(0);
            x.normalize();
            RVec p = numerical_range_point(w, x, tol);
            REQUIRE(nc_membership(ch, p, tol).member);
        }
    }
}

TEST_CASE("witness cone inclusions from the duality chain", "[pf]") {
    Tolerance tol;
    std::mt19937_64 rng(1309);
    // NC(K)* is inside D(A) for every valid witness, and D(A) sits inside
    // its own dual cone.
    for (int trial = 0; trial < 6; ++trial) {
        Channel ch = random_permutation_mixture(3, 2 + static_cast<Index>(rng() % 2), rng);
        PFDecision dec = is_cp_choi(ch, tol);
        REQUIRE(dec.verdict == Verdict::pf);
        const PFWitness& w = *dec.witness;
        // generators w_ab over the witness's own Kraus list (which the
        // combinators do not keep linearly independent)
        const Index dw = static_cast<Index>(w.kraus.size());
        for (Index a = 0; a < w.n; ++a)
            for (Index b = 0; b < w.n; ++b) {
                RVec gen(dw);
                for (Index q = 0; q < dw; ++q) gen[q] = w.kraus[static_cast<size_t>(q)](a, b).real();
                REQUIRE(spectrahedron_contains(w, gen, tol));
            }

        // D(A) self-duality direction via rejection sampling
        std::vector<RVec> inside;
        const Index d = static_cast<Index>(w.ops.size());
        while (inside.size() < 6) {
            RVec y = random_gaussian_real(d, 1, rng).col(0);
            if (spectrahedron_contains(w, y, tol)) inside.push_back(y);
            RVec shifted = y + 2.0 * RVec::Ones(d);  // bias toward the PSD side
            if (inside.size() < 6 && spectrahedron_contains(w, shifted, tol))
                inside.push_back(shifted);
        }
        for (const RVec& y1 : inside)
            for (const RVec& y2 : inside) REQUIRE(y1.dot(y2) >= -1e-9);
    }
}
