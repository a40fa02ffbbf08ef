#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cantorlab/deficiency.hpp"

using namespace cantorlab;

namespace {

BitString bs(const char* s) { return BitString::parse(s); }

std::vector<Interval> level(std::initializer_list<const char*> stems) {
    std::vector<Interval> out;
    for (const char* s : stems) out.push_back(Interval{BitString::parse(s)});
    return out;
}

MLTest chain_test(int levels) {  // V_n = [0^n]
    std::vector<std::vector<Interval>> v;
    for (int n = 1; n <= levels; ++n) v.push_back({Interval{BitString::repeated(0, n)}});
    return MLTest::from_levels(std::move(v));
}

// t = 2^k on [0^k 1] for k = 1..kmax
BasicFunction geometric_tower(int kmax) {
    std::vector<std::pair<BitString, Rational>> pieces;
    for (int k = 1; k <= kmax; ++k)
        pieces.emplace_back(BitString::repeated(0, k).child(1), pow2(k));
    return BasicFunction::from_pieces(std::move(pieces));
}

}  // namespace

TEST_CASE("mltest_validate exact level measures") {
    MLTest boundary = chain_test(6);
    auto measures = boundary.validate(Measure::uniform());
    for (int n = 1; n <= 6; ++n) CHECK(measures[n - 1] == pow2(-n));

    // V_n = [0^(n-1)]: level 1 is the whole space
    std::vector<std::vector<Interval>> shifted;
    for (int n = 1; n <= 3; ++n) shifted.push_back({Interval{BitString::repeated(0, n - 1)}});
    CHECK_THROWS_AS(MLTest::from_levels(shifted).validate(Measure::uniform()), InvalidTest);

    // V_n = [0^2n] u [1 0^(2n-1)]: mu = 2^(-2n+1) <= 2^-n
    std::vector<std::vector<Interval>> twin;
    for (int n = 1; n <= 4; ++n)
        twin.push_back({Interval{BitString::repeated(0, 2 * n)},
                        Interval{bs("1").concat(BitString::repeated(0, 2 * n - 1))}});
    auto twin_measures = MLTest::from_levels(twin).validate(Measure::uniform());
    for (int n = 1; n <= 4; ++n) CHECK(twin_measures[n - 1] == pow2(-2 * n + 1));

    // nesting violation: level 2 escapes level 1
    CHECK_THROWS_AS(MLTest::from_levels({level({"00"}), level({"01"})}).validate(Measure::uniform()),
                    InvalidTest);
}

TEST_CASE("deficiency_from_test largest containing level") {
    MLTest t = chain_test(6);
    CHECK(t.deficiency(bs("0000")) == 4);
    CHECK(t.deficiency(bs("1")) == 0);
    std::vector<std::vector<Interval>> dbl;
    for (int n = 1; n <= 4; ++n) dbl.push_back({Interval{BitString::repeated(0, 2 * n)}});
    CHECK(MLTest::from_levels(dbl).deficiency(BitString::repeated(0, 6)) == 3);
}

TEST_CASE("universal_mix diagonal union") {
    Measure mu = Measure::uniform();
    MLTest v = chain_test(8);
    // single test: U_n = V_(n+1), deficiency drops by exactly 1
    MLTest u1 = universal_mix({v}, mu);
    CHECK(u1.max_level() == 7);
    for (int k = 2; k <= 7; ++k) CHECK(u1.deficiency(BitString::repeated(0, k)) == k - 1);

    // two copies collapse: U_n = [0^(n+1)] u [0^(n+2)] = [0^(n+1)]
    MLTest u2 = universal_mix({v, v}, mu);
    auto measures = u2.validate(mu);
    for (std::size_t i = 0; i < measures.size(); ++i)
        CHECK(measures[i] == pow2(-static_cast<long>(i) - 2));

    // empty family: empty test, deficiency 0 everywhere
    MLTest u0 = universal_mix({}, mu);
    CHECK(u0.max_level() == 0);
    CHECK(u0.deficiency(bs("0101")) == 0);
}

TEST_CASE("universal_mix domination holds on every stem") {
    Measure mu = Measure::uniform();
    std::vector<std::vector<Interval>> fat;
    for (int n = 1; n <= 6; ++n)
        fat.push_back({Interval{BitString::repeated(0, 2 * n)},
                       Interval{bs("1").concat(BitString::repeated(0, 2 * n - 1))}});
    std::vector<MLTest> family{chain_test(8), MLTest::from_levels(fat),
                               MLTest::from_levels({level({"10"}), level({"100"}), level({"1000"})})};
    MLTest mixed = universal_mix(family, mu);
    mixed.validate(mu);
    // exhaustive to depth 10: d_U(x) >= d_j(x) - j, integer arithmetic
    for (int len = 0; len <= 10; ++len)
        for (unsigned long s = 0; s < (1ul << len); ++s) {
            BitString x;
            for (int i = len - 1; i >= 0; --i) x = x.child((s >> i) & 1);
            int du = mixed.deficiency(x);
            for (std::size_t j = 0; j < family.size(); ++j)
                CHECK(du >= family[j].deficiency(x) - static_cast<int>(j) - 1);
        }
}

TEST_CASE("pb_from_function level sets") {
    Measure mu = Measure::uniform();
    BasicFunction tower = geometric_tower(8);
    StagedEnumeration staged = StagedEnumeration::from_stages({tower});
    MLTest t = pb_from_function(staged, mu);
    CHECK(t.max_level() == 7);
    auto measures = t.validate(mu);
    for (int n = 1; n <= 7; ++n) CHECK(measures[n - 1] == pow2(-n - 1) - pow2(-9));
    // nesting is exact by construction
    for (int n = 1; n < 7; ++n) CHECK(t.level(n + 1).subset_of(t.level(n)));
    // on settled stems the deficiency tracks the log of t (strict level sets)
    CHECK(t.deficiency(bs("0001")) == 2);  // t = 8 there
    BasicFunction five = BasicFunction::from_pieces({{bs("000"), rat(5)}});
    MLTest tf = pb_from_function(StagedEnumeration::from_stages({five}), mu);
    CHECK(tf.deficiency(bs("000")) == 2);  // floor(log2 5)

    // t == 1: all levels empty
    BasicFunction one = BasicFunction::from_pieces({{BitString(), rat(1)}});
    CHECK(pb_from_function(StagedEnumeration::from_stages({one}), mu).max_level() == 0);

    // t = 4 on [0]: 4 * mu{t >= 4} = 2 > 1
    BasicFunction bad = BasicFunction::from_pieces({{bs("0"), rat(4)}});
    CHECK_THROWS_AS(pb_from_function(StagedEnumeration::from_stages({bad}), mu),
                    NotProbabilityBounded);
}

TEST_CASE("eb_mix clips at the last stage with integral <= 1") {
    Measure mu = Measure::uniform();
    // one candidate with integral 1/2 -> mixture integral 1/4
    BasicFunction half = BasicFunction::from_pieces({{bs("0"), rat(1)}});
    StagedEnumeration single = StagedEnumeration::from_stages({half});
    CHECK(eb_mix({single}, mu).final_stage().integrate(mu) == rat(1, 4));

    // staged integral rising 1/2 -> 1 -> 3/2: frozen at the stage with 1
    std::vector<BasicFunction> rising{geometric_tower(1), geometric_tower(2), geometric_tower(3)};
    CHECK(rising[0].integrate(mu) == rat(1, 2));
    CHECK(rising[1].integrate(mu) == rat(1));
    CHECK(rising[2].integrate(mu) == rat(3, 2));
    StagedEnumeration capped = StagedEnumeration::from_stages(rising);
    StagedEnumeration mixed = eb_mix({capped}, mu);
    CHECK(mixed.final_stage().integrate(mu) == rat(1, 2));  // 2^-1 * 1
    CHECK(mixed.stage(2) == mixed.stage(1));                // frozen

    // empty list -> zero function; stagewise integrals stay <= 1
    CHECK(eb_mix({}, mu).final_stage().is_zero());
    StagedEnumeration two = eb_mix({single, capped}, mu);
    for (std::size_t s = 0; s < two.size(); ++s) CHECK(two.stage(s).integrate(mu) <= 1);
}

TEST_CASE("gacs_deficiency sup and sum forms") {
    Measure mu = Measure::uniform();
    // m(w) = 2^(-2|w|-1) on all stems to depth 4, root included
    std::map<BitString, Rational> mass{{BitString(), rat(1, 2)}};
    for (int n = 1; n <= 4; ++n)
        for (unsigned long s = 0; s < (1ul << n); ++s) {
            BitString x;
            for (int i = n - 1; i >= 0; --i) x = x.child((s >> i) & 1);
            mass[x] = pow2(-2 * n - 1);
        }
    auto m = DiscreteSemimeasure::from_entries(mass);
    m.validate();
    GacsResult g = gacs_deficiency(m, mu, bs("0110"));
    // prefix ratios are 2^(-n-1); the sup sits at the root term
    CHECK(g.sup_form.ratio() == rat(1, 2));
    CHECK(g.sum_form.ratio() == rat(31, 32));
    CHECK(g.sup_form.log2(96).contains(rat(-1)));
    CHECK(g.sup_form <= g.sum_form);

    // without the root term the sup moves to n = 1
    mass.erase(BitString());
    GacsResult g2 = gacs_deficiency(DiscreteSemimeasure::from_entries(mass), mu, bs("0110"));
    CHECK(g2.sup_form.ratio() == rat(1, 4));
    CHECK(g2.sup_form.log2(96).contains(rat(-2)));

    // concentrated mass: sup = sum = 3
    auto spike = DiscreteSemimeasure::from_entries({{bs("0000"), rat(1, 2)}});
    GacsResult gs = gacs_deficiency(spike, mu, bs("0000"));
    CHECK(gs.sup_form.ratio() == rat(8));
    CHECK(gs.sum_form.ratio() == rat(8));
    CHECK(gs.sup_form.log2(96).contains(rat(3)));

    // empty semimeasure: bottom element
    CHECK(gacs_deficiency(DiscreteSemimeasure(), mu, bs("0000")).sup_form.kind() ==
          DefValue::Kind::neg_inf);
    // positive mass on a zero-measure prefix: top element
    auto onezero = DiscreteSemimeasure::from_entries({{bs("1"), rat(1, 2)}});
    CHECK(gacs_deficiency(onezero, Measure::bernoulli(rat(0)), bs("10")).sup_form.kind() ==
          DefValue::Kind::pos_inf);
}

TEST_CASE("gacs sup never exceeds sum") {
    Measure mu = Measure::bernoulli(rat(1, 3));
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        std::map<BitString, Rational> mass;
        Rational budget(1);
        BitString x;
        for (int i = 0; i < 6; ++i) x = x.child(rng() & 1);
        for (int i = 0; i < 5; ++i) {
            BitString w = x.prefix(rng() % 7);
            Rational m = budget / rat(2 + (long)(rng() % 5));
            budget -= m;
            mass[w] += m;
        }
        GacsResult g = gacs_deficiency(DiscreteSemimeasure::from_entries(mass), mu, x);
        CHECK(g.sup_form <= g.sum_form);
        Enclosure sup = g.sup_form.log2(128), sum = g.sum_form.log2(128);
        CHECK_FALSE(sum.certainly_lt(sup));
    }
}

TEST_CASE("apriori_deficiencies windowed proxies") {
    Measure mu = Measure::uniform();
    // a = uniform weights: every proxy is exactly 0
    std::map<BitString, Rational> uw{{BitString(), rat(1)}};
    for (int n = 1; n <= 8; ++n)
        for (unsigned long s = 0; s < (1ul << n); ++s) {
            BitString x;
            for (int i = n - 1; i >= 0; --i) x = x.child((s >> i) & 1);
            uw[x] = pow2(-n);
        }
    auto ua = ContinuousSemimeasure::from_entries(uw, 8);
    AprioriReport flat = apriori_deficiencies(ua, mu, BitString::repeated(0, 8), 4, 8);
    CHECK(flat.d_sup.ratio() == rat(1));
    CHECK(flat.d_limsup.ratio() == rat(1));
    CHECK(flat.d_liminf.ratio() == rat(1));

    // a from the all-zeros machine along 0^N: ratio at depth n is 2^n
    auto zeros = MachineProgram::from_states({{"s", {rat(1), rat(0), "s", "s"}}}, "s")
                     .to_semimeasure(16);
    AprioriReport chain = apriori_deficiencies(zeros, mu, BitString::repeated(0, 16), 8, 16);
    CHECK(chain.d_sup.ratio() == pow2(16));
    CHECK(chain.d_limsup.ratio() == pow2(16));
    CHECK(chain.d_liminf.ratio() == pow2(8));  // window floor

    // leaving the support kills the tail proxies
    BitString detour = BitString::repeated(0, 5).child(1).concat(BitString::repeated(0, 10));
    AprioriReport off = apriori_deficiencies(zeros, mu, detour, 8, 16);
    CHECK(off.d_sup.ratio() == pow2(5));
    CHECK(off.d_limsup.kind() == DefValue::Kind::neg_inf);
    CHECK(off.d_liminf.kind() == DefValue::Kind::neg_inf);

    CHECK_THROWS_AS(apriori_deficiencies(zeros, mu, BitString::repeated(0, 16), 8, 20),
                    std::domain_error);
}

TEST_CASE("slab audit: dyadic tower is exact") {
    Measure mu = Measure::uniform();
    auto rows = slab_audit(geometric_tower(8), mu, rat(1), 128);
    REQUIRE(rows.size() == 8);  // slabs n = 1..8 (value 2^k sits in slab k)
    for (const auto& row : rows) {
        CHECK(row.exact);
        CHECK(row.integral_exact == rat(1, 2 * row.n * row.n));
        CHECK(row.bound_exact == rat(2, row.n * row.n));
        CHECK(row.pass);
    }

    CHECK(slab_audit(BasicFunction::from_pieces({{BitString(), rat(1)}}), mu, rat(1), 128).empty());

    // boundary single slab: t = 4 on a set of measure 1/4
    auto one = slab_audit(BasicFunction::from_pieces({{bs("00"), rat(4)}}), mu, rat(1), 128);
    REQUIRE(one.size() == 1);
    CHECK(one[0].n == 2);
    CHECK(one[0].integral_exact == rat(1, 4));
    CHECK(one[0].pass);

    // non-dyadic value goes through enclosures
    auto enc = slab_audit(BasicFunction::from_pieces({{bs("00"), rat(3)}}), mu, rat(1), 128);
    REQUIRE(enc.size() == 1);
    CHECK_FALSE(enc[0].exact);
    CHECK(enc[0].pass);
    CHECK(enc[0].integral.certainly_gt(rat(1, 4)));
    CHECK(enc[0].integral.certainly_lt(rat(1, 3)));  // 3/4 * (log2 3)^-2 = 0.2985...

    // rational eps goes through enclosures even on dyadic values
    auto frac = slab_audit(geometric_tower(4), mu, rat(1, 2), 128);
    for (const auto& row : frac) {
        CHECK_FALSE(row.exact);
        CHECK(row.pass);
    }
}

TEST_CASE("markov_prefixfree_audit finds minimal crossings") {
    Measure mu = Measure::uniform();
    auto zeros = MachineProgram::from_states({{"s", {rat(1), rat(0), "s", "s"}}}, "s")
                     .to_semimeasure(10);
    MarkovAudit a3 = markov_prefixfree_audit(zeros, mu, 3);
    REQUIRE(a3.stems.size() == 1);
    CHECK(a3.stems[0] == bs("0000"));  // first ratio strictly above 8
    CHECK(a3.mu_mass == rat(1, 16));
    CHECK(a3.pass);

    auto coin = MachineProgram::from_states({{"s", {rat(1, 2), rat(1, 2), "s", "s"}}}, "s")
                    .to_semimeasure(10);
    for (int c = 1; c <= 6; ++c) {
        MarkovAudit flat = markov_prefixfree_audit(coin, mu, c);
        CHECK(flat.stems.empty());
        CHECK(flat.mu_mass == 0);
        CHECK(flat.pass);
    }

    auto mixed = mix_pool({{{zeros, rat(1, 2)}, {coin, rat(1, 2)}}});
    MarkovAudit m2 = markov_prefixfree_audit(mixed, mu, 2);
    REQUIRE(m2.stems.size() == 1);
    CHECK(m2.stems[0] == bs("000"));  // (2^(n-1) + 1/2) > 4 first at n = 3
    CHECK(m2.mu_mass == rat(1, 8));
    CHECK(m2.pass);
}

TEST_CASE("chain_report orders the same-family proxies") {
    Measure mu = Measure::uniform();
    // trivial instance: every deficiency is 0
    auto m = DiscreteSemimeasure::from_entries({{BitString(), rat(1)}});
    std::map<BitString, Rational> uw{{BitString(), rat(1)}};
    for (int n = 1; n <= 8; ++n)
        for (unsigned long s = 0; s < (1ul << n); ++s) {
            BitString x;
            for (int i = n - 1; i >= 0; --i) x = x.child((s >> i) & 1);
            uw[x] = pow2(-n);
        }
    auto ua = ContinuousSemimeasure::from_entries(uw, 8);
    ChainReport trivial =
        chain_report(m, ua, MLTest(), mu, BitString::repeated(0, 8), 4, 8);
    CHECK(trivial.d_p == 0);
    CHECK(trivial.d_e.sup_form.ratio() == rat(1));
    CHECK(trivial.d_a.d_sup.ratio() == rat(1));
    CHECK(trivial.same_family_order_ok);
    REQUIRE(trivial.gap_sup_minus_limsup.has_value());
    CHECK(trivial.gap_sup_minus_limsup->ratio() == rat(1));  // zero gap in log scale

    // lift replay: d^E = 3 from the spike, and the lifted a keeps the tail ratio at 8
    auto spike = DiscreteSemimeasure::from_entries({{bs("0000"), rat(1, 2)}});
    auto lifted = lift_discrete_to_continuous({spike}, mu, 8);
    BitString path = bs("0000").concat(BitString::repeated(1, 4));
    MLTest chain6 = chain_test(6);
    ChainReport lifted_report = chain_report(spike, lifted, chain6, mu, path, 5, 8);
    CHECK(lifted_report.d_e.sup_form.ratio() == rat(8));
    CHECK(lifted_report.d_a.d_liminf.ratio() == rat(8));  // replay keeps m(x)/mu([x])
    CHECK(lifted_report.d_e.sup_form <= lifted_report.d_a.d_liminf);
    CHECK(lifted_report.same_family_order_ok);
}
