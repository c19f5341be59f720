// Copyright 2026 The unclonable-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include "ucl/games_sde.hpp"
#include "ucl/simult_ip.hpp"

using namespace ucl;
using namespace ucl::games;

namespace {

upo::UpoParams desk_params() { return upo::UpoParams{}; }

double extra(const ExperimentResult& r, const std::string& key) {
    for (const auto& [k, v] : r.extras)
        if (k == key) return v;
    throw std::runtime_error("missing extra " + key);
}

GameConfig cfg_named(const std::string& adv, uint64_t trials, uint64_t seed) {
    GameConfig c;
    c.adversary = builtin_adversary(adv);
    c.trials = trials;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("monte_carlo: degenerate estimates, reproducibility, jobs invariance") {
    TrialFn always = [](Rng&) { return TrialOutcome{true, {}}; };
    ExperimentResult r = monte_carlo(always, 100, 5);
    CHECK(r.wins == 100);
    CHECK(r.estimate == 1.0);
    CHECK(r.ci_hi == 1.0);

    TrialFn coin = [](Rng& rng) { return TrialOutcome{rng.bit(), {{"heads", 1.0}}}; };
    ExperimentResult a = monte_carlo(coin, 500, 7);
    ExperimentResult b = monte_carlo(coin, 500, 7);
    CHECK(a.wins == b.wins);
    CHECK(a.record() == b.record());
    ExperimentResult c = monte_carlo(coin, 500, 7, 4);
    CHECK(a.wins == c.wins);  // job count never changes the outcome
    ExperimentResult d = monte_carlo(coin, 500, 8);
    CHECK(a.wins != d.wins);  // different seed, different trajectory (w.h.p.)
}

TEST_CASE("wilson interval covers a Bernoulli(0.3) source") {
    int covered = 0;
    for (uint64_t meta = 0; meta < 200; ++meta) {
        TrialFn bern = [](Rng& rng) { return TrialOutcome{rng.real() < 0.3, {}}; };
        ExperimentResult r = monte_carlo(bern, 500, 1000 + meta);
        if (r.ci_lo <= 0.3 && 0.3 <= r.ci_hi) ++covered;
    }
    CHECK(covered >= 186);  // >= 93% empirical coverage
}

TEST_CASE("register disjointness is enforced at runtime") {
    upo::UpoParams params = desk_params();
    circ::KeyedCircuitClass cls = prf::as_keyed_class(params.input_len(), 8);

    GameConfig cfg;
    cfg.trials = 1;
    cfg.seed = 3;
    cfg.adversary.name = "rogue";
    cfg.adversary.kind = Adversary::Kind::Custom;
    cfg.adversary.split = [](const SplitterInput& in, Rng&) {
        BipartiteAllocation alloc;
        alloc.state = in.state;
        alloc.b_qubits = {0, 1};
        alloc.c_qubits = {2, 3};
        return alloc;
    };
    cfg.adversary.play_b = [](LocalInput& li, Rng&) {
        li.view.hadamard({7});  // qubit 7 belongs to the other side / nobody
        return BitVec::from_bits({0});
    };
    cfg.adversary.play_c = [](LocalInput&, Rng&) { return BitVec::from_bits({0}); };

    CHECK_THROWS_AS(run_upo_expt(cls, params, DistX::UxU, cfg), ViolationError);

    // Overlapping allocations are rejected outright.
    BipartiteAllocation bad;
    bad.b_qubits = {0, 1};
    bad.c_qubits = {1, 2};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("upo experiment: baselines and honest-B distinguisher") {
    upo::UpoParams params = desk_params();
    circ::KeyedCircuitClass cls = prf::as_keyed_class(params.input_len(), 8);

    ExperimentResult coin = run_upo_expt(cls, params, DistX::UxU, cfg_named("shared-coin", 400, 11));
    CHECK(coin.estimate == Catch::Approx(0.5).margin(0.07));

    ExperimentResult zeros = run_upo_expt(cls, params, DistX::UxU, cfg_named("guess-zero", 400, 12));
    CHECK(zeros.estimate == Catch::Approx(0.5).margin(0.07));

    // Honest distinguishing B + blind C: B is always right at toy scale,
    // C is a fair coin, so the joint estimate sits at 1/2 (and is <= 1).
    ExperimentResult fb = run_upo_expt(cls, params, DistX::IdU, cfg_named("forward-b", 400, 13));
    CHECK(fb.estimate <= 1.0);
    CHECK(fb.estimate == Catch::Approx(0.5).margin(0.07));
    CHECK(extra(fb, "marginal_b") >= 0);

    // Reproducibility of full records.
    ExperimentResult again = run_upo_expt(cls, params, DistX::IdU, cfg_named("forward-b", 400, 13));
    CHECK(fb.record() == again.record());
}

TEST_CASE("no-signaling: C's marginal is invariant to B's strategy") {
    upo::UpoParams params = desk_params();
    circ::KeyedCircuitClass cls = prf::as_keyed_class(params.input_len(), 8);

    auto make_cfg = [&](bool b_disturbs, uint64_t seed) {
        GameConfig cfg;
        cfg.trials = 2000;
        cfg.seed = seed;
        cfg.adversary.name = b_disturbs ? "b-disturbs" : "b-idle";
        cfg.adversary.kind = Adversary::Kind::Custom;
        cfg.adversary.split = [](const SplitterInput& in, Rng&) {
            BipartiteAllocation alloc;
            alloc.state = in.state;
            // Fixed splitter: block 0 to B, block 1 to C.
            alloc.b_qubits = in.blocks[0];
            alloc.c_qubits = in.blocks[1];
            return alloc;
        };
        if (b_disturbs) {
            cfg.adversary.play_b = [](LocalInput& li, Rng& rng) {
                std::vector<uint32_t> mine(li.view.allowed().begin(), li.view.allowed().end());
                li.view.hadamard(mine);
                li.view.measure(mine, rng);
                return BitVec::from_bits({0});
            };
        } else {
            cfg.adversary.play_b = [](LocalInput&, Rng&) { return BitVec::from_bits({0}); };
        }
        // C (acting after B) measures its own block and answers the parity.
        cfg.adversary.play_c = [](LocalInput& li, Rng& rng) {
            std::vector<uint32_t> mine(li.view.allowed().begin(), li.view.allowed().end());
            auto mo = li.view.measure(mine, rng);
            return BitVec::from_bits({int(mo.value.popcount() % 2)});
        };
        return cfg;
    };

    ExperimentResult idle = run_upo_expt(cls, params, DistX::UxU, make_cfg(false, 21));
    ExperimentResult disturb = run_upo_expt(cls, params, DistX::UxU, make_cfg(true, 21));
    double m_idle = extra(idle, "marginal_c") / double(idle.trials);
    double m_disturb = extra(disturb, "marginal_c") / double(disturb.trials);
    CHECK(m_idle == Catch::Approx(m_disturb).margin(0.05));
}

TEST_CASE("genupo experiment: identity patches keep any agreeing baseline at 1/2") {
    upo::UpoParams params = desk_params();
    circ::KeyedCircuitClass cls = prf::as_keyed_class(params.input_len(), 8);

    ExperimentResult r = run_genupo_expt(cls, params, DistX::UxU, cfg_named("shared-coin", 400, 31));
    CHECK(r.estimate == Catch::Approx(0.5).margin(0.07));

    ExperimentResult z = run_genupo_expt(cls, params, DistX::IdU, cfg_named("guess-zero", 400, 32));
    CHECK(z.estimate == Catch::Approx(0.5).margin(0.07));
}

TEST_CASE("preponed experiment: baselines and honest forwarding") {
    cp::CpParams params;

    ExperimentResult fixed = run_preponed_expt(params, DistX::IdU, cfg_named("guess-zero", 400, 41));
    CHECK(fixed.estimate == Catch::Approx(0.5).margin(0.07));

    // B re-evaluates its copy against the advertised y: always correct, C
    // is a coin, so the joint estimate is recorded near 1/2.
    ExperimentResult fb = run_preponed_expt(params, DistX::UxU, cfg_named("forward-b", 400, 42));
    CHECK(fb.estimate == Catch::Approx(0.5).margin(0.07));
}

TEST_CASE("preponed experiment with IdU emits equal challenge points") {
    cp::CpParams params;
    std::vector<BitVec> seen_b, seen_c;
    GameConfig cfg;
    cfg.trials = 5;
    cfg.seed = 43;
    cfg.adversary.name = "capture";
    cfg.adversary.kind = Adversary::Kind::Custom;
    cfg.adversary.split = [](const SplitterInput& in, Rng&) {
        BipartiteAllocation alloc;
        alloc.state = in.state;
        return alloc;
    };
    cfg.adversary.play_b = [&seen_b, &params](LocalInput& li, Rng&) {
        kv::Reader r(li.challenge);
        seen_b.push_back(BitVec::from_hex(params.input_len(), r.get("x")));
        return BitVec::from_bits({0});
    };
    cfg.adversary.play_c = [&seen_c, &params](LocalInput& li, Rng&) {
        kv::Reader r(li.challenge);
        seen_c.push_back(BitVec::from_hex(params.input_len(), r.get("x")));
        return BitVec::from_bits({0});
    };
    run_preponed_expt(params, DistX::IdU, cfg);
    REQUIRE(seen_b.size() == 5);
    for (size_t i = 0; i < 5; ++i) CHECK(seen_b[i] == seen_c[i]);
}

TEST_CASE("cp experiment: trivial rate and honest B component") {
    upo::UpoParams params = desk_params();
    circ::KeyedCircuitClass cls = prf::as_keyed_class(params.input_len(), 8);

    // forward-to-B with a blindly guessing C sits at p_triv = 2^-m.
    ExperimentResult fb = run_cp_expt_uniform(cls, params, cfg_named("forward-b", 400, 51));
    CHECK(extra(fb, "p_triv") == Catch::Approx(std::pow(0.5, 8)));
    CHECK(fb.estimate == Catch::Approx(std::pow(0.5, 8)).margin(0.05));
    // Honest-B success component is 1.
    CHECK(extra(fb, "b_correct") == Catch::Approx(double(fb.trials)));

    ExperimentResult blind = run_cp_expt_uniform(cls, params, cfg_named("guess-uniform", 300, 52));
    CHECK(blind.estimate <= 0.05);
}

TEST_CASE("pcs experiment: unique valid outputs make blind success vanish") {
    upo::UpoParams params = desk_params();
    apps::PuncturableCryptoScheme scheme = apps::sw_scheme(params.input_len());

    ExperimentResult fb = run_pcs_expt(scheme, params, cfg_named("forward-b", 300, 61));
    // B passes verification every time; C must blindly hit a 292-bit PRF
    // value, so the joint estimate is 0.
    CHECK(fb.estimate == Catch::Approx(0.0).margin(0.05));

    ExperimentResult zero = run_pcs_expt(scheme, params, cfg_named("guess-zero", 300, 62));
    CHECK(zero.estimate == Catch::Approx(0.0).margin(0.05));
}

TEST_CASE("sde search: honest decryptor on the B side") {
    SdeGameScheme scheme = make_cllz_sde_game(cllz::CllzParams{4, 2, 8});
    ExperimentResult fb = run_sde_search(scheme, DistX::UxU, cfg_named("forward-b", 400, 71));
    // B decrypts perfectly; C guesses an 8-bit message blindly.
    CHECK(extra(fb, "b_correct") == Catch::Approx(double(fb.trials)));
    CHECK(fb.estimate == Catch::Approx(std::pow(0.5, 8)).margin(0.05));

    ExperimentResult blind = run_sde_search(scheme, DistX::IdU, cfg_named("guess-zero", 300, 72));
    CHECK(blind.estimate <= 0.05);
}

TEST_CASE("sde ind-random: identical-cipher variant feeds identical challenges") {
    SdeGameScheme scheme = make_cllz_postproc_game(cllz::CllzParams{4, 2, 8});

    ExperimentResult coin = run_sde_indrandom(scheme, DistCt::IndMsg, cfg_named("shared-coin", 400, 81));
    CHECK(coin.estimate == Catch::Approx(0.5).margin(0.07));

    // Capture both challenge ciphertexts and confirm byte identity.
    std::vector<std::vector<uint8_t>> bs, cs;
    GameConfig cfg;
    cfg.trials = 5;
    cfg.seed = 82;
    cfg.adversary.name = "capture";
    cfg.adversary.kind = Adversary::Kind::Custom;
    cfg.adversary.split = [](const SplitterInput& in, Rng&) {
        BipartiteAllocation alloc;
        alloc.state = in.state;
        return alloc;
    };
    cfg.adversary.play_b = [&bs](LocalInput& li, Rng&) {
        kv::Reader r(li.challenge);
        bs.push_back(r.get_bytes("ct"));
        return BitVec::from_bits({0});
    };
    cfg.adversary.play_c = [&cs](LocalInput& li, Rng&) {
        kv::Reader r(li.challenge);
        cs.push_back(r.get_bytes("ct"));
        return BitVec::from_bits({0});
    };
    run_sde_indrandom(scheme, DistCt::IdenticalCipher, cfg);
    REQUIRE(bs.size() == 5);
    for (size_t i = 0; i < 5; ++i) CHECK(bs[i] == cs[i]);
}

TEST_CASE("sde selective and full CPA games calibrate at 1/2") {
    SdeGameScheme scheme = make_cllz_postproc_game(cllz::CllzParams{4, 2, 8});

    ExperimentResult sel =
        run_sde_selcpa(scheme, DistCpa::IdenBitIndMsg, cfg_named("shared-coin", 400, 91));
    CHECK(sel.estimate == Catch::Approx(0.5).margin(0.07));

    ExperimentResult cpa = run_sde_cpa(scheme, DistCpa::Identical, cfg_named("guess-zero", 400, 92));
    CHECK(cpa.estimate == Catch::Approx(0.5).margin(0.07));

    // Honest B distinguishes its own message pair every time.
    ExperimentResult fb =
        run_sde_selcpa(scheme, DistCpa::IdenBitIndMsg, cfg_named("forward-b", 400, 93));
    CHECK(fb.estimate == Catch::Approx(0.5).margin(0.07));
}

TEST_CASE("lifted sde game still decrypts honestly") {
    SdeGameScheme lifted = make_lifted_game(make_cllz_postproc_game(cllz::CllzParams{4, 2, 16}), 12);
    ExperimentResult fb = run_sde_search(lifted, DistX::UxU, cfg_named("forward-b", 100, 95));
    CHECK(extra(fb, "b_correct") == Catch::Approx(double(fb.trials)));
}

TEST_CASE("ue experiment baselines") {
    ExperimentResult coin = run_ue_expt(8, cfg_named("shared-coin", 400, 101));
    CHECK(coin.estimate == Catch::Approx(0.5).margin(0.07));

    ExperimentResult fb = run_ue_expt(8, cfg_named("forward-b", 400, 102));
    CHECK(fb.estimate == Catch::Approx(0.5).margin(0.07));
}

TEST_CASE("simult-ip: leakage policies") {
    SimultIpParams p;  // q=257, n=4, identical/identical
    p.leakage = IpLeakage::None;
    ExperimentResult none = run_simult_ip(p, cfg_named("guess-zero", 2000, 111));
    CHECK(none.estimate == Catch::Approx(0.5).margin(0.05));

    p.leakage = IpLeakage::Full;
    ExperimentResult full = run_simult_ip(p, cfg_named("forward-b", 2000, 112));
    CHECK(full.estimate >= 0.99);

    // Independent variants run too.
    p.dist_x = IpDist::Independent;
    p.dist_ch = IpDist::Independent;
    p.leakage = IpLeakage::None;
    ExperimentResult ind = run_simult_ip(p, cfg_named("guess-uniform", 2000, 113));
    CHECK(ind.estimate == Catch::Approx(0.25).margin(0.05));
}

namespace {

/// Independent oracle for the best deterministic strategy value at q=2,
/// n=1: walks strategy tables and accumulates exact integer win counts
/// over the finite sample space.
std::pair<uint64_t, uint64_t> brute_force_ip_oracle(IpDist dist_x, IpDist dist_ch) {
    const uint32_t q = 2;
    struct Sample {
        uint32_t ub, zb, uc, zc;
        bool b;
    };
    std::vector<Sample> samples;
    for (uint32_t xb = 0; xb < q; ++xb) {
        for (uint32_t xc = 0; xc < q; ++xc) {
            if (dist_x == IpDist::Identical && xb != xc) continue;
            for (uint32_t ub = 0; ub < q; ++ub)
                for (uint32_t mb = 0; mb < q; ++mb)
                    for (uint32_t uc = 0; uc < q; ++uc)
                        for (uint32_t mc = 0; mc < q; ++mc) {
                            if (dist_ch == IpDist::Identical && (ub != uc || mb != mc)) continue;
                            for (int b = 0; b < 2; ++b) {
                                uint32_t ipb = (ub * xb) % q, ipc = (uc * xc) % q;
                                samples.push_back({ub, b ? (mb + ipb) % q : ipb, uc,
                                                   b ? (mc + ipc) % q : ipc, b == 1});
                            }
                        }
        }
    }
    uint64_t best = 0;
    for (uint32_t sb = 0; sb < 16; ++sb)
        for (uint32_t sc = 0; sc < 16; ++sc) {
            uint64_t wins = 0;
            for (const Sample& s : samples) {
                bool gb = (sb >> (s.ub * 2 + s.zb)) & 1;
                bool gc = (sc >> (s.uc * 2 + s.zc)) & 1;
                if (gb == s.b && gc == s.b) ++wins;
            }
            best = std::max(best, wins);
        }
    return {best, samples.size()};
}

}  // namespace

TEST_CASE("simult-ip: brute-force best deterministic value matches the oracle exactly") {
    for (IpDist dx : {IpDist::Identical, IpDist::Independent}) {
        for (IpDist dc : {IpDist::Identical, IpDist::Independent}) {
            auto [wins, total] = brute_force_ip_oracle(dx, dc);
            double lib = simult_ip_best_deterministic(2, 1, dx, dc);
            CHECK(lib == double(wins) / double(total));
        }
    }
    // The optimum can never drop below the blind rate 1/2...
    CHECK(simult_ip_best_deterministic(2, 1, IpDist::Identical, IpDist::Identical) >= 0.5);
    // ...and without leakage it cannot reach 1.
    CHECK(simult_ip_best_deterministic(2, 1, IpDist::Identical, IpDist::Identical) < 1.0);
}
