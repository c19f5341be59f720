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

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ucl/games_sde.hpp"
#include "ucl/selftest.hpp"
#include "ucl/simult_ip.hpp"

namespace {

using namespace ucl;

struct RunOptions {
    std::string game = "upo";
    std::string scheme;
    std::string adversary = "shared-coin";
    std::string distribution;
    uint64_t trials = 2000;
    int64_t seed = -1;  // -1: draw from entropy and print
    unsigned jobs = 1;
    // parameters
    uint32_t n = 4, l0 = 2, m = 8, n1 = 32, encq = 256;
    uint32_t q = 257, ipn = 4;  // simult-ip modulus / dimension
    std::string leakage = "none";
    bool no_screen = false;
};

upo::UpoParams upo_params(const RunOptions& o) {
    upo::UpoParams p;
    p.cp.n = o.n;
    p.cp.l0 = o.l0;
    p.cp.m = o.m;
    p.cp.n1 = o.n1;
    p.cp.enc_q_bits = o.encq;
    p.cp.screen = !o.no_screen;
    return p;
}

games::DistX dist_x(const std::string& s) {
    if (s.empty() || s == "uxu" || s == "UxU") return games::DistX::UxU;
    if (s == "idu" || s == "IdU" || s == "identical") return games::DistX::IdU;
    throw CLI::ValidationError("--distribution", "expected uxu or idu");
}

/// Fills in values from a key=value profile for every option the command
/// line left untouched. The profile path defaults to the
/// UNCLONABLE_LAB_PROFILE environment variable.
void apply_profile(const CLI::App& run_cmd, std::string path, RunOptions& opt) {
    if (path.empty()) {
        const char* env = std::getenv("UNCLONABLE_LAB_PROFILE");
        if (env) path = env;
    }
    if (path.empty()) return;
    std::ifstream f(path);
    if (!f) throw CLI::ValidationError("--config", "cannot open profile: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    kv::Reader profile(text);

    auto untouched = [&run_cmd](const std::string& flag) { return run_cmd.count(flag) == 0; };
    auto s = [&](const char* key, const char* flag, std::string& dst) {
        if (profile.has(key) && untouched(flag)) dst = profile.get(key);
    };
    auto u32 = [&](const char* key, const char* flag, uint32_t& dst) {
        if (profile.has(key) && untouched(flag)) dst = uint32_t(profile.get_u64(key));
    };
    s("game", "--game", opt.game);
    s("scheme", "--scheme", opt.scheme);
    s("adversary", "--adversary", opt.adversary);
    s("distribution", "--distribution", opt.distribution);
    s("leakage", "--leakage", opt.leakage);
    if (profile.has("trials") && untouched("--trials")) opt.trials = profile.get_u64("trials");
    if (profile.has("seed") && untouched("--seed")) opt.seed = int64_t(profile.get_u64("seed"));
    if (profile.has("jobs") && untouched("--jobs")) opt.jobs = unsigned(profile.get_u64("jobs"));
    u32("n", "--n", opt.n);
    u32("l0", "--l0", opt.l0);
    u32("m", "--m", opt.m);
    u32("n1", "--n1", opt.n1);
    u32("encq", "--encq", opt.encq);
    u32("q", "--q", opt.q);
    u32("ipn", "--ipn", opt.ipn);
    if (profile.has("no-screen") && untouched("--no-screen"))
        opt.no_screen = profile.get_u64("no-screen") != 0;
}

int cmd_run(const RunOptions& opt) {
    uint64_t seed = opt.seed >= 0 ? uint64_t(opt.seed) : Rng::entropy_seed();
    if (opt.seed < 0) std::cout << "# seed drawn from entropy: " << seed << "\n";

    games::GameConfig cfg;
    cfg.adversary = games::builtin_adversary(opt.adversary);
    cfg.trials = opt.trials;
    cfg.seed = seed;
    cfg.jobs = opt.jobs;

    upo::UpoParams up = upo_params(opt);
    games::ExperimentResult res;

    auto keyed_class = [&]() -> circ::KeyedCircuitClass {
        if (opt.scheme.empty() || opt.scheme == "ggm-prf") return prf::as_keyed_class(up.input_len(), opt.m);
        if (opt.scheme == "point-fn")
            return apps::extend_class(apps::evasive_class(opt.m, 1), up.input_len());
        throw CLI::ValidationError("--scheme", "unknown keyed class: " + opt.scheme);
    };

    auto sde_scheme = [&]() -> games::SdeGameScheme {
        cllz::CllzParams cp{opt.n, opt.l0, opt.m};
        if (opt.scheme.empty() || opt.scheme == "cllz-postproc") return games::make_cllz_postproc_game(cp);
        if (opt.scheme == "cllz-sde") return games::make_cllz_sde_game(cp);
        if (opt.scheme == "sw-sde") return games::make_sw_sde_game(up);
        if (opt.scheme == "sw-sde-cpa") return games::make_lifted_game(games::make_sw_sde_game(up));
        if (opt.scheme == "cllz-postproc-cpa")
            return games::make_lifted_game(games::make_cllz_postproc_game(cp));
        throw CLI::ValidationError("--scheme", "unknown sde scheme: " + opt.scheme);
    };

    if (opt.game == "upo") {
        res = games::run_upo_expt(keyed_class(), up, dist_x(opt.distribution), cfg);
    } else if (opt.game == "genupo") {
        res = games::run_genupo_expt(keyed_class(), up, dist_x(opt.distribution), cfg);
    } else if (opt.game == "preponed") {
        res = games::run_preponed_expt(up.cp, dist_x(opt.distribution), cfg);
    } else if (opt.game == "cp") {
        res = games::run_cp_expt_uniform(keyed_class(), up, cfg);
    } else if (opt.game == "pcs") {
        res = games::run_pcs_expt(apps::sw_scheme(up.input_len()), up, cfg);
    } else if (opt.game == "sde-search") {
        res = games::run_sde_search(sde_scheme(), dist_x(opt.distribution), cfg);
    } else if (opt.game == "sde-indrandom") {
        games::DistCt d = opt.distribution == "identical-cipher" ? games::DistCt::IdenticalCipher
                                                                 : games::DistCt::IndMsg;
        res = games::run_sde_indrandom(sde_scheme(), d, cfg);
    } else if (opt.game == "sde-selcpa" || opt.game == "sde-cpa") {
        games::DistCpa d = opt.distribution == "identical" ? games::DistCpa::Identical
                                                           : games::DistCpa::IdenBitIndMsg;
        res = opt.game == "sde-selcpa" ? games::run_sde_selcpa(sde_scheme(), d, cfg)
                                       : games::run_sde_cpa(sde_scheme(), d, cfg);
    } else if (opt.game == "ue") {
        res = games::run_ue_expt(opt.m, cfg);
    } else if (opt.game == "simult-ip") {
        games::SimultIpParams p;
        p.q = opt.q;
        p.n = opt.ipn;
        p.leakage = opt.leakage == "full" ? games::IpLeakage::Full : games::IpLeakage::None;
        if (opt.distribution == "ind" || opt.distribution == "x-ind") {
            p.dist_x = games::IpDist::Independent;
            p.dist_ch = games::IpDist::Independent;
        }
        res = games::run_simult_ip(p, cfg);
    } else {
        throw CLI::ValidationError("--game", "unknown game: " + opt.game);
    }

    std::cout << res.record() << "\n";
    return 0;
}

int cmd_selftest(const std::string& filter, uint64_t seed) {
    auto results = selftest::run_all(filter, seed);
    bool all_ok = true;
    for (const auto& r : results) {
        std::cout << (r.ok ? "[PASS] " : "[FAIL] ") << r.name;
        if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
        std::cout << "\n";
        all_ok = all_ok && r.ok;
    }
    if (results.empty()) {
        std::cout << "no suites matched filter\n";
        return 1;
    }
    std::cout << (all_ok ? "selftest OK" : "selftest FAILED") << "\n";
    return all_ok ? 0 : 1;
}

int cmd_demo(const std::string& scheme, uint64_t seed) {
    Rng rng(seed);
    std::cout << "demo: " << scheme << " (seed " << seed << ")\n";

    if (scheme == "cllz-sde" || scheme == "cllz-postproc") {
        cllz::CllzParams p{4, 2, 8};
        std::cout << "gen: n=4, l0=2, message bits=8\n";
        auto [sk, pk] = cllz::gen(p, rng);
        for (size_t i = 0; i < sk.pairs.size(); ++i)
            std::cout << "  coset pair " << i << ": " << sk.pairs[i].to_hex() << "\n";
        cllz::QuantumDecryptor dec = cllz::qkeygen(sk);
        std::cout << "qkeygen: prepared " << dec.state.num_qubits() << "-qubit decryptor\n";
        BitVec m = rng.bitvec(8);
        std::cout << "message: " << m.to_string01() << "\n";
        if (scheme == "cllz-sde") {
            cllz::Ciphertext ct = cllz::enc(pk, m, rng);
            std::cout << "enc: basis choice r=" << ct.basis_choice.to_string01() << "\n";
            auto [got, next] = cllz::dec(std::move(dec), ct, 8, rng);
            std::cout << "dec: " << got->to_string01() << (*got == m ? "  [OK]" : "  [MISMATCH]") << "\n";
        } else {
            cllz::PostProcCiphertext ct = cllz::postproc_enc(pk, m, rng);
            std::cout << "enc: u=" << ct.u.to_string01() << " z=" << ct.z.to_string01() << "\n";
            auto [got, next] = cllz::postproc_dec(std::move(dec), ct, rng);
            std::cout << "dec: " << got->to_string01() << (*got == m ? "  [OK]" : "  [MISMATCH]") << "\n";
        }
        return 0;
    }

    if (scheme == "upo") {
        upo::UpoParams params;
        std::cout << "obf: circuit = parity of all " << params.input_len() << " input bits\n";
        circ::ProgPtr w = circ::as_program(circ::xor_all_circuit(params.input_len()));
        upo::UpoObfuscation rho = upo::upo_obf(w, params, rng);
        std::cout << "obf: " << rho.cosets.size() << " coset blocks, C and D wrapped\n";
        bool ok = true;
        for (int i = 0; i < 5; ++i) {
            BitVec x = rng.bitvec(params.input_len());
            auto [z, next] = upo::upo_eval(std::move(rho), x, rng);
            rho = std::move(next);
            bool match = z == w->run(x);
            ok = ok && match;
            std::cout << "eval " << i << ": parity=" << z->to_string01()
                      << (match ? "  [OK]" : "  [MISMATCH]") << "\n";
        }
        std::cout << (ok ? "all evaluations correct\n" : "failures above\n");
        return ok ? 0 : 1;
    }

    if (scheme == "gen-trigger") {
        cp::CpParams params;
        prf::GgmKey k1 = prf::prf_gen(params.input_len(), params.m, rng);
        cp::CpPrfProgram prog = cp::copyprotect(k1, params, rng);
        auto p = std::dynamic_pointer_cast<const cp::ProgramP>(prog.p_tilde.program());
        kv::Writer w;
        p->fields(w);
        kv::Reader r(w.str());
        prf::GgmKey k2 = prf::GgmKey::deserialize(r.get_bytes("k2"));
        prf::GgmKey k3 = prf::GgmKey::deserialize(r.get_bytes("k3"));
        BitVec x0 = rng.bitvec(params.l0);
        BitVec y = rng.bitvec(params.m);
        std::cout << "target hidden output y=" << y.to_string01() << "\n";
        BitVec xt = cp::gen_trigger(x0, y, k2, k3, prog.cosets, params);
        std::cout << "trigger built: x0=" << x0.to_string01() << ", |x|=" << xt.size() << " bits\n";
        auto got = cp::cp_eval(prog, xt, rng);
        std::cout << "eval on trigger: " << got->to_string01() << (*got == y ? "  [OK]" : "  [MISMATCH]")
                  << "\n";
        BitVec xr = rng.bitvec(params.input_len());
        std::cout << "random input triggers hidden mode: " << (p->is_trigger(xr) ? "yes" : "no") << "\n";
        return *got == y ? 0 : 1;
    }

    if (scheme == "sw-sde" || scheme == "sw-sde-cpa") {
        upo::UpoParams params;
        std::cout << "gen: message length " << params.input_len() << "\n";
        apps::SdeOps ops = apps::make_sw_sde_ops(params, rng);
        if (scheme == "sw-sde-cpa") ops = apps::cpa_lift(std::move(ops));
        BitVec m = rng.bitvec(ops.msg_len);
        auto ct = ops.enc(m, rng);
        std::cout << "enc: ciphertext " << ct.size() << " bytes\n";
        auto got = ops.dec(ct, rng);
        std::cout << "dec: " << (got && *got == m ? "[OK]" : "[MISMATCH]") << "\n";
        return got && *got == m ? 0 : 1;
    }

    if (scheme == "cp-signatures") {
        upo::UpoParams params;
        apps::CpSignatures cps = apps::cp_sig_gen(12, params, rng);
        upo::UpoObfuscation rho = apps::cp_sig_qkeygen(cps, rng);
        BitVec msg = rng.bitvec(params.input_len());
        auto [sigma, next] = apps::cp_sig_sign(std::move(rho), msg, rng);
        bool ok = sigma && sig::sig_verify(cps.ds.vk, msg, *sigma);
        std::cout << "sign: sigma=" << sigma->to_string01() << "\n";
        std::cout << "verify: " << (ok ? "[OK]" : "[REJECTED]") << "\n";
        return ok ? 0 : 1;
    }

    if (scheme == "point-function") {
        upo::UpoParams params;
        circ::KeyedCircuitClass f1 = apps::evasive_class(8, 1);
        Rng krng(seed + 1);
        circ::ClassKey key = f1.sample_key(krng);
        BitVec point = apps::evasive_key_points(key)[0];
        std::cout << "accepting point: " << point.to_string01() << "\n";
        upo::UpoObfuscation rho = apps::cp_evasive(f1, key, params, rng);
        auto [hit, r1] = upo::upo_eval(std::move(rho), apps::pad_input(point, params.input_len()), rng);
        auto [miss, r2] = upo::upo_eval(
            std::move(r1), apps::pad_input(point ^ BitVec::from_u64(8, 1), params.input_len()), rng);
        bool ok = hit->get(0) && !miss->get(0);
        std::cout << "eval at point: " << hit->to_string01() << ", off point: " << miss->to_string01()
                  << (ok ? "  [OK]" : "  [MISMATCH]") << "\n";
        return ok ? 0 : 1;
    }

    std::cerr << "unknown demo scheme: " << scheme << "\n";
    std::cerr << "available: cllz-sde cllz-postproc upo gen-trigger sw-sde sw-sde-cpa cp-signatures "
                 "point-function\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unclonable-lab: coset-state schemes, toy obfuscation, and non-local security games"};
    app.require_subcommand(1);

    // selftest
    std::string filter;
    uint64_t st_seed = 17;
    CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the built-in invariant suite");
    selftest_cmd->add_option("--filter", filter, "run only suites whose name contains this substring");
    selftest_cmd->add_option("--seed", st_seed, "suite seed");

    // run
    RunOptions opt;
    std::string config_path;
    CLI::App* run_cmd = app.add_subcommand("run", "run a security experiment");
    run_cmd->add_option("--config", config_path,
                        "parameter profile, key=value lines (default: $UNCLONABLE_LAB_PROFILE)");
    run_cmd->add_option("--game", opt.game,
                        "upo|genupo|preponed|cp|pcs|sde-search|sde-indrandom|sde-selcpa|sde-cpa|ue|simult-ip");
    run_cmd->add_option("--scheme", opt.scheme, "scheme name (game-specific registry)");
    run_cmd->add_option("--adversary", opt.adversary, "guess-uniform|guess-zero|shared-coin|forward-b");
    run_cmd->add_option("--distribution", opt.distribution, "challenge distribution tag");
    run_cmd->add_option("--trials", opt.trials, "Monte-Carlo trials");
    run_cmd->add_option("--seed", opt.seed, "master seed (omit to draw from entropy)");
    run_cmd->add_option("--jobs", opt.jobs, "parallel trial workers");
    run_cmd->add_option("--n", opt.n, "coset ambient dimension");
    run_cmd->add_option("--l0", opt.l0, "coset blocks");
    run_cmd->add_option("--m", opt.m, "primary output length / message bits");
    run_cmd->add_option("--n1", opt.n1, "trigger segment length");
    run_cmd->add_option("--encq", opt.encq, "encoded trigger circuit bits");
    run_cmd->add_option("--q", opt.q, "simult-ip modulus");
    run_cmd->add_option("--ipn", opt.ipn, "simult-ip dimension");
    run_cmd->add_option("--leakage", opt.leakage, "simult-ip leakage policy: none|full");
    run_cmd->add_flag("--no-screen", opt.no_screen, "disable trigger-freeness screening");

    // demo
    std::string demo_scheme;
    uint64_t demo_seed = 1;
    CLI::App* demo_cmd = app.add_subcommand("demo", "human-readable scheme walkthrough");
    demo_cmd->add_option("scheme", demo_scheme, "scheme to demonstrate")->required();
    demo_cmd->add_option("--seed", demo_seed, "demo seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (selftest_cmd->parsed()) return cmd_selftest(filter, st_seed);
        if (run_cmd->parsed()) {
            apply_profile(*run_cmd, config_path, opt);
            return cmd_run(opt);
        }
        if (demo_cmd->parsed()) return cmd_demo(demo_scheme, demo_seed);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
