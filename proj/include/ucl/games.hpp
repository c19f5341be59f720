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

#pragma once

#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "ucl/apps.hpp"

namespace ucl::games {

using circ::ClassKey;
using circ::KeyedCircuitClass;

/// Raised when a local player touches qubits outside its partition.
struct ViolationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Monte-Carlo machinery
// ---------------------------------------------------------------------------

struct WilsonInterval {
    double lo = 0, hi = 1;
};

inline WilsonInterval wilson95(uint64_t wins, uint64_t trials) {
    if (trials == 0) return {0, 1};
    const double z = 1.959963984540054;
    double n = double(trials);
    double p = double(wins) / n;
    double z2 = z * z;
    double denom = 1 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct ExperimentResult {
    std::string game, scheme, adversary, distribution;
    std::vector<std::pair<std::string, std::string>> params;
    uint64_t seed = 0;
    uint64_t trials = 0, wins = 0;
    double estimate = 0, ci_lo = 0, ci_hi = 1;
    std::vector<std::pair<std::string, double>> extras;

    /// One machine-parseable line per experiment.
    std::string record() const {
        std::ostringstream os;
        os << "game=" << game << " scheme=" << scheme << " adversary=" << adversary
           << " distribution=" << distribution << " params={";
        for (size_t i = 0; i < params.size(); ++i)
            os << (i ? "," : "") << params[i].first << "=" << params[i].second;
        os << "} seed=" << seed << " trials=" << trials << " wins=" << wins;
        char buf[64];
        snprintf(buf, sizeof buf, " estimate=%.6f ci_lo=%.6f ci_hi=%.6f", estimate, ci_lo, ci_hi);
        os << buf;
        for (const auto& [k, v] : extras) {
            snprintf(buf, sizeof buf, " %s=%.6f", k.c_str(), v);
            os << buf;
        }
        return os.str();
    }
};

struct TrialOutcome {
    bool win = false;
    std::map<std::string, double> tallies;
};

using TrialFn = std::function<TrialOutcome(Rng&)>;

/// Runs `trials` independent trials on per-trial rng substreams derived
/// from the master seed; `jobs` threads split the index range. Aggregation
/// is order-independent, so results are identical for any job count.
inline ExperimentResult monte_carlo(const TrialFn& trial, uint64_t trials, uint64_t seed,
                                    unsigned jobs = 1) {
    ExperimentResult res;
    res.seed = seed;
    res.trials = trials;
    if (jobs == 0) jobs = 1;

    std::vector<uint64_t> wins(jobs, 0);
    std::vector<std::map<std::string, double>> tallies(jobs);
    std::vector<std::exception_ptr> errors(jobs);

    auto worker = [&](unsigned j) {
        try {
            for (uint64_t i = j; i < trials; i += jobs) {
                Rng rng = Rng::substream(seed, i);
                TrialOutcome out = trial(rng);
                if (out.win) ++wins[j];
                for (const auto& [k, v] : out.tallies) tallies[j][k] += v;
            }
        } catch (...) {
            errors[j] = std::current_exception();
        }
    };

    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned j = 0; j < jobs; ++j) threads.emplace_back(worker, j);
        for (auto& t : threads) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    res.wins = std::accumulate(wins.begin(), wins.end(), uint64_t(0));
    std::map<std::string, double> merged;
    for (const auto& t : tallies)
        for (const auto& [k, v] : t) merged[k] += v;
    res.estimate = trials ? double(res.wins) / double(trials) : 0;
    WilsonInterval ci = wilson95(res.wins, trials);
    res.ci_lo = ci.lo;
    res.ci_hi = ci.hi;
    for (const auto& [k, v] : merged) res.extras.emplace_back(k, v);
    return res;
}

// ---------------------------------------------------------------------------
// Non-locality model: one shared pure state, disjoint qubit partitions,
// side-local classical strings, runtime-enforced locality.
// ---------------------------------------------------------------------------

class LocalView {
  public:
    LocalView(qsim::StateVector* state, std::vector<uint32_t> allowed)
        : state_(state), allowed_(allowed.begin(), allowed.end()) {}

    const std::set<uint32_t>& allowed() const { return allowed_; }

    void hadamard(const std::vector<uint32_t>& qs) {
        check(qs);
        state_->hadamard(qs);
    }

    qsim::FnMeasurement measure_fn(const qsim::ClassicalFn& fn, size_t out_len,
                                   const std::vector<uint32_t>& in, Rng& rng) {
        check(in);
        auto fm = qsim::measure_function(*state_, fn, out_len, in, rng);
        *state_ = fm.post_state;
        return fm;
    }

    qsim::MeasurementOutcome measure(const std::vector<uint32_t>& qs, Rng& rng) {
        check(qs);
        auto mo = qsim::measure(*state_, qs, rng);
        *state_ = mo.post_state;
        return mo;
    }

  private:
    void check(const std::vector<uint32_t>& qs) const {
        for (uint32_t q : qs)
            if (!allowed_.count(q)) throw ViolationError("local player touched foreign qubit");
    }

    qsim::StateVector* state_;
    std::set<uint32_t> allowed_;
};

struct BipartiteAllocation {
    std::shared_ptr<qsim::StateVector> state;
    std::vector<uint32_t> b_qubits, c_qubits;
    std::vector<uint8_t> b_classical, c_classical;

    void validate() const {
        std::set<uint32_t> seen(b_qubits.begin(), b_qubits.end());
        for (uint32_t q : c_qubits)
            if (!seen.insert(q).second) throw std::invalid_argument("allocation: qubit assigned twice");
        if (state)
            for (uint32_t q : seen)
                if (q >= state->num_qubits()) throw std::invalid_argument("allocation: qubit out of range");
    }
};

struct SplitterInput {
    std::shared_ptr<qsim::StateVector> state;   // may hold zero qubits
    std::vector<std::vector<uint32_t>> blocks;  // structure of the quantum part
    std::vector<uint8_t> classical;             // game bundle (serialized)
};

struct LocalInput {
    std::vector<uint8_t> challenge;  // kv-encoded, game-specific
    LocalView view;
    const std::vector<uint8_t>& classical;
};

/// The (A, B, C) triple. Builtin kinds cover the calibration baselines;
/// Custom supplies explicit splitter and players.
///
/// guess-uniform: the splitter plants one uniform answer string on both
/// sides (the agreeing blind guess that attains the trivial rate).
/// guess-independent: each side draws its own uniform answer.
/// guess-zero: both answer all-zeros. forward-b: the whole state and
/// classical bundle go to B, who plays honestly; C guesses blind.
struct Adversary {
    enum class Kind { GuessUniform, GuessIndependent, GuessZero, SharedCoin, ForwardB, Custom };

    std::string name;
    Kind kind = Kind::Custom;
    std::function<BipartiteAllocation(const SplitterInput&, Rng&)> split;
    std::function<BitVec(LocalInput&, Rng&)> play_b, play_c;
};

inline Adversary builtin_adversary(const std::string& name) {
    Adversary a;
    a.name = name;
    if (name == "guess-uniform")
        a.kind = Adversary::Kind::GuessUniform;
    else if (name == "guess-independent")
        a.kind = Adversary::Kind::GuessIndependent;
    else if (name == "guess-zero")
        a.kind = Adversary::Kind::GuessZero;
    else if (name == "shared-coin")
        a.kind = Adversary::Kind::SharedCoin;
    else if (name == "forward-b" || name == "honest-b")
        a.kind = Adversary::Kind::ForwardB;
    else
        throw std::invalid_argument("unknown adversary: " + name);
    return a;
}

inline const std::vector<std::string>& builtin_adversary_names() {
    static const std::vector<std::string> names = {"guess-uniform", "guess-independent", "guess-zero",
                                                   "shared-coin", "forward-b"};
    return names;
}

namespace detail {

inline std::vector<uint32_t> all_qubits(const SplitterInput& in) {
    std::vector<uint32_t> out;
    for (const auto& blk : in.blocks) out.insert(out.end(), blk.begin(), blk.end());
    return out;
}

/// Allocation for the builtin adversaries. Blind kinds take no qubits;
/// ForwardB hands the entire state and classical bundle to B; SharedCoin
/// plants a common answer string on both sides.
inline BipartiteAllocation builtin_split(const Adversary& adv, const SplitterInput& in, size_t ans_len,
                                         Rng& rng) {
    BipartiteAllocation alloc;
    alloc.state = in.state;
    switch (adv.kind) {
        case Adversary::Kind::GuessIndependent:
        case Adversary::Kind::GuessZero:
            break;
        case Adversary::Kind::GuessUniform:
        case Adversary::Kind::SharedCoin: {
            kv::Writer w;
            w.put("shared", rng.bitvec(ans_len).to_hex());
            alloc.b_classical = w.bytes();
            alloc.c_classical = alloc.b_classical;
            break;
        }
        case Adversary::Kind::ForwardB:
            alloc.b_qubits = all_qubits(in);
            alloc.b_classical = in.classical;
            break;
        case Adversary::Kind::Custom:
            return adv.split(in, rng);
    }
    alloc.validate();
    return alloc;
}

/// Blind answers used by the builtin kinds where no honest strategy is
/// defined (and by ForwardB's C side).
inline BitVec blind_answer(const Adversary& adv, const std::vector<uint8_t>& classical, size_t ans_len,
                           Rng& rng) {
    switch (adv.kind) {
        case Adversary::Kind::GuessIndependent:
        case Adversary::Kind::ForwardB:
            return rng.bitvec(ans_len);
        case Adversary::Kind::GuessZero:
            return BitVec(ans_len);
        case Adversary::Kind::GuessUniform:
        case Adversary::Kind::SharedCoin: {
            kv::Reader r(classical);
            return BitVec::from_hex(ans_len, r.get("shared"));
        }
        case Adversary::Kind::Custom:
            throw std::logic_error("blind_answer on custom adversary");
    }
    return BitVec(ans_len);
}

inline BitVec bit_answer(bool b) { return BitVec::from_bits({b ? 1 : 0}); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Challenge distributions on input pairs
// ---------------------------------------------------------------------------

enum class DistX { UxU, IdU };

inline std::pair<BitVec, BitVec> sample_dist_x(DistX d, uint32_t n, Rng& rng) {
    if (d == DistX::UxU) return {rng.bitvec(n), rng.bitvec(n)};
    BitVec x = rng.bitvec(n);
    return {x, x};
}

inline const char* dist_x_name(DistX d) { return d == DistX::UxU ? "UxU" : "IdU"; }

// ---------------------------------------------------------------------------
// UPO security experiment
// ---------------------------------------------------------------------------

struct GameConfig {
    Adversary adversary;
    uint64_t trials = 2000;
    uint64_t seed = 1;
    unsigned jobs = 1;
};

namespace detail {

/// Classical bundle handed to A (and forwarded to honest players): the
/// wrapped circuits, the class key, and the parameters.
inline std::vector<uint8_t> upo_bundle(const upo::UpoObfuscation& rho, const ClassKey& key) {
    kv::Writer w;
    w.put_bytes("c", rho.c_tilde.serialize());
    w.put_bytes("d", rho.d_tilde.serialize());
    w.put_bytes("key", key);
    w.put_u64("n", rho.params.cp.n);
    w.put_u64("l0", rho.params.cp.l0);
    w.put_u64("n1", rho.params.cp.n1);
    w.put_u64("encq", rho.params.cp.enc_q_bits);
    w.put_u64("m", rho.params.cp.m);
    return w.bytes();
}

inline upo::UpoParams params_from_bundle(const kv::Reader& r) {
    upo::UpoParams p;
    p.cp.n = uint32_t(r.get_u64("n"));
    p.cp.l0 = uint32_t(r.get_u64("l0"));
    p.cp.n1 = uint32_t(r.get_u64("n1"));
    p.cp.enc_q_bits = uint32_t(r.get_u64("encq"));
    p.cp.m = uint32_t(r.get_u64("m"));
    return p;
}

/// Honest evaluation of a UPO obfuscation against a local view, using the
/// serialized classical parts.
inline std::optional<BitVec> eval_on_view(LocalView& view, const std::vector<std::vector<uint32_t>>& blocks,
                                          const std::vector<uint8_t>& bundle, const BitVec& x, Rng& rng) {
    kv::Reader r(bundle);
    circ::Obfuscated c_tilde = circ::Obfuscated::deserialize(r.get_bytes("c"));
    circ::Obfuscated d_tilde = circ::Obfuscated::deserialize(r.get_bytes("d"));
    upo::UpoParams params = params_from_bundle(r);
    return upo::upo_eval_core(view, blocks, c_tilde, d_tilde, params, x, rng);
}

}  // namespace detail

/// UPO.Expt: A sends k; the challenger punctures at hidden challenge
/// points and obfuscates either C_k or G_{k*}; B and C each see one
/// challenge point and must simultaneously name the world bit.
inline ExperimentResult run_upo_expt(const KeyedCircuitClass& cls, const upo::UpoParams& params,
                                     DistX dist, const GameConfig& cfg) {
    auto trial = [&](Rng& rng) -> TrialOutcome {
        ClassKey key = cls.sample_key(rng);
        auto [xb, xc] = sample_dist_x(dist, cls.input_len, rng);
        bool b = rng.bit();
        upo::UpoObfuscation rho =
            b ? upo::upo_obf_punctured(cls, key, xb, xc, upo::PunctureMode::Plain, nullptr, nullptr,
                                       params, rng)
              : upo::upo_obf(cls.build(key), params, rng);

        SplitterInput sin{std::make_shared<qsim::StateVector>(rho.state), rho.blocks,
                          detail::upo_bundle(rho, key)};
        BipartiteAllocation alloc = detail::builtin_split(cfg.adversary, sin, 1, rng);

        auto play = [&](const BitVec& x, const std::vector<uint32_t>& qubits,
                        const std::vector<uint8_t>& classical, bool is_b) -> bool {
            LocalView view(alloc.state.get(), qubits);
            if (cfg.adversary.kind == Adversary::Kind::Custom) {
                kv::Writer w;
                w.put_u64("anslen", 1);
                w.put("x", x.to_hex());
                LocalInput li{w.bytes(), view, classical};
                return (is_b ? cfg.adversary.play_b : cfg.adversary.play_c)(li, rng).get(0);
            }
            if (cfg.adversary.kind == Adversary::Kind::ForwardB && is_b) {
                // Honest distinguisher: evaluate at the challenge point and
                // compare with the class member (the key is A's knowledge).
                kv::Reader r(classical);
                circ::ProgPtr ck = cls.build(r.get_bytes("key"));
                auto z = detail::eval_on_view(view, sin.blocks, classical, x, rng);
                return !(z == ck->run(x));  // punctured world answers differently
            }
            return detail::blind_answer(cfg.adversary, classical, 1, rng).get(0);
        };

        bool bb = play(xb, alloc.b_qubits, alloc.b_classical, true);
        bool bc = play(xc, alloc.c_qubits, alloc.c_classical, false);
        return TrialOutcome{bb == b && bc == b,
                            {{"marginal_b", bb ? 1.0 : 0.0}, {"marginal_c", bc ? 1.0 : 0.0}}};
    };

    ExperimentResult res = monte_carlo(trial, cfg.trials, cfg.seed, cfg.jobs);
    res.game = "upo";
    res.scheme = cls.name;
    res.adversary = cfg.adversary.name;
    res.distribution = dist_x_name(dist);
    res.params = {{"n", std::to_string(cls.input_len)}, {"m", std::to_string(cls.output_len)}};
    return res;
}

/// GenUPO.Expt: as above but A also chooses the patch circuits; the
/// challenger uses generalized puncturing.
inline ExperimentResult run_genupo_expt(const KeyedCircuitClass& cls, const upo::UpoParams& params,
                                        DistX dist, const GameConfig& cfg,
                                        const std::function<std::pair<circ::ProgPtr, circ::ProgPtr>(
                                            const ClassKey&, Rng&)>& choose_mus = nullptr) {
    auto trial = [&](Rng& rng) -> TrialOutcome {
        ClassKey key = cls.sample_key(rng);
        // Default adversary choice: the class circuit itself, making the
        // two worlds functionally identical.
        circ::ProgPtr muB, muC;
        if (choose_mus) {
            std::tie(muB, muC) = choose_mus(key, rng);
        } else {
            muB = cls.build(key);
            muC = muB;
        }
        auto [xb, xc] = sample_dist_x(dist, cls.input_len, rng);
        bool b = rng.bit();
        upo::UpoObfuscation rho =
            b ? upo::upo_obf_punctured(cls, key, xb, xc, upo::PunctureMode::Generalized, muB, muC,
                                       params, rng)
              : upo::upo_obf(cls.build(key), params, rng);

        SplitterInput sin{std::make_shared<qsim::StateVector>(rho.state), rho.blocks,
                          detail::upo_bundle(rho, key)};
        BipartiteAllocation alloc = detail::builtin_split(cfg.adversary, sin, 1, rng);

        auto play = [&](const BitVec& x, const std::vector<uint32_t>& qubits,
                        const std::vector<uint8_t>& classical, bool is_b) -> bool {
            LocalView view(alloc.state.get(), qubits);
            if (cfg.adversary.kind == Adversary::Kind::Custom) {
                kv::Writer w;
                w.put_u64("anslen", 1);
                w.put("x", x.to_hex());
                LocalInput li{w.bytes(), view, classical};
                return (is_b ? cfg.adversary.play_b : cfg.adversary.play_c)(li, rng).get(0);
            }
            if (cfg.adversary.kind == Adversary::Kind::ForwardB && is_b) {
                kv::Reader r(classical);
                circ::ProgPtr ck = cls.build(r.get_bytes("key"));
                auto z = detail::eval_on_view(view, sin.blocks, classical, x, rng);
                return !(z == ck->run(x));
            }
            return detail::blind_answer(cfg.adversary, classical, 1, rng).get(0);
        };

        bool bb = play(xb, alloc.b_qubits, alloc.b_classical, true);
        bool bc = play(xc, alloc.c_qubits, alloc.c_classical, false);
        return TrialOutcome{bb == b && bc == b, {}};
    };

    ExperimentResult res = monte_carlo(trial, cfg.trials, cfg.seed, cfg.jobs);
    res.game = "genupo";
    res.scheme = cls.name;
    res.adversary = cfg.adversary.name;
    res.distribution = dist_x_name(dist);
    res.params = {{"n", std::to_string(cls.input_len)}, {"m", std::to_string(cls.output_len)}};
    return res;
}

/// PreponedExpt for PRF copy-protection: the y values land with A before
/// the split; b = 1 serves the real PRF outputs, b = 0 fresh randomness.
inline ExperimentResult run_preponed_expt(const cp::CpParams& params, DistX dist, const GameConfig& cfg) {
    auto trial = [&](Rng& rng) -> TrialOutcome {
        prf::GgmKey k1 = prf::prf_gen(params.input_len(), params.m, rng);
        cp::CpPrfProgram prog = cp::copyprotect(k1, params, rng);
        auto [xb, xc] = sample_dist_x(dist, params.input_len(), rng);
        bool b = rng.bit();
        BitVec yb = b ? prf::prf_eval(k1, xb) : rng.bitvec(params.m);
        BitVec yc = b ? prf::prf_eval(k1, xc) : rng.bitvec(params.m);

        kv::Writer bw;
        bw.put_bytes("p", prog.p_tilde.serialize());
        bw.put_u64("n", params.n);
        bw.put_u64("l0", params.l0);
        bw.put_u64("n1", params.n1);
        bw.put_u64("encq", params.enc_q_bits);
        bw.put_u64("m", params.m);
        bw.put("yb", yb.to_hex());
        bw.put("yc", yc.to_hex());

        SplitterInput sin{std::make_shared<qsim::StateVector>(prog.state), prog.blocks, bw.bytes()};
        BipartiteAllocation alloc = detail::builtin_split(cfg.adversary, sin, 1, rng);

        auto play = [&](const BitVec& x, const BitVec& y, const std::vector<uint32_t>& qubits,
                        const std::vector<uint8_t>& classical, bool is_b) -> bool {
            LocalView view(alloc.state.get(), qubits);
            if (cfg.adversary.kind == Adversary::Kind::Custom) {
                kv::Writer w;
                w.put_u64("anslen", 1);
                w.put("x", x.to_hex());
                LocalInput li{w.bytes(), view, classical};
                return (is_b ? cfg.adversary.play_b : cfg.adversary.play_c)(li, rng).get(0);
            }
            if (cfg.adversary.kind == Adversary::Kind::ForwardB && is_b) {
                kv::Reader r(classical);
                circ::Obfuscated p_tilde = circ::Obfuscated::deserialize(r.get_bytes("p"));
                auto got = cp::cp_eval_core(view, sin.blocks, p_tilde, params, x, rng);
                return got == std::optional<BitVec>(y);  // matches => real world (b=1)
            }
            return detail::blind_answer(cfg.adversary, classical, 1, rng).get(0);
        };

        bool bb = play(xb, yb, alloc.b_qubits, alloc.b_classical, true);
        bool bc = play(xc, yc, alloc.c_qubits, alloc.c_classical, false);
        return TrialOutcome{bb == b && bc == b, {}};
    };

    ExperimentResult res = monte_carlo(trial, cfg.trials, cfg.seed, cfg.jobs);
    res.game = "preponed";
    res.scheme = "cllz-cp-prf";
    res.adversary = cfg.adversary.name;
    res.distribution = dist_x_name(dist);
    res.params = {{"n", std::to_string(params.input_len())}, {"m", std::to_string(params.m)}};
    return res;
}

/// CP.Expt: search game against a copy-protected keyed circuit. The
/// challenge sampler may depend on the key (identical-accepting variants).
inline ExperimentResult run_cp_expt(
    const KeyedCircuitClass& cls, const upo::UpoParams& params, const GameConfig& cfg,
    const std::string& dist_name, double p_triv,
    const std::function<std::pair<BitVec, BitVec>(const ClassKey&, Rng&)>& sample_challenges) {
    uint32_t m = cls.output_len;
    auto trial = [&](Rng& rng) -> TrialOutcome {
        ClassKey key = cls.sample_key(rng);
        circ::ProgPtr ck = cls.build(key);
        upo::UpoObfuscation rho = apps::cp_copyprotect(cls, key, params, rng);

        SplitterInput sin{std::make_shared<qsim::StateVector>(rho.state), rho.blocks,
                          detail::upo_bundle(rho, key)};
        BipartiteAllocation alloc = detail::builtin_split(cfg.adversary, sin, m, rng);
        auto [xb, xc] = sample_challenges(key, rng);

        auto play = [&](const BitVec& x, const std::vector<uint32_t>& qubits,
                        const std::vector<uint8_t>& classical, bool is_b) -> BitVec {
            LocalView view(alloc.state.get(), qubits);
            if (cfg.adversary.kind == Adversary::Kind::Custom) {
                kv::Writer w;
                w.put_u64("anslen", m);
                w.put("x", x.to_hex());
                LocalInput li{w.bytes(), view, classical};
                return (is_b ? cfg.adversary.play_b : cfg.adversary.play_c)(li, rng);
            }
            if (cfg.adversary.kind == Adversary::Kind::ForwardB && is_b) {
                BitVec padded = apps::pad_input(x, params.input_len());
                auto z = detail::eval_on_view(view, sin.blocks, classical, padded, rng);
                return z ? *z : BitVec(m);
            }
            return detail::blind_answer(cfg.adversary, classical, m, rng);
        };

        BitVec yb = play(xb, alloc.b_qubits, alloc.b_classical, true);
        BitVec yc = play(xc, alloc.c_qubits, alloc.c_classical, false);
        bool b_ok = ck->run(xb) == std::optional<BitVec>(yb);
        bool win = b_ok && ck->run(xc) == std::optional<BitVec>(yc);
        return TrialOutcome{win, {{"b_correct", b_ok ? 1.0 : 0.0}}};
    };

    ExperimentResult res = monte_carlo(trial, cfg.trials, cfg.seed, cfg.jobs);
    res.game = "cp";
    res.scheme = cls.name;
    res.adversary = cfg.adversary.name;
    res.distribution = dist_name;
    res.params = {{"n", std::to_string(cls.input_len)}, {"m", std::to_string(m)}};
    res.extras.emplace_back("p_triv", p_triv);
    return res;
}

/// CP.Expt with uniform independent challenges; p_triv for a keyed class
/// with uniform outputs is the blind-guess rate 2^-m.
inline ExperimentResult run_cp_expt_uniform(const KeyedCircuitClass& cls, const upo::UpoParams& params,
                                            const GameConfig& cfg) {
    double p_triv = std::pow(0.5, double(std::min<uint32_t>(cls.output_len, 60)));
    return run_cp_expt(cls, params, cfg, "UxU", p_triv,
                       [&cls](const ClassKey&, Rng& rng) {
                           return std::make_pair(rng.bitvec(cls.input_len), rng.bitvec(cls.input_len));
                       });
}

/// PCS.Expt: the puncturable-cryptographic-scheme game; verification uses
/// the challenger-held secret key.
inline ExperimentResult run_pcs_expt(const apps::PuncturableCryptoScheme& scheme,
                                     const upo::UpoParams& params, const GameConfig& cfg) {
    if (scheme.in_len != params.input_len())
        throw std::invalid_argument("run_pcs_expt: scheme arity must match the obfuscator");
    auto trial = [&](Rng& rng) -> TrialOutcome {
        auto [sk, aux] = scheme.gen(rng);
        prf::GgmKey k = prf::GgmKey::deserialize(sk);
        upo::UpoObfuscation rho =
            upo::upo_obf(std::make_shared<prf::PrfProgram>(k), params, rng);

        kv::Writer bw;
        bw.put_bytes("c", rho.c_tilde.serialize());
        bw.put_bytes("d", rho.d_tilde.serialize());
        bw.put_bytes("key", sk);
        bw.put_u64("n", params.cp.n);
        bw.put_u64("l0", params.cp.l0);
        bw.put_u64("n1", params.cp.n1);
        bw.put_u64("encq", params.cp.enc_q_bits);
        bw.put_u64("m", params.cp.m);
        bw.put_bytes("aux", aux);

        SplitterInput sin{std::make_shared<qsim::StateVector>(rho.state), rho.blocks, bw.bytes()};
        BipartiteAllocation alloc = detail::builtin_split(cfg.adversary, sin, scheme.out_len, rng);
        BitVec xb = rng.bitvec(scheme.in_len), xc = rng.bitvec(scheme.in_len);

        auto play = [&](const BitVec& x, const std::vector<uint32_t>& qubits,
                        const std::vector<uint8_t>& classical, bool is_b) -> BitVec {
            LocalView view(alloc.state.get(), qubits);
            if (cfg.adversary.kind == Adversary::Kind::Custom) {
                kv::Writer w;
                w.put_u64("anslen", scheme.out_len);
                w.put("x", x.to_hex());
                LocalInput li{w.bytes(), view, classical};
                return (is_b ? cfg.adversary.play_b : cfg.adversary.play_c)(li, rng);
            }
            if (cfg.adversary.kind == Adversary::Kind::ForwardB && is_b) {
                auto z = detail::eval_on_view(view, sin.blocks, classical, x, rng);
                return z ? *z : BitVec(scheme.out_len);
            }
            return detail::blind_answer(cfg.adversary, classical, scheme.out_len, rng);
        };

        BitVec yb = play(xb, alloc.b_qubits, alloc.b_classical, true);
        BitVec yc = play(xc, alloc.c_qubits, alloc.c_classical, false);
        bool win = scheme.verify(sk, aux, xb, yb) && scheme.verify(sk, aux, xc, yc);
        return TrialOutcome{win, {}};
    };

    ExperimentResult res = monte_carlo(trial, cfg.trials, cfg.seed, cfg.jobs);
    res.game = "pcs";
    res.scheme = scheme.name;
    res.adversary = cfg.adversary.name;
    res.distribution = "UxU";
    res.params = {{"n", std::to_string(scheme.in_len)}, {"m", std::to_string(scheme.out_len)}};
    res.extras.emplace_back("p_triv", std::pow(0.5, double(std::min<uint32_t>(scheme.out_len, 60))));
    return res;
}

}  // namespace ucl::games
