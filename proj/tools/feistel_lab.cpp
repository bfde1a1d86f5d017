// feistel-lab: command-line front end for the Feistel laboratory library.
//
// Exit codes: 0 success, 1 usage error, 2 a --check criterion failed.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "feistel_lab/bench.hpp"
#include "feistel_lab/distinguisher.hpp"
#include "feistel_lab/error.hpp"
#include "feistel_lab/feistel.hpp"
#include "feistel_lab/prf.hpp"
#include "feistel_lab/statcheck.hpp"

namespace fl = feistel_lab;
using json = nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;

struct StructureFlags {
  std::string kind = "ufn2";
  std::size_t n = 4;
  std::size_t k = 2;
  std::size_t rounds = 0;  // 0: structure default

  void add_to(CLI::App& cmd, bool with_kind = true) {
    if (with_kind) {
      cmd.add_option("--kind", kind, "balanced | source-heavy | target-heavy | ufn2")->capture_default_str();
    }
    cmd.add_option("--n", n, "sub-block width in bits")->capture_default_str();
    cmd.add_option("--k", k, "source/target ratio")->capture_default_str();
    cmd.add_option("--rounds", rounds, "round count (default: the structure's minimal secure count)");
  }

  fl::UfnParams params() const {
    const auto parsed = fl::parse_structure_kind(kind);
    const std::size_t r = rounds != 0 ? rounds : fl::minimal_secure_rounds(parsed, k);
    // A balanced network with k > 1 covers the same (k+1)n-bit state.
    if (parsed == fl::StructureKind::kBalanced && k != 1) return fl::balanced_params_for(n, k, r);
    fl::UfnParams p{parsed, n, k, r};
    p.validate();
    return p;
  }
};

struct SeedFlag {
  std::optional<std::uint64_t> value;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--seed", value, "master seed (falls back to FEISTEL_LAB_SEED, then a fresh random seed)");
  }

  std::uint64_t resolve() const {
    if (value) return *value;
    if (const char* env = std::getenv("FEISTEL_LAB_SEED")) {
      try {
        return std::stoull(env);
      } catch (const std::exception&) {
        throw fl::UsageError("FEISTEL_LAB_SEED must be an unsigned integer");
      }
    }
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) | rd();
    std::cerr << "seed: " << s << "\n";
    return s;
  }
};

json interval_json(const fl::Interval& i) { return json::array({i.lo, i.hi}); }

void emit(const json& j) { std::cout << j.dump() << "\n"; }

fl::BitString parse_key(const std::string& text) {
  if (text.find(':') != std::string::npos) return fl::BitString::parse(text);
  return fl::BitString::parse(std::to_string(text.size() * 4) + ":" + text);
}

json game_json(const fl::GameReport& r) {
  return json{{"accept_a", r.accept_a}, {"accept_b", r.accept_b}, {"advantage", r.advantage},
              {"ci", r.ci_halfwidth},   {"wilson_a", interval_json(r.wilson_a)},
              {"wilson_b", interval_json(r.wilson_b)},
              {"trials", r.trials},     {"seed", r.seed}};
}

json structure_json(const fl::UfnParams& p) {
  return json{{"kind", fl::to_string(p.kind)}, {"n", p.n}, {"k", p.k}, {"rounds", p.rounds}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feistel-lab: unbalanced Feistel network constructions, distinguishers and checks"};
  app.require_subcommand(1);

  // encrypt / decrypt ------------------------------------------------------
  StructureFlags cipher_flags;
  std::string key_text;
  std::string input_text;
  std::string prf_name = "ggm";
  std::string expander_name = "test";
  unsigned bbs_bits = 32;
  auto add_cipher_options = [&](CLI::App* cmd) {
    cipher_flags.add_to(*cmd);
    cmd->add_option("--key", key_text, "master key, width:hex or plain hex")->required();
    cmd->add_option("--in", input_text, "block in width:hex form")->required();
    cmd->add_option("--prf", prf_name, "round functions: ggm | ideal (key used as seed)")->capture_default_str();
    cmd->add_option("--expander", expander_name, "GGM generator: test | bbs")->capture_default_str();
    cmd->add_option("--bbs-bits", bbs_bits, "BBS prime size for --expander bbs")->capture_default_str();
  };
  auto* encrypt_cmd = app.add_subcommand("encrypt", "encrypt one block");
  add_cipher_options(encrypt_cmd);
  auto* decrypt_cmd = app.add_subcommand("decrypt", "decrypt one block");
  add_cipher_options(decrypt_cmd);

  // attack -----------------------------------------------------------------
  std::string attack_name;
  StructureFlags attack_flags;
  std::size_t trials = 10000;
  SeedFlag seed_flag;
  unsigned jobs = 1;
  bool check = false;
  auto* attack_cmd = app.add_subcommand("attack", "run a distinguisher against the construction it breaks");
  attack_cmd->add_option("--name", attack_name, "src-k1 | tgt-k1 | ufn2-even | ufn2-2k")->required();
  attack_flags.add_to(*attack_cmd, false);
  attack_cmd->add_option("--trials", trials)->capture_default_str();
  seed_flag.add_to(*attack_cmd);
  attack_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  attack_cmd->add_flag("--check", check, "exit 2 unless A always accepts and 1/2^n lies in B's interval");

  // advantage --------------------------------------------------------------
  StructureFlags adv_flags;
  auto* adv_cmd = app.add_subcommand("advantage", "estimate a distinguisher's advantage against any structure");
  adv_cmd->add_option("--name", attack_name, "src-k1 | tgt-k1 | ufn2-even | ufn2-2k")->required();
  adv_flags.add_to(*adv_cmd);
  adv_cmd->add_option("--trials", trials)->capture_default_str();
  seed_flag.add_to(*adv_cmd);
  adv_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  adv_cmd->add_flag("--check", check, "exit 2 if the advantage exceeds 3 CI half-widths");

  // badprob ----------------------------------------------------------------
  StructureFlags bad_flags;
  std::size_t m = 4;
  bool uniform_queries = false;
  auto* bad_cmd = app.add_subcommand("badprob", "estimate the BAD-event probability and compare with its bound");
  bad_flags.add_to(*bad_cmd);
  bad_cmd->add_option("--m", m, "queries per trial")->capture_default_str();
  bad_cmd->add_option("--trials", trials)->capture_default_str();
  seed_flag.add_to(*bad_cmd);
  bad_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  bad_cmd->add_flag("--uniform-queries", uniform_queries, "random distinct queries instead of shaped ones");
  bad_cmd->add_flag("--check", check, "exit 2 if empirical > bound + 3 CI half-widths");

  // uniformity -------------------------------------------------------------
  StructureFlags uni_flags;
  auto* uni_cmd = app.add_subcommand("uniformity", "chi-square test of outputs at a fixed input");
  uni_flags.add_to(*uni_cmd);
  uni_cmd->add_option("--trials", trials)->capture_default_str();
  seed_flag.add_to(*uni_cmd);
  uni_cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  uni_cmd->add_flag("--check", check, "exit 2 if the test rejects uniformity at 0.01");

  // matrix -----------------------------------------------------------------
  std::size_t matrix_k = 1;
  auto* matrix_cmd = app.add_subcommand("matrix", "GF(2) nonsingularity of the UFN2 output matrix");
  matrix_cmd->add_option("--k", matrix_k)->required();

  // bench ------------------------------------------------------------------
  std::string mode_name = "mem";
  std::size_t bench_n = 4;
  std::size_t bench_k = 2;
  std::size_t workload = 1000;
  std::size_t key_bits = 0;
  std::string out_path;
  std::string csv_path;
  bool analytic = false;
  bool timing = false;
  auto* bench_cmd = app.add_subcommand("bench", "memory / generator-bit comparison of the four structures");
  bench_cmd->add_option("--mode", mode_name, "mem | ggm")->capture_default_str();
  bench_cmd->add_option("--n", bench_n)->capture_default_str();
  bench_cmd->add_option("--k", bench_k)->capture_default_str();
  bench_cmd->add_option("--workload", workload, "encryptions per structure")->capture_default_str();
  seed_flag.add_to(*bench_cmd);
  bench_cmd->add_option("--key-bits", key_bits, "GGM total key length (default 64*lcm(rounds))");
  bench_cmd->add_option("--out", out_path, "write the JSON report here instead of stdout");
  bench_cmd->add_option("--csv", csv_path, "CSV path (default: --out with a .csv extension)");
  bench_cmd->add_flag("--analytic", analytic, "fall back to r*2^P1*P2 when a domain exceeds the table cap");
  bench_cmd->add_flag("--timing", timing, "include wall-clock columns (not reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (encrypt_cmd->parsed() || decrypt_cmd->parsed()) {
      const fl::UfnParams params = cipher_flags.params();
      const fl::BitString key = parse_key(key_text);
      const fl::BitString block = fl::BitString::parse(input_text);
      std::optional<fl::UfnPermutation> perm;
      if (prf_name == "ideal") {
        perm.emplace(fl::make_ideal_permutation(params, key));
      } else if (prf_name == "ggm") {
        std::shared_ptr<const fl::SeedExpander> expander;
        if (expander_name == "test") {
          expander = std::make_shared<fl::TestExpander>();
        } else if (expander_name == "bbs") {
          expander = std::make_shared<fl::BbsExpander>(fl::generate_bbs_params(bbs_bits, key));
        } else {
          throw fl::UsageError("unknown expander '" + expander_name + "'");
        }
        fl::BitString master = key;
        // A key that cannot be split evenly is stretched to 64 bits per round.
        if (master.width() == 0 || master.width() % params.rounds != 0) {
          master = expander->stretch(key, 64 * params.rounds);
        }
        perm.emplace(fl::make_ggm_permutation(params, master, expander));
      } else {
        throw fl::UsageError("unknown PRF mode '" + prf_name + "'");
      }
      const fl::BitString out = encrypt_cmd->parsed() ? perm->encrypt(block) : perm->decrypt(block);
      std::cout << out.to_text() << "\n";
      return 0;
    }

    if (attack_cmd->parsed() || adv_cmd->parsed()) {
      const auto name = fl::parse_attack_name(attack_name);
      const bool is_attack = attack_cmd->parsed();
      const StructureFlags& flags = is_attack ? attack_flags : adv_flags;
      auto machine = fl::make_attack(name, flags.n, flags.k);
      fl::UfnParams target = fl::attack_target(name, flags.n, flags.k);
      if (is_attack) {
        if (flags.rounds != 0) target.rounds = flags.rounds;
      } else {
        target = flags.params();
      }
      if (target.state_width() != machine->width()) {
        throw fl::UsageError("structure width does not match the attack's (k+1)n");
      }
      const std::uint64_t seed = seed_flag.resolve();
      const auto report = fl::estimate_advantage(*machine, fl::construction_factory(target),
                                                 fl::ideal_permutation_factory(target.state_width()), trials,
                                                 seed, jobs);
      json j = game_json(report);
      j["schema"] = 1;
      j["attack"] = attack_name;
      j["structure"] = structure_json(target);
      if (name == fl::AttackName::kUfn2TwoK) j["w_index"] = static_cast<fl::Ufn2TwoKAttack&>(*machine).w_index();
      emit(j);
      if (check) {
        bool ok = false;
        if (is_attack) {
          const double ideal = std::ldexp(1.0, -static_cast<int>(flags.n));
          ok = report.accept_a == 1.0 && report.wilson_b.contains(ideal);
        } else {
          ok = report.advantage <= 3 * report.ci_halfwidth;
        }
        if (!ok) return kExitCheckFailed;
      }
      return 0;
    }

    if (bad_cmd->parsed()) {
      const auto kind = fl::parse_structure_kind(bad_flags.kind);
      const auto spec = fl::bad_event_spec(kind, bad_flags.k, m);
      const std::uint64_t seed = seed_flag.resolve();
      const auto report = fl::estimate_bad_prob(
          spec, bad_flags.n, bad_flags.k, trials, seed,
          uniform_queries ? fl::QueryShape::kUniform : fl::QueryShape::kAdversarial, jobs);
      json j{{"schema", 1},
             {"kind", fl::to_string(kind)},
             {"n", bad_flags.n},
             {"k", bad_flags.k},
             {"m", m},
             {"rounds", fl::bad_event_construction_rounds(kind, bad_flags.k)},
             {"rounds_watched", spec.rounds_watched},
             {"queries", uniform_queries ? "uniform" : "adversarial"},
             {"bound", report.bound},
             {"empirical", report.empirical},
             {"ci", report.ci_halfwidth},
             {"wilson", interval_json(report.wilson)},
             {"trials", report.trials},
             {"seed", seed}};
      emit(j);
      if (check && report.empirical > report.bound + 3 * report.ci_halfwidth) return kExitCheckFailed;
      return 0;
    }

    if (uni_cmd->parsed()) {
      const fl::UfnParams params = uni_flags.params();
      const std::uint64_t seed = seed_flag.resolve();
      const auto report = fl::conditional_uniformity_check(params, trials, seed, jobs);
      json j{{"schema", 1},
             {"structure", structure_json(params)},
             {"chi_square", report.chi_square},
             {"dof", report.dof},
             {"critical_value", report.critical_value},
             {"p_value", report.p_value},
             {"significance", report.significance},
             {"pass", report.pass},
             {"discarded", report.discarded},
             {"trials", report.trials},
             {"seed", seed}};
      emit(j);
      if (check && !report.pass) return kExitCheckFailed;
      return 0;
    }

    if (matrix_cmd->parsed()) {
      const auto a = fl::build_ufn2_matrix(matrix_k);
      emit(json{{"schema", 1}, {"k", matrix_k}, {"nonsingular", fl::gf2_nonsingular(a)}});
      return 0;
    }

    if (bench_cmd->parsed()) {
      fl::BenchConfig cfg;
      cfg.mode = fl::parse_prf_mode(mode_name);
      cfg.n = bench_n;
      cfg.k = bench_k;
      cfg.workload = workload;
      cfg.seed = seed_flag.resolve();
      cfg.key_bits = key_bits;
      cfg.analytic_fallback = analytic;
      const auto report = fl::run_bench(cfg);

      json rows = json::array();
      for (const auto& r : report.rows) {
        json row{{"structure", fl::to_string(r.kind)},
                 {"rounds", r.rounds},
                 {"p1", r.p1},
                 {"p2", r.p2},
                 {"memory_formula_bits", r.memory_formula_bits},
                 {"memory_table_bits", r.memory_table_bits},
                 {"table_agrees", r.table_agrees},
                 {"memory_ratio", r.memory_ratio},
                 {"table_memory_ratio", r.table_memory_ratio},
                 {"prbg_bits", r.prbg_bits},
                 {"prbg_bits_per_encryption", r.prbg_bits_per_encryption},
                 {"bits_ratio", r.bits_ratio}};
        if (cfg.mode == fl::PrfMode::kMemoized) {
          row["memory_bits"] = r.memory_bits;
          row["memory_source"] = r.memory_measured ? "measured" : "analytic";
          row["workload_table_bits"] = r.workload_table_bits;
        } else {
          row["ggm_bound_bits"] = r.ggm_bound_bits;
          row["key_bits"] = r.key_bits;
        }
        if (timing) {
          row["ns_per_encryption"] = r.wall_ns_per_encryption;
          row["time_ratio"] = r.time_ratio;
        }
        rows.push_back(row);
      }
      json j{{"schema", 1},   {"mode", fl::to_string(cfg.mode)}, {"n", cfg.n},       {"k", cfg.k},
             {"workload", cfg.workload}, {"seed", cfg.seed},     {"rows", rows}};
      if (out_path.empty()) {
        emit(j);
      } else {
        std::ofstream(out_path) << j.dump(2) << "\n";
        if (csv_path.empty()) {
          const auto dot = out_path.find_last_of('.');
          csv_path = (dot == std::string::npos ? out_path : out_path.substr(0, dot)) + ".csv";
        }
      }
      if (!csv_path.empty()) std::ofstream(csv_path) << fl::to_csv(report, timing);
      return 0;
    }
  } catch (const fl::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
