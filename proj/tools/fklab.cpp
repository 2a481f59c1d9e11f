// fklab: exact oracle, particle simulators, and an inequality verification
// harness for finite-state Feynman-Kac models.
//
// Subcommands:
//   corpus    write the built-in model corpus as JSON files
//   oracle    exact measures and assumption constants for a model file
//   simulate  replicated particle estimators as CSV
//   verify    bound suites with PASS/FAIL verdicts, CSV + JSON summary
//   report    aggregate verify CSVs into a JSON summary
//
// Exit codes: 0 success, 1 FAIL verdicts present, 2 usage or validation
// error, 3 capacity error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <cmath>

#include "CLI11.hpp"
#include "fklab/corpus.hpp"
#include "fklab/dual.hpp"
#include "fklab/errors.hpp"
#include "fklab/oracle.hpp"
#include "fklab/report_io.hpp"
#include "fklab/smc.hpp"
#include "fklab/verify.hpp"
#include "json.hpp"

namespace {

using namespace fklab;

int env_threads() {
    if (const char* env = std::getenv("FK_LAB_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return 0;
}

struct CommonOpts {
    std::string config_path;
    std::string model_path;
    std::string out_dir = ".";
    int threads = env_threads();
};

// Flag values win over config-file values: read config first, then let CLI11
// overwrite whatever was passed explicitly.
nlohmann::json load_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

FkModel resolve_model(const CommonOpts& opts) {
    if (opts.model_path.empty()) throw ValidationError("no model file given (--model)");
    if (opts.model_path.rfind("corpus:", 0) == 0) {
        const std::string name = opts.model_path.substr(7);
        const auto sep = name.find('@');
        const std::string base = sep == std::string::npos ? name : name.substr(0, sep);
        const int horizon = sep == std::string::npos ? 8 : std::stoi(name.substr(sep + 1));
        for (auto& [id, model] : corpus::all(horizon))
            if (id == base) return model;
        throw ValidationError("unknown corpus model: " + base);
    }
    return load_model_json(opts.model_path);
}

int cmd_corpus(const std::string& out_dir, int horizon) {
    std::filesystem::create_directories(out_dir);
    for (const auto& [name, model] : corpus::all(horizon)) {
        const std::string path = out_dir + "/" + name + ".json";
        report_io::write_file(path, model_to_json(model) + "\n");
        std::cout << path << "\n";
    }
    return 0;
}

int cmd_oracle(const CommonOpts& opts, int tensor_q, int tensor_N) {
    const FkModel model = resolve_model(opts);
    const ParticleCount pc =
        tensor_N > 0 ? ParticleCount::of(tensor_N) : ParticleCount::infinite();
    const std::string dump = oracle::oracle_dump_json(model, tensor_q, pc);
    std::filesystem::create_directories(opts.out_dir);
    report_io::write_file(opts.out_dir + "/oracle.json", dump + "\n");

    const auto em = oracle::exact_measures(model);
    const auto ar = oracle::assumption_constants(model);
    std::cout << "model " << model_hash(model) << "  horizon " << model.horizon << "\n";
    std::cout << "k   gamma_k(1)          eta_k(G_k)\n";
    for (int k = 0; k <= model.horizon; ++k)
        std::cout << k << "   " << report_io::format_double(em.mass[k]) << "   "
                  << report_io::format_double(em.potential_mean[k]) << "\n";
    std::cout << "rho_n " << report_io::format_double(ar.rho_n) << "  beta1 "
              << report_io::format_double(ar.beta1) << "  beta2 "
              << report_io::format_double(ar.beta2) << "\n";
    std::cout << "alpha";
    for (double a : ar.alpha) std::cout << " " << report_io::format_double(a);
    std::cout << "\n";
    return 0;
}

int cmd_simulate(const CommonOpts& opts, const std::string& kind, int N, int64_t R,
                 uint64_t seed, int steps, const std::string& mode, bool dump_run) {
    const FkModel model = resolve_model(opts);
    const int n = model.horizon;
    PathIndexer ix(model.space_sizes);
    std::filesystem::create_directories(opts.out_dir);

    if (dump_run) {
        const ParticleRun run = run_smc(model, N, StreamKey{seed, 0});
        report_io::write_file(opts.out_dir + "/run.json", run_to_json(run) + "\n");
    }

    if (kind == "pg_chain") {
        // One Gibbs chain from the least likely trajectory, dumped as CSV.
        const PgMode pg_mode = mode == "backward" ? PgMode::kBackward : PgMode::kAncestral;
        const FrozenPath z0{ix.decode(verify::worst_case_path(model), n)};
        const PgChainRecord rec = pg_chain(model, z0, N, steps, pg_mode, seed);
        std::string csv = "step,path_linear_index,mode,normalizer\n";
        for (size_t t = 0; t < rec.path.size(); ++t) {
            const auto& coords = rec.path[t].coords;
            csv += std::to_string(t) + "," +
                   std::to_string(ix.encode({coords.data(), coords.size()})) + "," + mode + "," +
                   report_io::format_double(t == 0 ? 1.0 : rec.normalizer[t - 1]) + "\n";
        }
        report_io::write_file(opts.out_dir + "/chain.csv", csv);
        report_io::write_file(opts.out_dir + "/manifest.json",
                              report_io::manifest_json("simulate/pg_chain_" + mode,
                                                       model_hash(model), N, steps, seed,
                                                       verify::resolve_threads(opts.threads)) +
                                  "\n");
        std::cout << opts.out_dir << "/chain.csv (" << rec.path.size() << " rows)\n";
        return 0;
    }

    std::vector<report_io::EstimateRow> rows;
    rows.reserve(R);
    if (kind == "normalizer") {
        for (int64_t r = 0; r < R; ++r) {
            const ParticleRun run = run_smc(model, N, StreamKey{seed, static_cast<uint64_t>(r)});
            rows.push_back({r, "normalizer", run.normalizer(n)});
        }
    } else if (kind == "terminal_mean") {
        for (int64_t r = 0; r < R; ++r) {
            const ParticleRun run = run_smc(model, N, StreamKey{seed, static_cast<uint64_t>(r)});
            double s = 0.0;
            for (int i = 0; i < N; ++i) s += run.states[n][i];
            rows.push_back({r, "terminal_mean", s / N});
        }
    } else if (kind == "ancestral_path" || kind == "backward_path") {
        for (int64_t r = 0; r < R; ++r) {
            const StreamKey key{seed, static_cast<uint64_t>(r)};
            const ParticleRun run = run_smc(model, N, key);
            const SampledPath p = kind == "ancestral_path" ? sample_ancestral_line(run, key)
                                                           : backward_sample(run, model, key);
            rows.push_back({r, kind,
                            static_cast<double>(ix.encode({p.coords.data(), p.coords.size()}))});
        }
    } else {
        throw ValidationError("unknown estimator kind: " + kind);
    }

    report_io::write_file(opts.out_dir + "/estimates.csv", report_io::estimates_csv(rows));
    report_io::write_file(opts.out_dir + "/manifest.json",
                          report_io::manifest_json("simulate/" + kind, model_hash(model), N, R,
                                                   seed, verify::resolve_threads(opts.threads)) +
                              "\n");
    std::cout << opts.out_dir << "/estimates.csv (" << rows.size() << " rows)\n";
    return 0;
}

int cmd_verify(const CommonOpts& opts, const std::string& suite, int64_t R, uint64_t seed) {
    verify::StatParams sp;
    sp.replicates = R;
    sp.master_seed = seed;
    sp.threads = opts.threads;

    std::vector<verify::BoundsReport> reports;
    auto append = [&](std::vector<verify::BoundsReport> r) {
        reports.insert(reports.end(), r.begin(), r.end());
    };

    const bool all = suite == "all";
    if (all || suite == "enumeration") {
        append(verify::empirical_stability_suite());
        append(verify::empirical_ratio_suite());
        append(verify::tensor_enumeration_suite());
        append(verify::combinatorics_suite());
    }
    if (all || suite == "exact") {
        std::vector<FkModel> picks = {
            corpus::unit_potential_2state(5),
            corpus::mixing_2state(5),
            corpus::weak_mixing_3state(4),
            corpus::qmc_4state(3),
        };
        for (const FkModel& raw : picks) {
            const FkModel model = corpus::normalized(raw);
            const double rho = oracle::assumption_constants(model).rho_n;
            const int t1 = static_cast<int>(std::ceil(3.0 * model.horizon * rho));
            append(verify::frozen_semigroup_suite(model, rho, {t1, 2 * t1, 4 * t1}));
            const int t2 =
                static_cast<int>(std::ceil(2.0 * (1.0 + 2.0 * rho * rho) * model.horizon));
            append(verify::frozen_measure_suite(model, rho, {t2, 2 * t2, 4 * t2}));
        }
        append(verify::dual_tensor_identity_suite(corpus::normalized(corpus::mixing_2state(2))));
        append(verify::backward_transfer_suite(corpus::normalized(corpus::mixing_2state(3))));
    }
    if (all || suite == "bias") {
        const FkModel m = corpus::normalized(corpus::mixing_2state(8));
        const double rho = oracle::assumption_constants(m).rho_n;
        append(verify::bias_sandwich_suite(m, rho, {100, 200, 400, 800}, sp));
    }
    if (all || suite == "unbiasedness") {
        append(verify::unbiasedness_suite(corpus::mixing_2state(5), 100, sp));
    }
    if (all || suite == "backward") {
        append(verify::backward_equality_suite(corpus::normalized(corpus::mixing_2state(8)), 100,
                                               sp));
    }
    if (all || suite == "chaos") {
        const FkModel m = corpus::normalized(corpus::mixing_2state(8));
        const double rho = oracle::assumption_constants(m).rho_n;
        const double cgap2 = 4.0 * std::pow(rho, 4) - 1.0;
        const int n2 = static_cast<int>(std::ceil(4.0 * cgap2 * 4)) + 1;
        append(verify::chaos_suite(m, rho, 2, {n2, 2 * n2}, sp));
        const double cgap3 = 4.0 * std::pow(rho, 6) - 1.0;
        const int n3 = static_cast<int>(std::ceil(4.0 * cgap3 * 9)) + 1;
        append(verify::chaos_suite(m, rho, 3, {n3}, sp));
    }
    if (all || suite == "pgkernel") {
        const FkModel m = corpus::normalized(corpus::mixing_2state(4));
        const double rho = oracle::assumption_constants(m).rho_n;
        append(verify::pg_kernel_suite(m, rho, {50, 200}, sp));
    }
    if (all || suite == "invariance") {
        append(verify::pg_invariance_suite(corpus::normalized(corpus::mixing_2state(3)), 16, sp));
    }
    if (all || suite == "contraction") {
        const FkModel m = corpus::normalized(corpus::mixing_2state(3));
        const double rho = oracle::assumption_constants(m).rho_n;
        append(verify::pg_contraction_suite(m, rho, 16, 10, sp));
    }
    if (all || suite == "dualchaos") {
        const FkModel m = corpus::normalized(corpus::mixing_2state(3));
        const double rho = oracle::assumption_constants(m).rho_n;
        append(verify::dual_chaos_suite(m, rho, 2, {32, 64}, sp));
        append(verify::dual_tensor_identity_suite(corpus::normalized(corpus::mixing_2state(2))));
    }
    if (suite == "negative-control") {
        const FkModel m = corpus::normalized(corpus::mixing_2state(4));
        const double rho = oracle::assumption_constants(m).rho_n;
        append(verify::negative_control_suite(m, rho, sp));
    }
    if (reports.empty()) throw ValidationError("unknown suite: " + suite);

    std::filesystem::create_directories(opts.out_dir);
    report_io::write_file(opts.out_dir + "/bounds.csv", report_io::bounds_csv(reports));
    report_io::write_file(opts.out_dir + "/summary.json",
                          report_io::summary_json(reports) + "\n");

    const auto s = verify::summarize(reports);
    std::cout << "pass " << s.pass << "  fail " << s.fail << "  inconclusive " << s.inconclusive
              << "  skipped " << s.skipped << "  disputed " << s.disputed << "\n";
    if (s.inconclusive > 0)
        std::cout << "warning: " << s.inconclusive << " inconclusive verdict(s)\n";

    if (suite == "negative-control") return s.fail > 0 ? 1 : 0;
    return s.fail > 0 ? 1 : 0;
}

int cmd_report(const std::vector<std::string>& csv_paths, const std::string& out_dir) {
    int pass = 0, fail = 0, inconclusive = 0, skipped = 0, disputed = 0, total = 0;
    for (const auto& path : csv_paths) {
        std::ifstream in(path);
        if (!in) throw ValidationError("cannot open report: " + path);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            const auto pos = line.rfind(',');
            if (pos == std::string::npos) continue;
            const std::string verdict = line.substr(pos + 1);
            ++total;
            if (verdict == "PASS") ++pass;
            else if (verdict == "FAIL") ++fail;
            else if (verdict == "INCONCLUSIVE") ++inconclusive;
            else if (verdict == "SKIPPED") ++skipped;
            else if (verdict == "CONSTANT_DISPUTED") ++disputed;
        }
    }
    nlohmann::json j;
    j["reports"] = total;
    j["pass"] = pass;
    j["fail"] = fail;
    j["inconclusive"] = inconclusive;
    j["skipped"] = skipped;
    j["constant_disputed"] = disputed;
    std::filesystem::create_directories(out_dir);
    report_io::write_file(out_dir + "/summary.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return fail > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-state Feynman-Kac laboratory"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* corpus_cmd = app.add_subcommand("corpus", "write the built-in model corpus");
    std::string corpus_dir = "models";
    int corpus_horizon = 8;
    corpus_cmd->add_option("--out-dir", corpus_dir, "output directory");
    corpus_cmd->add_option("--horizon", corpus_horizon, "model horizon");

    auto* oracle_cmd = app.add_subcommand("oracle", "exact measures and constants");
    int tensor_q = 0, tensor_N = 0;
    oracle_cmd->add_option("--model", opts.model_path, "model JSON file or corpus:<name>[@n]");
    oracle_cmd->add_option("--config", opts.config_path, "config JSON");
    oracle_cmd->add_option("--out-dir", opts.out_dir, "output directory");
    oracle_cmd->add_option("--tensor-q", tensor_q, "also dump q-tensor marginals");
    oracle_cmd->add_option("--tensor-N", tensor_N, "tensor particle count (0: infinite)");

    auto* sim_cmd = app.add_subcommand("simulate", "replicated particle estimators");
    std::string sim_kind = "normalizer";
    std::string sim_mode = "ancestral";
    int sim_N = 100;
    int sim_steps = 10;
    int64_t sim_R = 1000;
    uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    bool sim_dump_run = false;
    sim_cmd->add_option("--model", opts.model_path, "model JSON file or corpus:<name>[@n]");
    sim_cmd->add_option("--config", opts.config_path, "config JSON");
    sim_cmd->add_option("--out-dir", opts.out_dir, "output directory");
    sim_cmd->add_option("--kind", sim_kind,
                        "normalizer|terminal_mean|ancestral_path|backward_path|pg_chain");
    sim_cmd->add_option("--particles", sim_N, "particle count N");
    sim_cmd->add_option("--replicates", sim_R, "replicate count R");
    sim_cmd->add_option("--steps", sim_steps, "gibbs sweeps for --kind pg_chain");
    sim_cmd->add_option("--mode", sim_mode, "ancestral|backward for --kind pg_chain");
    sim_cmd->add_flag("--dump-run", sim_dump_run, "also write one full run as JSON");
    sim_cmd->add_option("--seed", sim_seed, "master seed (required)")
        ->each([&](const std::string&) { sim_seed_set = true; });
    sim_cmd->add_option("--threads", opts.threads, "worker threads");

    auto* verify_cmd = app.add_subcommand("verify", "bound verification suites");
    std::string suite = "all";
    int64_t ver_R = 100000;
    uint64_t ver_seed = 0;
    bool ver_seed_set = false;
    verify_cmd->add_option("--suite", suite,
                           "enumeration|exact|bias|unbiasedness|backward|chaos|pgkernel|"
                           "invariance|contraction|dualchaos|negative-control|all");
    verify_cmd->add_option("--config", opts.config_path, "config JSON");
    verify_cmd->add_option("--out-dir", opts.out_dir, "output directory");
    verify_cmd->add_option("--replicates", ver_R, "replicate count R");
    verify_cmd->add_option("--seed", ver_seed, "master seed (required)")
        ->each([&](const std::string&) { ver_seed_set = true; });
    verify_cmd->add_option("--threads", opts.threads, "worker threads");

    auto* report_cmd = app.add_subcommand("report", "aggregate verify CSVs");
    std::vector<std::string> report_paths;
    std::string report_dir = ".";
    report_cmd->add_option("csvs", report_paths, "bounds.csv files")->required();
    report_cmd->add_option("--out-dir", report_dir, "output directory");

    try {
        app.parse(argc, argv);

        // Config file fills in anything not passed as a flag.
        const nlohmann::json cfg = load_config(opts.config_path);
        auto fill = [&](const char* key, auto& target) {
            using T = std::decay_t<decltype(target)>;
            if (cfg.contains(key)) target = cfg[key].get<T>();
        };
        if (opts.model_path.empty()) fill("model", opts.model_path);
        if (!sim_seed_set && cfg.contains("seed")) {
            sim_seed = cfg["seed"].get<uint64_t>();
            sim_seed_set = true;
        }
        if (!ver_seed_set && cfg.contains("seed")) {
            ver_seed = cfg["seed"].get<uint64_t>();
            ver_seed_set = true;
        }

        if (corpus_cmd->parsed()) return cmd_corpus(corpus_dir, corpus_horizon);
        if (oracle_cmd->parsed()) return cmd_oracle(opts, tensor_q, tensor_N);
        if (sim_cmd->parsed()) {
            if (!sim_seed_set)
                throw ValidationError("simulate requires an explicit --seed (reproducibility)");
            return cmd_simulate(opts, sim_kind, sim_N, sim_R, sim_seed, sim_steps, sim_mode,
                                sim_dump_run);
        }
        if (verify_cmd->parsed()) {
            if (!ver_seed_set)
                throw ValidationError("verify requires an explicit --seed (reproducibility)");
            return cmd_verify(opts, suite, ver_R, ver_seed);
        }
        if (report_cmd->parsed()) return cmd_report(report_paths, report_dir);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
