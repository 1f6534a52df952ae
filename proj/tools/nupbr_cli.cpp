// Command-line front end: model generation, NUPBR checks with replayable
// certificates, deflator construction, and the theorem suites.
//
// Exit codes: 0 success (and NUPBR holds, for `check`), 3 NUPBR violated
// (witness emitted), 2 invalid input, 1 internal failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "nupbr/deflator.hpp"
#include "nupbr/model_io.hpp"
#include "nupbr/suites.hpp"

namespace {

using namespace nupbr;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 2;
constexpr int kExitViolated = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_model(text);
    } catch (const ModelParseError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw InputError(path + ": cannot write");
    out << text;
}

Json rational_row(const RatVec& row) {
    Json out = Json::array();
    for (const auto& v : row) out.push_back(rat_to_string(v));
    return out;
}

Json process_table(const Process& p) {
    Json out = Json::array();
    for (int t = 0; t <= p.horizon(); ++t) out.push_back(rational_row(p.level(t)));
    return out;
}

Json verdict_json(const NupbrVerdict& verdict) {
    Json out;
    out["nupbr"] = verdict.holds;
    if (verdict.holds) {
        Json dens = Json::array();
        for (const auto& d : verdict.densities) {
            Json entry;
            entry["t"] = d.t;
            entry["atom"] = d.atom;
            Json q = Json::array();
            for (int omega : d.atom) q.push_back(rat_to_string(d.q.at(omega)));
            entry["q"] = std::move(q);
            dens.push_back(std::move(entry));
        }
        out["densities"] = std::move(dens);
    } else {
        Json w;
        w["t"] = verdict.witness->t;
        w["atom"] = verdict.witness->atom;
        w["h"] = rational_row(verdict.witness->h);
        out["witness"] = std::move(w);
    }
    return out;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenOptions {
    ModelGenParams params;
    std::string output;
};

int cmd_gen(const GenOptions& opt) {
    const Model model = gen_model(opt.params);
    write_output(opt.output, emit_model(model));
    return kExitOk;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

struct CheckOptions {
    std::string model_path;
    std::string filtration = "F";
    std::string mode = "plain";
    std::string measure = "P";
    int at = 0;
    std::string output;
};

Measure build_measure(const CheckOptions& opt, const Model& model, const AzemaData& az,
                      const Filtration& enlarged) {
    if (opt.measure == "P") return Measure::from_space(model.space);
    if (opt.at < 1 || opt.at > model.filt.horizon())
        throw InputError("--at: time " + std::to_string(opt.at) + " outside the jump grid {1.." +
                         std::to_string(model.filt.horizon()) + "}");
    const PredictableTime time = PredictableTime::deterministic(opt.at, model.space.n_outcomes());
    try {
        if (opt.measure == "QT") return qt(az, time, model.filt, model.space).measure;
        if (opt.measure == "QTILDE") return qtilde(az, time, model.filt, model.space).measure;
        if (opt.measure == "QPRIME") return qprime(az, time, model.filt, model.space).measure;
        if (opt.measure == "QTILDEPRIME")
            return qtilde_prime(az, time, model.filt, model.space).measure;
        if (opt.measure == "QG_BEFORE")
            return qg_before(az, time, model.tau, model.filt, enlarged, model.space).measure;
        if (opt.measure == "QF_AFTER") return qf_after(az, time, model.filt, model.space).measure;
        if (opt.measure == "QG_AFTER")
            return qg_after(az, time, model.tau, model.filt, enlarged, model.space).measure;
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("--measure ") + opt.measure + ": " + e.what());
    }
    throw InputError("--measure: unknown measure '" + opt.measure + "'");
}

int cmd_check(const CheckOptions& opt) {
    const Model model = load_model(opt.model_path);
    const AzemaData az = azema(model.tau, model.filt, model.space);
    const Filtration enlarged = enlarge(model.filt, model.tau);

    VectorProcess target = model.assets;
    if (opt.mode == "stopped") {
        target = stop(model.assets, model.tau.tau);
    } else if (opt.mode == "after") {
        if (!model.tau.finite_on(model.filt.horizon()))
            throw InputError("--mode after: tau is infinite on some outcome");
        target = after(model.assets, model.tau.tau);
    } else if (opt.mode != "plain") {
        throw InputError("--mode: unknown mode '" + opt.mode + "'");
    }

    const Filtration& filt = opt.filtration == "G" ? enlarged : model.filt;
    if (opt.filtration != "F" && opt.filtration != "G")
        throw InputError("--filtration: expected F or G");
    if (opt.filtration == "F" && !is_adapted(target, model.filt))
        throw InputError("--filtration F: the requested transform is not F-adapted "
                         "(stopped/after transforms generally need G)");

    const Measure measure = build_measure(opt, model, az, enlarged);
    const NupbrVerdict verdict = nupbr_check_verified(target, filt, measure);

    Json report;
    report["command"] = "check";
    report["model_digest"] = model_digest(model);
    report["filtration"] = opt.filtration;
    report["mode"] = opt.mode;
    report["measure"] = opt.measure;
    if (opt.measure != "P") report["at"] = opt.at;
    report["verdict"] = verdict_json(verdict);
    write_output(opt.output, report.dump(2) + "\n");
    return verdict.holds ? kExitOk : kExitViolated;
}

// ---------------------------------------------------------------------------
// deflate
// ---------------------------------------------------------------------------

struct DeflateOptions {
    std::string model_path;
    std::string side = "before";
    std::string output;
};

int cmd_deflate(const DeflateOptions& opt) {
    const Model model = load_model(opt.model_path);
    const AzemaData az = azema(model.tau, model.filt, model.space);
    const Filtration enlarged = enlarge(model.filt, model.tau);

    Json report;
    report["command"] = "deflate";
    report["model_digest"] = model_digest(model);
    report["side"] = opt.side;

    if (opt.side == "before") {
        const BeforeTauDeflator defl =
            build_before(az, model.tau, model.filt, enlarged, model.space);
        report["tables"]["kg"] = process_table(defl.kg);
        report["tables"]["vg"] = process_table(defl.vg);
        report["tables"]["m_hat"] = process_table(defl.m_hat);
        report["tables"]["ltilde"] = process_table(defl.ltilde);
        Json checks;
        checks["positive"] = true;     // enforced by construction or it throws
        checks["martingale"] = is_martingale(defl.ltilde, enlarged, model.space).ok;
        checks["jump_ratio"] = jump_ratio_before(defl, az, model.tau, model.filt).ok;
        bool dv_ok = true;
        for (int t = 1; t <= model.filt.horizon(); ++t)
            for (int w = 0; w < model.space.n_outcomes(); ++w)
                dv_ok = dv_ok && defl.vg.at(t, w) - defl.vg.at(t - 1, w) < 1;
        checks["dv_less_one"] = dv_ok;
        report["checks"] = std::move(checks);
    } else if (opt.side == "after") {
        const HonestyCheck honesty = is_honest(model.tau, model.filt);
        if (!honesty.honest)
            throw InputError("--side after: tau is not honest (first violation at t=" +
                             std::to_string(honesty.t) + ")");
        if (!model.tau.finite_on(model.filt.horizon()))
            throw InputError("--side after: tau is infinite on some outcome");
        if (!z_tau_less_one(model.tau, az))
            throw InputError("--side after: Z_tau < 1 fails");
        const AfterTauDeflator defl =
            build_after(az, model.tau, model.filt, enlarged, model.space);
        report["tables"]["ka"] = process_table(defl.ka);
        report["tables"]["wg"] = process_table(defl.wg);
        report["tables"]["m_hat"] = process_table(defl.m_hat);
        report["tables"]["ltilde"] = process_table(defl.ltilde);
        Json checks;
        checks["positive"] = true;
        checks["martingale"] = is_martingale(defl.ltilde, enlarged, model.space).ok;
        checks["jump_ratio"] =
            jump_ratio_after(defl, az, model.tau, model.filt, model.space).ok;
        bool dw_ok = true;
        for (int t = 1; t <= model.filt.horizon(); ++t)
            for (int w = 0; w < model.space.n_outcomes(); ++w)
                dw_ok = dw_ok && defl.wg.at(t, w) - defl.wg.at(t - 1, w) < 1;
        checks["dw_less_one"] = dw_ok;
        report["checks"] = std::move(checks);
    } else {
        throw InputError("--side: expected before or after");
    }

    write_output(opt.output, report.dump(2) + "\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// theorems
// ---------------------------------------------------------------------------

struct TheoremOptions {
    std::string suite = "all";
    SuiteRunParams run;
    std::string output;
    std::string dump_dir = ".";
};

Json suite_report_json(const SuiteReport& report, const TheoremOptions& opt,
                       std::vector<std::string>& dumped) {
    Json j;
    j["suite"] = report.suite;
    j["assertions"] = report.assertion_names;
    j["models"] = report.models;
    j["cases"] = report.cases;
    j["disagreements"] = report.disagreements;
    Json failures = Json::array();
    for (const auto& f : report.failures) {
        Json entry;
        entry["model_seed"] = f.model_seed;
        entry["time"] = f.time;
        entry["assertions"] = f.assertions;
        failures.push_back(std::move(entry));
    }
    j["failures"] = std::move(failures);
    Json dumps = Json::array();
    for (const auto& [seed, model] : report.counterexamples) {
        const std::string name = opt.dump_dir + "/counterexample-" + report.suite + "-" +
                                 std::to_string(seed) + ".json";
        write_output(name, emit_model(model));
        dumps.push_back(name);
        dumped.push_back(name);
    }
    j["counterexample_files"] = std::move(dumps);
    return j;
}

int cmd_theorems(const TheoremOptions& opt) {
    std::vector<std::string> ids;
    if (opt.suite == "all")
        ids = suite_ids();
    else if (std::find(suite_ids().begin(), suite_ids().end(), opt.suite) != suite_ids().end())
        ids = {opt.suite};
    else
        throw InputError("--suite: unknown suite '" + opt.suite + "'");

    Json report;
    report["command"] = "theorems";
    report["seed"] = opt.run.seed;
    report["models_per_suite"] = opt.run.n_models;
    Json suites = Json::array();
    int total_disagreements = 0;
    std::vector<std::string> dumped;
    for (const auto& id : ids) {
        const SuiteReport result = run_suite(id, opt.run);
        total_disagreements += result.disagreements;
        suites.push_back(suite_report_json(result, opt, dumped));
    }
    report["suites"] = std::move(suites);
    report["total_disagreements"] = total_disagreements;
    write_output(opt.output, report.dump(2) + "\n");
    return total_disagreements == 0 ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact NUPBR verification engine for progressively enlarged filtrations"};
    app.require_subcommand(1);

    GenOptions gen_opt;
    CLI::App* gen = app.add_subcommand("gen", "generate a random model file");
    gen->add_option("--outcomes", gen_opt.params.max_outcomes, "max outcomes")
        ->check(CLI::Range(2, 64));
    gen->add_option("--horizon", gen_opt.params.max_horizon, "max horizon")->check(CLI::Range(1, 16));
    gen->add_option("--assets", gen_opt.params.n_assets, "number of assets")
        ->check(CLI::Range(1, 8));
    gen->add_option("--seed", gen_opt.params.seed, "generator seed");
    gen->add_option("--split-percent", gen_opt.params.split_percent,
                    "chance an atom splits per step")
        ->check(CLI::Range(0, 100));
    gen->add_flag("--honest-only", gen_opt.params.honest_only, "draw honest times only");
    gen->add_flag("--force-before", gen_opt.params.force_before_set,
                  "require a nonempty {Ztilde=0, Z_->0} set");
    gen->add_flag("--force-after", gen_opt.params.force_after_set,
                  "require a nonempty {Ztilde=1, Z_-<1} set");
    gen->add_option("-o,--output", gen_opt.output, "output file (default stdout)");

    CheckOptions check_opt;
    CLI::App* check = app.add_subcommand("check", "decide NUPBR of a model transform");
    check->add_option("model", check_opt.model_path, "model file")->required();
    check->add_option("--filtration", check_opt.filtration, "F or G");
    check->add_option("--mode", check_opt.mode, "plain, stopped or after");
    check->add_option("--measure", check_opt.measure,
                      "P, QT, QTILDE, QPRIME, QTILDEPRIME, QG_BEFORE, QF_AFTER, QG_AFTER");
    check->add_option("--at", check_opt.at, "jump time T for the one-jump measures");
    check->add_option("-o,--output", check_opt.output, "report file (default stdout)");

    DeflateOptions deflate_opt;
    CLI::App* deflate = app.add_subcommand("deflate", "build the explicit deflator");
    deflate->add_option("model", deflate_opt.model_path, "model file")->required();
    deflate->add_option("--side", deflate_opt.side, "before or after");
    deflate->add_option("-o,--output", deflate_opt.output, "report file (default stdout)");

    TheoremOptions thm_opt;
    CLI::App* theorems = app.add_subcommand("theorems", "run the equivalence suites");
    theorems->add_option("--suite", thm_opt.suite, "suite id or 'all'");
    theorems->add_option("--models", thm_opt.run.n_models, "models per suite")
        ->check(CLI::Range(0, 1000000));
    theorems->add_option("--seed", thm_opt.run.seed, "base seed");
    theorems->add_option("--outcomes", thm_opt.run.gen.max_outcomes, "max outcomes")
        ->check(CLI::Range(2, 64));
    theorems->add_option("--horizon", thm_opt.run.gen.max_horizon, "max horizon")
        ->check(CLI::Range(1, 16));
    theorems->add_option("--assets", thm_opt.run.gen.n_assets, "number of assets")
        ->check(CLI::Range(1, 8));
    theorems->add_option("--samples", thm_opt.run.samples, "sampled payoffs per case")
        ->check(CLI::Range(0, 64));
    theorems->add_option("--jobs", thm_opt.run.jobs, "worker threads")->check(CLI::Range(1, 256));
    theorems->add_option("-o,--output", thm_opt.output, "report file (default stdout)");
    theorems->add_option("--dump-dir", thm_opt.dump_dir,
                         "directory for counterexample model dumps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInvalidInput;
    }

    try {
        if (*gen) return cmd_gen(gen_opt);
        if (*check) return cmd_check(check_opt);
        if (*deflate) return cmd_deflate(deflate_opt);
        if (*theorems) return cmd_theorems(thm_opt);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const GenerationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return kExitInvalidInput;
}
