// hjq: canonical analysis of singular Lagrangian systems.
//
// analyze  - constraint chain, generators, canonical action, path integral
// verify   - numeric flow integration, drift and integrability checks,
//            cross-validation against the Dirac-Bergmann oracle
// measure  - conventional gauge-fixed measure for side-by-side comparison

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hjq/hjq.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitUnsupported = 3;
constexpr int kExitToleranceBreach = 4;
constexpr int kExitMeasure = 5;

bool color_enabled() {
    const char* v = std::getenv("HJQ_COLOR");
    return v && std::string(v) == "1";
}

struct ModelArgs {
    std::string path;
    std::string builtin;
};

hjq::ModelSpec load_spec(const ModelArgs& args) {
    if (!args.builtin.empty()) return hjq::builtin_model(args.builtin);
    return hjq::parse_model_file(args.path);
}

void add_model_options(CLI::App* cmd, ModelArgs& args) {
    cmd->add_option("model", args.path, "path to a .hjm model file");
    cmd->add_option("--builtin", args.builtin, "builtin model name");
    cmd->callback([&args, cmd]() {
        if (args.builtin.empty() == args.path.empty())
            throw CLI::ValidationError("give exactly one of a model path or --builtin");
    });
}

void write_json(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty()) return;
    std::ofstream out(out_path);
    if (!out) throw hjq::Error("cannot write " + out_path);
    out << j.dump(2) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"canonical (Hamilton-Jacobi) analysis of singular Lagrangian systems"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("hjq ") + hjq::kVersion);

    ModelArgs analyze_args, verify_args, measure_args;
    std::string out_path, verify_out, measure_out;
    int max_generations = 10;
    bool json_only = false;

    auto* analyze = app.add_subcommand("analyze", "run the symbolic pipeline");
    add_model_options(analyze, analyze_args);
    analyze->add_option("--out", out_path, "write the JSON report here");
    analyze->add_option("--max-generations", max_generations, "constraint iteration cap");
    analyze->add_flag("--json-only", json_only, "print JSON instead of text");

    hjq::VerifyOptions vopt;
    auto* verify = app.add_subcommand("verify", "numeric validation and oracle cross-check");
    add_model_options(verify, verify_args);
    verify->add_option("--out", verify_out, "write the JSON report here");
    verify->add_option("--dt", vopt.dt, "integration step");
    verify->add_option("--t-end", vopt.t_end, "integration horizon");
    verify->add_option("--seed", vopt.seed, "random seed for initial data and probe");
    verify->add_option("--samples", vopt.samples, "on-surface probe samples");
    verify->add_option("--a0-path", vopt.a0_path, "path (expression in t) for every promoted coordinate");
    verify->add_option("--drift-tol", vopt.drift_tolerance, "constraint/energy drift tolerance");
    verify->add_option("--probe-tol", vopt.probe_tolerance, "integrability probe tolerance");
    verify->add_option("--max-generations", max_generations, "constraint iteration cap");
    verify->add_flag("--json-only", json_only, "print JSON instead of text");

    std::vector<std::string> gauge_exprs;
    auto* measure = app.add_subcommand("measure", "gauge-fixed measure for comparison");
    add_model_options(measure, measure_args);
    measure->add_option("--gauge", gauge_exprs, "gauge condition (repeat once per constraint)");
    measure->add_option("--out", measure_out, "write the JSON report here");
    measure->add_option("--max-generations", max_generations, "constraint iteration cap");
    measure->add_flag("--json-only", json_only, "print JSON instead of text");

    CLI11_PARSE(app, argc, argv);
    const bool color = color_enabled();

    try {
        if (app.got_subcommand(analyze)) {
            hjq::AnalysisResult ar = hjq::analyze_model(load_spec(analyze_args), max_generations);
            nlohmann::json j = hjq::analysis_to_json(ar);
            hjq::attach_meta(j, "analyze");
            if (json_only)
                std::cout << j.dump(2) << "\n";
            else
                hjq::render_text(std::cout, ar, color);
            write_json(j, out_path);
            if (!ar.chain.closed)
                std::cerr << "status: OPEN (constraint iteration hit the generation cap)\n";
            return kExitOk;
        }

        if (app.got_subcommand(verify)) {
            hjq::AnalysisResult ar = hjq::analyze_model(load_spec(verify_args), max_generations);
            hjq::VerifyResult v = hjq::run_verify(ar, vopt);
            nlohmann::json j = hjq::analysis_to_json(ar);
            j["verify"] = hjq::to_json(v);
            hjq::attach_meta(j, "verify");
            if (json_only)
                std::cout << j.dump(2) << "\n";
            else
                hjq::render_verify_text(std::cout, v, color);
            write_json(j, verify_out);
            if (!v.all_ok()) {
                std::cerr << "verification failed:";
                if (!v.drift_ok) std::cerr << " drift-tolerance";
                if (!v.probe_ok) std::cerr << " probe-tolerance";
                if (!v.oracle_ok) std::cerr << " oracle-equivalence";
                std::cerr << "\n";
                return kExitToleranceBreach;
            }
            return kExitOk;
        }

        if (app.got_subcommand(measure)) {
            hjq::AnalysisResult ar = hjq::analyze_model(load_spec(measure_args), max_generations);
            std::vector<hjq::Expr> gauges;
            auto table = hjq::flat_symbol_table(ar.model);
            for (const auto& g : gauge_exprs) gauges.push_back(hjq::parse_flat_expr(g, table));
            nlohmann::json j = hjq::analysis_to_json(ar);
            try {
                hjq::GaugeMeasureReport m = hjq::faddeev_measure(ar.chain, gauges, ar.hset.full);
                j["measure"] = hjq::to_json(m);
                hjq::attach_meta(j, "measure");
                if (json_only) {
                    std::cout << j.dump(2) << "\n";
                } else {
                    hjq::render_measure_text(std::cout, m, color);
                    std::cout << "\ncanonical (gauge-free) report for comparison:\n";
                    hjq::render_text(std::cout, ar, color);
                }
                write_json(j, measure_out);
            } catch (const hjq::InternalError&) {
                throw;
            } catch (const hjq::Error& e) {
                std::cerr << "measure refused: " << e.what() << "\n";
                return kExitMeasure;
            }
            return kExitOk;
        }
    } catch (const hjq::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const hjq::UnsupportedExpressionError& e) {
        std::cerr << "unsupported lagrangian: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (const hjq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
