#include "demograph/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "demograph/config.hpp"
#include "demograph/errors.hpp"
#include "demograph/random.hpp"

namespace demograph {

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
};

struct Args {
    std::string input;
    std::string out;
    std::string model;
    std::string csv;
    std::optional<int> count;
    std::optional<std::int64_t> long_frames;
    bool print_defaults = false;
    std::string check;
};

PipelineConfig resolve(const Common& c) {
    PipelineConfig cfg = c.config_path.empty() ? PipelineConfig{} : load_config(c.config_path);
    if (c.seed) cfg.seed = *c.seed;
    cfg.validate();
    return cfg;
}

std::string pick(const std::string& flag, const std::string& fallback, const char* what) {
    const std::string v = flag.empty() ? fallback : flag;
    if (v.empty()) fail(ErrorCode::InvalidConfig, std::string("no ") + what + " given (flag or config paths)");
    return v;
}

fs::path out_dir(const Args& a, const PipelineConfig& cfg) { return a.out.empty() ? fs::path(cfg.paths.output) : fs::path(a.out); }

fs::path out_file(const Args& a, const PipelineConfig& cfg, const char* name) {
    return a.out.empty() ? fs::path(cfg.paths.output) / name : fs::path(a.out);
}

std::optional<SelectorModel> load_model(const Args& a, const PipelineConfig& cfg) {
    const std::string path = a.model.empty() ? cfg.paths.model : a.model;
    if (path.empty()) return std::nullopt;
    try {
        return model_from_json(read_file(path));
    } catch (const Error& e) {
        if (e.is_io()) throw;
        fail(e.code(), path + ": " + e.detail());
    }
}

HandAssigner assigner(const std::optional<SelectorModel>& model, const PipelineConfig& cfg) {
    return model ? selector_assigner(*model, cfg.selector.kappa) : prior_assigner();
}

Demonstration input_demo(const Args& a, const PipelineConfig& cfg) {
    const std::string path = pick(a.input, cfg.paths.input, "input demonstration");
    try {
        return load_demonstration(path);
    } catch (const Error& e) {
        if (e.is_io()) throw;
        fail(e.code(), path + ": " + e.detail());
    }
}

std::vector<SynthDemo> make_suite(const Args& a, const PipelineConfig& cfg) {
    const auto n = static_cast<std::size_t>(a.count.value_or(cfg.suite.size));
    const auto frames = a.long_frames.value_or(cfg.suite.long_frames);
    if (n == 0) fail(ErrorCode::InvalidConfig, "--count must be >= 1");
    if (frames < 0) fail(ErrorCode::InvalidConfig, "--long-frames must be >= 0");
    return frames > 0 ? gen_long_suite(n, frames, cfg.seed, cfg.scenario()) : gen_suite(n, cfg.seed, cfg.scenario());
}

std::vector<LabeledState> selector_data(const PipelineConfig& cfg, const char* stream) {
    return gen_selector_dataset(static_cast<std::size_t>(cfg.suite.selector_samples), cfg.suite.label_flip_rate,
                                derive_seed(cfg.seed, stream), cfg.scenario().workspace);
}

void cmd_synth(const Args& a, const PipelineConfig& cfg, std::ostream& out) {
    const auto dir = out_dir(a, cfg);
    const auto suite = make_suite(a, cfg);
    nlohmann::ordered_json manifest;
    manifest["seed"] = cfg.seed;
    manifest["demos"] = nlohmann::ordered_json::array();
    for (const auto& d : suite) {
        save_demonstration(d.demo, dir / (d.id + ".json"));
        write_file_atomic(dir / (d.id + ".truth.json"), ground_truth_to_json(d.truth));
        manifest["demos"].push_back(d.id);
    }
    write_file_atomic(dir / "selector_dataset.jsonl", dataset_to_jsonl(selector_data(cfg, "selector.dataset")));
    write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    out << "wrote " << suite.size() << " demonstrations to " << dir.string() << "\n";
}

void cmd_analyze(const Args& a, const PipelineConfig& cfg, std::ostream& out) {
    const auto demo = input_demo(a, cfg);
    const auto dir = out_dir(a, cfg);
    static constexpr const char* kAxes[] = {"x", "y", "z"};
    std::size_t files = 0;
    for (const auto& t : demo.tracks()) {
        for (std::size_t axis = 0; axis < 3; ++axis) {
            const auto signal = t.axis(axis);
            write_file_atomic(dir / ("entropy_" + t.id + "_" + kAxes[axis] + ".csv"),
                              series_to_csv(entropy_series(signal, cfg.window)));
            ++files;
        }
    }
    const auto& tracks = demo.tracks();
    for (std::size_t i = 0; i < tracks.size(); ++i)
        for (std::size_t k = i + 1; k < tracks.size(); ++k) {
            const auto& x = tracks[i];
            const auto& y = tracks[k];
            write_file_atomic(dir / ("mi_" + x.id + "__" + y.id + ".csv"), series_to_csv(mi_3d(x, y, cfg.window)));
            ++files;
        }
    out << "wrote " << files << " series to " << dir.string() << "\n";
}

void cmd_graph(const Args& a, const PipelineConfig& cfg, std::ostream& out) {
    const auto demo = input_demo(a, cfg);
    const auto timeline = interaction_timeline(demo, cfg.window, cfg.thresholds);
    const auto path = out_file(a, cfg, "graphs.json");
    write_file_atomic(path, graph_sequence_to_json(graph_sequence(demo, timeline, cfg.window)));
    out << "wrote " << path.string() << "\n";
}

void cmd_segment(const Args& a, const PipelineConfig& cfg, std::ostream& out) {
    const auto demo = input_demo(a, cfg);
    const auto timeline = interaction_timeline(demo, cfg.window, cfg.thresholds);
    const auto path = out_file(a, cfg, "segments.json");
    write_file_atomic(path, segments_to_json(segment(timeline, demo, cfg.segmentation)));
    out << "wrote " << path.string() << "\n";
}

void cmd_train(const Args& a, const PipelineConfig& cfg, std::ostream& out) {
    std::vector<LabeledState> data;
    if (!a.input.empty()) {
        try {
            data = dataset_from_jsonl(read_file(a.input));
        } catch (const Error& e) {
            if (e.is_io()) throw;
            fail(e.code(), a.input + ": " + e.detail());
        }
    } else {
        data = selector_data(cfg, "selector.dataset");
    }
    const auto model = train(data, cfg.selector_hyperparams());
    const auto path = out_file(a, cfg, "selector.json");
    write_file_atomic(path, model_to_json(model));
    out << "trained on " << data.size() << " samples, agreement " << agreement(model, data) << "; wrote "
        << path.string() << "\n";
}

void cmd_plan(const Args& a, const PipelineConfig& cfg, std::ostream& out) {
    const auto demo = input_demo(a, cfg);
    const auto result = run_pipeline(demo, cfg.analysis(), assigner(load_model(a, cfg), cfg));
    const auto path = out_file(a, cfg, "plan.json");
    write_file_atomic(path, serialize_plan(result.plan));
    out << "wrote " << path.string() << " (" << result.plan.nodes.size() << " nodes)\n";
}

void cmd_eval(const Args& a, const PipelineConfig& cfg, std::ostream& out) {
    EvalOptions opt;
    opt.settings = cfg.analysis();
    opt.iou_threshold = cfg.suite.iou_threshold;
    opt.selector = load_model(a, cfg);
    opt.kappa = cfg.selector.kappa;
    const auto report = evaluate_suite(make_suite(a, cfg), opt);
    const auto path = out_file(a, cfg, "report.json");
    write_file_atomic(path, report_to_json(report));
    if (!a.csv.empty()) write_file_atomic(a.csv, report_to_csv(report));
    out << "gra " << report.gra.mean << " tsa " << report.tsa.mean << " precision " << report.event_precision.mean
        << " recall " << report.event_recall.mean << " plan_match " << report.plan_match.mean << "\n";
}

void cmd_run(const Args& a, const PipelineConfig& cfg, std::ostream& out) {
    const auto dir = out_dir(a, cfg);
    const bool given = !a.input.empty() || !cfg.paths.input.empty();
    const Demonstration demo = given ? input_demo(a, cfg) : [&] {
        ScenarioConfig sc = cfg.scenario();
        sc.seed = derive_seed(cfg.seed, "run.demo");
        return gen_pick_place(sc).demo;
    }();
    if (!given) save_demonstration(demo, dir / "demo.json");
    const auto result = run_pipeline(demo, cfg.analysis(), assigner(load_model(a, cfg), cfg));
    write_file_atomic(dir / "timeline.json", timeline_to_json(result.timeline));
    write_file_atomic(dir / "graphs.json", graph_sequence_to_json(result.graphs));
    write_file_atomic(dir / "segments.json", segments_to_json(result.segments));
    write_file_atomic(dir / "plan.json", serialize_plan(result.plan));
    out << "wrote " << result.plan.nodes.size() << "-node plan to " << (dir / "plan.json").string() << "\n";
}

void cmd_config(const Args& a, const Common& c, std::ostream& out) {
    if (a.print_defaults) {
        out << config_to_json(PipelineConfig{});
        return;
    }
    if (!a.check.empty()) {
        load_config(a.check);
        out << a.check << ": ok\n";
        return;
    }
    out << config_to_json(resolve(c));
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interaction timelines, scene graphs, segments and plans from pose demonstrations", "demograph"};
    app.require_subcommand(1);
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);

    Common common;
    Args a;
    app.add_option("--config", common.config_path, "JSON config file")->envname("DEMOGRAPH_CONFIG");
    app.add_option("--seed", common.seed, "Seed overriding the config");

    auto* synth = app.add_subcommand("synth", "Generate the synthetic suite");
    synth->add_option("--out", a.out, "Output directory");
    synth->add_option("--count", a.count, "Number of demonstrations");
    synth->add_option("--long-frames", a.long_frames, "Generate long sessions of this many frames");

    auto* analyze = app.add_subcommand("analyze", "Entropy and MI series as CSV");
    analyze->add_option("--input", a.input, "Demonstration JSON");
    analyze->add_option("--out", a.out, "Output directory");

    auto* graph = app.add_subcommand("graph", "Scene-graph sequence as JSON");
    graph->add_option("--input", a.input, "Demonstration JSON");
    graph->add_option("--out", a.out, "Output file");

    auto* seg = app.add_subcommand("segment", "Primitive segments as JSON");
    seg->add_option("--input", a.input, "Demonstration JSON");
    seg->add_option("--out", a.out, "Output file");

    auto* train_cmd = app.add_subcommand("train-selector", "Train the hand selector");
    train_cmd->add_option("--input", a.input, "Labeled dataset (JSON lines); generated when absent");
    train_cmd->add_option("--out", a.out, "Output model file");

    auto* plan = app.add_subcommand("plan", "Behavior-tree plan as JSON");
    plan->add_option("--input", a.input, "Demonstration JSON");
    plan->add_option("--model", a.model, "Selector model JSON");
    plan->add_option("--out", a.out, "Output file");

    auto* eval = app.add_subcommand("eval", "Evaluate on the synthetic suite");
    eval->add_option("--model", a.model, "Selector model JSON");
    eval->add_option("--out", a.out, "Output report file");
    eval->add_option("--csv", a.csv, "Also write the per-demo CSV here");
    eval->add_option("--count", a.count, "Number of demonstrations");
    eval->add_option("--long-frames", a.long_frames, "Evaluate long sessions of this many frames");

    auto* run = app.add_subcommand("run", "End-to-end demonstration to plan");
    run->add_option("--input", a.input, "Demonstration JSON; a seeded pick-place demo when absent");
    run->add_option("--model", a.model, "Selector model JSON");
    run->add_option("--out", a.out, "Output directory");

    auto* config = app.add_subcommand("config", "Show or check configuration");
    config->add_flag("--print-defaults", a.print_defaults, "Print the default config");
    config->add_option("--check", a.check, "Validate a config file");

    std::vector<const char*> argv{"demograph"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return ExitValidation;
    }

    try {
        if (config->parsed()) {
            cmd_config(a, common, out);
            return ExitOk;
        }
        const PipelineConfig cfg = resolve(common);
        if (synth->parsed()) cmd_synth(a, cfg, out);
        else if (analyze->parsed()) cmd_analyze(a, cfg, out);
        else if (graph->parsed()) cmd_graph(a, cfg, out);
        else if (seg->parsed()) cmd_segment(a, cfg, out);
        else if (train_cmd->parsed()) cmd_train(a, cfg, out);
        else if (plan->parsed()) cmd_plan(a, cfg, out);
        else if (eval->parsed()) cmd_eval(a, cfg, out);
        else if (run->parsed()) cmd_run(a, cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.is_io() ? ExitIo : ExitValidation;
    } catch (const fs::filesystem_error& e) {
        err << "error: IoFailure: " << e.what() << "\n";
        return ExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return ExitValidation;
    }
    return ExitOk;
}

int cli_run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_run(args, std::cout, std::cerr);
}

}  // namespace demograph
