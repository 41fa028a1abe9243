// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [path-to-demograph-binary] [scratch-dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "demograph/cli.hpp"
#include "demograph/config.hpp"
#include "demograph/random.hpp"
#include "oracles.hpp"

using namespace demograph;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 7;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Suite shared by criteria 4, 5, 6 and 8.
struct SuiteRun {
    std::vector<SynthDemo> suite;
    std::vector<PipelineResult> results;
    EvalReport report;
    double eval_seconds = 0.0;
};

const SuiteRun& suite_run() {
    static const SuiteRun run = [] {
        SuiteRun r;
        const PipelineConfig cfg;
        const auto t0 = Clock::now();
        r.suite = gen_suite(100, kSeed, cfg.scenario());
        EvalOptions opt;
        opt.settings = cfg.analysis();
        r.report = evaluate_suite(r.suite, opt);
        r.eval_seconds = seconds_since(t0);
        for (const auto& d : r.suite) r.results.push_back(run_pipeline(d.demo, cfg.analysis(), prior_assigner()));
        return r;
    }();
    return run;
}

Outcome estimator_oracle() {
    const auto t0 = Clock::now();
    int failures = 0;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto w = oracle::random_window(derive_seed(kSeed, "c1/" + std::to_string(i)));
        const double dh = std::abs(window_entropy(w.x, w.zeta) - oracle::entropy(w.x, w.zeta));
        const double dj = std::abs(joint_entropy(w.x, w.y, w.zeta) - oracle::joint_entropy(w.x, w.y, w.zeta));
        worst = std::max({worst, dh, dj});
        if (dh > 1e-12 || dj > 1e-12) ++failures;
    }
    const double secs = seconds_since(t0);
    return {failures == 0 && secs < 5.0, fmt("1000 windows, %d mismatches, max |diff| %.2e, %.3f s", failures, worst, secs)};
}

Outcome mi_properties() {
    int asym = 0, self = 0, negative = 0, constant = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto w = oracle::random_window(derive_seed(kSeed, "c2/" + std::to_string(i)));
        if (mutual_information(w.x, w.y, w.zeta) != mutual_information(w.y, w.x, w.zeta)) ++asym;
        if (std::abs(mutual_information(w.x, w.x, w.zeta) - window_entropy(w.x, w.zeta)) > 1e-12) ++self;
        if (mutual_information(w.x, w.y, w.zeta) < -1e-12) ++negative;
        const std::vector<double> c(w.x.size(), w.y.front());
        if (mutual_information(w.x, c, w.zeta) != 0.0 || mutual_information(c, w.x, w.zeta) != 0.0) ++constant;
    }
    const int total = asym + self + negative + constant;
    return {total == 0, fmt("1000 cases: asymmetric %d, MI(x,x)!=H(x) %d, negative %d, constant-Y nonzero %d", asym,
                            self, negative, constant)};
}

Outcome bell_shape() {
    const PipelineConfig cfg;
    int unimodal = 0, peak_ok = 0;
    double min_sign = 1.0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        ScenarioConfig sc = cfg.scenario();
        sc.seed = derive_seed(kSeed, "c3/" + std::to_string(i));
        const auto d = gen_canonical_move(sc);
        const auto* obj = d.demo.objects().front();
        ScalarSeries h = entropy_series(obj->axis(0), cfg.window);
        for (std::size_t axis = 1; axis < 3; ++axis) {
            const auto other = entropy_series(obj->axis(axis), cfg.window);
            for (std::size_t k = 0; k < h.size(); ++k) h.points[k].value += other[k].value;
        }
        const auto deriv = series_derivative(h, d.demo.frame_rate(), cfg.window.derivative_smoothing);
        const auto& coupled = d.truth.timeline.events.front();
        const double mid = 0.5 * static_cast<double>(coupled.start_frame + coupled.end_frame);
        const auto b = oracle::bell_shape(h, deriv);
        if (b.unimodal) ++unimodal;
        if (std::abs(static_cast<double>(b.peak_frame) - mid) <= cfg.window.phi / 2.0) ++peak_ok;
        min_sign = std::min(min_sign, b.sign_fraction);
    }
    return {unimodal == 50 && peak_ok == 50 && min_sign >= 0.95,
            fmt("50 demos: unimodal %d, peak within phi/2 %d, min sign agreement %.3f", unimodal, peak_ok, min_sign)};
}

Outcome state_machine() {
    const auto& run = suite_run();
    int docked = 0;
    std::int64_t oo = 0;
    for (const auto& r : run.results) {
        docked += oracle::docked_before_coupled(r.timeline);
        oo += oracle::oo_without_ho(r.timeline);
    }
    return {docked == 0 && oo == 0,
            fmt("100 demos: Docked-before-CoupledMotion %d, OO-without-HO frames %lld", docked, static_cast<long long>(oo))};
}

Outcome detection_quality() {
    const auto& rep = suite_run().report;
    return {rep.event_precision.mean >= 0.95 && rep.event_recall.mean >= 0.95,
            fmt("precision %.4f, recall %.4f at IoU 0.5", rep.event_precision.mean, rep.event_recall.mean)};
}

Outcome accuracy_and_throughput() {
    const auto& run = suite_run();
    const PipelineConfig cfg;
    const auto t0 = Clock::now();
    const auto long_suite = gen_long_suite(100, 10000, kSeed, cfg.scenario());
    EvalOptions opt;
    opt.settings = cfg.analysis();
    const auto long_report = evaluate_suite(long_suite, opt);
    const double secs = seconds_since(t0);
    std::size_t objects = long_suite.front().demo.objects().size();
    const bool pass = run.report.gra.mean >= 0.95 && run.report.tsa.mean >= 0.90 && secs < 60.0 && objects >= 5;
    return {pass, fmt("suite GRA %.4f TSA %.4f (%.2f s); 100 x 10000-frame sessions with %zu objects: GRA %.4f TSA %.4f "
                      "in %.2f s",
                      run.report.gra.mean, run.report.tsa.mean, run.eval_seconds, objects, long_report.gra.mean,
                      long_report.tsa.mean, secs)};
}

Outcome selector() {
    SelectorHyperparams hp;
    hp.r_bonus = 1.5;
    hp.r_penalty = 2.0;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        hp.seed = derive_seed(kSeed, "c7/grad/" + std::to_string(i));
        SelectorModel m = init_model(hp);
        Rng rng(hp.seed, "c7.perturb");
        for (std::size_t p = 0; p < m.parameter_count(); ++p) m.parameter(p) += rng.uniform(-1.0, 1.0);
        auto batch = gen_selector_dataset(8, 0.2, hp.seed);
        const auto w = sample_weights(m, batch, hp);
        const auto g = training_gradient(m, batch, hp, w);
        double diff = 0.0, norm_a = 0.0, norm_n = 0.0;
        for (std::size_t p = 0; p < m.parameter_count(); ++p) {
            const double h = 1e-6;
            SelectorModel plus = m, minus = m;
            plus.parameter(p) += h;
            minus.parameter(p) -= h;
            const double fd = (batch_loss(plus, batch, hp, w) - batch_loss(minus, batch, hp, w)) / (2.0 * h);
            diff += (fd - g.parameter(p)) * (fd - g.parameter(p));
            norm_a += g.parameter(p) * g.parameter(p);
            norm_n += fd * fd;
        }
        worst = std::max(worst, std::sqrt(diff) / std::max({std::sqrt(norm_a), std::sqrt(norm_n), 1e-12}));
    }

    const PipelineConfig cfg;
    const auto held_out = gen_selector_dataset(500, 0.0, derive_seed(kSeed, "c7/test"));
    const auto clean = train(gen_selector_dataset(500, 0.0, derive_seed(kSeed, "c7/train")), cfg.selector_hyperparams());
    const auto noisy = train(gen_selector_dataset(500, 0.1, derive_seed(kSeed, "c7/noisy")), cfg.selector_hyperparams());
    const double a_clean = agreement(clean, held_out);
    const double a_noisy = agreement(noisy, held_out);

    double gap = 0.0;
    for (const auto& s : held_out) {
        const auto p = classifier_forward(clean, s.state).probabilities;
        gap = std::max(gap, std::abs(std::log(p[0]) - std::log(p[1])));
    }
    int fused_mismatch = 0;
    for (const auto& s : held_out)
        if (fused_decision(clean, s.state, gap + 1.0).action != prior_policy(s.state)) ++fused_mismatch;

    const bool pass = worst < 1e-4 && a_clean >= 0.95 && a_noisy >= 0.90 && fused_mismatch == 0;
    return {pass, fmt("max gradient rel. error %.2e; held-out agreement %.3f clean, %.3f with 10%% flips; "
                      "fused != prior at kappa=gap+1 (%.3f): %d",
                      worst, a_clean, a_noisy, gap + 1.0, fused_mismatch)};
}

Outcome plan_emission() {
    const auto& run = suite_run();
    int order_bad = 0, roundtrip_bad = 0;
    for (std::size_t i = 0; i < run.results.size(); ++i) {
        for (const auto* bt : {&run.results[i].plan, &run.suite[i].truth.plan}) {
            if (!pick_before_place(*bt)) ++order_bad;
            const auto text = serialize_plan(*bt);
            if (serialize_plan(parse_plan(text)) != text) ++roundtrip_bad;
        }
    }
    const double match = run.report.plan_match.mean;
    return {order_bad == 0 && roundtrip_bad == 0 && match >= 0.95,
            fmt("pick-before-place violations %d, round-trip mismatches %d, plan_match %.3f", order_bad, roundtrip_bad,
                match)};
}

std::vector<std::string> files_under(const fs::path& dir) {
    std::vector<std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir).string());
    std::sort(out.begin(), out.end());
    return out;
}

Outcome determinism(const std::string& binary, const fs::path& scratch) {
    fs::remove_all(scratch);
    fs::create_directories(scratch);
    auto invoke = [&](const std::vector<std::string>& args) {
        if (binary.empty()) {
            std::ostringstream out, err;
            return cli_run(args, out, err);
        }
        std::string cmd = "\"" + binary + "\"";
        for (const auto& a : args) cmd += " \"" + a + "\"";
        cmd += " > /dev/null";
        return std::system(cmd.c_str());
    };
    int status = 0;
    for (const char* tag : {"a", "b"}) {
        const auto dir = scratch / tag;
        status |= invoke({"run", "--seed", "11", "--out", (dir / "run").string()});
        status |= invoke({"eval", "--seed", "11", "--out", (dir / "eval" / "report.json").string(), "--csv",
                          (dir / "eval" / "report.csv").string()});
    }
    if (status != 0) return {false, "a run/eval invocation failed"};
    const auto fa = files_under(scratch / "a");
    const auto fb = files_under(scratch / "b");
    int differing = fa == fb ? 0 : 1;
    for (const auto& f : fa)
        if (read_file(scratch / "a" / f) != read_file(scratch / "b" / f)) ++differing;
    return {differing == 0, fmt("%zu output files compared, %d differ (%s)", fa.size(), differing,
                                binary.empty() ? "in-process" : "binary")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string binary = argc > 1 ? argv[1] : "";
    const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "demograph_acceptance";

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"estimator oracle equivalence", estimator_oracle},
        {"mutual information properties", mi_properties},
        {"bell-shaped entropy profile", bell_shape},
        {"state-machine invariants", state_machine},
        {"event detection quality", detection_quality},
        {"graph/segmentation accuracy and throughput", accuracy_and_throughput},
        {"hand selector", selector},
        {"plan emission", plan_emission},
        {"determinism", [&] { return determinism(binary, scratch); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("criterion %zu: %s - %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
