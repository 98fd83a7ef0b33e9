// Command line front end: static, spectrum, modeshape, transient, and
// convergence studies driven by flat key-value configs (docs/config.md).
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.

#include <atomic>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "iga1d/errors.hpp"
#include "iga1d/scenario.hpp"

namespace {

struct Overrides {
    std::vector<std::string> configs;
    int p = 0;
    int q = -1;
    std::string scheme;
    int elements = 0;
    std::string out;
    double dt = 0.0;
    int jobs = 1;
};

iga1d::Scenario load_scenario(const std::string& path, const std::string& study,
                              const Overrides& ov) {
    using namespace iga1d;
    Scenario sc = parse_config(path);
    const std::string study_names[] = {"static", "spectrum", "modeshape", "transient",
                                       "convergence"};
    if (study_names[static_cast<int>(sc.study)] != study)
        throw config_error(path + ": study = " + study_names[static_cast<int>(sc.study)] +
                           " conflicts with the '" + study + "' subcommand");

    if (!ov.scheme.empty()) {
        if (ov.scheme == "nurbs")
            sc.scheme.test_fn = TestFunction::Nurbs;
        else if (ov.scheme == "ig")
            sc.scheme.test_fn = TestFunction::IG;
        else if (ov.scheme == "ad")
            sc.scheme.test_fn = TestFunction::AD;
        else if (ov.scheme == "nurbs+rowsum") {
            sc.scheme.test_fn = TestFunction::Nurbs;
            sc.scheme.lumping = LumpingRule::RowSum;
        } else if (ov.scheme == "ad+rowsum") {
            sc.scheme.test_fn = TestFunction::AD;
            sc.scheme.lumping = LumpingRule::RowSum;
        } else
            throw config_error("--scheme: expected nurbs|ig|ad|nurbs+rowsum|ad+rowsum, got '" +
                               ov.scheme + "'");
    }
    if (ov.p > 0) {
        if (ov.p > iga1d::kMaxDegree) throw config_error("--p: degree must be in [1, 8]");
        sc.p = ov.p;
        if (sc.scheme.test_fn == TestFunction::AD && sc.scheme.q > sc.p) sc.scheme.q = sc.p;
    }
    if (ov.q >= 0) {
        if (sc.scheme.test_fn != TestFunction::AD)
            throw config_error("--q: only meaningful with an AD scheme");
        if (ov.q > sc.p) throw config_error("--q: must satisfy q <= p");
        sc.scheme.q = ov.q;
    }
    if (ov.elements > 0) {
        const int spans = static_cast<int>(sc.breakpoints.size()) - 1;
        if (ov.elements % spans != 0)
            throw config_error("--elements: must be a multiple of the " + std::to_string(spans) +
                               " initial spans");
        sc.refinement = ov.elements / spans;
    }
    if (ov.dt > 0.0) sc.dt_rule = iga1d::DtRule::fixed(ov.dt);
    if (!ov.out.empty()) sc.out_path = ov.out;
    return sc;
}

int run_all(const std::string& study, const Overrides& ov) {
    using namespace iga1d;
    if (ov.configs.empty()) throw config_error("--config: at least one config file is required");
    if (ov.configs.size() > 1 && !ov.out.empty())
        throw config_error("--out: cannot be combined with multiple configs");

    std::vector<Scenario> scenarios;
    for (const auto& path : ov.configs) scenarios.push_back(load_scenario(path, study, ov));

    std::atomic<size_t> next{0};
    std::atomic<int> worst{0};
    const int jobs = std::max(1, std::min<int>(ov.jobs, static_cast<int>(scenarios.size())));
    auto worker = [&] {
        for (;;) {
            const size_t k = next.fetch_add(1);
            if (k >= scenarios.size()) return;
            int code = 0;
            try {
                run_scenario(scenarios[k]);
            } catch (const config_error& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                code = 2;
            } catch (const std::invalid_argument& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                code = 2;
            } catch (const std::domain_error& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                code = 2;
            } catch (const numerical_error& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                code = 3;
            } catch (const io_error& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                code = 4;
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                code = 1;
            }
            int cur = worst.load();
            while (code > cur && !worst.compare_exchange_weak(cur, code)) {
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return worst.load();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D isogeometric truss analysis with dual-basis mass lumping"};
    app.require_subcommand(1);

    Overrides ov;
    const char* studies[] = {"static", "spectrum", "modeshape", "transient", "convergence"};
    const char* blurbs[] = {"Static sine-load solution sampled over the bar",
                            "Eigenfrequency spectrum against the analytic one",
                            "Mode-shape L2 error under mesh refinement",
                            "Explicit time integration with probe histories",
                            "L2-error convergence table with fitted slope"};
    for (int s = 0; s < 5; ++s) {
        CLI::App* sub = app.add_subcommand(studies[s], blurbs[s]);
        sub->add_option("--config", ov.configs, "Config file (repeatable)")->required();
        sub->add_option("--p", ov.p, "Override mesh.p");
        sub->add_option("--q", ov.q, "Override scheme.q (AD only)");
        sub->add_option("--scheme", ov.scheme, "Override scheme: nurbs|ig|ad|nurbs+rowsum|ad+rowsum");
        sub->add_option("--elements", ov.elements, "Override total element count");
        sub->add_option("--out", ov.out, "Override output.path (single config only)");
        sub->add_option("--dt", ov.dt, "Override the time step (fixed rule)");
        sub->add_option("--jobs", ov.jobs, "Run multiple configs concurrently");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return run_all(app.get_subcommands().front()->get_name(), ov);
    } catch (const iga1d::config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const iga1d::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
