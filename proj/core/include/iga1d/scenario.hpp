#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iga1d/analysis.hpp"
#include "iga1d/assembly.hpp"
#include "iga1d/dynamics.hpp"
#include "iga1d/signal.hpp"
#include "iga1d/spline.hpp"

namespace iga1d {

/// A fully validated run description parsed from the flat key-value config
/// format (see docs/config.md).
struct Scenario {
    enum class Study { Static, Spectrum, ModeShape, Transient, Convergence };
    Study study = Study::Static;

    TrussModel model;

    // mesh
    std::string mesh_preset = "A";  // A | B | C | custom
    std::vector<double> breakpoints;
    int p = 2;
    int refinement = 1;
    std::vector<double> initial_weights;  // weighted initial space, optional

    Scheme scheme;

    // integrator block (transient and convergence over a transient target)
    Integrator integrator = Integrator::CDM;
    DtRule dt_rule = DtRule::h_over_10();
    double t_end = 2.0;
    std::vector<double> probes;
    int output_stride = 0;
    ForcingKind forcing = ForcingKind::None;
    std::string signal_source;  // "burst" or a CSV path
    GroundMassMode ground_mass = GroundMassMode::Scheme;
    std::string initial_conditions = "zero";  // zero | standing_wave
    std::optional<double> t_eval;

    // convergence / modeshape sweeps
    std::vector<int> refinements = {1, 2, 4, 8};
    FieldQuantity quantity = FieldQuantity::Displacement;
    std::string convergence_target = "static";  // static | transient
    int mode = 10;

    // output
    std::string out_path = "out.csv";
    int samples = 201;
};

/// Parses and validates a config file. Unknown keys, type mismatches, and
/// constraint violations raise config_error naming the offending key.
Scenario parse_config(const std::string& path);

/// Same, from an in-memory config text (the source label is used in
/// messages).
Scenario parse_config_text(const std::string& text, const std::string& source);

/// Builds the spline space the scenario describes (presets, custom
/// breakpoints, optional initial weights carried through refinement).
SplineSpace build_space(const Scenario& sc);

/// Resolves the scenario's ground-motion signal (synthetic burst or CSV).
Signal load_signal(const Scenario& sc);

/// Executes the study and writes the output CSV (17 significant digits,
/// deterministic byte-for-byte). Wall-clock seconds go to stderr only.
void run_scenario(const Scenario& sc);

/// 17-significant-digit formatting used for all CSV numbers.
std::string format_number(double v);

}  // namespace iga1d
