#include "iga1d/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "iga1d/errors.hpp"

namespace iga1d {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Flat key-value config: [section] headers qualify keys as section.key,
// '#' starts a comment, duplicates are rejected.
class KeyValues {
public:
    KeyValues(const std::string& text, const std::string& source) : source_(source) {
        std::istringstream in(text);
        std::string line, section;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    fail("unterminated section header on line " + std::to_string(lineno));
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                fail("expected key = value on line " + std::to_string(lineno));
            std::string key = trim(line.substr(0, eq));
            if (key.empty()) fail("empty key on line " + std::to_string(lineno));
            if (!section.empty()) key = section + "." + key;
            if (values_.count(key)) fail("duplicate key '" + key + "'");
            values_[key] = trim(line.substr(eq + 1));
        }
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& def) {
        consumed_.insert(key);
        auto it = values_.find(key);
        return it == values_.end() ? def : it->second;
    }

    double get_double(const std::string& key, double def) {
        consumed_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        return to_double(key, it->second);
    }

    int get_int(const std::string& key, int def) {
        consumed_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        const double v = to_double(key, it->second);
        if (v != std::floor(v)) fail("key '" + key + "': expected an integer");
        return static_cast<int>(v);
    }

    std::vector<double> get_list(const std::string& key) {
        consumed_.insert(key);
        std::vector<double> out;
        auto it = values_.find(key);
        if (it == values_.end()) return out;
        std::istringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
        return out;
    }

    void reject_unknown() const {
        for (const auto& [key, value] : values_)
            if (!consumed_.count(key)) fail("unknown key '" + key + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw config_error(source_ + ": " + msg);
    }

private:
    double to_double(const std::string& key, const std::string& text) const {
        try {
            size_t used = 0;
            const double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            fail("key '" + key + "': expected a number, got '" + text + "'");
        }
    }

    std::string source_;
    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
};

}  // namespace

Scenario parse_config_text(const std::string& text, const std::string& source) {
    KeyValues kv(text, source);
    Scenario sc;

    const std::string study = kv.get_string("study", "");
    if (study == "static")
        sc.study = Scenario::Study::Static;
    else if (study == "spectrum")
        sc.study = Scenario::Study::Spectrum;
    else if (study == "modeshape")
        sc.study = Scenario::Study::ModeShape;
    else if (study == "transient")
        sc.study = Scenario::Study::Transient;
    else if (study == "convergence")
        sc.study = Scenario::Study::Convergence;
    else
        kv.fail("key 'study': expected static|spectrum|modeshape|transient|convergence, got '" +
                study + "'");

    // model
    sc.model.length = kv.get_double("model.L", 1.0);
    const bool has_EA = kv.has("model.EA"), has_E = kv.has("model.E"), has_A = kv.has("model.A");
    const double EA = kv.get_double("model.EA", 1.0);
    const double E = kv.get_double("model.E", 1.0);
    const double A = kv.get_double("model.A", 1.0);
    if (has_EA && (has_E || has_A)) kv.fail("keys 'model.EA' and 'model.E'/'model.A' conflict");
    sc.model.EA = has_EA || !(has_E || has_A) ? EA : E * A;
    const bool has_mu = kv.has("model.mu"), has_rho = kv.has("model.rho");
    const double mu = kv.get_double("model.mu", 1.0);
    const double rho = kv.get_double("model.rho", 1.0);
    if (has_mu && has_rho) kv.fail("keys 'model.mu' and 'model.rho' conflict");
    if (has_rho && !has_A) kv.fail("key 'model.rho' requires 'model.A'");
    sc.model.mu = has_rho ? rho * A : mu;

    const std::string bc = kv.get_string("model.bc", "fixed-fixed");
    if (bc == "fixed-fixed") {
        sc.model.bc_left = sc.model.bc_right = BoundaryKind::Fixed;
    } else if (bc == "fixed-free") {
        sc.model.bc_left = BoundaryKind::Fixed;
        sc.model.bc_right = BoundaryKind::Free;
    } else {
        kv.fail("key 'model.bc': expected fixed-fixed|fixed-free, got '" + bc + "'");
    }

    const std::string load =
        kv.get_string("model.load", sc.study == Scenario::Study::Static ||
                                            (sc.study == Scenario::Study::Convergence)
                                        ? "sine"
                                        : "none");
    sc.model.load.P0 = kv.get_double("model.P0", 100000.0);
    if (load == "sine")
        sc.model.load.kind = LoadSpec::Kind::SineHalfWave;
    else if (load == "none")
        sc.model.load.kind = LoadSpec::Kind::None;
    else
        kv.fail("key 'model.load': expected sine|none, got '" + load + "'");

    // mesh
    sc.mesh_preset = kv.get_string("mesh.preset", "A");
    if (sc.mesh_preset != "A" && sc.mesh_preset != "B" && sc.mesh_preset != "C" &&
        sc.mesh_preset != "custom")
        kv.fail("key 'mesh.preset': expected A|B|C|custom, got '" + sc.mesh_preset + "'");
    sc.breakpoints = kv.get_list("mesh.breakpoints");
    if (sc.mesh_preset == "custom") {
        if (sc.breakpoints.size() < 2) kv.fail("key 'mesh.breakpoints': custom preset needs >= 2 values");
    } else {
        if (!sc.breakpoints.empty())
            kv.fail("key 'mesh.breakpoints' conflicts with mesh.preset = " + sc.mesh_preset);
        sc.breakpoints = preset_breakpoints(sc.mesh_preset == "A"   ? MeshPreset::A
                                            : sc.mesh_preset == "B" ? MeshPreset::B
                                                                    : MeshPreset::C);
    }
    sc.p = kv.get_int("mesh.p", 2);
    if (sc.p < 1 || sc.p > kMaxDegree) kv.fail("key 'mesh.p': degree must be in [1, 8]");
    const int spans = static_cast<int>(sc.breakpoints.size()) - 1;
    if (kv.has("mesh.elements") && kv.has("mesh.refinement"))
        kv.fail("keys 'mesh.elements' and 'mesh.refinement' conflict");
    if (kv.has("mesh.elements")) {
        const int elements = kv.get_int("mesh.elements", spans);
        if (elements % spans != 0)
            kv.fail("key 'mesh.elements': must be a multiple of the " + std::to_string(spans) +
                    " initial spans");
        sc.refinement = elements / spans;
    } else {
        sc.refinement = kv.get_int("mesh.refinement", 1);
    }
    if (sc.refinement < 1) kv.fail("key 'mesh.refinement': must be >= 1");
    sc.initial_weights = kv.get_list("mesh.weights");
    if (!sc.initial_weights.empty()) {
        const int p_init = static_cast<int>(sc.initial_weights.size()) - spans;
        if (p_init < 1 || p_init > sc.p)
            kv.fail("key 'mesh.weights': expected n = spans + p_init values with 1 <= p_init <= p");
    }

    // scheme
    const std::string tf = kv.get_string("scheme.test_fn", "nurbs");
    if (tf == "nurbs")
        sc.scheme.test_fn = TestFunction::Nurbs;
    else if (tf == "ig")
        sc.scheme.test_fn = TestFunction::IG;
    else if (tf == "ad")
        sc.scheme.test_fn = TestFunction::AD;
    else
        kv.fail("key 'scheme.test_fn': expected nurbs|ig|ad, got '" + tf + "'");
    if (kv.has("scheme.q") && sc.scheme.test_fn != TestFunction::AD)
        kv.fail("key 'scheme.q' conflicts with scheme.test_fn = " + tf);
    sc.scheme.q = kv.get_int("scheme.q", sc.p);
    if (sc.scheme.test_fn == TestFunction::AD && (sc.scheme.q < 0 || sc.scheme.q > sc.p))
        kv.fail("key 'scheme.q': must satisfy 0 <= q <= p");
    const std::string lump = kv.get_string("scheme.lumping", "none");
    if (lump == "none")
        sc.scheme.lumping = LumpingRule::None;
    else if (lump == "rowsum")
        sc.scheme.lumping = LumpingRule::RowSum;
    else
        kv.fail("key 'scheme.lumping': expected none|rowsum, got '" + lump + "'");
    const std::string bcm = kv.get_string("scheme.bc_mode", "schur");
    if (bcm == "schur")
        sc.scheme.bc_mode = BcMode::Schur;
    else if (bcm == "naive")
        sc.scheme.bc_mode = BcMode::Naive;
    else
        kv.fail("key 'scheme.bc_mode': expected schur|naive, got '" + bcm + "'");

    // integrator
    const std::string integ = kv.get_string("integrator.type", "cdm");
    if (integ == "cdm")
        sc.integrator = Integrator::CDM;
    else if (integ == "rk4")
        sc.integrator = Integrator::RK4;
    else
        kv.fail("key 'integrator.type': expected cdm|rk4, got '" + integ + "'");
    if (kv.has("integrator.dt") && kv.has("integrator.dt_rule"))
        kv.fail("keys 'integrator.dt' and 'integrator.dt_rule' conflict");
    if (kv.has("integrator.dt")) {
        const double dt = kv.get_double("integrator.dt", 0.0);
        if (dt <= 0.0) kv.fail("key 'integrator.dt': must be positive");
        sc.dt_rule = DtRule::fixed(dt);
    } else {
        const std::string rule = kv.get_string("integrator.dt_rule", "h_over_10");
        if (rule == "h_over_10")
            sc.dt_rule = DtRule::h_over_10();
        else if (rule == "adapted_p")
            sc.dt_rule = DtRule::adapted_p();
        else
            kv.fail("key 'integrator.dt_rule': expected h_over_10|adapted_p, got '" + rule + "'");
    }
    sc.t_end = kv.get_double("integrator.t_end", 2.0);
    if (sc.t_end <= 0.0) kv.fail("key 'integrator.t_end': must be positive");
    sc.probes = kv.get_list("integrator.probes");
    sc.output_stride = kv.get_int("integrator.output_stride", 0);
    sc.signal_source = kv.get_string("integrator.signal", "");
    const std::string forcing =
        kv.get_string("integrator.forcing", sc.signal_source.empty() ? "none" : "signal");
    if (forcing == "none")
        sc.forcing = ForcingKind::None;
    else if (forcing == "signal")
        sc.forcing = ForcingKind::GroundAccel;
    else if (forcing == "hold_static")
        sc.forcing = ForcingKind::StaticLoadHeld;
    else
        kv.fail("key 'integrator.forcing': expected none|signal|hold_static, got '" + forcing + "'");
    if (sc.forcing == ForcingKind::GroundAccel && sc.signal_source.empty())
        kv.fail("key 'integrator.signal': required for forcing = signal");
    const std::string gm = kv.get_string("integrator.ground_mass", "scheme");
    if (gm == "scheme")
        sc.ground_mass = GroundMassMode::Scheme;
    else if (gm == "consistent")
        sc.ground_mass = GroundMassMode::Consistent;
    else
        kv.fail("key 'integrator.ground_mass': expected scheme|consistent, got '" + gm + "'");
    sc.initial_conditions = kv.get_string("integrator.ic", "zero");
    if (sc.initial_conditions != "zero" && sc.initial_conditions != "standing_wave")
        kv.fail("key 'integrator.ic': expected zero|standing_wave, got '" + sc.initial_conditions +
                "'");
    if (kv.has("integrator.t_eval")) sc.t_eval = kv.get_double("integrator.t_eval", 0.0);

    // convergence / modeshape
    const auto refocus = kv.get_list("convergence.refinements");
    if (!refocus.empty()) {
        sc.refinements.clear();
        for (double m : refocus) {
            if (m < 1.0 || m != std::floor(m))
                kv.fail("key 'convergence.refinements': expected positive integers");
            sc.refinements.push_back(static_cast<int>(m));
        }
    }
    const std::string qty = kv.get_string("convergence.quantity", "displacement");
    if (qty == "displacement")
        sc.quantity = FieldQuantity::Displacement;
    else if (qty == "normal_force")
        sc.quantity = FieldQuantity::NormalForce;
    else
        kv.fail("key 'convergence.quantity': expected displacement|normal_force, got '" + qty + "'");
    sc.convergence_target = kv.get_string("convergence.target", "static");
    if (sc.convergence_target != "static" && sc.convergence_target != "transient")
        kv.fail("key 'convergence.target': expected static|transient, got '" + sc.convergence_target +
                "'");
    sc.mode = kv.get_int("modeshape.mode", 10);
    if (sc.mode < 1) kv.fail("key 'modeshape.mode': must be >= 1");

    // output
    sc.out_path = kv.get_string("output.path", "out.csv");
    sc.samples = kv.get_int("output.samples", 201);
    if (sc.samples < 2) kv.fail("key 'output.samples': must be >= 2");

    kv.reject_unknown();

    // cross-study constraints
    const bool fixed_fixed =
        sc.model.bc_left == BoundaryKind::Fixed && sc.model.bc_right == BoundaryKind::Fixed;
    if (sc.study == Scenario::Study::Static && !fixed_fixed)
        kv.fail("key 'model.bc': the static study needs fixed-fixed supports for its reference");
    if (sc.study == Scenario::Study::Convergence && sc.convergence_target == "static") {
        if (sc.model.load.kind != LoadSpec::Kind::SineHalfWave)
            kv.fail("key 'model.load': the static convergence study needs the sine load");
        if (!fixed_fixed)
            kv.fail("key 'model.bc': the static convergence study needs fixed-fixed supports");
    }
    if (sc.study == Scenario::Study::Convergence && sc.convergence_target == "transient") {
        if (!fixed_fixed) kv.fail("key 'model.bc': the transient convergence study is fixed-fixed");
        if (!sc.t_eval) sc.t_eval = 1.925;
        sc.initial_conditions = "standing_wave";
    }
    if (sc.study == Scenario::Study::Transient && sc.t_eval && *sc.t_eval > sc.t_end)
        kv.fail("key 'integrator.t_eval': must not exceed integrator.t_end");
    return sc;
}

Scenario parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path);
}

SplineSpace build_space(const Scenario& sc) {
    if (sc.initial_weights.empty())
        return make_space(sc.breakpoints, sc.p, sc.refinement, sc.model.length);
    const int spans = static_cast<int>(sc.breakpoints.size()) - 1;
    const int p_init = static_cast<int>(sc.initial_weights.size()) - spans;
    SplineSpace initial;
    initial.kv = make_open_knot_vector(sc.breakpoints, p_init);
    initial.weights = sc.initial_weights;
    initial.geometry = greville_abscissae(initial.kv);
    for (double& g : initial.geometry) g *= sc.model.length;
    initial.validate();
    return refine_space(initial, sc.p, sc.refinement);
}

Signal load_signal(const Scenario& sc) {
    if (sc.signal_source == "burst") return synthetic_burst_signal();
    return read_signal_csv(sc.signal_source);
}

namespace {

std::string scheme_name(const Scheme& s) {
    std::string name = s.test_fn == TestFunction::Nurbs ? "nurbs"
                       : s.test_fn == TestFunction::IG  ? "ig"
                                                        : "ad";
    name += s.lumping == LumpingRule::RowSum ? "+rowsum" : "+consistent";
    return name;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path) : path_(path), out_(path) {
        if (!out_) throw io_error("cannot open output file: " + path);
    }

    void comment(const std::string& text) { out_ << "# " << text << "\n"; }
    void header(const std::string& h) { out_ << h << "\n"; }

    void row(const std::vector<double>& values) {
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ",";
            out_ << format_number(values[i]);
        }
        out_ << "\n";
    }

    void close() {
        out_.close();
        if (!out_) throw io_error("failed writing output file: " + path_);
    }

private:
    std::string path_;
    std::ofstream out_;
};

std::string metadata(const Scenario& sc, double dt) {
    std::ostringstream os;
    os << "scheme=" << scheme_name(sc.scheme) << ", p=" << sc.p << ", q="
       << (sc.scheme.test_fn == TestFunction::AD ? std::to_string(sc.scheme.q) : std::string("-"))
       << ", dt=" << format_number(dt)
       << ", bc_mode=" << (sc.scheme.bc_mode == BcMode::Schur ? "schur" : "naive");
    return os.str();
}

double max_element_width(const SplineSpace& space) {
    const auto breaks = space.kv.breakpoints();
    double hmax = 0.0;
    for (size_t k = 0; k + 1 < breaks.size(); ++k)
        hmax = std::max(hmax, physical_from_param(space, breaks[k + 1]) -
                                  physical_from_param(space, breaks[k]));
    return hmax;
}

TransientSetup transient_setup(const Scenario& sc) {
    TransientSetup setup;
    setup.integrator = sc.integrator;
    setup.dt_rule = sc.dt_rule;
    setup.t_end = sc.t_end;
    setup.probes = sc.probes;
    setup.output_stride = sc.output_stride;
    setup.t_eval = sc.t_eval;
    setup.ground_mass = sc.ground_mass;
    setup.forcing.kind = sc.forcing;
    if (sc.forcing == ForcingKind::GroundAccel) setup.forcing.signal = load_signal(sc);
    if (sc.initial_conditions == "standing_wave") {
        const double L = sc.model.length;
        const double two_pi = 2.0 * std::acos(-1.0);
        setup.v0 = [L, two_pi](double x) { return two_pi * std::sin(two_pi * x / L); };
    }
    return setup;
}

void run_static(const Scenario& sc) {
    const SplineSpace space = build_space(sc);
    const SystemMatrices sys = build_system(sc.model, space, sc.scheme);
    const auto full = expand_solution(sys, static_solve(sys));
    CsvWriter csv(sc.out_path);
    csv.comment(metadata(sc, 0.0));
    csv.header("x,u_h,u_ref,F_N_h,F_N_ref");
    const bool has_ref = sc.model.load.kind == LoadSpec::Kind::SineHalfWave;
    for (int i = 0; i < sc.samples; ++i) {
        const double x = sc.model.length * i / (sc.samples - 1.0);
        const FieldSample f = field_eval(space, full, param_from_physical(space, x), sc.model.EA);
        const StaticSineRef ref = has_ref ? analytic_static_sine(sc.model, x) : StaticSineRef{};
        csv.row({x, f.u, ref.u, f.normal_force, ref.normal_force});
    }
    csv.close();
}

void run_spectrum(const Scenario& sc) {
    const SplineSpace space = build_space(sc);
    const Spectrum s = compute_spectrum(sc.model, space, sc.scheme);
    CsvWriter csv(sc.out_path);
    csv.comment(metadata(sc, 0.0));
    csv.comment("n_outliers=" + std::to_string(s.n_outliers) +
                (s.uniform_mesh ? ", uniform" : ", non-uniform"));
    csv.header("n,omega_h,omega_ref,ratio,outlier_flag");
    const int nfree = static_cast<int>(s.omega_h.size());
    for (int k = 0; k < nfree; ++k) {
        const bool outlier = k >= nfree - s.n_outliers;
        csv.row({static_cast<double>(k + 1), s.omega_h[k], s.omega_ref[k], s.ratio[k],
                 outlier ? 1.0 : 0.0});
    }
    csv.close();
}

void run_modeshape(const Scenario& sc) {
    CsvWriter csv(sc.out_path);
    csv.comment(metadata(sc, 0.0));
    csv.header("n_el,h_max,l2_error");
    for (int m : sc.refinements) {
        Scenario level = sc;
        level.refinement = m;
        const SplineSpace space = build_space(level);
        const double err = mode_shape_error(sc.model, space, sc.scheme, sc.mode);
        csv.row({static_cast<double>(space.kv.num_elements()), max_element_width(space), err});
    }
    csv.close();
}

void run_transient_study(const Scenario& sc) {
    const SplineSpace space = build_space(sc);
    const TimeHistory hist = run_transient(sc.model, space, sc.scheme, transient_setup(sc));
    CsvWriter csv(sc.out_path);
    csv.comment(metadata(sc, hist.dt));
    std::ostringstream probes;
    probes << "probes=";
    for (size_t i = 0; i < hist.probe_positions.size(); ++i)
        probes << (i ? "," : "") << format_number(hist.probe_positions[i]);
    csv.comment(probes.str());
    std::ostringstream head;
    head << "t";
    for (size_t i = 1; i <= hist.probe_positions.size(); ++i)
        head << ",u_" << i << ",v_" << i << ",a_" << i;
    csv.header(head.str());
    for (size_t k = 0; k < hist.times.size(); ++k) {
        std::vector<double> row{hist.times[k]};
        for (size_t pr = 0; pr < hist.probe_positions.size(); ++pr) {
            row.push_back(hist.u[pr][k]);
            row.push_back(hist.v[pr][k]);
            row.push_back(hist.a[pr][k]);
        }
        csv.row(row);
    }
    csv.close();
}

void run_convergence(const Scenario& sc) {
    ConvergenceTable table;
    double dt_used = 0.0;
    std::vector<std::vector<double>> rows;
    for (int m : sc.refinements) {
        Scenario level = sc;
        level.refinement = m;
        const SplineSpace space = build_space(level);
        double err = 0.0;
        if (sc.convergence_target == "static") {
            const SystemMatrices sys = build_system(sc.model, space, sc.scheme);
            const auto full = expand_solution(sys, static_solve(sys));
            err = l2_error_field(
                space, full,
                [&](double x) {
                    const StaticSineRef r = analytic_static_sine(sc.model, x);
                    return sc.quantity == FieldQuantity::Displacement ? r.u : r.normal_force;
                },
                sc.quantity, sc.model.EA);
        } else {
            Scenario run = level;
            run.t_end = *sc.t_eval;
            TransientSetup setup = transient_setup(run);
            const TimeHistory hist = run_transient(sc.model, space, sc.scheme, setup);
            dt_used = hist.dt;
            err = l2_error_field(
                space, hist.final_u,
                [&](double x) { return analytic_standing_wave(sc.model, x, hist.final_t); },
                FieldQuantity::Displacement, sc.model.EA);
        }
        table.rows.push_back({space.kv.num_elements(), max_element_width(space), err});
        rows.push_back({static_cast<double>(space.kv.num_elements()), max_element_width(space), err});
    }
    CsvWriter csv(sc.out_path);
    csv.comment(metadata(sc, dt_used));
    csv.header("n_el,h_max,error");
    for (const auto& r : rows) csv.row(r);
    csv.comment("slope=" + format_number(convergence_rate(table)));
    csv.close();
}

}  // namespace

void run_scenario(const Scenario& sc) {
    const auto t0 = std::chrono::steady_clock::now();
    switch (sc.study) {
        case Scenario::Study::Static: run_static(sc); break;
        case Scenario::Study::Spectrum: run_spectrum(sc); break;
        case Scenario::Study::ModeShape: run_modeshape(sc); break;
        case Scenario::Study::Transient: run_transient_study(sc); break;
        case Scenario::Study::Convergence: run_convergence(sc); break;
    }
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;
    std::fprintf(stderr, "# wall_seconds=%.3f out=%s\n", wall.count(), sc.out_path.c_str());
}

}  // namespace iga1d
