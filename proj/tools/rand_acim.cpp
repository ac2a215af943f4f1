// rand-acim: experiment driver for random piecewise-expanding circle map
// cocycles. Reads a JSON config, runs one experiment, and emits CSV tables,
// a JSON run summary, and optional SVG line charts.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "racim/cocycle.hpp"
#include "racim/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace racim;

namespace {

struct Artifact {
    fs::path relpath;
    std::string content;
};

struct ExperimentConfig {
    std::string experiment;
    std::string family_name = "example35";
    std::vector<double> breakpoints;                // custom-polynomial only
    std::vector<std::vector<double>> coefficients;  // custom-polynomial only
    double gamma = 1.0;

    double alpha = 0.5 * std::numbers::sqrt2;
    double omega0 = 0.0;
    std::string orbit_file;

    std::string scheme = "ulam";
    int k = 1000;
    int q = 1000;
    int modes = 100;
    double tol = 1e-9;
    bool ulam_exact = false;
    int steps = 20;

    SobolevParams sobolev;

    std::vector<int> k_list{125, 250, 500};
    int reference_k = 1000;
    std::vector<int> kernel_orders{8, 16, 32, 64, 128};
    std::vector<int> mode_list{4, 8, 16, 32};
    std::vector<double> rho_list{1e-1, 1e-2, 1e-3, 1e-4};
    int lyapunov_steps = 100;
    int trials = 5;
    double mu = 2.0;
    double norm_bound = 1e6;
    int max_branches = 100;
    int overlay_modes = 0;  // reproduce-figure: Galerkin overlay order, 0 = off

    fs::path output_dir = "out";
    bool plot = false;
};

json config_echo(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    j["family"] = {{"name", c.family_name}, {"gamma", c.gamma}};
    if (c.family_name == "custom-polynomial") {
        j["family"]["breakpoints"] = c.breakpoints;
        j["family"]["coefficients"] = c.coefficients;
    }
    j["base"] = {{"alpha", c.alpha}, {"omega0", c.omega0}, {"orbit_file", c.orbit_file}};
    j["scheme"] = {{"name", c.scheme}, {"k", c.k},     {"q", c.q},
                   {"modes", c.modes}, {"tol", c.tol}, {"exact", c.ulam_exact}};
    j["steps"] = c.steps;
    j["sobolev"] = {{"p", c.sobolev.p}, {"t", c.sobolev.t}, {"t_weak", c.sobolev.t_weak}};
    j["study"] = {{"k_list", c.k_list},
                  {"reference_k", c.reference_k},
                  {"kernel_orders", c.kernel_orders},
                  {"mode_list", c.mode_list},
                  {"rho_list", c.rho_list},
                  {"lyapunov_steps", c.lyapunov_steps},
                  {"trials", c.trials},
                  {"mu", c.mu},
                  {"norm_bound", c.norm_bound},
                  {"max_branches", c.max_branches},
                  {"overlay_modes", c.overlay_modes}};
    j["output_dir"] = c.output_dir.string();
    j["plot"] = c.plot;
    return j;
}

void load_config_file(ExperimentConfig& c, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    auto get = [](const json& obj, const char* key, auto& out) {
        if (obj.contains(key)) out = obj.at(key).template get<std::decay_t<decltype(out)>>();
    };
    if (j.contains("family")) {
        const json& f = j["family"];
        get(f, "name", c.family_name);
        get(f, "gamma", c.gamma);
        get(f, "breakpoints", c.breakpoints);
        get(f, "coefficients", c.coefficients);
    }
    if (j.contains("base")) {
        const json& b = j["base"];
        get(b, "alpha", c.alpha);
        get(b, "omega0", c.omega0);
        get(b, "orbit_file", c.orbit_file);
    }
    if (j.contains("scheme")) {
        const json& s = j["scheme"];
        get(s, "name", c.scheme);
        get(s, "k", c.k);
        get(s, "q", c.q);
        get(s, "modes", c.modes);
        get(s, "tol", c.tol);
        get(s, "exact", c.ulam_exact);
    }
    get(j, "steps", c.steps);
    if (j.contains("sobolev")) {
        const json& s = j["sobolev"];
        get(s, "p", c.sobolev.p);
        get(s, "t", c.sobolev.t);
        get(s, "t_weak", c.sobolev.t_weak);
    }
    if (j.contains("study")) {
        const json& s = j["study"];
        get(s, "k_list", c.k_list);
        get(s, "reference_k", c.reference_k);
        get(s, "kernel_orders", c.kernel_orders);
        get(s, "mode_list", c.mode_list);
        get(s, "rho_list", c.rho_list);
        get(s, "lyapunov_steps", c.lyapunov_steps);
        get(s, "trials", c.trials);
        get(s, "mu", c.mu);
        get(s, "norm_bound", c.norm_bound);
        get(s, "max_branches", c.max_branches);
        get(s, "overlay_modes", c.overlay_modes);
    }
    std::string out_dir;
    get(j, "output_dir", out_dir);
    if (!out_dir.empty()) c.output_dir = out_dir;
    get(j, "plot", c.plot);
}

MapFamily make_family(const ExperimentConfig& c) {
    if (c.family_name == "example35") return example_family_map();
    if (c.family_name == "doubling")
        return MapFamily{[](double) { return doubling_map(); }, c.gamma};
    if (c.family_name == "identity")
        return MapFamily{[](double) { return identity_map(); }, c.gamma};
    if (c.family_name == "custom-polynomial") {
        if (c.breakpoints.empty() || c.coefficients.empty())
            throw ConfigError("custom-polynomial family needs breakpoints and coefficients");
        auto bp = c.breakpoints;
        auto co = c.coefficients;
        return MapFamily{[bp, co](double) { return polynomial_map(bp, co); }, c.gamma};
    }
    throw ConfigError("unknown family: " + c.family_name);
}

OrbitProvider make_base(const ExperimentConfig& c) {
    OrbitProvider base;
    base.rotation = RotationBase{c.alpha, c.omega0};
    if (!c.orbit_file.empty()) {
        std::ifstream in(c.orbit_file);
        if (!in) throw ConfigError("cannot open orbit file " + c.orbit_file);
        double w;
        while (in >> w) base.explicit_orbit.push_back(w);
        if (base.explicit_orbit.empty())
            throw ConfigError("orbit file is empty: " + c.orbit_file);
    }
    return base;
}

CocycleSpec make_spec(const ExperimentConfig& c) {
    CocycleSpec spec;
    spec.family = make_family(c);
    spec.base = make_base(c);
    if (c.scheme == "ulam")
        spec.scheme = Scheme::Ulam;
    else if (c.scheme == "galerkin-cesaro")
        spec.scheme = Scheme::GalerkinCesaro;
    else if (c.scheme == "galerkin-plain")
        spec.scheme = Scheme::GalerkinPlain;
    else
        throw ConfigError("unknown scheme: " + c.scheme);
    spec.k = c.k;
    spec.q = c.q;
    spec.modes = c.modes;
    spec.tol = c.tol;
    spec.steps = c.steps;
    spec.ulam_exact = c.ulam_exact;
    return spec;
}

json table_json(const RunSummaryTable& t) {
    json j;
    j["name"] = t.name;
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back({{"parameter", r.parameter}, {"distance", r.distance}});
    j["rows"] = rows;
    if (!std::isnan(t.fitted_slope)) j["fitted_slope"] = t.fitted_slope;
    if (!t.hypothesis_checks.empty()) j["hypothesis_checks"] = t.hypothesis_checks;
    return j;
}

io::Series density_series(const BinnedDensity& d, const std::string& label,
                          const std::string& color) {
    io::Series s;
    s.label = label;
    s.color = color;
    for (int j = 0; j < d.k; ++j) {
        s.xs.push_back((j + 0.5) / static_cast<double>(d.k));
        s.ys.push_back(d.values[static_cast<std::size_t>(j)]);
    }
    return s;
}

io::Series table_series(const RunSummaryTable& t, const std::string& color) {
    io::Series s;
    s.label = t.name;
    s.color = color;
    for (const auto& r : t.rows) {
        s.xs.push_back(r.parameter);
        s.ys.push_back(r.distance);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

void run_reproduce_figure(const ExperimentConfig& c, std::vector<Artifact>& artifacts,
                          json& summary) {
    CocycleSpec spec = make_spec(c);
    int last = std::max(spec.steps, 22);
    spec.steps = last;
    std::vector<int> record{last - 2, last - 1, last};
    std::vector<io::PlotPanel> panels;
    json diag = json::array();

    if (spec.scheme == Scheme::Ulam) {
        PushforwardResult res = push_forward(spec, record);
        for (std::size_t i = 0; i < record.size(); ++i) {
            std::string tag = "density_step" + std::to_string(record[i]);
            artifacts.push_back({tag + ".csv", io::density_csv(res.binned[i])});
            panels.push_back({"step " + std::to_string(record[i]),
                              {density_series(res.binned[i], "ulam", "#1f77b4")}});
        }
        for (const auto& d : res.diagnostics)
            diag.push_back({{"step", d.step},
                            {"fiber", d.fiber},
                            {"mass", d.mass},
                            {"l1_change", d.l1_change}});
        if (c.overlay_modes > 0) {
            CocycleSpec gal = spec;
            gal.scheme = Scheme::GalerkinCesaro;
            gal.modes = c.overlay_modes;
            PushforwardResult gres = push_forward(gal, record);
            CocycleSpec plain = gal;
            plain.scheme = Scheme::GalerkinPlain;
            PushforwardResult pres = push_forward(plain, record);
            for (std::size_t i = 0; i < record.size(); ++i) {
                BinnedDensity gb = fourier_to_binned(gres.fourier[i], spec.k);
                BinnedDensity pb = fourier_to_binned(pres.fourier[i], spec.k);
                std::string tag = "density_galerkin_step" + std::to_string(record[i]);
                artifacts.push_back({tag + ".csv", io::density_csv(gb)});
                panels.push_back({"step " + std::to_string(record[i]) + " (galerkin)",
                                  {density_series(gb, "cesaro", "#d62728"),
                                   density_series(pb, "plain", "#2ca02c")}});
            }
        }
    } else {
        PushforwardResult res = push_forward(spec, record);
        for (std::size_t i = 0; i < record.size(); ++i) {
            std::string tag = "density_step" + std::to_string(record[i]);
            artifacts.push_back({tag + ".csv", io::density_csv(res.fourier[i], 2048)});
            BinnedDensity b = fourier_to_binned(res.fourier[i], 512);
            panels.push_back({"step " + std::to_string(record[i]),
                              {density_series(b, "galerkin", "#d62728")}});
        }
        for (const auto& d : res.diagnostics)
            diag.push_back({{"step", d.step},
                            {"fiber", d.fiber},
                            {"mass", d.mass},
                            {"l1_change", d.l1_change}});
    }
    summary["diagnostics"] = diag;
    if (c.plot) artifacts.push_back({"figure.svg", io::svg_panels(panels, 3)});
}

void run_ulam_sweep(const ExperimentConfig& c, std::vector<Artifact>& artifacts,
                    json& summary) {
    CocycleSpec spec = make_spec(c);
    RunSummaryTable t = ulam_convergence_study(spec, c.k_list, c.reference_k);
    artifacts.push_back({"ulam_sweep.csv", io::table_csv(t)});
    summary["table"] = table_json(t);
    if (c.plot)
        artifacts.push_back(
            {"ulam_sweep.svg",
             io::svg_panels({{"L1 distance vs k", {table_series(t, "#1f77b4")}}}, 1)});
}

void run_fourier_sweep(const ExperimentConfig& c, std::vector<Artifact>& artifacts,
                       json& summary) {
    // Cesàro-Galerkin densities at increasing mode cutoffs against a fixed
    // Ulam reference on the same orbit.
    ExperimentConfig cu = c;
    cu.scheme = "ulam";
    CocycleSpec ref_spec = make_spec(cu);
    BinnedDensity ref = push_forward(ref_spec, {ref_spec.steps}).binned.at(0);
    RunSummaryTable t;
    t.name = "fourier-sweep";
    ExperimentConfig cg = c;
    cg.scheme = "galerkin-cesaro";
    for (int K : c.mode_list) {
        CocycleSpec spec = make_spec(cg);
        spec.modes = K;
        FourierDensity f = push_forward(spec, {spec.steps}).fourier.at(0);
        t.rows.push_back({static_cast<double>(K),
                          compare_densities(f, ref, DistanceNorm::L1)});
    }
    artifacts.push_back({"fourier_sweep.csv", io::table_csv(t)});
    summary["table"] = table_json(t);
    if (c.plot)
        artifacts.push_back(
            {"fourier_sweep.svg",
             io::svg_panels({{"L1 distance vs modes", {table_series(t, "#d62728")}}}, 1)});
}

void run_convolution_study(const ExperimentConfig& c, std::vector<Artifact>& artifacts,
                           json& summary) {
    CocycleSpec spec = make_spec(c);
    RunSummaryTable t = convolution_stability_study(spec, c.kernel_orders);
    artifacts.push_back({"convolution_study.csv", io::table_csv(t)});
    summary["table"] = table_json(t);
    if (c.plot)
        artifacts.push_back(
            {"convolution_study.svg",
             io::svg_panels({{"L1 distance vs kernel order", {table_series(t, "#2ca02c")}}},
                            1)});
}

void run_static_study(const ExperimentConfig& c, std::vector<Artifact>& artifacts,
                      json& summary) {
    CocycleSpec spec = make_spec(c);
    RunSummaryTable t = static_stability_study(spec, c.rho_list, 5);
    artifacts.push_back({"static_study.csv", io::table_csv(t)});
    summary["table"] = table_json(t);
    if (c.plot)
        artifacts.push_back(
            {"static_study.svg",
             io::svg_panels({{"L1 distance vs rho", {table_series(t, "#9467bd")}}}, 1)});
}

void run_lyapunov(const ExperimentConfig& c, std::vector<Artifact>& artifacts,
                  json& summary) {
    CocycleSpec spec = make_spec(c);
    double l1 = estimate_lambda1(spec, c.lyapunov_steps);
    double l2 = spec.scheme == Scheme::Ulam
                    ? estimate_lambda2(spec, c.lyapunov_steps, c.trials)
                    : std::numeric_limits<double>::quiet_NaN();
    std::ostringstream csv;
    csv << "exponent,value\n";
    csv << "lambda1," << io::fmt(l1) << '\n';
    csv << "lambda2," << io::fmt(l2) << '\n';
    artifacts.push_back({"lyapunov.csv", csv.str()});
    summary["lambda1_hat"] = l1;
    summary["lambda2_hat"] = l2;
    summary["n_steps"] = c.lyapunov_steps;
    summary["trials"] = c.trials;
    summary["seed"] = 20240817;
}

void run_validate_map(const ExperimentConfig& c, std::vector<Artifact>& artifacts,
                      json& summary) {
    MapFamily fam = make_family(c);
    OrbitProvider base = make_base(c);
    std::ostringstream csv;
    csv << "fiber,branches,min_slope,c1gamma_norm,pass\n";
    json reports = json::array();
    bool all_pass = true;
    for (int j = 0; j < 5; ++j) {
        double w = base.fiber(static_cast<std::size_t>(j));
        ValidationReport rep =
            validate_bounds(fam(w), 2000, c.mu, c.norm_bound,
                            static_cast<std::size_t>(c.max_branches));
        all_pass = all_pass && rep.pass;
        csv << io::fmt(w) << ',' << rep.branch_count << ',' << io::fmt(rep.min_abs_deriv)
            << ',' << io::fmt(rep.c1gamma_norm) << ',' << (rep.pass ? 1 : 0) << '\n';
        reports.push_back({{"fiber", w},
                           {"branches", rep.branch_count},
                           {"min_slope", rep.min_abs_deriv},
                           {"c1gamma_norm", rep.c1gamma_norm},
                           {"pass", rep.pass}});
    }
    artifacts.push_back({"validate_map.csv", csv.str()});
    summary["reports"] = reports;
    summary["all_pass"] = all_pass;
    if (!all_pass)
        throw Error("validate-map: expansion/regularity bounds violated (mu = " +
                    std::to_string(c.mu) + ")");
}

void run_norms_lab(const ExperimentConfig& c, std::vector<Artifact>& artifacts,
                   json& summary) {
    // hpt-norm stability of bin projections across resolutions for a small
    // battery of test functions on a 4096 grid.
    const int n = 4096;
    struct TestFn {
        std::string name;
        std::function<double(double)> f;
    };
    std::vector<TestFn> fns{
        {"sin", [](double x) { return std::sin(kTwoPi * x); }},
        {"abs_sin", [](double x) { return std::abs(std::sin(kTwoPi * x)); }},
        {"step", [](double x) { return x < 0.5 ? 1.0 : 0.0; }},
        {"quadratic", [](double x) { return x * (1.0 - x); }},
        {"cusp", [](double x) { return std::sqrt(std::abs(x - 0.5)); }},
    };
    std::ostringstream csv;
    csv << "function,k,ratio\n";
    json rows = json::array();
    for (const TestFn& tf : fns) {
        GridFunction f = GridFunction::from(n, tf.f);
        double base_norm = hpt_norm(f, c.sobolev);
        for (int k = 4; k <= 1024; k *= 4) {
            BinnedDensity ek = conditional_expectation(f.samples, k);
            GridFunction g = binned_to_grid(ek, n);
            double ratio = hpt_norm(g, c.sobolev) / base_norm;
            csv << tf.name << ',' << k << ',' << io::fmt(ratio) << '\n';
            rows.push_back({{"function", tf.name}, {"k", k}, {"ratio", ratio}});
        }
    }
    artifacts.push_back({"norms_lab.csv", csv.str()});
    summary["rows"] = rows;
}

std::string timestamp_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct LockFile {
    fs::path path;
    bool held = false;

    explicit LockFile(const fs::path& dir) : path(dir / ".rand-acim.lock") {
        if (fs::exists(path))
            throw ConfigError("output dir is locked by another run: " + path.string());
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot create lock file " + path.string());
        held = true;
    }
    ~LockFile() {
        if (held) {
            std::error_code ec;
            fs::remove(path, ec);
        }
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random ACIM approximation experiments"};
    std::string experiment, config_path, out_dir;
    int k_flag = -1, modes_flag = -1, steps_flag = -1;
    bool plot_flag = false;
    app.add_option("experiment", experiment,
                   "one of: reproduce-figure ulam-sweep fourier-sweep convolution-study "
                   "static-study lyapunov validate-map norms-lab")
        ->required();
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--k", k_flag, "Ulam bin count override");
    app.add_option("--modes", modes_flag, "Galerkin mode cutoff override");
    app.add_option("--steps", steps_flag, "cocycle step count override");
    app.add_flag("--plot", plot_flag, "emit SVG line charts");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    static const std::vector<std::string> known{
        "reproduce-figure", "ulam-sweep",    "fourier-sweep", "convolution-study",
        "static-study",     "lyapunov",      "validate-map",  "norms-lab"};
    if (std::find(known.begin(), known.end(), experiment) == known.end()) {
        std::cerr << "unknown experiment: " << experiment << "\n\n" << app.help();
        return 2;
    }

    ExperimentConfig cfg;
    cfg.experiment = experiment;
    try {
        if (!config_path.empty()) load_config_file(cfg, config_path);
        // flags > file > defaults
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (k_flag > 0) cfg.k = k_flag;
        if (modes_flag > 0) cfg.modes = modes_flag;
        if (steps_flag > 0) cfg.steps = steps_flag;
        if (plot_flag) cfg.plot = true;
        cfg.sobolev.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        fs::create_directories(cfg.output_dir);
        LockFile lock(cfg.output_dir);

        json summary;
        summary["experiment"] = experiment;
        summary["config"] = config_echo(cfg);
        summary["timestamp"] = timestamp_now();
        summary["thresholds_note"] =
            "study thresholds are implementation-frozen regression values";

        std::vector<Artifact> artifacts;
        if (experiment == "reproduce-figure")
            run_reproduce_figure(cfg, artifacts, summary);
        else if (experiment == "ulam-sweep")
            run_ulam_sweep(cfg, artifacts, summary);
        else if (experiment == "fourier-sweep")
            run_fourier_sweep(cfg, artifacts, summary);
        else if (experiment == "convolution-study")
            run_convolution_study(cfg, artifacts, summary);
        else if (experiment == "static-study")
            run_static_study(cfg, artifacts, summary);
        else if (experiment == "lyapunov")
            run_lyapunov(cfg, artifacts, summary);
        else if (experiment == "validate-map")
            run_validate_map(cfg, artifacts, summary);
        else
            run_norms_lab(cfg, artifacts, summary);

        // Artifacts were buffered; a failure above leaves the directory clean.
        for (const Artifact& a : artifacts)
            io::write_text(cfg.output_dir / a.relpath, a.content);
        io::write_text(cfg.output_dir / "summary.json", summary.dump(2) + "\n");
        std::cout << experiment << ": wrote " << artifacts.size() + 1
                  << " artifacts to " << cfg.output_dir.string() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
