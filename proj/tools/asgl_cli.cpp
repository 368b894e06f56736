// Command-line front end: fit, grid-search, simulate, preprocess, cluster,
// stability. Configuration comes from a JSON file with --set overrides and
// ASGL_* environment variables; all artifacts land in --out.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "asgl/genomics.hpp"
#include "json.hpp"

using json = nlohmann::json;
using namespace asgl;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- config plumbing -------------------------------------------------------

json* resolve_path(json& root, const std::string& dotted, bool create) {
    json* cur = &root;
    std::stringstream ss(dotted);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!cur->contains(parts[i])) {
            if (!create) return nullptr;
            (*cur)[parts[i]] = json::object();
        }
        cur = &(*cur)[parts[i]];
    }
    if (!create && !cur->contains(parts.back())) return nullptr;
    return &(*cur)[parts.back()];
}

json parse_override_value(const std::string& s) {
    json v = json::parse(s, nullptr, false);
    if (v.is_discarded()) return json(s);  // fall back to a plain string
    return v;
}

json load_config(const std::string& path, const std::vector<std::string>& sets) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    json cfg = json::parse(in, nullptr, false);
    if (cfg.is_discarded())
        throw ValidationError("config is not valid JSON: " + path);
    if (!cfg.is_object()) throw ValidationError("config root must be an object");

    // environment overrides: ASGL_solver__tol_kkt=1e-6 sets solver.tol_kkt
    for (char** env = environ; *env; ++env) {
        std::string e(*env);
        if (e.rfind("ASGL_", 0) != 0) continue;
        auto eq = e.find('=');
        if (eq == std::string::npos) continue;
        std::string key = e.substr(5, eq - 5);
        std::string dotted;
        for (std::size_t i = 0; i < key.size(); ++i) {
            if (key[i] == '_' && i + 1 < key.size() && key[i + 1] == '_') {
                dotted += '.';
                ++i;
            } else {
                dotted += key[i];
            }
        }
        *resolve_path(cfg, dotted, true) = parse_override_value(e.substr(eq + 1));
    }
    for (const auto& s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ValidationError("--set expects key=value, got: " + s);
        *resolve_path(cfg, s.substr(0, eq), true) =
            parse_override_value(s.substr(eq + 1));
    }
    return cfg;
}

// typed getters that name the offending field
double get_number(const json& j, const std::string& field, double dflt) {
    const json* v = resolve_path(const_cast<json&>(j), field, false);
    if (!v) return dflt;
    if (!v->is_number())
        throw ValidationError("field '" + field + "' must be a number");
    return v->get<double>();
}

double require_number(const json& j, const std::string& field) {
    const json* v = resolve_path(const_cast<json&>(j), field, false);
    if (!v) throw ValidationError("missing required field '" + field + "'");
    if (!v->is_number())
        throw ValidationError("field '" + field + "' must be a number");
    return v->get<double>();
}

std::string get_string(const json& j, const std::string& field,
                       const std::string& dflt) {
    const json* v = resolve_path(const_cast<json&>(j), field, false);
    if (!v) return dflt;
    if (!v->is_string())
        throw ValidationError("field '" + field + "' must be a string");
    return v->get<std::string>();
}

std::string require_string(const json& j, const std::string& field) {
    const json* v = resolve_path(const_cast<json&>(j), field, false);
    if (!v) throw ValidationError("missing required field '" + field + "'");
    if (!v->is_string())
        throw ValidationError("field '" + field + "' must be a string");
    return v->get<std::string>();
}

bool get_bool(const json& j, const std::string& field, bool dflt) {
    const json* v = resolve_path(const_cast<json&>(j), field, false);
    if (!v) return dflt;
    if (!v->is_boolean())
        throw ValidationError("field '" + field + "' must be a boolean");
    return v->get<bool>();
}

std::vector<double> get_number_list(const json& j, const std::string& field,
                                    std::vector<double> dflt) {
    const json* v = resolve_path(const_cast<json&>(j), field, false);
    if (!v) return dflt;
    if (!v->is_array())
        throw ValidationError("field '" + field + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
        if (!e.is_number())
            throw ValidationError("field '" + field + "' must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

// ---- shared assembly -------------------------------------------------------

double checked_tau(const json& cfg) {
    double tau = get_number(cfg, "tau", 0.5);
    if (!(tau > 0.0 && tau < 1.0))
        throw ValidationError("field 'tau' must lie in (0,1)");
    return tau;
}

SolverOptions solver_options(const json& cfg) {
    SolverOptions o;
    o.max_iter = int(get_number(cfg, "solver.max_iter", o.max_iter));
    o.tol_kkt = get_number(cfg, "solver.tol_kkt", o.tol_kkt);
    o.rho = get_number(cfg, "solver.rho", o.rho);
    if (o.max_iter < 1) throw ValidationError("field 'solver.max_iter' must be >= 1");
    if (!(o.tol_kkt > 0)) throw ValidationError("field 'solver.tol_kkt' must be > 0");
    if (!(o.rho > 0)) throw ValidationError("field 'solver.rho' must be > 0");
    return o;
}

Dataset load_data(const json& cfg) {
    std::string path = require_string(cfg, "data.path");
    if (!std::filesystem::exists(path))
        throw ValidationError("data file does not exist: " + path);
    return load_csv(path, get_bool(cfg, "data.has_header", true),
                    get_string(cfg, "data.response", "y"));
}

GroupStructure load_group_structure(const json& cfg, const Dataset& d) {
    std::string path = get_string(cfg, "groups_path", "");
    if (path.empty()) return GroupStructure::trivial(int(d.p()));
    if (!std::filesystem::exists(path))
        throw ValidationError("group file does not exist: " + path);
    return load_groups(path, d);
}

ModelConfig model_by_name(const std::string& name, const json& cfg) {
    ModelConfig m;
    std::vector<double> alphas = get_number_list(cfg, "grid.alphas", {});
    std::vector<double> gammas = get_number_list(cfg, "grid.gammas", {});
    if (name == "lasso")
        m = lasso_model();
    else if (name == "sgl")
        m = sgl_model(alphas);
    else if (name.rfind("asgl_", 0) == 0)
        m = asgl_model(weight_kind_from_string(name.substr(5)), alphas, gammas);
    else if (name.rfind("alsgl_", 0) == 0)
        m = alsgl_model(weight_kind_from_string(name.substr(6)), alphas, gammas);
    else
        throw ValidationError("unknown model name '" + name + "'");
    m.n_lambdas = int(get_number(cfg, "grid.n_lambdas", 20));
    m.lambda_min_ratio = get_number(cfg, "grid.lambda_min_ratio", 1e-3);
    if (m.n_lambdas < 1)
        throw ValidationError("field 'grid.n_lambdas' must be >= 1");
    m.grid.variance_threshold_pct =
        get_number(cfg, "grid.variance_threshold_pct", 80.0);
    return m;
}

std::vector<ModelConfig> model_list(const json& cfg) {
    const json* v = resolve_path(const_cast<json&>(cfg), "models", false);
    if (!v || !v->is_array() || v->empty())
        throw ValidationError("field 'models' must be a nonempty array of names");
    std::vector<ModelConfig> out;
    for (const auto& e : *v) {
        if (!e.is_string())
            throw ValidationError("field 'models' must contain strings");
        out.push_back(model_by_name(e.get<std::string>(), cfg));
    }
    return out;
}

// ---- output helpers --------------------------------------------------------

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void write_json(const std::filesystem::path& path, const json& j) {
    write_file(path, j.dump(2) + "\n");
}

std::string metrics_csv_header() {
    return "dist,Et,csr,tpr,tnr";
}

std::string metrics_csv_row(const MetricsReport& m) {
    return fmt(m.dist) + "," + fmt(m.Et) + "," + fmt(m.csr) + "," + fmt(m.tpr) +
           "," + fmt(m.tnr);
}

// Standalone SVG box plot of per-model Et distributions, data embedded in a
// comment so the artifact is self-describing and diffable.
std::string boxplot_svg(const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& values) {
    const int W = 120 * int(names.size()) + 80, H = 320;
    double lo = 1e300, hi = -1e300;
    for (const auto& vs : values)
        for (double v : vs) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!(hi > lo)) {
        hi = lo + 1.0;
    }
    auto ypix = [&](double v) { return 20.0 + (hi - v) / (hi - lo) * (H - 60); };
    std::ostringstream s;
    s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
      << H << "'>\n<!-- data:\n";
    for (std::size_t m = 0; m < names.size(); ++m) {
        s << names[m] << ":";
        for (double v : values[m]) s << " " << fmt(v);
        s << "\n";
    }
    s << "-->\n";
    for (std::size_t m = 0; m < names.size(); ++m) {
        std::vector<double> v = values[m];
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        auto q = [&](double f) {
            double pos = f * double(v.size() - 1);
            auto i = std::size_t(pos);
            auto k = std::min(i + 1, v.size() - 1);
            return v[i] + (pos - double(i)) * (v[k] - v[i]);
        };
        double x = 80.0 + 120.0 * double(m);
        double q1 = q(0.25), q2 = q(0.5), q3 = q(0.75);
        s << "<line x1='" << x << "' y1='" << ypix(v.front()) << "' x2='" << x
          << "' y2='" << ypix(v.back()) << "' stroke='black'/>\n";
        s << "<rect x='" << x - 30 << "' y='" << ypix(q3) << "' width='60' height='"
          << ypix(q1) - ypix(q3) << "' fill='none' stroke='black'/>\n";
        s << "<line x1='" << x - 30 << "' y1='" << ypix(q2) << "' x2='" << x + 30
          << "' y2='" << ypix(q2) << "' stroke='black' stroke-width='2'/>\n";
        s << "<text x='" << x << "' y='" << H - 10
          << "' text-anchor='middle' font-size='12'>" << names[m] << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

// ---- subcommands -----------------------------------------------------------

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned threads = 0;
    std::vector<std::string> sets;

    json config() const {
        json cfg = load_config(config_path, sets);
        if (seed_set) cfg["seed"] = seed;
        return cfg;
    }
    std::filesystem::path out() const {
        std::filesystem::create_directories(out_dir);
        return out_dir;
    }
};

int cmd_fit(const CommonArgs& args) {
    json cfg = args.config();
    Dataset d = load_data(cfg);
    GroupStructure groups = load_group_structure(cfg, d);
    double tau = checked_tau(cfg);
    double lambda = require_number(cfg, "penalty.lambda");
    double alpha = get_number(cfg, "penalty.alpha", 1.0);
    if (!(lambda >= 0)) throw ValidationError("field 'penalty.lambda' must be >= 0");
    if (!(alpha >= 0 && alpha <= 1))
        throw ValidationError("field 'penalty.alpha' must lie in [0,1]");
    SolverOptions opts = solver_options(cfg);

    StandardizeParams par;
    if (get_bool(cfg, "standardize", false)) std::tie(d, par) = standardize(d);

    WeightScheme scheme;
    scheme.kind = weight_kind_from_string(
        get_string(cfg, "penalty.weights.scheme", "none"));
    scheme.gamma1 = get_number(cfg, "penalty.weights.gamma1", 1.0);
    scheme.gamma2 = get_number(cfg, "penalty.weights.gamma2", 1.0);
    scheme.variance_threshold_pct =
        get_number(cfg, "penalty.weights.variance_threshold_pct", 80.0);
    Weights wt = compute_weights(d, QuantileLevel(tau), groups, scheme, opts);

    PenaltySpec spec(lambda, alpha, wt.w, wt.v, groups);
    FitResult fr;
    double intercept = 0.0;
    if (get_bool(cfg, "intercept", false))
        std::tie(fr, intercept) = fit_with_intercept(d, QuantileLevel(tau), spec, opts);
    else
        fr = fit(d, QuantileLevel(tau), spec, opts);

    json out = {{"objective", fr.objective},
                {"kkt_residual", fr.kkt_residual},
                {"iterations", fr.iterations},
                {"converged", fr.converged},
                {"intercept", intercept},
                {"lambda", lambda},
                {"alpha", alpha},
                {"tau", tau}};
    out["beta"] = std::vector<double>(fr.beta_hat.data(),
                                      fr.beta_hat.data() + fr.beta_hat.size());
    write_json(args.out() / "fit.json", out);

    std::string csv = "feature,coefficient\n";
    for (Eigen::Index j = 0; j < fr.beta_hat.size(); ++j) {
        std::string name = d.feature_names.empty() ? std::to_string(j)
                                                   : d.feature_names[j];
        csv += name + "," + fmt(fr.beta_hat(j)) + "\n";
    }
    write_file(args.out() / "coefficients.csv", csv);
    return 0;
}

int cmd_grid_search(const CommonArgs& args) {
    json cfg = args.config();
    Dataset d = load_data(cfg);
    GroupStructure groups = load_group_structure(cfg, d);
    double tau = checked_tau(cfg);
    SolverOptions opts = solver_options(cfg);
    std::uint64_t seed = std::uint64_t(get_number(cfg, "seed", 0));

    SplitSpec sp;
    sp.n_train = Eigen::Index(require_number(cfg, "split.n_train"));
    sp.n_val = Eigen::Index(require_number(cfg, "split.n_val"));
    sp.n_test = Eigen::Index(get_number(cfg, "split.n_test", 0));
    sp.seed = seed;
    Split parts = split(d, sp);

    Grid grid;
    grid.lambdas = get_number_list(cfg, "grid.lambdas", {});
    if (grid.lambdas.empty()) {
        double lmax = lambda_max(parts.train, QuantileLevel(tau));
        if (lmax <= 0) lmax = 1.0;
        int nl = int(get_number(cfg, "grid.n_lambdas", 20));
        double ratio = get_number(cfg, "grid.lambda_min_ratio", 1e-3);
        for (int i = 0; i < nl; ++i)
            grid.lambdas.push_back(lmax *
                                   std::pow(ratio, double(i) / std::max(1, nl - 1)));
    }
    grid.alphas = get_number_list(cfg, "grid.alphas", {1.0});
    grid.gamma1s = get_number_list(cfg, "grid.gamma1s", {0.0, 0.5, 1.0, 1.5, 2.0});
    grid.gamma2s = get_number_list(cfg, "grid.gamma2s", {0.0, 0.5, 1.0, 1.5, 2.0});
    grid.group_weights = get_bool(cfg, "grid.group_weights", true);
    grid.variance_threshold_pct = get_number(cfg, "grid.variance_threshold_pct", 80.0);
    const json* schemes = resolve_path(cfg, "grid.schemes", false);
    if (schemes) {
        if (!schemes->is_array())
            throw ValidationError("field 'grid.schemes' must be an array");
        grid.schemes.clear();
        for (const auto& e : *schemes)
            grid.schemes.push_back(weight_kind_from_string(e.get<std::string>()));
    }
    try {
        grid.validate();
    } catch (const std::exception& e) {
        throw ValidationError(std::string("grid: ") + e.what());
    }

    GridSearchResult r = grid_search(parts.train, parts.val, QuantileLevel(tau),
                                     groups, grid, opts, args.threads);

    json best = {{"lambda", r.best_combo.lambda},
                 {"alpha", r.best_combo.alpha},
                 {"gamma1", r.best_combo.gamma1},
                 {"gamma2", r.best_combo.gamma2},
                 {"scheme", to_string(r.best_combo.scheme)},
                 {"val_error", r.best_val_error},
                 {"objective", r.best_fit.objective},
                 {"converged", r.best_fit.converged}};
    if (parts.test.n() > 0)
        best["test_error"] =
            quantile_error(r.best_fit.beta_hat, parts.test, QuantileLevel(tau));
    best["beta"] = std::vector<double>(
        r.best_fit.beta_hat.data(),
        r.best_fit.beta_hat.data() + r.best_fit.beta_hat.size());
    write_json(args.out() / "best.json", best);

    std::string csv = "lambda,alpha,gamma1,gamma2,scheme,val_error,converged\n";
    for (const auto& row : r.table)
        csv += fmt(row.combo.lambda) + "," + fmt(row.combo.alpha) + "," +
               fmt(row.combo.gamma1) + "," + fmt(row.combo.gamma2) + "," +
               to_string(row.combo.scheme) + "," + fmt(row.val_error) + "," +
               (row.converged ? "1" : "0") + "\n";
    write_file(args.out() / "table.csv", csv);
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    json cfg = args.config();
    std::string name = require_string(cfg, "scenario");
    Scenario sc;
    if (name == "custom") {
        sc.K = int(require_number(cfg, "custom.K"));
        sc.group_size = int(require_number(cfg, "custom.group_size"));
        std::vector<double> bt = get_number_list(cfg, "custom.beta_true", {});
        if (int(bt.size()) != sc.K * sc.group_size)
            throw ValidationError(
                "field 'custom.beta_true' must have K*group_size entries");
        sc.beta_true = Eigen::Map<Vector>(bt.data(), Eigen::Index(bt.size()));
        sc.rho_within = get_number(cfg, "custom.rho_within", 0.5);
        sc.sizes.n_train = Eigen::Index(get_number(cfg, "custom.n_train", 100));
        sc.sizes.n_val = Eigen::Index(get_number(cfg, "custom.n_val", 100));
        sc.sizes.n_test = Eigen::Index(get_number(cfg, "custom.n_test", 5000));
    } else {
        try {
            sc = Scenario::by_name(name);
        } catch (const std::exception& e) {
            throw ValidationError(e.what());
        }
    }
    int reps = int(get_number(cfg, "repetitions", 0));
    if (reps < 1) throw ValidationError("field 'repetitions' must be >= 1");
    double tau = checked_tau(cfg);
    std::uint64_t seed = std::uint64_t(get_number(cfg, "seed", 0));
    SolverOptions opts = solver_options(cfg);
    std::vector<ModelConfig> models = model_list(cfg);

    ExperimentResult r =
        run_experiment(sc, models, reps, seed, tau, opts, args.threads);

    std::string rep_csv = "repetition,model," + metrics_csv_header() +
                          ",lambda,alpha,gamma1,gamma2,ok,error\n";
    for (const auto& row : r.rows)
        rep_csv += std::to_string(row.repetition) + "," + row.model + "," +
                   metrics_csv_row(row.m) + "," + fmt(row.selected.lambda) + "," +
                   fmt(row.selected.alpha) + "," + fmt(row.selected.gamma1) + "," +
                   fmt(row.selected.gamma2) + "," + (row.ok ? "1" : "0") + "," +
                   row.error + "\n";
    write_file(args.out() / "repetitions.csv", rep_csv);

    std::string sum_csv =
        "model,mean_dist,sd_dist,mean_Et,sd_Et,mean_csr,sd_csr,mean_tpr,sd_tpr,"
        "mean_tnr,sd_tnr,repetitions_used,failures\n";
    for (const auto& s : r.summaries)
        sum_csv += s.model + "," + fmt(s.mean.dist) + "," + fmt(s.sd.dist) + "," +
                   fmt(s.mean.Et) + "," + fmt(s.sd.Et) + "," + fmt(s.mean.csr) +
                   "," + fmt(s.sd.csr) + "," + fmt(s.mean.tpr) + "," +
                   fmt(s.sd.tpr) + "," + fmt(s.mean.tnr) + "," + fmt(s.sd.tnr) +
                   "," + std::to_string(s.repetitions_used) + "," +
                   std::to_string(s.failures) + "\n";
    write_file(args.out() / "summary.csv", sum_csv);

    if (get_bool(cfg, "plots", true)) {
        std::vector<std::string> names;
        std::vector<std::vector<double>> et;
        for (const auto& s : r.summaries) {
            names.push_back(s.model);
            std::vector<double> vals;
            for (const auto& row : r.rows)
                if (row.model == s.model && row.ok) vals.push_back(row.m.Et);
            et.push_back(std::move(vals));
        }
        write_file(args.out() / "test_error_boxplot.svg", boxplot_svg(names, et));
    }
    return 0;
}

int cmd_preprocess(const CommonArgs& args) {
    json cfg = args.config();
    Dataset d = load_data(cfg);
    PreprocessSpec spec;
    spec.expression_percentile =
        get_number(cfg, "preprocess.expression_percentile", 25.0);
    spec.fold_variation_min = get_number(cfg, "preprocess.fold_variation_min", 2.0);
    spec.abs_correlation_min =
        get_number(cfg, "preprocess.abs_correlation_min", 0.5);
    spec.log_scale = get_bool(cfg, "preprocess.log_scale", true);
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw ValidationError(std::string("preprocess: ") + e.what());
    }

    PreprocessResult r = preprocess(d, spec);
    std::string csv;
    for (std::size_t c = 0; c < r.kept.size(); ++c) {
        csv += r.data.feature_names.empty() ? "x" + std::to_string(r.kept[c])
                                            : r.data.feature_names[c];
        csv += ",";
    }
    csv += "y\n";
    for (Eigen::Index i = 0; i < r.data.n(); ++i) {
        for (Eigen::Index j = 0; j < r.data.p(); ++j) csv += fmt(r.data.X(i, j)) + ",";
        csv += fmt(r.data.y(i)) + "\n";
    }
    write_file(args.out() / "preprocessed.csv", csv);

    std::string kept = "kept_index\n";
    for (int k : r.kept) kept += std::to_string(k) + "\n";
    write_file(args.out() / "kept_indices.csv", kept);
    return 0;
}

int cmd_cluster(const CommonArgs& args) {
    json cfg = args.config();
    Dataset d = load_data(cfg);
    if (get_bool(cfg, "standardize", true)) d = standardize(d).first;
    GroupStructure g = pca_cluster(d.X);
    std::string csv = "feature,group\n";
    for (int j = 0; j < g.p(); ++j) {
        std::string name =
            d.feature_names.empty() ? std::to_string(j) : d.feature_names[j];
        csv += name + "," + std::to_string(g.group_of[j]) + "\n";
    }
    write_file(args.out() / "groups.csv", csv);
    json meta = {{"K", g.K}, {"p", g.p()}};
    write_json(args.out() / "cluster.json", meta);
    return 0;
}

int cmd_stability(const CommonArgs& args) {
    json cfg = args.config();
    Dataset d = load_data(cfg);
    GroupStructure groups = load_group_structure(cfg, d);
    if (get_string(cfg, "groups_path", "").empty() &&
        get_bool(cfg, "cluster_groups", false))
        groups = pca_cluster(d.X);

    std::vector<double> taus = get_number_list(cfg, "taus", {0.3, 0.5, 0.7});
    for (double t : taus)
        if (!(t > 0 && t < 1))
            throw ValidationError("field 'taus' entries must lie in (0,1)");
    int reps = int(get_number(cfg, "repetitions", 0));
    if (reps < 1) throw ValidationError("field 'repetitions' must be >= 1");
    SplitSpec sp;
    sp.n_train = Eigen::Index(require_number(cfg, "split.n_train"));
    sp.n_val = Eigen::Index(require_number(cfg, "split.n_val"));
    sp.n_test = Eigen::Index(get_number(cfg, "split.n_test", 0));
    std::uint64_t seed = std::uint64_t(get_number(cfg, "seed", 0));
    SolverOptions opts = solver_options(cfg);
    std::vector<ModelConfig> models = model_list(cfg);

    StabilityReport rep = stability_analysis(d, groups, taus, models, reps, sp,
                                             seed, opts, args.threads);

    // probability matrix: one row per (model, tau)
    std::string csv = "model,tau";
    for (int j = 0; j < d.p(); ++j)
        csv += "," + (d.feature_names.empty() ? "x" + std::to_string(j)
                                              : d.feature_names[j]);
    csv += "\n";
    for (std::size_t mi = 0; mi < models.size(); ++mi)
        for (std::size_t ti = 0; ti < taus.size(); ++ti) {
            csv += rep.model_names[mi] + "," + fmt(taus[ti]);
            for (int j = 0; j < d.p(); ++j)
                csv += "," + fmt(rep.selection_probability[mi][ti](j));
            csv += "\n";
        }
    write_file(args.out() / "selection_probabilities.csv", csv);

    std::string thr = "model,tau,n_above_threshold,variables\n";
    for (std::size_t mi = 0; mi < models.size(); ++mi)
        for (std::size_t ti = 0; ti < taus.size(); ++ti) {
            thr += rep.model_names[mi] + "," + fmt(taus[ti]) + "," +
                   std::to_string(rep.thresholded[mi][ti].size()) + ",";
            for (std::size_t k = 0; k < rep.thresholded[mi][ti].size(); ++k)
                thr += (k ? ";" : "") + std::to_string(rep.thresholded[mi][ti][k]);
            thr += "\n";
        }
    write_file(args.out() / "thresholded.csv", thr);

    std::string inter = "model,n_common,variables\n";
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
        inter += rep.model_names[mi] + "," +
                 std::to_string(rep.cross_tau_intersection[mi].size()) + ",";
        for (std::size_t k = 0; k < rep.cross_tau_intersection[mi].size(); ++k)
            inter += (k ? ";" : "") + std::to_string(rep.cross_tau_intersection[mi][k]);
        inter += "\n";
    }
    write_file(args.out() / "cross_tau_intersection.csv", inter);

    json meta = {{"repetitions", rep.repetitions},
                 {"failures", rep.failures},
                 {"probability_threshold", rep.probability_threshold}};
    write_json(args.out() / "stability.json", meta);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive sparse group LASSO for quantile regression"};
    app.require_subcommand(1);

    CommonArgs args;
    for (auto* name : {"fit", "grid-search", "simulate", "preprocess", "cluster",
                       "stability"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", args.config_path, "JSON config file")
            ->required();
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--seed", args.seed, "seed override")
            ->each([&](const std::string&) { args.seed_set = true; });
        sub->add_option("--threads", args.threads, "worker threads (0 = all cores)");
        sub->add_option("--set", args.sets, "config override key=value");
    }

    CLI11_PARSE(app, argc, argv);
    std::string cmd = app.get_subcommands().front()->get_name();

    try {
        if (cmd == "fit") return cmd_fit(args);
        if (cmd == "grid-search") return cmd_grid_search(args);
        if (cmd == "simulate") return cmd_simulate(args);
        if (cmd == "preprocess") return cmd_preprocess(args);
        if (cmd == "cluster") return cmd_cluster(args);
        if (cmd == "stability") return cmd_stability(args);
    } catch (const ValidationError& e) {
        json err = {{"error", e.what()}, {"kind", "validation"}};
        std::cerr << err.dump() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        json err = {{"error", e.what()}, {"kind", "validation"}};
        std::cerr << err.dump() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        json err = {{"error", e.what()}, {"kind", "runtime"}};
        std::cerr << err.dump() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
