// nbrshap: batch CLI over the attribution engine.
//
//   nbrshap explain|sweep|smooth|audit|bench --config <path> [--seed N]
//           [--out <path>] [--threads N]
//   nbrshap gen --kind ring|normal|uniform --n N [--m M] [--out <path>] ...
//
// Config files are plain `key = value` lines ('#' comments); the README
// documents every key. Exit codes: 0 ok, 2 config error, 3 black-box
// failure, 4 estimator error.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nbrshap/builtins.hpp"
#include "nbrshap/csv.hpp"
#include "nbrshap/estimators.hpp"
#include "nbrshap/fidelity.hpp"
#include "nbrshap/manifold.hpp"
#include "nbrshap/smoothing.hpp"
#include "nbrshap/subprocess.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace nbrshap;

namespace {

// ---------------------------------------------------------------------------
// config file

struct ConfigFile {
    std::map<std::string, std::string> kv;
    std::string path;

    bool has(const std::string& key) const { return kv.contains(key); }

    std::string get(const std::string& key) const {
        const auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError("config: missing key '" + key + "'");
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }

    double get_double(const std::string& key) const {
        try {
            return std::stod(get(key));
        } catch (const std::logic_error&) {
            throw ConfigError("config: key '" + key + "' is not a number");
        }
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        try {
            return std::stoull(get(key));
        } catch (const std::logic_error&) {
            throw ConfigError("config: key '" + key + "' is not an integer");
        }
    }

    bool get_flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto v = get(key);
        if (v == "on" || v == "true" || v == "1") return true;
        if (v == "off" || v == "false" || v == "0") return false;
        throw ConfigError("config: key '" + key + "' must be on/off");
    }
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

ConfigFile load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ConfigFile cfg;
    cfg.path = path;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto text = trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: expected key = value on line " +
                              std::to_string(line_no));
        }
        cfg.kv[trim(text.substr(0, eq))] = trim(text.substr(eq + 1));
    }
    return cfg;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::logic_error&) {
            throw ConfigError("config: bad number '" + tok + "' in key '" + key + "'");
        }
    }
    if (out.empty()) throw ConfigError("config: empty list in key '" + key + "'");
    return out;
}

std::vector<std::size_t> parse_size_list(const ConfigFile& cfg, const std::string& key) {
    std::vector<std::size_t> out;
    for (double v : parse_double_list(cfg.get(key), key)) {
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

// FNV-1a over the canonical resolved key=value list; embedded in every
// record so a run can be tied back to its exact configuration.
std::string config_hash(const ConfigFile& cfg, const std::string& command,
                        std::uint64_t seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto eat = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0x1f;
        h *= 0x100000001b3ULL;
    };
    eat(command);
    eat(std::to_string(seed));
    for (const auto& [k, v] : cfg.kv) {
        if (k == "seed" || k == "out") continue;  // resolved separately
        eat(k);
        eat(v);
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// resolved run pieces

struct Run {
    ConfigFile cfg;
    std::string command;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::optional<Dataset> refs;
    std::unique_ptr<BlackBox> bb;
    std::string blackbox_desc;
    std::optional<Instance> x;
    std::string instance_desc;
    std::string hash;
};

Dataset load_dataset(const ConfigFile& cfg) {
    // relative paths resolve against the config file's directory
    const fs::path base = fs::path(cfg.path).parent_path();
    auto resolve = [&](const fs::path& p) { return p.is_absolute() ? p : base / p; };
    const fs::path csv = resolve(cfg.get("dataset"));
    std::optional<fs::path> schema;
    if (cfg.has("schema")) {
        schema = resolve(cfg.get("schema"));
    } else if (fs::exists(csv.string() + ".schema")) {
        schema = fs::path(csv.string() + ".schema");
    }
    if (!fs::exists(csv)) throw ConfigError("dataset not found: " + csv.string());
    return read_dataset_csv(csv, schema);
}

std::unique_ptr<BlackBox> make_blackbox(const ConfigFile& cfg, const Dataset& refs,
                                        std::string& desc) {
    const std::string spec = cfg.get("blackbox");
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("blackbox: expected builtin:<name> or external:<command>");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    desc = spec;
    if (kind == "builtin") {
        BuiltinSpec b{rest, {}};
        if (cfg.has("blackbox_params")) {
            b.params = parse_double_list(cfg.get("blackbox_params"), "blackbox_params");
        }
        if (!is_builtin_name(b.name)) throw ConfigError("unknown builtin: " + b.name);
        const std::size_t arity = builtin_arity(b);
        if (arity != 0 && arity != refs.n_features()) {
            throw ConfigError("builtin '" + b.name + "' expects " + std::to_string(arity) +
                              " features, dataset has " + std::to_string(refs.n_features()));
        }
        return make_builtin(b);
    }
    if (kind == "external") {
        return std::make_unique<SubprocessBlackBox>(rest);
    }
    throw ConfigError("blackbox: unknown source '" + kind + "'");
}

Instance resolve_instance(const ConfigFile& cfg, const Dataset& refs, std::string& desc) {
    const std::string spec = cfg.get("instance");
    desc = spec;
    if (spec.rfind("row:", 0) == 0) {
        std::size_t row = 0;
        try {
            row = std::stoull(spec.substr(4));
        } catch (const std::logic_error&) {
            throw ConfigError("instance: bad row index in '" + spec + "'");
        }
        if (row >= refs.n_rows()) {
            throw ConfigError("instance: row " + std::to_string(row) + " out of range (L=" +
                              std::to_string(refs.n_rows()) + ")");
        }
        return refs.instance(row);
    }
    if (spec.rfind("values:", 0) == 0) {
        Instance x{parse_double_list(spec.substr(7), "instance")};
        check_same_width(x.size(), refs.n_features(), "instance");
        for (double v : x.values) {
            if (!std::isfinite(v)) throw ConfigError("instance: values must be finite");
        }
        return x;
    }
    throw ConfigError("instance: expected row:<idx> or values:<v1,v2,...>");
}

KernelSpec::SubsetMode subset_mode_of(const ConfigFile& cfg) {
    const auto mode = cfg.get_or("subset_mode", "full_vector");
    if (mode == "full_vector") return KernelSpec::SubsetMode::full_vector;
    if (mode == "dropped_only") return KernelSpec::SubsetMode::dropped_only;
    throw ConfigError("subset_mode: expected full_vector or dropped_only");
}

// sigma resolution; `auto` runs the quartile-mass bandwidth selector.
struct SigmaChoice {
    KernelSpec spec;
    bool auto_selected = false;
    bool saturated = false;
};

SigmaChoice resolve_sigma(const ConfigFile& cfg, const Dataset& refs, const Instance& x) {
    const std::string text = cfg.get("sigma");
    const auto mode = subset_mode_of(cfg);
    if (text == "auto") {
        const auto grid = sweep_grid(refs.n_features(), 25);
        const auto choice = select_bandwidth(x, refs, grid);
        return {KernelSpec::scalar(choice.sigma, mode), true, choice.saturated};
    }
    const auto values = parse_double_list(text, "sigma");
    if (values.size() == 1) return {KernelSpec::scalar(values[0], mode), false, false};
    check_same_width(values.size(), refs.n_features(), "sigma");
    return {KernelSpec::diagonal(values, mode), false, false};
}

Weighting resolve_weighting(const ConfigFile& cfg, const Dataset& refs, const Instance& x,
                            SigmaChoice* sigma_out = nullptr) {
    const std::string w = cfg.get_or("weighting", "uniform");
    if (w == "uniform") return Weighting::uniform();
    const SigmaChoice sigma = resolve_sigma(cfg, refs, x);
    if (sigma_out) *sigma_out = sigma;
    if (w == "neighbourhood") return Weighting::neighbourhood(sigma.spec);
    if (w == "anti") return Weighting::anti(sigma.spec);
    throw ConfigError("weighting: expected uniform, neighbourhood or anti");
}

EstimatorConfig resolve_estimator(const Run& run, const Weighting& weighting) {
    EstimatorConfig cfg;
    const std::string mode = run.cfg.get_or("mode", "exact");
    if (mode == "exact") cfg.mode = EstimatorMode::exact;
    else if (mode == "formula_mc") cfg.mode = EstimatorMode::formula_mc;
    else if (mode == "kernelshap") cfg.mode = EstimatorMode::kernel_shap;
    else throw ConfigError("mode: expected exact, formula_mc or kernelshap");
    cfg.weighting = weighting;
    cfg.n_coalitions = static_cast<std::size_t>(run.cfg.get_u64("coalitions", 0));
    if (cfg.mode != EstimatorMode::exact && cfg.n_coalitions == 0) {
        throw ConfigError("config: 'coalitions' required for mode " + mode);
    }
    cfg.seed = run.seed;
    cfg.compute_variance = run.cfg.get_flag("variance", cfg.mode == EstimatorMode::exact);
    cfg.threads = run.threads;
    return cfg;
}

Normalisation resolve_normalisation(const ConfigFile& cfg) {
    const auto n = cfg.get_or("normalisation", "none");
    if (n == "none") return Normalisation::none;
    if (n == "by_std") return Normalisation::by_std;
    if (n == "by_abs_sum") return Normalisation::by_abs_sum;
    throw ConfigError("normalisation: expected none, by_std or by_abs_sum");
}

void write_text(const std::optional<std::string>& out, const std::string& text) {
    if (!out) {
        std::cout << text;
        return;
    }
    std::ofstream f(*out, std::ios::binary);
    if (!f) throw ConfigError("cannot write output: " + *out);
    f << text;
}

json attribution_json(const Run& run, const Attribution& attr, Normalisation norm,
                      const SigmaChoice& sigma) {
    json rec;
    rec["command"] = run.command;
    rec["config_hash"] = run.hash;
    rec["seed"] = run.seed;
    rec["dataset"] = run.cfg.get_or("dataset", "");
    rec["instance"] = {{"selector", run.instance_desc}, {"values", run.x->values}};
    rec["blackbox"] = run.blackbox_desc;
    json est;
    est["id"] = attr.meta.estimator;
    est["coalitions"] = attr.meta.n_coalitions;
    est["n_refs"] = attr.meta.n_refs;
    if (!attr.meta.bandwidths.empty()) est["sigma"] = attr.meta.bandwidths;
    est["subset_mode"] = run.cfg.get_or("subset_mode", "full_vector");
    rec["estimator"] = est;
    rec["feature_names"] = run.refs->names();
    rec["phi"] = attr.phi;
    rec["phi0"] = attr.phi0;
    rec["sum_phi"] = attr.sum();
    if (attr.variance) rec["variance"] = *attr.variance;
    rec["eval_count"] = attr.meta.eval_count;
    switch (norm) {
        case Normalisation::none: rec["normalisation"] = "none"; break;
        case Normalisation::by_std: rec["normalisation"] = "by_std"; break;
        case Normalisation::by_abs_sum: rec["normalisation"] = "by_abs_sum"; break;
    }
    rec["flags"] = {{"pinv_fallback", attr.meta.pinv_fallback},
                    {"zero_variance_features", run.refs->has_zero_variance_features()},
                    {"bandwidth_auto", sigma.auto_selected},
                    {"bandwidth_saturated", sigma.saturated}};
    return rec;
}

// ---------------------------------------------------------------------------
// commands

int cmd_explain(Run& run, const std::optional<std::string>& out) {
    SigmaChoice sigma;
    const auto weighting = resolve_weighting(run.cfg, *run.refs, *run.x, &sigma);
    const auto est = resolve_estimator(run, weighting);
    const auto norm = resolve_normalisation(run.cfg);
    EvalLedger ledger;
    Attribution attr = explain(*run.bb, ledger, *run.x, *run.refs, est);
    normalise_attribution(attr, norm);
    write_text(out, attribution_json(run, attr, norm, sigma).dump(2) + "\n");
    return 0;
}

std::vector<double> resolve_grid(const Run& run) {
    const std::string text = run.cfg.get_or("grid", "auto:25");
    if (text.rfind("auto", 0) == 0) {
        std::size_t k = 25;
        const auto colon = text.find(':');
        if (colon != std::string::npos) k = std::stoull(text.substr(colon + 1));
        return sweep_grid(run.refs->n_features(), k);
    }
    return parse_double_list(text, "grid");
}

int cmd_sweep(Run& run, const std::optional<std::string>& out) {
    const auto grid = resolve_grid(run);
    const auto norm = resolve_normalisation(run.cfg);
    const auto mode = subset_mode_of(run.cfg);
    const std::string w = run.cfg.get_or("weighting", "neighbourhood");
    if (w != "neighbourhood" && w != "anti") {
        throw ConfigError("sweep: weighting must be neighbourhood or anti");
    }
    EvalLedger ledger;  // shared across the grid: no re-evaluations
    std::ostringstream csv;
    csv << "sigma,feature,phi,variance,phi0,sum_phi,eval_count,config_hash,seed\n";
    for (const double sigma : grid) {
        const auto spec = KernelSpec::scalar(sigma, mode);
        const auto weighting =
            w == "anti" ? Weighting::anti(spec) : Weighting::neighbourhood(spec);
        auto est = resolve_estimator(run, weighting);
        if (w == "anti") est.compute_variance = false;
        Attribution attr = explain(*run.bb, ledger, *run.x, *run.refs, est);
        normalise_attribution(attr, norm);
        for (std::size_t j = 0; j < attr.phi.size(); ++j) {
            csv << format_g17(sigma) << ',' << run.refs->name(j) << ','
                << format_g17(attr.phi[j]) << ','
                << (attr.variance ? format_g17((*attr.variance)[j]) : "") << ','
                << format_g17(attr.phi0) << ',' << format_g17(attr.sum()) << ','
                << ledger.eval_count() << ',' << run.hash << ',' << run.seed << '\n';
        }
    }
    write_text(out, csv.str());
    return 0;
}

int cmd_smooth(Run& run, const std::optional<std::string>& out) {
    const auto& refs = *run.refs;
    const std::size_t n_field =
        static_cast<std::size_t>(run.cfg.get_u64("field_size", std::min<std::uint64_t>(
                                                                   refs.n_rows(), 100)));
    if (n_field == 0 || n_field > refs.n_rows()) {
        throw ConfigError("field_size must be in [1, L]");
    }
    std::vector<Instance> points;
    const std::string pick = run.cfg.get_or("field_points", "first");
    if (pick == "first") {
        for (std::size_t i = 0; i < n_field; ++i) points.push_back(refs.instance(i));
    } else if (pick == "sample") {
        Rng gen = Rng(run.seed).child(0x464C44);
        for (auto idx : gen.subset(static_cast<std::uint32_t>(refs.n_rows()),
                                   static_cast<std::uint32_t>(n_field))) {
            points.push_back(refs.instance(idx));
        }
    } else {
        throw ConfigError("field_points: expected first or sample");
    }

    auto est = resolve_estimator(run, resolve_weighting(run.cfg, refs, *run.x));
    FieldOptions options;
    const auto boot = run.cfg.get_u64("bootstrap_refs", 0);
    if (boot > 0) options.bootstrap_refs = static_cast<std::size_t>(boot);
    EvalLedger ledger;
    const auto field = build_attribution_field(*run.bb, ledger, refs, points, est, options);

    const bool offset = run.cfg.get_flag("offset_correct", false);
    std::optional<double> f_of_x;
    if (offset) f_of_x = run.bb->evaluate_one(run.x->values);

    // comma-separated entries; an entry with '/' is a per-feature vector
    std::vector<std::pair<std::string, KernelSpec>> specs;
    {
        const auto mode = subset_mode_of(run.cfg);
        std::stringstream ss(run.cfg.get("smooth_sigma"));
        std::string entry;
        while (std::getline(ss, entry, ',')) {
            entry = trim(entry);
            if (entry.empty()) continue;
            if (entry.find('/') != std::string::npos) {
                std::vector<double> sig;
                std::stringstream es(entry);
                std::string tok;
                while (std::getline(es, tok, '/')) {
                    sig.push_back(parse_double_list(tok, "smooth_sigma")[0]);
                }
                check_same_width(sig.size(), refs.n_features(), "smooth_sigma");
                specs.emplace_back(entry, KernelSpec::diagonal(sig, mode));
            } else {
                const double s = parse_double_list(entry, "smooth_sigma")[0];
                specs.emplace_back(format_g17(s), KernelSpec::scalar(s, mode));
            }
        }
        if (specs.empty()) throw ConfigError("smooth_sigma: no bandwidths given");
    }
    const bool want_var = run.cfg.get_flag("variance", est.compute_variance);

    std::ostringstream csv;
    csv << "sigma,feature,phi,variance,offset_corrected,config_hash,seed\n";
    auto emit = [&](const std::string& label, const Attribution& sm,
                    const std::vector<double>* var) {
        for (std::size_t j = 0; j < sm.phi.size(); ++j) {
            csv << label << ',' << refs.name(j) << ',' << format_g17(sm.phi[j]) << ','
                << (var ? format_g17((*var)[j]) : "") << ',' << (offset ? "1" : "0") << ','
                << run.hash << ',' << run.seed << '\n';
        }
    };

    // global aggregate: the flat-kernel limit (plain field mean)
    {
        Attribution global;
        global.phi.assign(refs.n_features(), 0.0);
        for (const auto& a : field.attributions()) {
            for (std::size_t j = 0; j < global.phi.size(); ++j) global.phi[j] += a.phi[j];
        }
        for (double& p : global.phi) p /= static_cast<double>(field.size());
        emit("global", global, nullptr);
    }
    for (const auto& [label, spec] : specs) {
        const auto sm = smooth(field, *run.x, spec, f_of_x);
        if (want_var && field.has_variances()) {
            const auto var = smooth_variance(field, *run.x, spec);
            emit(label, sm, &var);
        } else {
            emit(label, sm, nullptr);
        }
    }
    write_text(out, csv.str());
    return 0;
}

int cmd_audit(Run& run, const std::optional<std::string>& out) {
    const auto n = static_cast<std::size_t>(run.cfg.get_u64("audit_n", 512));
    const auto k = static_cast<std::size_t>(run.cfg.get_u64("audit_k", 5));
    const std::string w = run.cfg.get_or("weighting", "uniform");
    const auto mode = subset_mode_of(run.cfg);

    std::vector<std::pair<std::string, Weighting>> cases;
    if (w == "uniform") {
        cases.emplace_back("uniform", Weighting::uniform());
    } else {
        for (double s : parse_double_list(run.cfg.get("sigma"), "sigma")) {
            const auto spec = KernelSpec::scalar(s, mode);
            cases.emplace_back(format_g17(s), w == "anti" ? Weighting::anti(spec)
                                                          : Weighting::neighbourhood(spec));
        }
    }

    json doc;
    doc["command"] = "audit";
    doc["config_hash"] = run.hash;
    doc["seed"] = run.seed;
    doc["dataset"] = run.cfg.get("dataset");
    doc["n"] = n;
    doc["k"] = k;
    json rows = json::array();
    const std::vector<Instance> instances{*run.x};
    for (const auto& [label, weighting] : cases) {
        const auto report = audit(instances, *run.refs, weighting, n, k, run.seed);
        json r;
        r["weighting"] = run.cfg.get_or("weighting", "uniform");
        r["sigma"] = label;
        r["auc"] = report.auc;
        r["mean_manifold_distance"] = report.mean_manifold_distance;
        r["n"] = report.n;
        r["k"] = report.k;
        r["seed"] = report.seed;
        rows.push_back(std::move(r));
    }
    doc["reports"] = rows;
    write_text(out, doc.dump(2) + "\n");
    return 0;
}

int cmd_bench(Run& run, const std::optional<std::string>& out) {
    const auto ls = parse_size_list(run.cfg, "bench_l");
    const auto ms = parse_size_list(run.cfg, "bench_m");
    const auto cs = parse_size_list(run.cfg, "bench_c");
    const auto bws = parse_size_list(run.cfg, "bench_bandwidths");

    std::ostringstream csv;
    csv << "L,M,C,n_bandwidths,wall_ms,eval_count,config_hash,seed\n";
    for (const std::size_t m : ms) {
        for (const std::size_t l : ls) {
            Rng gen = Rng(run.seed).child(0x42454E43).child(m).child(l);
            std::vector<double> rows(l * m);
            for (double& v : rows) v = gen.normal();
            std::vector<std::string> names(m);
            for (std::size_t j = 0; j < m; ++j) names[j] = "f" + std::to_string(j + 1);
            Dataset refs(names, std::vector<FeatureKind>(m, FeatureKind::continuous),
                         std::move(rows));
            const auto bb = make_builtin({"linear", std::vector<double>(m, 1.0)});
            const Instance x{std::vector<double>(m, 0.5)};
            for (const std::size_t c : cs) {
                for (const std::size_t nb : bws) {
                    const auto grid =
                        nb == 1 ? std::vector<double>{1.0} : sweep_grid(m, nb);
                    EvalLedger ledger;
                    const auto t0 = std::chrono::steady_clock::now();
                    for (const double sigma : grid) {
                        EstimatorConfig est;
                        est.mode = EstimatorMode::kernel_shap;
                        est.weighting =
                            Weighting::neighbourhood(KernelSpec::scalar(sigma));
                        est.n_coalitions = c;
                        est.seed = run.seed;
                        est.threads = run.threads;
                        est.compute_variance = false;
                        (void)explain_kernelshap(*bb, ledger, x, refs, est);
                    }
                    const auto t1 = std::chrono::steady_clock::now();
                    const double ms_elapsed =
                        std::chrono::duration<double, std::milli>(t1 - t0).count();
                    csv << l << ',' << m << ',' << c << ',' << nb << ','
                        << format_g17(ms_elapsed) << ',' << ledger.eval_count() << ','
                        << run.hash << ',' << run.seed << '\n';
                }
            }
        }
    }
    write_text(out, csv.str());
    return 0;
}

int cmd_gen(const std::string& kind, std::size_t n, std::size_t m, double lo, double hi,
            double noise, std::uint64_t seed, const std::optional<std::string>& out) {
    Rng gen = Rng(seed).child(0x47454E);
    std::optional<Dataset> ds;
    if (kind == "ring") {
        std::vector<double> rows(n * 2);
        for (std::size_t i = 0; i < n; ++i) {
            const double theta = gen.uniform(0.0, 6.283185307179586476925286766559);
            const double r = 1.0 + noise * gen.normal();
            rows[2 * i] = r * std::cos(theta);
            rows[2 * i + 1] = r * std::sin(theta);
        }
        ds.emplace(std::vector<std::string>{"x1", "x2"},
                   std::vector<FeatureKind>(2, FeatureKind::continuous), std::move(rows));
    } else if (kind == "normal" || kind == "uniform") {
        std::vector<double> rows(n * m);
        for (double& v : rows) {
            v = kind == "normal" ? gen.normal() : gen.uniform(lo, hi);
        }
        std::vector<std::string> names(m);
        for (std::size_t j = 0; j < m; ++j) names[j] = "f" + std::to_string(j + 1);
        ds.emplace(names, std::vector<FeatureKind>(m, FeatureKind::continuous),
                   std::move(rows));
    } else {
        throw ConfigError("gen: unknown kind '" + kind + "'");
    }
    if (out) {
        write_dataset_csv(*ds, *out);
    } else {
        std::ostringstream buf;
        for (std::size_t j = 0; j < ds->n_features(); ++j) {
            buf << (j ? "," : "") << ds->name(j);
        }
        buf << '\n';
        for (std::size_t l = 0; l < ds->n_rows(); ++l) {
            for (std::size_t j = 0; j < ds->n_features(); ++j) {
                buf << (j ? "," : "") << format_g17(ds->at(l, j));
            }
            buf << '\n';
        }
        std::cout << buf.str();
    }
    return 0;
}

Run prepare_run(const std::string& command, const std::string& config_path,
                const std::optional<std::uint64_t>& seed_override,
                const std::optional<std::size_t>& threads_override, bool needs_instance) {
    Run run;
    run.command = command;
    run.cfg = load_config(config_path);
    run.seed = seed_override ? *seed_override : run.cfg.get_u64("seed", 0);
    run.threads = threads_override
                      ? *threads_override
                      : static_cast<std::size_t>(run.cfg.get_u64("threads", 1));
    if (run.threads == 0) throw ConfigError("threads must be positive");
    run.hash = config_hash(run.cfg, command, run.seed);
    run.refs = load_dataset(run.cfg);
    run.bb = make_blackbox(run.cfg, *run.refs, run.blackbox_desc);
    if (needs_instance) run.x = resolve_instance(run.cfg, *run.refs, run.instance_desc);
    return run;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neighbourhood / Smoothed SHAP attribution engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::size_t> threads_override;
    std::optional<std::string> out_override;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--seed", seed_override, "override the config seed");
        sub->add_option("--threads", threads_override, "worker threads");
        sub->add_option("--out", out_override, "output path (default stdout)");
    };
    auto* explain_cmd = app.add_subcommand("explain", "attribute one instance");
    auto* sweep_cmd = app.add_subcommand("sweep", "attributions over a bandwidth grid");
    auto* smooth_cmd = app.add_subcommand("smooth", "kernel-smoothed attributions");
    auto* audit_cmd = app.add_subcommand("audit", "on-manifold audit");
    auto* bench_cmd = app.add_subcommand("bench", "timing and eval-count table");
    for (auto* sub : {explain_cmd, sweep_cmd, smooth_cmd, audit_cmd, bench_cmd}) {
        add_common(sub);
    }

    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic dataset CSV");
    std::string gen_kind = "ring";
    std::size_t gen_n = 512, gen_m = 2;
    double gen_lo = -2.0, gen_hi = 2.0, gen_noise = 0.05;
    std::uint64_t gen_seed = 0;
    gen_cmd->add_option("--kind", gen_kind, "ring|normal|uniform");
    gen_cmd->add_option("--n", gen_n, "rows")->required();
    gen_cmd->add_option("--m", gen_m, "features (normal/uniform)");
    gen_cmd->add_option("--lo", gen_lo, "uniform lower bound");
    gen_cmd->add_option("--hi", gen_hi, "uniform upper bound");
    gen_cmd->add_option("--noise", gen_noise, "ring radial noise");
    gen_cmd->add_option("--seed", gen_seed, "seed");
    gen_cmd->add_option("--out", out_override, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen_cmd->parsed()) {
            return cmd_gen(gen_kind, gen_n, gen_m, gen_lo, gen_hi, gen_noise, gen_seed,
                           out_override);
        }
        const std::string command = app.get_subcommands().front()->get_name();
        const bool needs_instance = command != "bench";
        Run run = prepare_run(command, config_path, seed_override, threads_override,
                              needs_instance);
        if (command == "explain") return cmd_explain(run, out_override);
        if (command == "sweep") return cmd_sweep(run, out_override);
        if (command == "smooth") return cmd_smooth(run, out_override);
        if (command == "audit") return cmd_audit(run, out_override);
        if (command == "bench") return cmd_bench(run, out_override);
        std::cerr << "nbrshap: unknown command\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "nbrshap: config error: " << e.what() << "\n";
        return 2;
    } catch (const BlackBoxError& e) {
        std::cerr << "nbrshap: black-box failure: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "nbrshap: estimator error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "nbrshap: " << e.what() << "\n";
        return 4;
    }
}
