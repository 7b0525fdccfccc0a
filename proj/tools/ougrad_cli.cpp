// ougrad experiment runner: loads model configs, dispatches the library's
// estimators/oracles/bounds, and writes CSV or JSON reports with provenance
// headers (config hash, seed). One experiment per invocation.
//
// Exit codes: 0 ok, 2 config error, 3 numeric error, 4 statistical-check
// failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ougrad/bounds.hpp"
#include "ougrad/config.hpp"
#include "ougrad/estimators.hpp"
#include "ougrad/perturbation.hpp"
#include "ougrad/spectral.hpp"

using namespace ougrad;
using nlohmann::json;

namespace {

struct Common {
    std::string model_path;
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed = 42;
    long samples = 10000;
    std::vector<double> ts;
    int threads = 0;  // 0 -> hardware parallelism
};

int effective_threads(int requested) {
    if (requested > 0) return requested;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt_num(double v) {
    char b[40];
    std::snprintf(b, sizeof(b), "%.12g", v);
    return b;
}

/// Table of named columns plus trailing key=value notes, written as CSV with
/// "# " provenance headers or as a JSON document.
class Report {
  public:
    explicit Report(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<json> cells) {
        if (cells.size() != columns_.size()) throw std::runtime_error("report row width mismatch");
        rows_.push_back(std::move(cells));
    }
    void note(const std::string& key, json value) { notes_.emplace_back(key, std::move(value)); }

    void write(const Common& c, std::uint64_t config_hash) const {
        std::ostringstream body;
        if (c.format == "json")
            write_json(body, c, config_hash);
        else
            write_csv(body, c, config_hash);
        if (c.out_path.empty()) {
            std::cout << body.str();
        } else {
            std::ofstream out(c.out_path);
            if (!out) throw std::domain_error("config: cannot write '" + c.out_path + "'");
            out << body.str();
        }
    }

  private:
    static std::string cell(const json& v) {
        if (v.is_number_float()) return fmt_num(v.get<double>());
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_string()) return v.get<std::string>();
        return v.dump();
    }

    void write_csv(std::ostream& os, const Common& c, std::uint64_t hash) const {
        char line[64];
        std::snprintf(line, sizeof(line), "# config_hash=%016llx\n",
                      static_cast<unsigned long long>(hash));
        os << line;
        std::snprintf(line, sizeof(line), "# seed=%llu\n", static_cast<unsigned long long>(c.seed));
        os << line;
        os << "# generated=" << timestamp_utc() << "\n";
        for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
        os << "\n";
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell(row[i]);
            os << "\n";
        }
        for (const auto& [k, v] : notes_) os << "# " << k << "=" << cell(v) << "\n";
    }

    void write_json(std::ostream& os, const Common& c, std::uint64_t hash) const {
        char hex[24];
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
        json doc;
        doc["config_hash"] = hex;
        doc["seed"] = c.seed;
        doc["generated"] = timestamp_utc();
        doc["columns"] = columns_;
        doc["rows"] = json::array();
        for (const auto& row : rows_) {
            json obj;
            for (std::size_t i = 0; i < row.size(); ++i) obj[columns_[i]] = row[i];
            doc["rows"].push_back(std::move(obj));
        }
        for (const auto& [k, v] : notes_) doc["notes"][k] = v;
        os << doc.dump(2) << "\n";
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<json>> rows_;
    std::vector<std::pair<std::string, json>> notes_;
};

// command-line flag wins over the experiment config file, which wins over the
// built-in default
template <class T>
void merge_cfg(const json& cfg, const char* key, bool flag_given, T& value) {
    if (flag_given) return;
    if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

struct Inputs {
    Common eff;
    json cfg = json::object();
    const CLI::App* sub = nullptr;

    bool given(const std::string& flag) const { return sub->count(flag) > 0; }
    template <class T>
    void merge(const char* key, const std::string& flag, T& value) const {
        merge_cfg(cfg, key, given(flag), value);
    }
};

Inputs gather(const Common& c, const CLI::App* sub) {
    Inputs in;
    in.eff = c;
    in.sub = sub;
    if (!c.config_path.empty()) in.cfg = load_json_file(c.config_path);
    in.merge("model", "--model", in.eff.model_path);
    in.merge("t", "--t", in.eff.ts);
    in.merge("samples", "--samples", in.eff.samples);
    in.merge("seed", "--seed", in.eff.seed);
    in.merge("threads", "--threads", in.eff.threads);
    return in;
}

void require_samples(const Common& c) {
    if (c.samples < 100)
        throw std::domain_error("config: statistical experiments need --samples >= 100");
}

LoadedModel require_model(const Common& c) {
    if (c.model_path.empty()) throw std::domain_error("config: --model FILE is required");
    return load_model(c.model_path);
}

Vec vec_arg(const std::vector<double>& xs, int dim, const char* name) {
    if (xs.empty()) return Vec(static_cast<std::size_t>(dim), 0.0);
    if (static_cast<int>(xs.size()) != dim)
        throw std::domain_error(std::string("config: ") + name + " needs dim entries");
    return Vec(xs.begin(), xs.end());
}

// ---------------------------------------------------------------- alpha ----

int cmd_alpha(const Common& c, const CLI::App* sub) {
    Inputs in = gather(c, sub);
    json s_spec = json{{"kind", "power"}, {"beta", 1.0}};
    BernsteinFunction S = BernsteinFunction::power(1.0);
    if (in.cfg.contains("S") || in.cfg.contains("kind")) {
        s_spec = in.cfg.contains("S") ? in.cfg.at("S") : in.cfg;
        S = bernstein_from_json(s_spec);
    } else if (!in.eff.model_path.empty()) {
        const LoadedModel lm = require_model(in.eff);
        if (!lm.model.lower_bound()) throw std::domain_error("config: model has no lower_bound S");
        S = lm.model.lower_bound()->S;
        s_spec = lm.raw.at("lower_bound").at("S");
    }
    if (in.eff.ts.empty()) in.eff.ts = {0.1, 1.0, 10.0};

    Report rep({"t", "alpha", "quad_error", "divergent"});
    for (const double t : in.eff.ts) {
        const AlphaResult a = eval_alpha(S, t);
        rep.add({t, a.divergent ? json("inf") : json(a.value), a.error, a.divergent});
    }
    rep.note("S", S.describe());
    rep.write(in.eff, config_hash(json{{"experiment", "alpha"}, {"S", s_spec}, {"t", in.eff.ts}}));
    return 0;
}

// --------------------------------------------------------------- bounds ----

int cmd_bounds(const Common& c, const CLI::App* sub, std::string bound_id) {
    Inputs in = gather(c, sub);
    in.merge("bound", "--bound", bound_id);
    if (in.eff.ts.empty()) in.eff.ts = {0.25, 0.5, 1.0, 2.0, 4.0};
    const LoadedModel lm = require_model(in.eff);
    const LevyModel& m = lm.model;
    if (!m.lower_bound()) throw std::domain_error("config: bounds need a model lower_bound");
    const LowerBoundSpec& spec = *m.lower_bound();

    BoundReport br;
    if (bound_id == "G") {
        br = bound_G(spec, m.theta(), m.A_norm(), m.dim(), in.eff.ts);
    } else if (bound_id == "G2") {
        if (!m.A_is_zero()) throw std::domain_error("config: bound G2 requires A = 0");
        br = bound_G2(spec, m.dim(), in.eff.ts);
    } else if (bound_id == "thm31") {
        if (!m.has_floor()) throw std::domain_error("config: bound thm31 needs a floor component");
        const double lam0 = m.floor_density().mass();
        br.bound_id = "thm31";
        br.constants = {0.0, lam0, m.theta(), spec.r0, spec.S.describe()};
        br.note = "constant-free bound on |grad P_t^1 f| for ||f|| <= 1";
        for (const double t : in.eff.ts)
            br.rows.push_back({t, bound_thm31(m.floor_density(), m.theta(), lam0, t), false,
                               std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::quiet_NaN()});
    } else if (bound_id == "cor22-upper" || bound_id == "cor22-lower") {
        const Cor22Side side = bound_id == "cor22-upper" ? Cor22Side::Upper : Cor22Side::Lower;
        br.bound_id = bound_id;
        br.constants = {0.0, 0.0, m.theta(), spec.r0, spec.S.describe()};
        br.note = "verified-constant form; the source prints a different prefactor (see docs)";
        for (const double t : in.eff.ts) {
            const Cor22Bound b = bound_cor22(spec.S, t, side);
            br.rows.push_back({t,
                               b.divergent ? std::numeric_limits<double>::infinity() : b.verified,
                               b.divergent, std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::quiet_NaN()});
        }
    } else if (bound_id == "cor13") {
        const double sigma_norm = in.cfg.value("sigma_norm", 0.0);
        br = bound_cor13(spec, m.dim(), m.A_norm(), sigma_norm, in.eff.ts);
    } else {
        throw std::domain_error("config: unknown bound '" + bound_id + "'");
    }

    Report rep({"t", "rhs", "divergent"});
    for (const BoundRow& row : br.rows) rep.add({row.t, row.rhs, row.divergent});
    rep.note("bound", br.bound_id);
    rep.note("c0", br.constants.c0);
    rep.note("lambda0", br.constants.lambda0);
    rep.note("theta", br.constants.theta);
    rep.note("S", br.constants.S_id);
    rep.note("note", br.note);
    rep.write(in.eff, config_hash(json{{"experiment", "bounds"},
                                       {"bound", bound_id},
                                       {"model", lm.raw},
                                       {"t", in.eff.ts}}));
    return 0;
}

// ------------------------------------------------------------- gradient ----

int cmd_gradient(const Common& c, const CLI::App* sub, std::string f_id, std::vector<double> xs,
                 double h) {
    Inputs in = gather(c, sub);
    in.merge("f", "--f", f_id);
    in.merge("x", "--x", xs);
    in.merge("h", "--step", h);
    if (in.eff.ts.empty()) in.eff.ts = {1.0};
    require_samples(in.eff);
    const LoadedModel lm = require_model(in.eff);
    const LevyModel& m = lm.model;
    const TestFunction f = TestFunction::from_id(f_id, m.dim());
    const Vec x = vec_arg(xs, m.dim(), "--x");
    const int threads = effective_threads(in.eff.threads);

    Report rep({"t", "coord", "estimator", "value", "stderr"});
    const auto add_rows = [&rep](double t, const char* id, const GradientEstimate& g) {
        for (std::size_t i = 0; i < g.value.size(); ++i)
            rep.add({t, static_cast<int>(i), id, g.value[i], g.std_error[i]});
    };
    std::uint64_t stream = 0;
    for (const double t : in.eff.ts) {
        if (m.has_floor()) {
            // the derivative formula targets the jump-restricted semigroup
            // P_t^1, so its like-for-like comparator is the restricted FD
            add_rows(t, "derivative_formula",
                     derivative_formula(m, f, x, t, in.eff.samples, {in.eff.seed, stream}, threads));
            stream += 1u << 15;
            add_rows(t, "finite_difference_P1",
                     finite_difference_gradient(m, f, x, t, in.eff.samples, h,
                                                {in.eff.seed, stream}, true, threads));
            stream += 1u << 15;
        }
        add_rows(t, "finite_difference",
                 finite_difference_gradient(m, f, x, t, in.eff.samples, h, {in.eff.seed, stream},
                                            false, threads));
        stream += 1u << 15;
    }
    rep.note("f", f.id());
    rep.note("h", h);
    rep.note("samples", in.eff.samples);
    rep.write(in.eff, config_hash(json{{"experiment", "gradient"},
                                       {"model", lm.raw},
                                       {"f", f_id},
                                       {"x", xs},
                                       {"t", in.eff.ts},
                                       {"h", h},
                                       {"samples", in.eff.samples}}));
    return 0;
}

// ---------------------------------------------------------- shift-check ----

int cmd_shift_check(const Common& c, const CLI::App* sub, std::string F_id) {
    Inputs in = gather(c, sub);
    in.merge("F", "--F", F_id);
    if (in.eff.ts.empty()) in.eff.ts = {1.0};
    require_samples(in.eff);
    const LoadedModel lm = require_model(in.eff);
    if (!lm.model.has_floor())
        throw std::domain_error("config: shift-check needs a floor component");
    const JumpDensity& rho = lm.model.floor_density();

    PathFunctional F;
    if (F_id == "one")
        F = [](const Vec&, long) { return 1.0; };
    else if (F_id == "sin")
        F = [](const Vec& L, long) { return std::sin(L[0]); };
    else if (F_id == "even")
        F = [](const Vec&, long nj) { return nj % 2 == 0 ? 1.0 : 0.0; };
    else
        throw std::domain_error("config: unknown path functional '" + F_id + "' (one|sin|even)");

    const int threads = effective_threads(in.eff.threads);
    Report rep({"t", "F", "lhs", "rhs", "combined_stderr", "exact_one_case", "pass"});
    bool all_pass = true;
    std::uint64_t stream = 0;
    for (const double t : in.eff.ts) {
        const ShiftCheckReport r =
            random_shift_check(rho, t, F, in.eff.samples, {in.eff.seed, stream}, threads);
        stream += 1u << 22;
        const json exact = F_id == "one" ? json(-std::expm1(-rho.mass() * t)) : json("");
        rep.add({t, F_id, r.lhs.value, r.rhs.value, r.combined_std_error, exact, r.pass});
        all_pass = all_pass && r.pass;
    }
    rep.note("lambda0", rho.mass());
    rep.note("samples", in.eff.samples);
    rep.write(in.eff, config_hash(json{{"experiment", "shift-check"},
                                       {"model", lm.raw},
                                       {"F", F_id},
                                       {"t", in.eff.ts},
                                       {"samples", in.eff.samples}}));
    return all_pass ? 0 : 4;
}

// -------------------------------------------------------- decomposition ----

int cmd_decomposition(const Common& c, const CLI::App* sub, std::string f_id,
                      std::vector<double> xs) {
    Inputs in = gather(c, sub);
    in.merge("f", "--f", f_id);
    in.merge("x", "--x", xs);
    if (in.eff.ts.empty()) in.eff.ts = {0.5};
    require_samples(in.eff);
    const LoadedModel lm = require_model(in.eff);
    const TestFunction f = TestFunction::from_id(f_id, lm.model.dim());
    const Vec x = vec_arg(xs, lm.model.dim(), "--x");
    const int threads = effective_threads(in.eff.threads);

    Report rep({"t", "lhs", "rhs", "combined_stderr", "inner_samples", "agree", "inconclusive"});
    bool definite_fail = false;
    std::uint64_t stream = 0;
    for (const double t : in.eff.ts) {
        const DecompositionReport r =
            decomposition_check(lm.model, f, x, t, in.eff.samples, {in.eff.seed, stream}, threads);
        stream += 1u << 23;
        rep.add({t, r.lhs.value, r.rhs.value, r.combined_std_error, r.inner_samples, r.agree,
                 r.inconclusive});
        if (!r.agree && !r.inconclusive) definite_fail = true;
    }
    rep.note("f", f.id());
    rep.note("samples", in.eff.samples);
    rep.write(in.eff, config_hash(json{{"experiment", "decomposition"},
                                       {"model", lm.raw},
                                       {"f", f_id},
                                       {"x", xs},
                                       {"t", in.eff.ts},
                                       {"samples", in.eff.samples}}));
    return definite_fail ? 4 : 0;
}

// ------------------------------------------------------------- rate-fit ----

int cmd_rate_fit(const Common& c, const CLI::App* sub, std::string f_id) {
    Inputs in = gather(c, sub);
    in.merge("f", "--f", f_id);
    if (in.eff.ts.empty()) in.eff.ts = {0.05, 0.1, 0.2, 0.4, 0.8};
    const LoadedModel lm = require_model(in.eff);
    if (lm.model.dim() != 1) throw std::domain_error("config: rate-fit needs a d = 1 model");
    const TestFunction f = TestFunction::from_id(f_id, 1);

    Report rep({"t", "sup_gradient"});
    std::vector<double> sups;
    for (const double t : in.eff.ts) {
        const DensityTable tab = density_from_cf(lm.model, t);
        sups.push_back(sup_gradient_spectral(tab, f, lm.model));
        rep.add({t, sups.back()});
    }
    const RateFit fit = fit_decay_rate(in.eff.ts, sups);
    rep.note("f", f.id());
    rep.note("slope", fit.fit.slope);
    rep.note("intercept", fit.fit.intercept);
    rep.note("residual_rms", fit.fit.residual_rms);
    rep.note("inconclusive", fit.inconclusive);
    rep.write(in.eff, config_hash(json{{"experiment", "rate-fit"},
                                       {"model", lm.raw},
                                       {"f", f_id},
                                       {"t", in.eff.ts}}));
    return 0;
}

// -------------------------------------------------------------- perturb ----

int cmd_perturb(const Common& c, const CLI::App* sub, std::string f_id, std::vector<double> xs,
                double kappa, double m_sigma2) {
    Inputs in = gather(c, sub);
    in.merge("f", "--f", f_id);
    in.merge("x", "--x", xs);
    in.merge("kappa", "--kappa", kappa);
    in.merge("m_sigma2", "--m-sigma2", m_sigma2);
    if (in.eff.ts.size() > 1) throw std::domain_error("config: perturb takes a single --t");
    const double t = in.eff.ts.empty() ? 0.5 : in.eff.ts[0];
    if (xs.empty()) xs = {0.0};
    require_samples(in.eff);
    const LoadedModel lm = require_model(in.eff);
    if (lm.model.dim() != 1) throw std::domain_error("config: perturb needs a d = 1 model");
    if (kappa < 0.0) throw std::domain_error("config: kappa must be nonnegative");
    const TestFunction f = TestFunction::from_id(f_id, 1);
    const PerturbationKernel kernel = PerturbationKernel::separable(
        [kappa](double) { return kappa; }, JumpDensity::gaussian(1, m_sigma2), kappa);
    const int threads = effective_threads(in.eff.threads);

    const DuhamelSolution sol = duhamel_solve(lm.model, kernel, f, t);
    const DuhamelSolution ones = duhamel_solve(lm.model, kernel, TestFunction::one(), t);
    double conservation = 0.0;
    for (const double v : ones.values) conservation = std::max(conservation, std::fabs(v - 1.0));

    Report rep({"x", "duhamel", "mc", "mc_stderr", "pass"});
    bool all_pass = true;
    const double dx = sol.x[1] - sol.x[0];
    std::uint64_t stream = 0;
    for (const double want : xs) {
        // snap to the solver grid so the two values are directly comparable
        long idx = std::lround((want - sol.x.front()) / dx);
        idx = std::max<long>(0, std::min<long>(static_cast<long>(sol.x.size()) - 1, idx));
        const double x0 = sol.x[static_cast<std::size_t>(idx)];
        const PerturbedEstimate mc = simulate_perturbed(
            lm.model, kernel, f, Vec(1, x0), t, in.eff.samples, {in.eff.seed, stream}, threads);
        stream += 1u << 22;
        const bool pass =
            std::fabs(mc.estimate.value - sol.values[static_cast<std::size_t>(idx)]) <=
            3.0 * mc.estimate.std_error;
        rep.add({x0, sol.values[static_cast<std::size_t>(idx)], mc.estimate.value,
                 mc.estimate.std_error, pass});
        all_pass = all_pass && pass;
    }
    rep.note("f", f.id());
    rep.note("t", t);
    rep.note("kappa", kappa);
    rep.note("sigma_norm", kernel.norm_inf());
    rep.note("iterations", sol.iterations);
    rep.note("final_residual", sol.residuals.back());
    rep.note("conservation_error", conservation);
    rep.note("samples", in.eff.samples);
    rep.write(in.eff, config_hash(json{{"experiment", "perturb"},
                                       {"model", lm.raw},
                                       {"f", f_id},
                                       {"x", xs},
                                       {"t", t},
                                       {"kappa", kappa},
                                       {"m_sigma2", m_sigma2},
                                       {"samples", in.eff.samples}}));
    if (conservation > 1e-8) return 4;
    return all_pass ? 0 : 4;
}

// ------------------------------------------------------- oracle-compare ----

int cmd_oracle_compare(const Common& c, const CLI::App* sub, std::string f_id,
                       std::vector<double> xs) {
    Inputs in = gather(c, sub);
    in.merge("f", "--f", f_id);
    in.merge("x", "--x", xs);
    if (in.eff.ts.size() > 1) throw std::domain_error("config: oracle-compare takes a single --t");
    const double t = in.eff.ts.empty() ? 1.0 : in.eff.ts[0];
    if (xs.empty()) xs = {-2.0, -1.0, 0.0, 1.0, 2.0};
    require_samples(in.eff);
    const LoadedModel lm = require_model(in.eff);
    if (lm.model.dim() != 1) throw std::domain_error("config: oracle-compare needs a d = 1 model");
    const TestFunction f = TestFunction::from_id(f_id, 1);
    const int threads = effective_threads(in.eff.threads);

    const DensityTable tab = density_from_cf(lm.model, t);
    const SemigroupValues oracle = semigroup_and_gradient(tab, f, xs, lm.model);

    Report rep({"x", "oracle", "mc", "mc_stderr", "z", "pass"});
    bool all_pass = true;
    std::uint64_t stream = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const ScalarEstimate mc = estimate_Pt(lm.model, f, Vec(1, xs[i]), t, in.eff.samples,
                                              {in.eff.seed, stream}, threads);
        stream += 1u << 15;
        const double z = (mc.value - oracle.value[i]) / std::max(mc.std_error, 1e-300);
        const bool pass = std::fabs(z) <= 3.0;
        rep.add({xs[i], oracle.value[i], mc.value, mc.std_error, z, pass});
        all_pass = all_pass && pass;
    }
    rep.note("f", f.id());
    rep.note("t", t);
    rep.note("grid_L", tab.L);
    rep.note("samples", in.eff.samples);
    rep.write(in.eff, config_hash(json{{"experiment", "oracle-compare"},
                                       {"model", lm.raw},
                                       {"f", f_id},
                                       {"x", xs},
                                       {"t", t},
                                       {"samples", in.eff.samples}}));
    return all_pass ? 0 : 4;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--model", c.model_path, "model config JSON file");
    sub->add_option("--config", c.config_path, "experiment config JSON file");
    sub->add_option("--seed", c.seed, "RNG seed");
    sub->add_option("--samples", c.samples, "Monte Carlo sample count");
    sub->add_option("--t", c.ts, "time grid")->delimiter(',');
    sub->add_option("--out", c.out_path, "output path (default stdout)");
    sub->add_option("--format", c.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", c.threads, "worker threads (default hardware)");
}

// Library throws carry a "config: " tag; drop it so the CLI prefix is not doubled.
std::string strip_prefix(const std::string& msg) {
    const std::string tag = "config: ";
    return msg.rfind(tag, 0) == 0 ? msg.substr(tag.size()) : msg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Levy-driven OU semigroup gradient experiments"};
    app.require_subcommand(1);

    Common c;
    std::string f_id = "sin", F_id = "one", bound_id = "G";
    std::vector<double> xs;
    double h = 1e-3, kappa = 0.5, m_sigma2 = 1.0;

    CLI::App* alpha = app.add_subcommand("alpha", "alpha(t) rate integral over a time grid");
    CLI::App* bounds = app.add_subcommand("bounds", "evaluate a gradient bound over a time grid");
    CLI::App* gradient = app.add_subcommand("gradient", "Monte Carlo gradient estimates");
    CLI::App* shift = app.add_subcommand("shift-check", "random-shift identity check");
    CLI::App* decomp = app.add_subcommand("decomposition", "floor decomposition identity check");
    CLI::App* rate = app.add_subcommand("rate-fit", "spectral sup-gradient decay-rate fit");
    CLI::App* perturb = app.add_subcommand("perturb", "perturbed semigroup: solver vs simulation");
    CLI::App* oracle = app.add_subcommand("oracle-compare", "spectral oracle vs Monte Carlo");
    for (CLI::App* sub : {alpha, bounds, gradient, shift, decomp, rate, perturb, oracle})
        add_common(sub, c);

    bounds->add_option("--bound", bound_id, "G|G2|thm31|cor22-upper|cor22-lower|cor13");
    for (CLI::App* sub : {gradient, decomp, rate, perturb, oracle})
        sub->add_option("--f", f_id, "test function id (one|sin|cos|tanh|sign|halfspace)");
    for (CLI::App* sub : {gradient, decomp, perturb, oracle})
        sub->add_option("--x", xs, "evaluation point(s)")->delimiter(',');
    gradient->add_option("--step", h, "finite-difference step");
    shift->add_option("--F", F_id, "path functional id (one|sin|even)");
    perturb->add_option("--kappa", kappa, "constant perturbation rate");
    perturb->add_option("--m-sigma2", m_sigma2, "redistribution density variance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion")
            return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (*alpha) return cmd_alpha(c, alpha);
        if (*bounds) return cmd_bounds(c, bounds, bound_id);
        if (*gradient) return cmd_gradient(c, gradient, f_id, xs, h);
        if (*shift) return cmd_shift_check(c, shift, F_id);
        if (*decomp) return cmd_decomposition(c, decomp, f_id, xs);
        if (*rate) return cmd_rate_fit(c, rate, f_id);
        if (*perturb) return cmd_perturb(c, perturb, f_id, xs, kappa, m_sigma2);
        if (*oracle) return cmd_oracle_compare(c, oracle, f_id, xs);
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << strip_prefix(e.what()) << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << strip_prefix(e.what()) << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
