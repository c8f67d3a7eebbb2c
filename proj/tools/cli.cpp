#include "cli.hpp"

#include "levyou/config.hpp"
#include "levyou/density.hpp"
#include "levyou/errors.hpp"
#include "levyou/evolution_family.hpp"
#include "levyou/ou_core.hpp"
#include "levyou/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace levyou::cli {

namespace {

using json = nlohmann::json;

// Bad flag values; reported with the config-error exit code.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config;
    std::string out;
    std::string summary;
    std::string path;
    double s = 0.0;
    double t = 1.0;
    std::string x;
    std::string a_grid;
    std::string y_grid;
    std::string t_grid;
    std::string pairs = "0:1";
    std::string direction;
    std::string scheme = "exact";
    std::size_t runs = 0;
    std::size_t steps = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

double parse_number(const std::string& text, const std::string& flag) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v)) {
        throw UsageError(flag + ": '" + text + "' is not a finite number");
    }
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur, sep)) {
        parts.push_back(cur);
    }
    if (!text.empty() && text.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

// "lo:hi:step" (inclusive) or a single value.
std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
    const auto parts = split(text, ':');
    if (parts.size() == 1) {
        return {parse_number(parts[0], flag)};
    }
    if (parts.size() != 3) {
        throw UsageError(flag + ": expected lo:hi:step");
    }
    const double lo = parse_number(parts[0], flag);
    const double hi = parse_number(parts[1], flag);
    const double step = parse_number(parts[2], flag);
    if (!(step > 0.0) || hi < lo) {
        throw UsageError(flag + ": need step > 0 and hi >= lo");
    }
    const double count = std::floor((hi - lo) / step + 1e-9) + 1.0;
    if (count > 1e7) {
        throw UsageError(flag + ": grid has too many points");
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < static_cast<std::size_t>(count); ++k) {
        out.push_back(lo + static_cast<double>(k) * step);
    }
    return out;
}

Vector parse_vector(const std::string& text, std::size_t d, const std::string& flag) {
    const auto di = static_cast<Eigen::Index>(d);
    if (text.empty()) {
        return Vector::Zero(di);
    }
    const auto parts = split(text, ',');
    if (parts.size() != d) {
        throw UsageError(flag + ": expected " + std::to_string(d) + " comma-separated values");
    }
    Vector v(di);
    for (std::size_t i = 0; i < d; ++i) {
        v(static_cast<Eigen::Index>(i)) = parse_number(parts[i], flag);
    }
    return v;
}

Vector parse_direction(const std::string& text, std::size_t d) {
    if (text.empty()) {
        return Vector::Unit(static_cast<Eigen::Index>(d), 0);
    }
    return parse_vector(text, d, "--direction");
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& text) {
    std::vector<std::pair<double, double>> out;
    for (const auto& item : split(text, ',')) {
        const auto st = split(item, ':');
        if (st.size() != 2) {
            throw UsageError("--pairs: expected s:t[,s:t...]");
        }
        const double s = parse_number(st[0], "--pairs");
        const double t = parse_number(st[1], "--pairs");
        if (s > t) {
            throw UsageError("--pairs: need s <= t");
        }
        out.emplace_back(s, t);
    }
    return out;
}

// %.17g with negative zero printed as 0.
std::string num(double v) { return format_double(v == 0.0 ? 0.0 : v); }

void emit(const std::string& path, const std::string& content, std::ostream& fallback) {
    if (path.empty()) {
        fallback << content;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw UsageError("cannot write " + path);
    }
    file << content;
}

json decay_json(const DecayEstimate& d) {
    return {{"C", d.C},
            {"eps", d.epsilon},
            {"valid", d.valid},
            {"t_min", d.t_min},
            {"t_max", d.t_max}};
}

// --- subcommands ------------------------------------------------------------

int cmd_cf(const Scenario& sc, const Options& o, std::ostream& out) {
    if (o.a_grid.empty()) {
        throw UsageError("cf: --a-grid is required");
    }
    if (o.s > o.t) {
        throw UsageError("cf: need s <= t");
    }
    const std::size_t d = sc.dim();
    const Vector x = parse_vector(o.x, d, "--x");
    const Vector dir = parse_direction(o.direction, d);
    const TransitionLaw law(sc, o.s, o.t);
    std::ostringstream csv;
    csv << "a,re,im\n";
    for (double a : parse_grid(o.a_grid, "--a-grid")) {
        const Complex c = law.cf(x, a * dir);
        csv << num(a) << ',' << num(c.real()) << ',' << num(c.imag()) << '\n';
    }
    emit(o.out, csv.str(), out);
    return kOk;
}

std::optional<CauchyParameters> cauchy_closed_form(const Scenario& sc, double t) {
    const LevyModel& noise = sc.noise();
    if (sc.dim() != 1 || !noise.is_stable() || noise.stable_params().alpha != 1.0) {
        return std::nullopt;
    }
    const CoeffExpr lam = -sc.A().entry(0, 0);
    const CoeffExpr sig = sc.B().entry(0, 0) * CoeffExpr::constant(noise.stable_params().sigma);
    CauchyOptions opts;
    opts.quad_step = sc.numerics().quad_step;
    opts.tail_tol = sc.numerics().tail_tol;
    try {
        return cauchy_parameters_from_drift(lam, sc.f().entry(0), sig, t, opts);
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

std::vector<double> fft_density(const IDLaw& nu, const Vector& dir, const std::vector<double>& ys) {
    double ymax = 0.0;
    for (double y : ys) {
        ymax = std::max(ymax, std::fabs(y));
    }
    double L = std::max(64.0, 4.0 * ymax);
    std::size_t n = 1u << 14;
    const auto cf = [&](double a) { return nu.cf(a * dir); };
    for (int attempt = 0;; ++attempt) {
        try {
            const GridDensity p = invert_cf(cf, L, n);
            std::vector<double> out;
            for (double y : ys) {
                out.push_back(p(y));
            }
            return out;
        } catch (const MassDeficit&) {
            if (attempt == 5) {
                throw;
            }
            L *= 2.0;
            n *= 2;
        }
    }
}

int cmd_family(const Scenario& sc, const Options& o, bool t_given, std::ostream& out) {
    if (!o.a_grid.empty() && !o.y_grid.empty()) {
        throw UsageError("family: give at most one of --a-grid and --y-grid");
    }
    const std::vector<double> ts = !o.t_grid.empty() ? parse_grid(o.t_grid, "--t-grid")
                                   : t_given          ? std::vector<double>{o.t}
                                                      : std::vector<double>{0.0};
    const std::size_t d = sc.dim();
    const Vector dir = parse_direction(o.direction, d);
    const EvolutionFamily fam = build_family(sc, ts.front());
    std::ostringstream csv;

    if (!o.a_grid.empty()) {
        const auto as = parse_grid(o.a_grid, "--a-grid");
        csv << "t,a,re,im\n";
        for (double t : ts) {
            const auto nu = fam.nu(t);
            for (double a : as) {
                const Complex c = nu->cf(a * dir);
                csv << num(t) << ',' << num(a) << ',' << num(c.real()) << ',' << num(c.imag())
                    << '\n';
            }
        }
    } else if (!o.y_grid.empty()) {
        const auto ys = parse_grid(o.y_grid, "--y-grid");
        csv << "t,y,density\n";
        for (double t : ts) {
            std::vector<double> dens;
            if (const auto p = cauchy_closed_form(sc, t); p && p->scale > 0.0) {
                for (double y : ys) {
                    dens.push_back(cauchy_pdf(y, p->location, p->scale));
                }
            } else {
                dens = fft_density(*fam.nu(t), dir, ys);
            }
            for (std::size_t i = 0; i < ys.size(); ++i) {
                csv << num(t) << ',' << num(ys[i]) << ',' << num(dens[i]) << '\n';
            }
        }
    } else {
        csv << 't';
        for (std::size_t i = 1; i <= d; ++i) {
            csv << ",b_" << i;
        }
        for (std::size_t i = 1; i <= d; ++i) {
            for (std::size_t j = 1; j <= d; ++j) {
                csv << ",R_" << i << j;
            }
        }
        csv << '\n';
        for (double t : ts) {
            const auto nu = fam.nu(t);
            csv << num(t);
            for (Eigen::Index i = 0; i < nu->b().size(); ++i) {
                csv << ',' << num(nu->b()(i));
            }
            for (Eigen::Index i = 0; i < nu->R().rows(); ++i) {
                for (Eigen::Index j = 0; j < nu->R().cols(); ++j) {
                    csv << ',' << num(nu->R()(i, j));
                }
            }
            csv << '\n';
        }
    }
    emit(o.out, csv.str(), out);
    return kOk;
}

int cmd_verify(const Scenario& sc, const Options& o, std::ostream& out) {
    const auto pairs = parse_pairs(o.pairs);
    const std::size_t d = sc.dim();
    const Vector dir = parse_direction(o.direction, d);
    std::vector<Vector> as;
    for (double a : parse_grid(o.a_grid.empty() ? "-3:3:0.5" : o.a_grid, "--a-grid")) {
        as.push_back(a * dir);
    }
    const EvolutionFamily fam = build_family(sc, pairs.front().second);

    json report;
    double worst = 0.0;
    report["pairs"] = json::array();
    for (const auto& [s, t] : pairs) {
        const double e = verify_identity_cf(fam, s, t, as);
        worst = std::max(worst, e);
        report["pairs"].push_back({{"s", s}, {"t", t}, {"cf_error", e}});
    }
    report["max_cf_error"] = worst;

    const std::size_t runs = o.runs == 0 ? 10000 : o.runs;
    const std::size_t steps = o.steps == 0 ? 200 : o.steps;
    report["ks_distance"] = nullptr;
    if (d == 1 && !sc.noise().is_compound_poisson()) {
        RngStream rng(sc.seed());
        const auto& [s, t] = pairs.front();
        report["ks_distance"] = verify_identity_convolution(fam, s, t, runs, rng, steps);
        report["ks_samples"] = runs;
    }

    const ExistenceReport& ex = fam.report();
    report["cond_i"] = ex.cond_i.value;
    report["cond_i_holds"] = ex.cond_i.holds;
    report["cond_ii"] = ex.cond_ii.value;
    report["cond_ii_holds"] = ex.cond_ii.holds;
    report["cond_ii_majorant_rate"] = ex.cond_ii_majorant_rate;
    report["horizon"] = ex.horizon;
    report["decay"] = decay_json(ex.decay);
    emit(o.out, report.dump(2) + "\n", out);
    return kOk;
}

int cmd_simulate(const Scenario& sc, const Options& o, std::ostream& out, std::ostream& err) {
    if (o.s > o.t) {
        throw UsageError("simulate: need s <= t");
    }
    Scheme scheme;
    if (o.scheme == "exact") {
        scheme = Scheme::ExactRepr;
    } else if (o.scheme == "euler") {
        scheme = Scheme::Euler;
    } else {
        throw UsageError("--scheme: expected exact or euler");
    }
    const std::size_t d = sc.dim();
    const Vector x = parse_vector(o.x, d, "--x");
    const std::size_t runs = o.runs == 0 ? 1000 : o.runs;
    const std::size_t steps = o.steps == 0 ? 1000 : o.steps;

    const MonteCarloResult mc = terminal_samples(sc, o.s, o.t, x, runs, steps, scheme);

    std::ostringstream csv;
    for (std::size_t i = 1; i <= d; ++i) {
        csv << (i == 1 ? "" : ",") << "x_" << i;
    }
    csv << '\n';
    for (const auto& v : mc.terminal) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            csv << (i == 0 ? "" : ",") << num(v(i));
        }
        csv << '\n';
    }
    emit(o.out, csv.str(), out);

    const auto di = static_cast<Eigen::Index>(d);
    Vector mean = Vector::Zero(di);
    for (const auto& v : mc.terminal) {
        mean += v;
    }
    mean /= static_cast<double>(runs);
    Matrix cov = Matrix::Zero(di, di);
    for (const auto& v : mc.terminal) {
        cov += (v - mean) * (v - mean).transpose();
    }
    if (runs > 1) {
        cov /= static_cast<double>(runs - 1);
    }
    double jumps = 0.0;
    for (std::size_t j : mc.jumps) {
        jumps += static_cast<double>(j);
    }

    json summary;
    summary["runs"] = runs;
    summary["steps"] = steps;
    summary["scheme"] = o.scheme;
    summary["seed"] = sc.seed();
    summary["s"] = o.s;
    summary["t"] = o.t;
    summary["mean"] = std::vector<double>(mean.data(), mean.data() + d);
    summary["covariance"] = json::array();
    for (Eigen::Index i = 0; i < di; ++i) {
        std::vector<double> row;
        for (Eigen::Index j = 0; j < di; ++j) {
            row.push_back(cov(i, j));
        }
        summary["covariance"].push_back(row);
    }
    summary["mean_jumps"] = jumps / static_cast<double>(runs);
    if (!o.a_grid.empty()) {
        const Vector dir = parse_direction(o.direction, d);
        summary["empirical_cf"] = json::array();
        for (double a : parse_grid(o.a_grid, "--a-grid")) {
            const Complex c = empirical_cf(mc.terminal, a * dir);
            summary["empirical_cf"].push_back({{"a", a}, {"re", c.real()}, {"im", c.imag()}});
        }
    }
    const std::string summary_path =
        !o.summary.empty() ? o.summary : (o.out.empty() ? std::string() : o.out + ".summary.json");
    emit(summary_path, summary.dump(2) + "\n", err);

    if (!o.path.empty()) {
        RngStream rng = RngStream(sc.seed()).fork(0);
        std::ostringstream path_csv;
        write_path_csv(path_csv, EulerSimulator(sc, o.s, o.t, x, steps).path(rng));
        emit(o.path, path_csv.str(), out);
    }
    return kOk;
}

int cmd_decay(const Scenario& sc, const Options& o, bool s_given, std::ostream& out) {
    const double t_max = o.t;
    const double t_min = s_given ? o.s : t_max - sc.numerics().decay_window;
    const std::size_t samples = o.samples == 0 ? sc.numerics().decay_samples : o.samples;
    const DecayEstimate est = estimate_decay(sc.evolution(), t_min, t_max, samples);
    json report = decay_json(est);
    report["samples"] = samples;
    emit(o.out, report.dump(2) + "\n", out);
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Non-autonomous Ornstein-Uhlenbeck processes with Levy noise", "levy_ou"};
    app.require_subcommand(1);
    Options o;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Scenario JSON file")->required();
        sub->add_option("--out", o.out, "Output file (default stdout)");
        sub->add_option("--seed", o.seed, "Override the config seed");
        sub->add_option("--direction", o.direction,
                        "Comma-separated direction e; grids act on a*e (default e_1)");
    };

    auto* cf = app.add_subcommand("cf", "Characteristic function of X_{s,x}(t)");
    common(cf);
    cf->add_option("--s", o.s, "Start time");
    cf->add_option("--t", o.t, "End time");
    cf->add_option("--x", o.x, "Initial state, comma-separated");
    cf->add_option("--a-grid", o.a_grid, "lo:hi:step");

    auto* family = app.add_subcommand("family", "Evolution system of measures nu_t");
    common(family);
    CLI::Option* family_t = family->add_option("--t", o.t, "Single time");
    family->add_option("--t-grid", o.t_grid, "lo:hi:step");
    family->add_option("--a-grid", o.a_grid, "Characteristic function grid lo:hi:step");
    family->add_option("--y-grid", o.y_grid, "Density grid lo:hi:step");

    auto* verify = app.add_subcommand("verify", "Check existence conditions and identities");
    common(verify);
    verify->add_option("--pairs", o.pairs, "s:t[,s:t...] (default 0:1)");
    verify->add_option("--a-grid", o.a_grid, "lo:hi:step (default -3:3:0.5)");
    verify->add_option("--runs", o.runs, "Samples for the convolution identity (default 10000)");
    verify->add_option("--steps", o.steps, "Time steps per sample (default 200)");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo terminal states");
    common(simulate);
    simulate->add_option("--s", o.s, "Start time");
    simulate->add_option("--t", o.t, "End time");
    simulate->add_option("--x", o.x, "Initial state, comma-separated");
    simulate->add_option("--runs", o.runs, "Number of runs (default 1000)");
    simulate->add_option("--steps", o.steps, "Time steps per run (default 1000)");
    simulate->add_option("--scheme", o.scheme, "exact or euler");
    simulate->add_option("--a-grid", o.a_grid, "Empirical characteristic function grid");
    simulate->add_option("--summary", o.summary, "Summary JSON (default <out>.summary.json)");
    simulate->add_option("--path", o.path, "Write one Euler path as CSV");

    auto* decay = app.add_subcommand("decay", "Fit ||U(t,s)|| <= C exp(-eps (t-s))");
    common(decay);
    CLI::Option* decay_s = decay->add_option("--s", o.s, "Window start (default t - decay_window)");
    decay->add_option("--t", o.t, "Window end");
    decay->add_option("--samples", o.samples, "Grid points (default from numerics)");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("levy_ou");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        Scenario sc = load_scenario(o.config);
        for (CLI::App* sub : app.get_subcommands()) {
            for (CLI::Option* opt : sub->get_options()) {
                if (opt->get_name() == "--seed" && opt->count() > 0) {
                    sc = sc.with_seed(o.seed);
                }
            }
        }
        if (cf->parsed()) {
            return cmd_cf(sc, o, out);
        }
        if (family->parsed()) {
            return cmd_family(sc, o, family_t->count() > 0, out);
        }
        if (verify->parsed()) {
            return cmd_verify(sc, o, out);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sc, o, out, err);
        }
        return cmd_decay(sc, o, decay_s->count() > 0, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericFailure;
    }
}

}  // namespace levyou::cli
