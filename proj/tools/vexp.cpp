// Command-line front end: closed-form and Monte Carlo risks of
// variance-expanded Gaussian plug-in predictive densities, dominance
// cut-offs, damped-moment estimation, dominance scans, figure-data sweeps,
// and the self-verification suite.  All output is CSV (or JSON for
// `verify`); every file embeds its resolved configuration and seed.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure
// (solver/quadrature/applicability), 3 verification failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vexp/vexp.hpp"

namespace {

// Fixed default master seed so every run is reproducible out of the box;
// never derived from the clock.
constexpr std::uint64_t k_default_seed = 20260814;

struct CommandArgs {
    int d = 1;
    double sigma_x2 = 1.0;
    double sigma_y2 = 1.0;
    std::vector<double> alphas;
    std::vector<double> cs;
    std::string estimator = "identity";
    std::string theta_grid;
    std::size_t n_samples = 100000;
    std::uint64_t seed = k_default_seed;
    std::string out;
    std::string config;
    bool force_mc = false;
    double tol = 0.005;
    int threads = 0;
};

// Flat key=value configuration, applied after parsing so that values given
// on the command line always win.  Keys name long options without the
// leading dashes; blank lines and '#' comments are ignored.  Values pass
// through the same converters and validators as command-line input.
void apply_config(CLI::App* sub, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw vexp::domain_error("cannot read config file '" + path + "'");
    const auto strip = [](const std::string& s) {
        const char* ws = " \t\r\n";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string{};
        return s.substr(b, s.find_last_not_of(ws) - b + 1);
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = strip(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw vexp::domain_error("config file '" + path + "' line " + std::to_string(lineno) +
                                     ": expected key=value");
        const std::string key = strip(text.substr(0, eq));
        std::string value = strip(text.substr(eq + 1));
        if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                                  (value.front() == '\'' && value.back() == '\'')))
            value = value.substr(1, value.size() - 2);
        CLI::Option* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw vexp::domain_error("config file '" + path + "' line " + std::to_string(lineno) +
                                     ": unknown key '" + key + "'");
        if (opt->count() > 0) continue; // an explicit flag takes precedence
        opt->add_result(value);
        opt->run_callback();
    }
}

std::vector<double> parse_theta_grid(const std::string& spec) {
    double lo = 0.0, hi = 0.0;
    int n = 0;
    char trailing = 0;
    const int got = std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &lo, &hi, &n, &trailing);
    if (got != 3 || n < 1)
        throw vexp::domain_error("--theta-grid expects lo:hi:n with n >= 1, got '" + spec + "'");
    if (n == 1) {
        if (lo != hi)
            throw vexp::domain_error("--theta-grid with n = 1 needs lo == hi, got '" + spec + "'");
        return {lo};
    }
    if (n > 100000) throw vexp::domain_error("--theta-grid: n is implausibly large");
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return grid;
}

vexp::Estimator parse_estimator(const std::string& spec) {
    if (spec == "identity") return vexp::Estimator::identity();
    if (spec == "truncated") return vexp::Estimator::truncated_nonneg();
    if (spec == "js") return vexp::Estimator::james_stein();
    if (spec == "jsplus") return vexp::Estimator::james_stein_plus();
    if (spec.rfind("affine:", 0) == 0) {
        const double a = std::stod(spec.substr(7));
        return vexp::Estimator::affine(a);
    }
    if (spec.rfind("baranchik:", 0) == 0) {
        // baranchik:b applies shrinkage factor (1 - s(t)/t) with
        // s(t) = min(t, b): nondecreasing and bounded, the standard
        // sufficient conditions when 0 < b <= 2(d-2).
        const double b = std::stod(spec.substr(10));
        if (!(b > 0.0)) throw vexp::domain_error("--estimator baranchik:b needs b > 0");
        return vexp::Estimator::baranchik([b](double t) { return std::min(t, b); },
                                          vexp::fmt_g12(b));
    }
    throw vexp::domain_error(
        "--estimator must be identity|affine:a|truncated|js|jsplus|baranchik:b, got '" + spec +
        "'");
}

// Output sink: --out path, or stdout when omitted.
class OutputFile {
  public:
    explicit OutputFile(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw vexp::domain_error("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

void apply_threads(int threads) {
    if (threads < 0) throw vexp::domain_error("--threads must be >= 0");
    if (threads > 0) vexp::worker_count() = threads;
}

vexp::SweepRequest make_request(const CommandArgs& a, const char* default_grid) {
    vexp::SweepRequest req;
    req.model = vexp::Model{a.d, a.sigma_x2, a.sigma_y2};
    req.est = parse_estimator(a.estimator);
    if (!a.alphas.empty()) req.alphas = a.alphas;
    if (!a.cs.empty()) req.cs = a.cs;
    req.theta_grid = parse_theta_grid(a.theta_grid.empty() ? default_grid : a.theta_grid);
    req.n = a.n_samples;
    req.seed = a.seed;
    req.force_mc = a.force_mc;
    return req;
}

// Shared flag registration so every subcommand spells its options the same
// way; each returns the option pointer where a caller needs presence checks.
void add_model_flags(CLI::App* sub, CommandArgs& a) {
    sub->add_option("--d", a.d, "dimension of the mean vector")->check(CLI::PositiveNumber);
    sub->add_option("--sigma-x2", a.sigma_x2, "observation variance per coordinate")
        ->check(CLI::PositiveNumber);
    sub->add_option("--sigma-y2", a.sigma_y2, "target variance per coordinate")
        ->check(CLI::PositiveNumber);
}

void add_common_flags(CLI::App* sub, CommandArgs& a) {
    sub->add_option("--seed", a.seed, "master seed (fixed default, never wall-clock)")
        ->capture_default_str();
    sub->add_option("--out", a.out, "output file (default: stdout)");
    sub->add_option("--threads", a.threads, "worker threads (0 = hardware default)");
    sub->add_option("--config", a.config,
                    "flat key=value configuration file; command-line flags win");
}

void add_estimator_flag(CLI::App* sub, CommandArgs& a) {
    sub->add_option("--estimator", a.estimator,
                    "identity|affine:a|truncated|js|jsplus|baranchik:b")
        ->capture_default_str();
}

void add_alpha_flag(CLI::App* sub, CommandArgs& a) {
    sub->add_option("--alpha", a.alphas, "divergence index in [-1, 1) (repeatable)");
}

void add_samples_flag(CLI::App* sub, CommandArgs& a) {
    sub->add_option("--n-samples", a.n_samples, "Monte Carlo samples per evaluation")
        ->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"alpha-divergence risk toolkit for variance-expanded Gaussian predictive "
                 "densities"};
    app.require_subcommand(1);
    int rc = 0;

    CommandArgs risk_args;
    CLI::App* risk = app.add_subcommand(
        "risk", "risk of the expanded plug-in per (theta, c, alpha); closed form when available");
    add_model_flags(risk, risk_args);
    add_alpha_flag(risk, risk_args);
    risk->add_option("--c", risk_args.cs, "variance expansion factor c (repeatable)");
    add_estimator_flag(risk, risk_args);
    risk->add_option("--theta-grid", risk_args.theta_grid, "lo:hi:n grid of ||theta|| values");
    add_samples_flag(risk, risk_args);
    risk->add_flag("--force-mc", risk_args.force_mc,
                   "use Monte Carlo even when a closed form exists");
    add_common_flags(risk, risk_args);
    risk->callback([&] {
        apply_config(risk, risk_args.config);
        apply_threads(risk_args.threads);
        OutputFile out(risk_args.out);
        vexp::render_risk_csv(out.stream(), make_request(risk_args, "0:0:1"));
    });

    CommandArgs ratio_args;
    CLI::App* ratio = app.add_subcommand(
        "ratio", "risk of each expansion c over the unexpanded plug-in risk, per theta");
    add_model_flags(ratio, ratio_args);
    add_alpha_flag(ratio, ratio_args);
    ratio->add_option("--c", ratio_args.cs, "variance expansion factor c (repeatable)");
    add_estimator_flag(ratio, ratio_args);
    ratio->add_option("--theta-grid", ratio_args.theta_grid, "lo:hi:n grid of ||theta|| values");
    add_samples_flag(ratio, ratio_args);
    ratio->add_flag("--force-mc", ratio_args.force_mc,
                    "use Monte Carlo even when a closed form exists");
    add_common_flags(ratio, ratio_args);
    ratio->callback([&] {
        apply_config(ratio, ratio_args.config);
        apply_threads(ratio_args.threads);
        OutputFile out(ratio_args.out);
        vexp::render_ratio_csv(out.stream(), make_request(ratio_args, "0:0:1"));
    });

    CommandArgs cutoff_args;
    CLI::App* cutoff = app.add_subcommand(
        "cutoff", "guaranteed-dominance expansion threshold per alpha for the chosen estimator");
    add_model_flags(cutoff, cutoff_args);
    add_alpha_flag(cutoff, cutoff_args);
    add_estimator_flag(cutoff, cutoff_args);
    add_samples_flag(cutoff, cutoff_args);
    add_common_flags(cutoff, cutoff_args);
    cutoff->callback([&] {
        apply_config(cutoff, cutoff_args.config);
        apply_threads(cutoff_args.threads);
        OutputFile out(cutoff_args.out);
        vexp::render_cutoff_csv(out.stream(), make_request(cutoff_args, "0:0:1"));
    });

    CommandArgs epsilon_args;
    CLI::App* epsilon = app.add_subcommand(
        "epsilon", "infimum over theta of the damped quadratic-loss moment, per alpha");
    add_model_flags(epsilon, epsilon_args);
    add_alpha_flag(epsilon, epsilon_args);
    add_estimator_flag(epsilon, epsilon_args);
    epsilon->add_option("--theta-grid", epsilon_args.theta_grid,
                        "lo:hi:n search radii (default: 0 to 8 sigma_x, auto-extending)");
    add_samples_flag(epsilon, epsilon_args);
    add_common_flags(epsilon, epsilon_args);
    epsilon->callback([&] {
        apply_config(epsilon, epsilon_args.config);
        apply_threads(epsilon_args.threads);
        vexp::SweepRequest req = make_request(epsilon_args, "0:0:1");
        vexp::ThetaSpace space = vexp::ThetaSpace::radial_default(req.model);
        if (!epsilon_args.theta_grid.empty())
            space = vexp::ThetaSpace::explicit_grid(parse_theta_grid(epsilon_args.theta_grid));
        req.theta_grid = space.radii; // metadata reflects the actual search grid
        OutputFile out(epsilon_args.out);
        vexp::render_epsilon_csv(out.stream(), req, space);
    });

    CommandArgs scan_args;
    CLI::App* scan = app.add_subcommand(
        "scan", "paired Monte Carlo risk differences risk(c) - risk(1) over a theta grid");
    add_model_flags(scan, scan_args);
    add_alpha_flag(scan, scan_args);
    scan->add_option("--c", scan_args.cs, "variance expansion factor c (repeatable)");
    add_estimator_flag(scan, scan_args);
    scan->add_option("--theta-grid", scan_args.theta_grid, "lo:hi:n grid of ||theta|| values");
    add_samples_flag(scan, scan_args);
    add_common_flags(scan, scan_args);
    scan->callback([&] {
        apply_config(scan, scan_args.config);
        apply_threads(scan_args.threads);
        OutputFile out(scan_args.out);
        vexp::render_scan_csv(out.stream(), make_request(scan_args, "0:8:17"));
    });

    CommandArgs empirical_args;
    CLI::App* empirical = app.add_subcommand(
        "empirical-cutoff",
        "largest empirically undominated expansion: bisection on the scanned risk-difference "
        "supremum");
    add_model_flags(empirical, empirical_args);
    add_alpha_flag(empirical, empirical_args);
    add_estimator_flag(empirical, empirical_args);
    empirical->add_option("--theta-grid", empirical_args.theta_grid,
                          "lo:hi:n grid of ||theta|| values");
    add_samples_flag(empirical, empirical_args);
    empirical->add_option("--tol", empirical_args.tol,
                          "bisection tolerance on the squared expansion")
        ->capture_default_str();
    add_common_flags(empirical, empirical_args);
    empirical->callback([&] {
        apply_config(empirical, empirical_args.config);
        apply_threads(empirical_args.threads);
        OutputFile out(empirical_args.out);
        vexp::render_empirical_cutoff_csv(out.stream(), make_request(empirical_args, "0:8:17"),
                                          empirical_args.tol);
    });

    std::string figure_name;
    CommandArgs figure_args;
    double figure_budget = 1.0;
    CLI::App* figure =
        app.add_subcommand("figure", "emit the data behind one of the built-in figures");
    figure->add_option("name", figure_name, "fig1|fig2|fig3|fig4|fig5")
        ->required()
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "fig5"}));
    figure->add_option("--budget-scale", figure_budget,
                       "scale Monte Carlo sample counts (fig4/fig5)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_common_flags(figure, figure_args);
    figure->callback([&] {
        apply_config(figure, figure_args.config);
        apply_threads(figure_args.threads);
        OutputFile out(figure_args.out);
        const vexp::FigureData fig = vexp::make_figure(figure_name, figure_args.seed,
                                                       figure_budget);
        vexp::write_figure_csv(out.stream(), fig, figure_args.seed);
    });

    vexp::VerifyOptions verify_opts;
    std::string verify_out;
    std::string verify_config;
    int verify_threads = 0;
    CLI::App* verify = app.add_subcommand(
        "verify", "run the numerical verification suite; exit 3 if any check fails");
    verify->add_option("--criterion", verify_opts.criteria,
                       "restrict to these criterion numbers, 1-11 (repeatable)")
        ->check(CLI::Range(1, 11));
    verify->add_option("--budget-scale", verify_opts.budget_scale,
                       "scale Monte Carlo sample counts (1 = full budget)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify->add_option("--seed", verify_opts.seed, "master seed")->capture_default_str();
    verify->add_option("--out", verify_out, "write the JSON report here (default: stdout)");
    verify->add_option("--threads", verify_threads, "worker threads (0 = hardware default)");
    verify->add_option("--config", verify_config,
                       "flat key=value configuration file; command-line flags win");
    verify->callback([&] {
        apply_config(verify, verify_config);
        apply_threads(verify_threads);
        const std::vector<vexp::Check> checks = vexp::run_checks(verify_opts);
        int failed = 0;
        for (const auto& c : checks) {
            if (!c.pass) ++failed;
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.id << ": " << c.description
                      << " | expected " << c.expected << " | actual " << c.actual << "\n";
        }
        std::cout << (failed == 0 ? "all checks passed" : "checks failed") << " ("
                  << checks.size() - failed << "/" << checks.size() << ")\n";

        nlohmann::json report;
        report["artifact"] = "vexp";
        report["version"] = vexp::version_string;
        report["seed"] = verify_opts.seed;
        report["budget_scale"] = verify_opts.budget_scale;
        report["checks"] = nlohmann::json::array();
        for (const auto& c : checks)
            report["checks"].push_back({{"id", c.id},
                                        {"criterion", c.criterion},
                                        {"description", c.description},
                                        {"expected", c.expected},
                                        {"actual", c.actual},
                                        {"tolerance", c.tolerance},
                                        {"pass", c.pass}});
        report["passed"] = checks.size() - failed;
        report["failed"] = failed;
        report["all_pass"] = failed == 0;
        OutputFile out(verify_out);
        out.stream() << report.dump(2) << "\n";
        if (failed != 0) rc = 3;
    });

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e);
            return code == 0 ? 0 : 1;
        }
    } catch (const vexp::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const vexp::solver_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const vexp::quadrature_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const vexp::inapplicable_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
