#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "o2nc/errors.hpp"
#include "o2nc/run_io.hpp"
#include "o2nc/verify.hpp"

namespace {

// Exit codes: 0 success, 1 check failure, 2 bad configuration, 3 divergence.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kBadConfig = 2;
constexpr int kDiverged = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw o2nc::ConfigError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw o2nc::ConfigError("cannot write '" + path + "'");
    out << text;
}

void print_report(const o2nc::SuiteReport& rep) {
    for (const o2nc::CheckResult& c : rep.checks)
        std::cout << (c.pass ? "PASS" : "FAIL") << " " << rep.suite << "/" << c.name << ": "
                  << c.detail << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online-to-nonconvex conversion toolkit"};
    app.require_subcommand(1);

    // ---- params ----------------------------------------------------------
    auto* params_cmd = app.add_subcommand("params", "derive tuned constants");
    double p_eps = 0.0, p_lambda = 0.0, p_G = 0.0, p_sigma = 0.0, p_cx = 0.0;
    double p_delta_f = 0.0;
    std::string p_out;
    params_cmd->add_option("--epsilon", p_eps, "target accuracy")->required();
    params_cmd->add_option("--lambda", p_lambda, "stationarity sharpness")->required();
    params_cmd->add_option("--G", p_G, "Lipschitz constant")->required();
    params_cmd->add_option("--sigma", p_sigma, "oracle noise level");
    params_cmd->add_option("--cx", p_cx, "stability factor bound of the intended strategy");
    auto* p_df_opt = params_cmd->add_option("--delta-f", p_delta_f, "initial optimality gap");
    params_cmd->add_option("--out", p_out, "also write the JSON to this file");

    // ---- run -------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "execute seeded runs and write artifacts");
    std::string r_config, r_problem, r_problem_file, r_strategy, r_trace, r_out;
    std::size_t r_dim = 0, r_T = 0, r_epochs = 0, r_seeds = 0;
    std::uint64_t r_master = 0;
    double r_eps = 0, r_lambda = 0, r_sigma = 0, r_delta_f = 0, r_x0_fill = 0;
    double r_beta = 0, r_D = 0, r_mu = 0, r_eta = 0, r_gamma = 0;
    run_cmd->add_option("--config", r_config, "JSON config file (flags override its values)");
    run_cmd->add_option("--problem", r_problem, "builtin problem name");
    run_cmd->add_option("--problem-file", r_problem_file, "piecewise-linear problem JSON");
    run_cmd->add_option("--dim", r_dim, "dimension for dimension-parametric problems");
    run_cmd->add_option("--strategy", r_strategy,
                        "OPTION_I, OPTION_II, OPTION_III, ANCHORING or SF_SGD");
    run_cmd->add_option("--epsilon", r_eps, "target accuracy");
    run_cmd->add_option("--lambda", r_lambda, "stationarity sharpness");
    run_cmd->add_option("--sigma", r_sigma, "oracle noise level");
    run_cmd->add_option("--delta-f", r_delta_f, "initial optimality gap");
    run_cmd->add_option("--T", r_T, "rounds per run");
    run_cmd->add_option("--epochs", r_epochs, "epochs (ANCHORING)");
    run_cmd->add_option("--seeds", r_seeds, "number of seeded repetitions");
    run_cmd->add_option("--master-seed", r_master, "master seed");
    run_cmd->add_option("--x0-fill", r_x0_fill, "start point fill value");
    run_cmd->add_option("--beta", r_beta, "override the discount factor");
    run_cmd->add_option("--D", r_D, "override the comparator radius");
    run_cmd->add_option("--mu", r_mu, "override the regularization strength");
    run_cmd->add_option("--eta", r_eta, "override the learner step size");
    run_cmd->add_option("--gamma", r_gamma, "override the SF_SGD step size");
    run_cmd->add_option("--trace", r_trace, "trace mode: none, steps or dense");
    run_cmd->add_option("--out", r_out, "artifact directory");

    // ---- verify ----------------------------------------------------------
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    std::string v_suite = "all", v_params_file, v_report;
    std::uint64_t v_master = 1;
    std::size_t v_seeds = 50;
    verify_cmd->add_option("--suite", v_suite,
                           "identities, appendix, regret, equivalence or all");
    verify_cmd->add_option("--master-seed", v_master, "master seed");
    verify_cmd->add_option("--seeds", v_seeds, "seed count for the regret suite");
    verify_cmd->add_option("--params-file", v_params_file, "validate a parameter JSON instead");
    verify_cmd->add_option("--report", v_report, "write a machine-readable report here");

    // ---- equivalence -----------------------------------------------------
    auto* eq_cmd = app.add_subcommand("equivalence",
                                      "pathwise conversion vs schedule-free comparison");
    std::size_t e_T = 1000, e_dim = 10;
    double e_sigma = 0.1, e_eps = 1.0, e_lambda = 1.0, e_tol = 1e-8, e_x0 = 0.5;
    std::uint64_t e_master = 1;
    eq_cmd->add_option("--T", e_T, "rounds");
    eq_cmd->add_option("--dim", e_dim, "dimension");
    eq_cmd->add_option("--sigma", e_sigma, "oracle noise level");
    eq_cmd->add_option("--epsilon", e_eps, "target accuracy");
    eq_cmd->add_option("--lambda", e_lambda, "stationarity sharpness");
    eq_cmd->add_option("--tol", e_tol, "relative tolerance");
    eq_cmd->add_option("--x0-fill", e_x0, "start point fill value");
    eq_cmd->add_option("--master-seed", e_master, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadConfig;
    }

    try {
        if (*params_cmd) {
            std::optional<double> delta_f;
            if (p_df_opt->count()) delta_f = p_delta_f;
            const o2nc::ParamSet p =
                o2nc::derive_params(p_eps, p_lambda, p_G, p_sigma, p_cx, delta_f);
            const std::string text = o2nc::param_set_json(p);
            std::cout << text;
            if (!p_out.empty()) write_text(p_out, text);
            return kOk;
        }

        if (*run_cmd) {
            o2nc::RunConfig cfg;
            if (!r_config.empty()) cfg = o2nc::parse_run_config(slurp(r_config));
            if (run_cmd->count("--problem")) cfg.problem = r_problem;
            if (run_cmd->count("--problem-file")) cfg.problem_file = r_problem_file;
            if (run_cmd->count("--dim")) cfg.dim = r_dim;
            if (run_cmd->count("--strategy")) cfg.mode = o2nc::run_mode_from_name(r_strategy);
            if (run_cmd->count("--epsilon")) cfg.epsilon = r_eps;
            if (run_cmd->count("--lambda")) cfg.lambda = r_lambda;
            if (run_cmd->count("--sigma")) cfg.sigma = r_sigma;
            if (run_cmd->count("--delta-f")) cfg.delta_f = r_delta_f;
            if (run_cmd->count("--T")) cfg.T = r_T;
            if (run_cmd->count("--epochs")) cfg.epochs = r_epochs;
            if (run_cmd->count("--seeds")) cfg.seeds = r_seeds;
            if (run_cmd->count("--master-seed")) cfg.master_seed = r_master;
            if (run_cmd->count("--x0-fill")) cfg.x0_fill = r_x0_fill;
            if (run_cmd->count("--beta")) cfg.beta_override = r_beta;
            if (run_cmd->count("--D")) cfg.d_override = r_D;
            if (run_cmd->count("--mu")) cfg.mu_override = r_mu;
            if (run_cmd->count("--eta")) cfg.eta_override = r_eta;
            if (run_cmd->count("--gamma")) cfg.gamma_override = r_gamma;
            if (run_cmd->count("--trace")) cfg.trace = o2nc::trace_mode_from_name(r_trace);
            if (run_cmd->count("--out")) cfg.output_dir = r_out;

            const o2nc::RunOutput out = o2nc::execute_run(cfg);
            if (cfg.output_dir.empty()) std::cout << o2nc::summary_json(out);
            std::cerr << "expected certificate mean " << out.expected_certificate.mean << " (sem "
                      << out.expected_certificate.sem << ") over " << out.seeds.size()
                      << " seed(s)\n";
            return kOk;
        }

        if (*verify_cmd) {
            std::vector<o2nc::SuiteReport> reports;
            if (!v_params_file.empty()) {
                reports.push_back(o2nc::validate_params_json(slurp(v_params_file)));
            } else if (v_suite == "identities") {
                reports.push_back(o2nc::verify_identities(v_master));
            } else if (v_suite == "appendix") {
                reports.push_back(o2nc::verify_appendix(v_master));
            } else if (v_suite == "regret") {
                reports.push_back(o2nc::verify_regret(v_master, v_seeds));
            } else if (v_suite == "equivalence") {
                reports.push_back(o2nc::verify_equivalence_suite(v_master));
            } else if (v_suite == "all") {
                reports.push_back(o2nc::verify_identities(v_master));
                reports.push_back(o2nc::verify_appendix(v_master));
                reports.push_back(o2nc::verify_regret(v_master, v_seeds));
                reports.push_back(o2nc::verify_equivalence_suite(v_master));
            } else {
                throw o2nc::ConfigError("unknown suite '" + v_suite + "'");
            }
            bool pass = true;
            std::string combined;
            for (const o2nc::SuiteReport& rep : reports) {
                print_report(rep);
                pass = pass && rep.pass();
                combined += o2nc::suite_report_json(rep);
            }
            if (!v_report.empty()) write_text(v_report, combined);
            return pass ? kOk : kCheckFailed;
        }

        if (*eq_cmd) {
            const o2nc::Problem problem = o2nc::make_abs_sum(e_dim);
            const o2nc::ParamSet params =
                o2nc::derive_params(e_eps, e_lambda, problem.lipschitz_G, e_sigma, 16.0);
            const o2nc::EquivalenceReport rep = o2nc::verify_equivalence(
                problem, e_sigma, params, e_T, o2nc::Vec(e_dim, e_x0), e_master, e_tol);
            std::cout << (rep.pass ? "PASS" : "FAIL") << " equivalence: max relative discrepancy "
                      << "x " << rep.max_rel_x << ", y " << rep.max_rel_y << ", z "
                      << rep.max_rel_z << " over " << rep.rounds << " rounds (tol " << e_tol
                      << ")\n";
            return rep.pass ? kOk : kCheckFailed;
        }
    } catch (const o2nc::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kDiverged;
    } catch (const o2nc::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kBadConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailed;
    }
    return kBadConfig;
}
