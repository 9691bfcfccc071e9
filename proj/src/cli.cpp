#include "ancestral/cli.hpp"

#include "ancestral/counterexample.hpp"
#include "ancestral/coupling.hpp"
#include "ancestral/errors.hpp"
#include "ancestral/genealogy.hpp"
#include "ancestral/io.hpp"
#include "ancestral/model.hpp"
#include "ancestral/simulator.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace ancestral::cli {

namespace {

using nlohmann::json;

struct Options {
    double alpha = 0.5;
    double pa = 1.0;
    double pb = 0.075;
    int N = 10;
    std::vector<int> N_list;
    std::uint64_t reps = 100000;
    std::uint64_t seed = 1;
    int points = 500;
    double pb_min = 0.0;
    double pb_max = 0.2;
    int workers = 0;
    int T = 2;
    std::string out;
    std::string model_path;
    std::string xi, eta;
    std::vector<int> nu;
    bool oracle = false;
    bool brute_force = false;

    model::CounterexampleParams params() const { return {alpha, pa, pb}; }
    Exec exec() const { return Exec::with_workers(workers); }
};

void add_params(CLI::App* sub, Options& o) {
    sub->add_option("--alpha", o.alpha, "initial probability of state a")->capture_default_str();
    sub->add_option("--pa", o.pa, "potential of state a")->capture_default_str();
    sub->add_option("--pb", o.pb, "potential of state b")->capture_default_str();
}

void add_mc(CLI::App* sub, Options& o) {
    sub->add_option("--reps", o.reps, "Monte Carlo replicates")->capture_default_str();
    sub->add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
    sub->add_option("--workers", o.workers, "OpenMP threads (0 = runtime default)")
        ->capture_default_str();
}

void add_out(CLI::App* sub, Options& o) {
    sub->add_option("--out", o.out, "output path (default: standard output)");
}

void add_n_list(CLI::App* sub, Options& o, std::vector<int> fallback) {
    o.N_list = std::move(fallback);
    sub->add_option("--N-list", o.N_list, "comma-separated particle counts")
        ->delimiter(',')
        ->capture_default_str();
}

/// Writes `text` to --out if set, else to `out`.
void emit(const Options& o, std::ostream& out, const std::string& text) {
    if (o.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) throw ParameterError("cannot open output file " + o.out);
    file << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json report_json(const model::CounterexampleParams& p, const model::AnalyticReport& r) {
    return {{"schema", "ancestral.analytic_report/1"},
            {"alpha", p.alpha}, {"p_a", p.p_a}, {"p_b", p.p_b},
            {"q_a", r.q_a}, {"q_b", r.q_b}, {"q_a_prime", r.q_a_prime},
            {"q_b_prime", r.q_b_prime}, {"t1", r.t1}, {"t2", r.t2}, {"t3", r.t3}, {"R", r.R}};
}

json estimate_json(int N, const counterexample::ConditionalEstimate& e) {
    return {{"schema", "ancestral.mc_conditional/1"},
            {"N", N},
            {"raw_reps", e.raw_reps},
            {"conditioned_hits", e.conditioned_hits},
            {"target_hits", e.target_hits},
            {"p_hat", e.p_hat},
            {"scaled", e.scaled},
            {"std_err", e.std_err},
            {"seed", e.seed}};
}

json diagnostics_json(const counterexample::DiagnosticsReport& d) {
    json entries = json::array();
    for (const auto& e : d.entries)
        entries.push_back({{"name", e.name},
                           {"empirical", e.empirical},
                           {"std_err", e.std_err},
                           {"analytic", e.analytic},
                           {"support", e.support},
                           {"empty", e.empty},
                           {"within_3se", e.within(3.0)}});
    return {{"schema", "ancestral.diagnostics/1"},
            {"N", d.N},
            {"reps", d.reps},
            {"seed", d.seed},
            {"entries", std::move(entries)}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Genealogies of weighted particle systems: ancestral transition formula, "
                 "two-state counterexample and coupling checks"};
    app.name("ancestral");
    app.require_subcommand(1, 1);
    Options o;
    std::function<void()> action;

    auto* r_eval = app.add_subcommand("r-eval", "analytic lower bound R and its factors (JSON)");
    add_params(r_eval, o);
    add_out(r_eval, o);
    r_eval->callback([&] {
        action = [&] { emit(o, out, dump(report_json(o.params(), model::analytic_report(o.params())))); };
    });

    auto* r_curve = app.add_subcommand("r-curve", "R(alpha, p_a, p_b) over a p_b grid (CSV)");
    add_params(r_curve, o);
    r_curve->add_option("--pb-min", o.pb_min, "lower grid end; 0 means the open end")
        ->capture_default_str();
    r_curve->add_option("--pb-max", o.pb_max, "upper grid end")->capture_default_str();
    r_curve->add_option("--points", o.points, "grid size")->capture_default_str();
    add_out(r_curve, o);
    r_curve->callback([&] {
        action = [&] {
            std::ostringstream s;
            model::write_r_curve_csv(s, model::r_curve(o.alpha, o.pa, o.pb_min, o.pb_max, o.points));
            emit(o, out, s.str());
        };
    });

    auto* simulate = app.add_subcommand("simulate", "simulate a particle system (trajectory JSON)");
    add_params(simulate, o);
    simulate->add_option("--model", o.model_path, "model JSON {labels, initial_law, kernel, potential}; "
                                                  "default is the two-state model");
    simulate->add_option("--N", o.N, "particle count")->capture_default_str();
    simulate->add_option("--T", o.T, "resampling steps")->capture_default_str();
    simulate->add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
    add_out(simulate, o);
    simulate->callback([&] {
        action = [&] {
            sim::DiscreteModel m;
            if (o.model_path.empty()) {
                m = sim::DiscreteModel::two_state(o.alpha, o.pa, o.pb);
            } else {
                std::ifstream in(o.model_path);
                if (!in) throw ParameterError("cannot open model file " + o.model_path);
                json j;
                try {
                    in >> j;
                } catch (const json::exception& e) {
                    throw ParameterError(std::string("model file is not JSON: ") + e.what());
                }
                m = sim::DiscreteModel::from_json(j);
            }
            emit(o, out, dump(sim::simulate(m, o.N, o.T, o.seed).to_json()));
        };
    });

    auto* mohle = app.add_subcommand("mohle", "ancestral transition probability given offspring counts");
    mohle->add_option("--xi", o.xi, "partition before the step, e.g. 1|2")->required();
    mohle->add_option("--eta", o.eta, "partition after the step, e.g. 1,2")->required();
    mohle->add_option("--nu", o.nu, "offspring counts, comma-separated")->delimiter(',')->required();
    mohle->add_option("--N", o.N, "particle count")->required();
    mohle->add_flag("--brute-force,--oracle", o.brute_force, "enumerate parental vectors instead");
    mohle->callback([&] {
        action = [&] {
            const auto xi = genealogy::Partition::parse(o.xi);
            const auto eta = genealogy::Partition::parse(o.eta);
            const sim::OffspringCounts nu{o.nu};
            const double p = o.brute_force ? genealogy::brute_force_transition(xi, eta, nu, o.N)
                                           : genealogy::mohle_transition(xi, eta, nu, o.N);
            emit(o, out, io::format_real(p) + "\n");
        };
    });

    auto* exact = app.add_subcommand("exact-cond", "exact P(a_2^1 = 1 | nu_2^1 = 2, nu_1^1 = 2)");
    add_params(exact, o);
    exact->add_option("--N", o.N, "particle count")->required();
    exact->add_flag("--oracle", o.oracle, "full enumeration (N <= 6)");
    exact->callback([&] {
        action = [&] {
            const double p = o.oracle ? counterexample::brute_force_conditional(o.params(), o.N)
                                      : counterexample::exact_conditional(o.params(), o.N);
            emit(o, out, io::format_real(p) + "\n");
        };
    });

    auto* mc = app.add_subcommand("mc-cond", "rejection Monte Carlo estimate of the conditional (JSON)");
    add_params(mc, o);
    mc->add_option("--N", o.N, "particle count")->required();
    add_mc(mc, o);
    add_out(mc, o);
    mc->callback([&] {
        action = [&] {
            const auto est = counterexample::mc_conditional(o.params(), o.N, o.reps, o.seed, o.exec());
            emit(o, out, dump(estimate_json(o.N, est)));
        };
    });

    auto* diag = app.add_subcommand("diagnostics", "empirical limits against analytic values (JSON)");
    add_params(diag, o);
    diag->add_option("--N", o.N, "particle count")->required();
    add_mc(diag, o);
    add_out(diag, o);
    diag->callback([&] {
        action = [&] {
            emit(o, out, dump(diagnostics_json(
                             counterexample::limit_diagnostics(o.params(), o.N, o.reps, o.seed, o.exec()))));
        };
    });

    auto* coup = app.add_subcommand("coupling", "coupling mismatch rates per N (CSV)");
    add_params(coup, o);
    add_n_list(coup, o, {25, 50, 100, 200});
    add_mc(coup, o);
    add_out(coup, o);
    coup->callback([&] {
        action = [&] {
            const auto rates = coupling::mismatch_rates(o.params(), o.N_list, o.reps, o.seed, o.exec());
            std::ostringstream s;
            coupling::write_mismatch_csv(s, rates);
            s << "# tilde_slope=" << io::format_real(rates.tilde_slope)
              << " hat_slope=" << io::format_real(rates.hat_slope) << '\n';
            emit(o, out, s.str());
        };
    });

    auto* indep = app.add_subcommand("independence", "chi-square independence of coupled variables (JSON)");
    add_params(indep, o);
    indep->add_option("--N", o.N, "particle count")->required();
    add_mc(indep, o);
    add_out(indep, o);
    indep->callback([&] {
        action = [&] {
            emit(o, out, dump(coupling::to_json(
                             coupling::independence_test(o.params(), o.N, o.reps, o.seed, o.exec()))));
        };
    });

    auto* report = app.add_subcommand("report", "exact vs predicted vs Monte Carlo table (CSV)");
    add_params(report, o);
    add_n_list(report, o, {3, 4, 5, 10, 50});
    add_mc(report, o);
    add_out(report, o);
    report->callback([&] {
        action = [&] {
            std::ostringstream s;
            counterexample::write_report_csv(
                s, counterexample::counterexample_report(o.params(), o.N_list, o.reps, o.seed, o.exec()));
            emit(o, out, s.str());
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (action) action();
        return kExitOk;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ContractViolation& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ZeroSupportError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace ancestral::cli
