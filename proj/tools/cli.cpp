#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gfaccess/analytic.hpp"
#include "gfaccess/bundled.hpp"
#include "gfaccess/optimizer.hpp"
#include "gfaccess/simulator.hpp"
#include "gfaccess/stopping_sets.hpp"

namespace gfaccess::cli {

namespace {

using json = nlohmann::ordered_json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

struct SystemChoice {
    std::string system;
    std::vector<int> random;  // {M, K}

    bool given() const { return !system.empty() || !random.empty(); }
};

struct Loaded {
    PatternCodebook codebook;
    std::string label;
    std::string path;
};

Loaded load_choice(const SystemChoice& choice) {
    if (!choice.random.empty()) {
        if (choice.random.size() != 2) throw CLI::ValidationError("--random", "expects M,K");
        auto cb = PatternCodebook::random(choice.random[0], choice.random[1]);
        return {cb, cb.name(), ""};
    }
    const auto path = resolve_system(choice.system);
    auto cb = load_system(choice.system);
    return {cb, cb.name(), path.string()};
}

// Steiner: one user per pattern. Random: the population of the matching
// pairwise design when one exists, so both laws see the same N.
int default_population(const PatternCodebook& cb) {
    if (cb.is_steiner()) return static_cast<int>(cb.C());
    try {
        return static_cast<int>(derive_params(2, cb.K(), cb.M()).C);
    } catch (const std::exception&) {
        return cb.M();
    }
}

Marginalization parse_convention(const std::string& s) {
    if (s == "peer") return Marginalization::Peer;
    if (s == "population") return Marginalization::Population;
    throw CLI::ValidationError("--convention", "expected peer or population");
}

ReceiverModel parse_receiver(const std::string& s) {
    if (s == "collision") return ReceiverModel::Collision;
    if (s == "collision-sic") return ReceiverModel::CollisionSic;
    if (s == "mrc") return ReceiverModel::FullMrc;
    if (s == "mrc-sic") return ReceiverModel::FullMrcSic;
    throw CLI::ValidationError("--model", "expected collision, collision-sic, mrc or mrc-sic");
}

OutageModel parse_analytic(const std::string& s, const std::string& approx) {
    if (s == "collision") return OutageModel::Collision;
    if (s == "collision-sic") return OutageModel::CollisionSic;
    if (s == "mrc") return approx == "gamma" ? OutageModel::FullMrcGamma : OutageModel::FullMrc;
    if (s == "mrc-gamma") return OutageModel::FullMrcGamma;
    if (s == "mrc-sic") throw CLI::ValidationError("--model", "mrc-sic has no analytic model; use simulate");
    throw CLI::ValidationError("--model", "expected collision, collision-sic or mrc");
}

std::string format_double(double v) {
    std::ostringstream ss;
    ss << std::setprecision(10) << v;
    return ss.str();
}

class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw Error("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

json manifest(const std::string& subcommand, json parameters, const std::vector<std::string>& inputs,
              const std::string& out, std::optional<std::uint64_t> seed) {
    json m;
    m["subcommand"] = subcommand;
    m["parameters"] = std::move(parameters);
    m["inputs"] = inputs;
    m["output"] = out.empty() ? "-" : out;
    if (seed) {
        m["seed"] = *seed;
    } else {
        m["seed"] = nullptr;
    }
    m["version"] = kVersion;
    return m;
}

const CLI::Validator kNonEmpty(
    [](std::string& v) { return v.find_first_not_of(" \t") == std::string::npos ? std::string("empty value") : std::string(); },
    "NONEMPTY");

void add_system_options(CLI::App* cmd, SystemChoice& choice) {
    cmd->add_option("--system", choice.system, "Bundled system name (e.g. S(2,4,25)) or codebook path");
    cmd->add_option("--random", choice.random, "Random selection with M,K")->delimiter(',')->expected(2);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Grant-free access with Steiner-system and random repetition patterns"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // verify
    auto* verify = app.add_subcommand("verify", "Check every codebook invariant");
    std::string verify_path;
    verify->add_option("codebook", verify_path, "Codebook file or bundled system name")->required();

    // stopping-sets
    auto* stop = app.add_subcommand("stopping-sets", "Enumerate stopping sets and emit a JSON catalog");
    SystemChoice stop_sys;
    int n_max = 0;
    int n_min = 0;
    long long budget = 0;
    int stop_threads = 0;
    bool collect = false;
    std::string stop_out;
    stop->add_option("--system", stop_sys.system, "Bundled system name or codebook path")->required();
    stop->add_option("--n-max", n_max, "Largest order to enumerate")->required();
    stop->add_option("--n-min", n_min, "Smallest order (default: analytic lower bound)");
    stop->add_option("--budget", budget, "Search-node cap, 0 for none");
    stop->add_option("--threads", stop_threads, "Worker threads (default: all cores)");
    stop->add_flag("--collect", collect, "Include the sets themselves");
    stop->add_option("--out", stop_out, "Output file (default stdout)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Analytic outage curves as CSV");
    SystemChoice an_sys;
    std::string an_model = "collision";
    std::string approx;
    std::vector<double> an_snr;
    std::vector<double> an_bn;
    double an_rate = 2.0;
    int an_population = 0;
    std::string an_convention = "peer";
    int an_intervals = 4096;
    std::string an_out;
    add_system_options(analyze, an_sys);
    analyze->add_option("--model", an_model, "collision | collision-sic | mrc");
    analyze->add_option("--approx", approx, "Use 'gamma' for the gamma-fit MRC approximation");
    analyze->add_option("--snr-db", an_snr, "Mean received SNR grid in dB")->delimiter(',')->check(kNonEmpty)->required();
    analyze->add_option("--bn", an_bn, "Traffic intensity grid bN")->delimiter(',')->check(kNonEmpty)->required();
    analyze->add_option("--rate", an_rate, "Rate R in bits per channel use");
    analyze->add_option("--population", an_population, "Population N (default: C)");
    analyze->add_option("--convention", an_convention, "peer | population activation weighting");
    analyze->add_option("--grid", an_intervals, "Convolution grid intervals");
    analyze->add_option("--out", an_out, "Output file (default stdout)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo outage as JSON");
    SystemChoice sim_sys;
    std::string sim_model = "collision";
    std::vector<double> sim_snr;
    std::vector<double> sim_bn;
    double sim_rate = 2.0;
    long long frames = 100000;
    std::uint64_t seed = 1;
    int pilots = 0;
    bool correlated = false;
    bool per_slot = false;
    int sim_threads = 0;
    int sim_population = 0;
    std::string sim_out;
    add_system_options(sim, sim_sys);
    sim->add_option("--model", sim_model, "collision | collision-sic | mrc | mrc-sic");
    sim->add_option("--snr-db", sim_snr, "Mean received SNR in dB (list allowed)")->delimiter(',')->check(kNonEmpty)->required();
    sim->add_option("--bn", sim_bn, "Traffic intensity bN (list allowed)")->delimiter(',')->check(kNonEmpty)->required();
    sim->add_option("--rate", sim_rate, "Rate R in bits per channel use");
    sim->add_option("--frames", frames, "Frames per point");
    sim->add_option("--seed", seed, "Master seed");
    sim->add_option("--pilots", pilots, "Pilot pool size Q (0: perfect channel knowledge)");
    sim->add_flag("--correlated-mrc", correlated, "Exact combiner with complex gains");
    sim->add_flag("--per-slot-pilots", per_slot, "Random law: fresh pilot per slot (experimental)");
    sim->add_option("--threads", sim_threads, "Worker threads (default: all cores)");
    sim->add_option("--population", sim_population, "Population N (default: C)");
    sim->add_option("--out", sim_out, "Output file (default stdout)");

    // optimize
    auto* opt = app.add_subcommand("optimize", "Maximum rate under an outage target, CSV");
    std::vector<std::string> opt_systems;
    std::string opt_model = "mrc";
    std::string opt_approx;
    double target = 1e-5;
    double per_rep_db = 25.0;
    std::vector<double> opt_bn;
    double tolerance = 1e-3;
    std::string opt_convention = "peer";
    bool crossover = false;
    std::string opt_out;
    opt->add_option("--system", opt_systems, "Systems (repeat or separate with ';'; 'table' for all eight)")
        ->delimiter(';')
        ->required();
    opt->add_option("--model", opt_model, "collision | collision-sic | mrc");
    opt->add_option("--approx", opt_approx, "Use 'gamma' for the gamma-fit MRC approximation");
    opt->add_option("--target", target, "Outage target epsilon");
    opt->add_option("--snr-per-rep-db", per_rep_db, "theta*K in dB; theta = 10^(x/10)/K");
    opt->add_option("--bn", opt_bn, "Traffic intensity grid bN")->delimiter(',')->check(kNonEmpty)->required();
    opt->add_option("--tolerance", tolerance, "Bisection tolerance in bits");
    opt->add_option("--convention", opt_convention, "peer | population activation weighting");
    opt->add_flag("--crossover", crossover, "Append the orthogonal-allocation crossover per system");
    opt->add_option("--out", opt_out, "Output file (default stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion& e) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp") {
            out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
            return 0;
        }
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*verify) {
            std::filesystem::path path;
            try {
                path = resolve_system(verify_path);
            } catch (const Error&) {
                path = verify_path;
            }
            std::ifstream in(path);
            if (!in) {
                err << "cannot open " << path.string() << '\n';
                return 1;
            }
            try {
                const auto cb = load_codebook(in);
                if (!cb.is_steiner()) {
                    out << "nothing to verify: random selection descriptor M=" << cb.M() << " K=" << cb.K() << '\n';
                    return 0;
                }
                out << cb.name() << " C=" << cb.C() << " D=" << cb.D() << " OK\n";
                return 0;
            } catch (const InvariantViolation& e) {
                out << "INVALID: " << e.what() << "\nwitness:";
                for (auto w : e.witness()) out << ' ' << w;
                out << '\n';
                return 1;
            } catch (const ParseError& e) {
                out << "INVALID: parse error at " << e.what() << '\n';
                return 1;
            }
        }

        if (*stop) {
            const auto loaded = load_choice(stop_sys);
            if (!loaded.codebook.is_steiner()) throw CLI::ValidationError("--system", "needs a Steiner codebook");
            EnumerationOptions options;
            options.budget = budget;
            options.threads = stop_threads;
            options.collect_sets = collect;
            options.max_order = std::max(options.max_order, n_max);
            const auto& cb = loaded.codebook;
            const int bound = derive_params(cb.t(), cb.K(), cb.M()).n_lower_bound;
            StoppingSetCatalog catalog(cb.name());
            for (int n = n_min > 0 ? n_min : bound; n <= n_max; ++n) {
                catalog.add(enumerate_stopping_sets(cb, n, options));
            }
            json params;
            params["system"] = stop_sys.system;
            params["n_min"] = n_min > 0 ? n_min : bound;
            params["n_max"] = n_max;
            params["budget"] = budget;
            params["collect"] = collect;
            json doc = json::parse(catalog.to_json());
            doc["manifest"] = manifest("stopping-sets", params, {loaded.path}, stop_out, std::nullopt);
            Output o(stop_out, out);
            o.stream() << doc.dump(2) << '\n';
            return 0;
        }

        if (*analyze) {
            if (!an_sys.given()) throw CLI::ValidationError("--system", "give --system or --random");
            const auto loaded = load_choice(an_sys);
            const auto& cb = loaded.codebook;
            const OutageModel model = parse_analytic(an_model, approx);
            const Marginalization conv = parse_convention(an_convention);
            const int N = an_population > 0 ? an_population : default_population(cb);

            AnalyticSetup setup;
            setup.law = AccessLaw::of(cb);
            setup.mrc.intervals = an_intervals;
            StoppingSetCatalog catalog;
            if (model == OutageModel::CollisionSic) {
                if (!cb.is_steiner()) throw RandomLawUnsupported("collision-sic analysis needs a Steiner codebook");
                catalog = StoppingSetCatalog::build_for_sic(cb);
                setup.catalog = &catalog;
            }

            json params;
            params["system"] = loaded.label;
            params["model"] = to_string(model);
            params["snr_db"] = an_snr;
            params["bn"] = an_bn;
            params["rate"] = an_rate;
            params["population"] = N;
            params["convention"] = an_convention;
            params["grid"] = an_intervals;
            Output o(an_out, out);
            auto& os = o.stream();
            os << "# manifest: " << manifest("analyze", params, {loaded.path}, an_out, std::nullopt).dump() << '\n';
            os << "system,model,bN,theta_db,R,outage\n";
            for (double bn : an_bn) {
                const ActivationLaw act{N, std::min(1.0, bn / N)};
                for (double db : an_snr) {
                    const double theta = db_to_linear(db);
                    const double p = marginalize_over_U(
                        [&](int u) { return point_outage(model, an_rate, theta, u, setup); }, act, conv);
                    os << '"' << loaded.label << "\"," << to_string(model) << ',' << format_double(bn) << ','
                       << format_double(db) << ',' << format_double(an_rate) << ',' << std::setprecision(10) << p
                       << '\n';
                }
            }
            return 0;
        }

        if (*sim) {
            if (!sim_sys.given()) throw CLI::ValidationError("--system", "give --system or --random");
            const auto loaded = load_choice(sim_sys);
            const auto& cb = loaded.codebook;
            const int N = sim_population > 0 ? sim_population : default_population(cb);
            ReceiverSpec spec;
            spec.model = parse_receiver(sim_model);
            spec.impairments.pilots = pilots;
            spec.impairments.correlated_mrc = correlated;
            spec.impairments.per_slot_pilots = per_slot;

            json params;
            params["system"] = loaded.label;
            params["model"] = sim_model;
            params["snr_db"] = sim_snr;
            params["bn"] = sim_bn;
            params["rate"] = sim_rate;
            params["frames"] = frames;
            params["pilots"] = pilots;
            params["correlated_mrc"] = correlated;
            params["per_slot_pilots"] = per_slot;
            params["population"] = N;
            json doc;
            doc["manifest"] = manifest("simulate", params, {loaded.path}, sim_out, seed);
            doc["results"] = json::array();
            for (double bn : sim_bn) {
                for (double db : sim_snr) {
                    const FrameConfig cfg{N, std::min(1.0, bn / N), sim_rate, db_to_linear(db)};
                    const auto est = simulate(cb, cfg, spec, frames, seed, sim_threads);
                    json r;
                    r["config"] = {{"system", loaded.label}, {"model", sim_model},   {"N", N},
                                   {"b", cfg.b},             {"bn", bn},             {"snr_db", db},
                                   {"theta", cfg.theta},     {"rate", sim_rate},     {"pilots", pilots},
                                   {"correlated_mrc", correlated}};
                    r["seed"] = est.seed;
                    r["frames"] = est.frames;
                    r["activations"] = est.activations;
                    r["outage_events"] = est.outage_events;
                    if (est.activations > 0) {
                        r["estimate"] = est.estimate;
                        r["ci_low"] = est.ci_low;
                        r["ci_high"] = est.ci_high;
                    } else {
                        r["estimate"] = nullptr;
                        r["ci_low"] = nullptr;
                        r["ci_high"] = nullptr;
                    }
                    r["ci_method"] = est.ci_method;
                    r["wall_time"] = est.wall_time;
                    doc["results"].push_back(r);
                }
            }
            Output o(sim_out, out);
            o.stream() << doc.dump(2) << '\n';
            return 0;
        }

        if (*opt) {
            if (opt_bn.empty()) throw CLI::ValidationError("--bn", "needs at least one traffic intensity");
            std::vector<std::string> systems;
            for (const auto& s : opt_systems) {
                if (s == "table") {
                    systems.insert(systems.end(), table_systems().begin(), table_systems().end());
                } else {
                    systems.push_back(s);
                }
            }
            const OutageModel model = parse_analytic(opt_model, opt_approx);
            json params;
            params["systems"] = systems;
            params["model"] = to_string(model);
            params["target"] = target;
            params["snr_per_rep_db"] = per_rep_db;
            params["bn"] = opt_bn;
            params["tolerance"] = tolerance;
            params["convention"] = opt_convention;
            std::vector<std::string> inputs;
            for (const auto& s : systems) inputs.push_back(resolve_system(s).string());

            Output o(opt_out, out);
            auto& os = o.stream();
            os << "# manifest: " << manifest("optimize", params, inputs, opt_out, std::nullopt).dump() << '\n';
            write_curve_csv_header(os);
            std::vector<std::string> crossovers;
            for (const auto& s : systems) {
                const auto cb = load_system(s);
                CurveRequest req;
                req.model = model;
                req.setup.law = AccessLaw::of(cb);
                StoppingSetCatalog catalog;
                if (model == OutageModel::CollisionSic) {
                    catalog = StoppingSetCatalog::build_for_sic(cb);
                    req.setup.catalog = &catalog;
                }
                req.N = default_population(cb);
                req.theta = theta_per_repetition(per_rep_db, cb.K());
                req.eps = target;
                req.tolerance = tolerance;
                req.convention = parse_convention(opt_convention);
                const auto curve = rate_curve(req, opt_bn);
                const double theta_db = 10.0 * std::log10(req.theta);
                write_curve_csv_rows(os, cb.name(), theta_db, curve);
                if (crossover) {
                    std::string value;
                    try {
                        value = format_double(
                            crossover_traffic(curve, cb.K(), req.theta, target, cb.M(), cb.C()));
                    } catch (const NoCrossover&) {
                        value = "none";
                    }
                    crossovers.push_back("# crossover \"" + cb.name() + "\" bN*=" + value);
                }
            }
            for (const auto& line : crossovers) os << line << '\n';
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace gfaccess::cli
