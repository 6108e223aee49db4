#include "cli.hpp"

#include "affdim/error.hpp"
#include "affdim/extract.hpp"
#include "affdim/parallel.hpp"
#include "affdim/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

namespace affdim::cli {

namespace {

struct Globals {
    std::uint64_t seed = 0;
    int threads = 0;
    double budget = static_cast<double>(kDefaultBudget);
    bool timing = false;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidInput(std::string("bad number '") + item + "' in " + what);
        }
    }
    if (out.empty()) throw InvalidInput(std::string("empty list for ") + what);
    return out;
}

// "a:b:step" or a comma-separated list; must be strictly increasing.
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        std::string t = text;
        std::replace(t.begin(), t.end(), ':', ',');
        const auto p = parse_list(t, "--s-grid");
        if (p.size() != 3 || !(p[2] > 0) || !(p[1] >= p[0]))
            throw InvalidInput("--s-grid range must be start:stop:step with stop >= start and step > 0");
        const auto count = static_cast<long>(std::floor((p[1] - p[0]) / p[2] + 1e-9));
        for (long i = 0; i <= count; ++i) grid.push_back(p[0] + static_cast<double>(i) * p[2]);
    } else {
        grid = parse_list(text, "--s-grid");
    }
    if (grid.empty()) throw InvalidInput("--s-grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw InvalidInput("--s-grid must be strictly increasing");
    for (double s : grid)
        if (!(s >= 0)) throw InvalidInput("--s-grid values must be >= 0");
    return grid;
}

std::vector<int> parse_ks(const std::string& text) {
    std::vector<int> ks;
    for (double k : parse_list(text, "--k")) {
        if (k != std::floor(k)) throw InvalidInput("--k entries must be integers");
        ks.push_back(static_cast<int>(k));
    }
    return ks;
}

BernoulliMeasure choose_measure(const AffineIFS& ifs, const std::string& probs) {
    BernoulliMeasure m;
    if (!probs.empty()) m.probs = parse_list(probs, "--probs");
    else if (ifs.probs) m = *ifs.probs;
    else m = BernoulliMeasure::uniform(static_cast<std::size_t>(ifs.size()));
    m.validate(static_cast<std::size_t>(ifs.size()));
    return m;
}

std::size_t as_budget(double b) {
    if (!(b >= 1) || !std::isfinite(b)) throw InvalidInput("--budget must be a positive word count");
    return static_cast<std::size_t>(b);
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InvalidInput("report " + path + " is not valid JSON: " + e.what());
    }
}

double number_at(const Json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) throw InvalidInput(std::string("report lacks '") + key + "'");
    const Json& v = j[key];
    if (v.is_object()) return v.at("value").is_null() ? std::nan("") : v.at("value").get<double>();
    return v.get<double>();
}

bool close(double a, double b) {
    if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Recomputes the certificates of an extraction report from its word list.
Json verify_subsystem(const AffineIFS& ifs, const Json& sub, std::uint64_t seed, bool& consistent) {
    const int m = ifs.size();
    std::vector<Word> J;
    for (const auto& w : sub.at("words")) J.push_back(parse_word(w.get<std::string>(), m));
    if (J.empty()) throw InvalidInput("report has an empty word list");
    const std::size_t len = J.front().size();
    for (const auto& w : J)
        if (w.size() != len) throw InvalidInput("report words differ in length");
    const std::vector<int> ks = sub.at("ks").get<std::vector<int>>();
    const double eps = sub.at("eps").get<double>();
    std::vector<Matrix> family;
    for (const auto& w : J) family.push_back(linear_word_product(ifs, w));

    Json checks = Json::array();
    auto record = [&](const std::string& name, const Json& reported, const Json& recomputed, bool match) {
        checks.push_back(Json{{"check", name}, {"reported", reported}, {"recomputed", recomputed}, {"match", match}});
        consistent = consistent && match;
    };

    if (!sub.at("suffix").is_null()) {
        const Word suffix = parse_word(sub.at("suffix").get<std::string>(), m);
        bool all = true;
        for (const auto& w : J)
            all = all && w.size() >= suffix.size() && std::equal(suffix.begin(), suffix.end(), w.end() - static_cast<long>(suffix.size()));
        record("suffix_closure", true, all, all);
    }

    const Json& sch = sub.at("schottky");
    if (!ks.empty()) {
        const Json& per_k = sch.at("certificate").at("per_k");
        const double r = per_k.at(0).at("r").get<double>();
        const double eps_cert = per_k.at(0).at("eps").get<double>();
        SchottkyOptions so;
        so.sampling.seed = seed;
        const auto cert = verify_schottky_multik(family, ks, r, eps_cert, so);
        const bool reported_pass = sch.at("certificate").at("pass").get<bool>();
        record("schottky_pass", reported_pass, cert.pass, reported_pass == cert.pass);
        const bool reported_products = sch.at("certificate").at("products_pass").get<bool>();
        record("schottky_products", reported_products, cert.products_ok, reported_products == cert.products_ok);
        const auto& eta_rep = sub.at("narrowness").at("eta");
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const double eta = cert.per_k[i].narrowness;
            const double rep = eta_rep.at(i).get<double>();
            record("narrowness_k" + std::to_string(ks[i]), rep, eta, close(rep, eta) && (eta <= eps) == sub.at("narrowness").at("pass").get<bool>());
        }
        const double cross = cert.per_k.front().min_cross_separation;
        const double cross_rep = per_k.at(0).at("min_cross_separation").at("value").get<double>();
        record("cross_separation", cross_rep, cross, close(cross, cross_rep));
    }

    const double total_len = static_cast<double>(len);
    const double rate = std::log(static_cast<double>(J.size())) / total_len;
    const double rate_rep = sub.at("entropy").at("rate").get<double>();
    record("entropy_rate", rate_rep, rate, close(rate, rate_rep));

    const auto target = sub.at("cartan").at("target").get<std::vector<double>>();
    double beta = 0;
    for (const auto& A : family) {
        const Vector kappa = cartan_vector(A);
        for (Eigen::Index i = 0; i < kappa.size(); ++i)
            beta = std::max(beta, std::abs(kappa(i) / total_len - target[static_cast<std::size_t>(i)]));
    }
    const double beta_rep = number_at(sub.at("cartan"), "beta");
    record("cartan_beta", beta_rep, beta, std::abs(beta - beta_rep) <= 1e-9);
    return checks;
}

struct Context {
    Globals g;
    std::ostream& out;
    std::ostream& err;
    std::string command;
    std::string config;
    Json options = Json::object();

    RunManifest manifest(std::size_t budget) const {
        RunManifest m;
        m.command = command;
        m.config = config;
        m.seed = g.seed;
        m.budget = budget;
        m.options = options;
        return m;
    }
};

int exit_for(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::InsufficientBudget: return kBudget;
    case ErrorKind::StageEmpty:
    case ErrorKind::EmptyTypicalSet: return kStageEmpty;
    default: return kInput;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Affinity dimension, Lyapunov dimension and Schottky subsystem toolkit", "affdim"};
    app.require_subcommand(1);
    Context ctx{Globals{}, out, err, "", "", Json::object()};
    app.add_option("--seed", ctx.g.seed, "seed for every sampled quantity");
    app.add_option("--threads", ctx.g.threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
    app.add_option("--budget", ctx.g.budget, "word enumeration budget");
    app.add_flag("--timing", ctx.g.timing, "print wall-clock time to stderr");

    std::string config;
    std::function<int()> action;

    auto* dim_aff = app.add_subcommand("dim-aff", "affinity dimension bracket");
    double tol = 1e-8;
    dim_aff->add_option("config", config, "system JSON")->required();
    dim_aff->add_option("--tol", tol, "bracket tolerance");
    dim_aff->callback([&] {
        action = [&] {
            ctx.options = Json{{"tol", tol}};
            const AffineIFS ifs = load_system(config);
            PressureOptions po;
            po.budget = as_budget(ctx.g.budget);
            po.seed = ctx.g.seed;
            const auto d = affinity_dimension(ifs, tol, po);
            out << render_report(ctx.manifest(po.budget), to_json(d));
            return kOk;
        };
    });

    auto* dim_lyap = app.add_subcommand("dim-lyap", "Lyapunov exponents and dimension of a Bernoulli measure");
    std::string probs, mode = "exact";
    std::size_t trajectories = 256, steps = 2000;
    dim_lyap->add_option("config", config, "system JSON")->required();
    dim_lyap->add_option("--probs", probs, "comma-separated probabilities");
    dim_lyap->add_option("--mode", mode, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
    dim_lyap->add_option("--trajectories", trajectories, "Monte Carlo trajectories");
    dim_lyap->add_option("--steps", steps, "Monte Carlo steps per trajectory");
    dim_lyap->callback([&] {
        action = [&] {
            ctx.options = Json{{"mode", mode}, {"probs", probs}, {"trajectories", trajectories}, {"steps", steps}};
            const AffineIFS ifs = load_system(config);
            const auto measure = choose_measure(ifs, probs);
            LyapunovOptions lo;
            lo.mode = mode == "mc" ? LyapunovMode::MonteCarlo : LyapunovMode::ExactLevels;
            lo.budget = as_budget(ctx.g.budget);
            lo.trajectories = trajectories;
            lo.steps = steps;
            lo.seed = ctx.g.seed;
            const auto d = lyapunov_dimension(ifs, measure, lo);
            out << render_report(ctx.manifest(lo.budget), to_json(d));
            return kOk;
        };
    });

    auto* curve = app.add_subcommand("pressure-curve", "u_n(s) and its bracket over a grid of s");
    std::string grid_text, csv_path;
    curve->add_option("config", config, "system JSON")->required();
    curve->add_option("--s-grid", grid_text, "start:stop:step or comma list")->required();
    curve->add_option("--csv", csv_path, "write the CSV here instead of stdout");
    curve->callback([&] {
        action = [&] {
            ctx.options = Json{{"s_grid", grid_text}};
            const auto grid = parse_grid(grid_text);
            const AffineIFS ifs = load_system(config);
            contraction_certificate(ifs);
            PressureOptions po;
            po.budget = as_budget(ctx.g.budget);
            po.seed = ctx.g.seed;
            const PressureModel model(ifs, po);
            const std::string csv = pressure_curve_csv(model, grid);
            if (csv_path.empty()) {
                out << csv;
                return kOk;
            }
            std::ofstream f(csv_path);
            if (!f) throw InvalidInput("cannot write " + csv_path);
            f << csv;
            Json body = Json::array();
            for (double s : grid) body.push_back(to_json(model.evaluate(s)));
            out << render_report(ctx.manifest(po.budget), Json{{"csv", csv_path}, {"points", body}});
            return kOk;
        };
    });

    auto* dominated = app.add_subcommand("dominated", "k-domination test");
    int k = 1, n_max = 64;
    bool cone = false;
    dominated->add_option("config", config, "system JSON")->required();
    dominated->add_option("--k", k, "index k")->required();
    dominated->add_option("--n-max", n_max, "longest word length");
    dominated->add_flag("--cone", cone, "search for a sampled invariant cone witness");
    dominated->callback([&] {
        action = [&] {
            ctx.options = Json{{"k", k}, {"n_max", n_max}, {"cone", cone}};
            const AffineIFS ifs = load_system(config);
            DominationOptions d;
            d.n_max = n_max;
            d.budget = std::min(as_budget(ctx.g.budget), d.budget);
            d.cone_witness = cone;
            d.seed = ctx.g.seed;
            out << render_report(ctx.manifest(d.budget), to_json(domination_test(ifs, k, d)));
            return kOk;
        };
    });

    auto* prox = app.add_subcommand("prox", "proximal decomposition of a word");
    std::string word;
    double r = -1, eps = -1;
    int kp = 1;
    prox->add_option("config", config, "system JSON")->required();
    prox->add_option("--word", word, "word such as 112, or 1,12,3 for large alphabets")->required();
    prox->add_option("--k", kp, "exterior power");
    prox->add_option("--r", r, "certify (r, eps)-proximality with this r");
    prox->add_option("--eps", eps, "certify (r, eps)-proximality with this eps");
    prox->callback([&] {
        action = [&] {
            ctx.options = Json{{"word", word}, {"k", kp}};
            const AffineIFS ifs = load_system(config);
            const Word w = parse_word(word, ifs.size());
            const Matrix A = exterior_power(linear_word_product(ifs, w), kp);
            const auto data = proximal_decomposition(A);
            Json body{{"word", word_to_string(w, ifs.size())}, {"k", kp}, {"proximal", to_json(data)}};
            if (r > 0 && eps > 0) {
                SamplingConfig sc;
                sc.seed = ctx.g.seed;
                body["certificate"] = to_json(certify_proximal(A, data, r, eps, sc));
            }
            out << render_report(ctx.manifest(0), body);
            return kOk;
        };
    });

    auto* extract = app.add_subcommand("extract", "Schottky subsystem extraction");
    int n = 6;
    double eps_x = 0.3;
    std::string suffix_text, ks_text;
    extract->add_option("config", config, "system JSON")->required();
    extract->add_option("--n", n, "word length")->required();
    extract->add_option("--eps", eps_x, "tolerance");
    extract->add_option("--suffix", suffix_text, "suffix word i0");
    extract->add_option("--k", ks_text, "comma-separated exterior powers (default: proximality proxies)");
    extract->add_option("--probs", probs, "comma-separated probabilities");
    extract->callback([&] {
        action = [&] {
            ctx.options = Json{{"n", n}, {"eps", eps_x}, {"suffix", suffix_text}, {"k", ks_text}, {"probs", probs}};
            const AffineIFS ifs = load_system(config);
            const auto measure = choose_measure(ifs, probs);
            ExtractOptions eo;
            eo.typical.budget = as_budget(ctx.g.budget);
            eo.typical.seed = ctx.g.seed;
            eo.schottky.sampling.seed = ctx.g.seed;
            std::vector<int> ks;
            if (!ks_text.empty()) {
                ks = parse_ks(ks_text);
            } else {
                LyapunovOptions lo;
                lo.budget = eo.typical.lyapunov_budget;
                lo.seed = ctx.g.seed;
                ks = default_k_set(ifs, lyapunov_exponents(ifs, measure, lo).lambdas);
            }
            std::optional<Word> suffix;
            if (!suffix_text.empty()) suffix = parse_word(suffix_text, ifs.size());
            const auto rep = schottky_extract(ifs, measure, n, eps_x, ks, suffix, eo);
            out << render_report(ctx.manifest(eo.typical.budget), to_json(rep, ifs.size()));
            return kOk;
        };
    });

    auto* pipeline = app.add_subcommand("pipeline", "two-stage extraction with a Lyapunov dimension target");
    double delta = 0.3;
    int np = 6;
    double eps_p = 0.3;
    bool no_stage_two = false;
    pipeline->add_option("config", config, "system JSON")->required();
    pipeline->add_option("--delta", delta, "allowed dimension loss")->required();
    pipeline->add_option("--n", np, "block length");
    pipeline->add_option("--eps", eps_p, "tolerance");
    pipeline->add_flag("--no-stage-two", no_stage_two, "stop after the first extraction");
    pipeline->callback([&] {
        action = [&] {
            ctx.options = Json{{"delta", delta}, {"n", np}, {"eps", eps_p}, {"stage_two", !no_stage_two}};
            const AffineIFS ifs = load_system(config);
            PipelineOptions po;
            po.n = np;
            po.eps = eps_p;
            po.stage_two = !no_stage_two;
            po.budget = as_budget(ctx.g.budget);
            po.seed = ctx.g.seed;
            const auto rep = theorem16_pipeline(ifs, delta, po);
            out << render_report(ctx.manifest(po.budget), to_json(rep, ifs.size()));
            return kOk;
        };
    });

    auto* verify = app.add_subcommand("verify", "recompute certificates of an extract or pipeline report");
    std::string report_path;
    verify->add_option("config", config, "system JSON the report was produced from")->required();
    verify->add_option("report", report_path, "report JSON")->required();
    verify->callback([&] {
        action = [&] {
            const AffineIFS ifs = load_system(config);
            const Json doc = read_json_file(report_path);
            const Json& body = doc.at("report");
            const std::uint64_t seed = doc.at("manifest").at("seed").get<std::uint64_t>();
            bool consistent = true;
            Json result = Json::object();
            if (body.contains("stage_one")) {
                result["stage_one"] = verify_subsystem(ifs, body.at("stage_one"), seed, consistent);
                if (!body.at("stage_two").is_null()) result["stage_two"] = verify_subsystem(ifs, body.at("stage_two"), seed, consistent);
            } else {
                result["subsystem"] = verify_subsystem(ifs, body, seed, consistent);
            }
            result["consistent"] = consistent;
            ctx.options = Json{{"report", report_path}};
            out << render_report(ctx.manifest(0), result);
            return consistent ? kOk : kInput;
        };
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInput;
    }
    for (const auto* sub : app.get_subcommands()) ctx.command = sub->get_name();
    ctx.config = config;
    if (ctx.g.threads > 0) set_thread_count(ctx.g.threads);

    const auto start = std::chrono::steady_clock::now();
    int code = kOk;
    try {
        code = action();
    } catch (const ConfigError& e) {
        err << "ConfigError: " << e.what() << "\n";
        code = kInput;
    } catch (const Error& e) {
        err << to_string(e.kind()) << ": " << e.what() << "\n";
        code = exit_for(e);
    } catch (const Json::exception& e) {
        err << "InvalidInput: " << e.what() << "\n";
        code = kInput;
    }
    if (ctx.g.timing)
        err << "wall-clock " << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s\n";
    return code;
}

}  // namespace affdim::cli
