// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "affdim/error.hpp"
#include "affdim/extract.hpp"
#include "affdim/ifs.hpp"
#include "affdim/parallel.hpp"
#include "affdim/prox.hpp"
#include "affdim/thermo.hpp"
#include "cli.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace affdim;
using namespace testing_support;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliResult r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

void similarity_oracle(Outcome& o) {
    const struct {
        const char* file;
        double expected;
    } cases[] = {{"similarity_quarter.json", std::log(3.0) / std::log(4.0)}, {"similarity_half.json", 1.0}};
    for (const auto& c : cases) {
        const Stopwatch clock;
        const CliResult r = run_cli({"dim-aff", data_path(c.file)});
        const double elapsed = clock.seconds();
        o.require(r.code == 0, std::string(c.file) + " exit code");
        if (r.code != 0) continue;
        const double value = nlohmann::json::parse(r.out)["report"]["estimate"]["value"].get<double>();
        o.detail << c.file << " dim_aff=" << value << " err=" << std::abs(value - c.expected) << " t=" << elapsed
                 << "s; ";
        o.require(std::abs(value - c.expected) <= 1e-6, std::string(c.file) + " value");
        o.require(elapsed < 5.0, std::string(c.file) + " runtime");
    }
}

// u_n closed form for positive diagonal maps with a_i >= b_i, 0 <= s <= 2.
double diagonal_pressure(const std::vector<std::pair<double, double>>& ab, double s) {
    double sum = 0;
    for (const auto& [a, b] : ab) sum += s <= 1 ? std::pow(a, s) : a * std::pow(b, s - 1);
    return std::log(sum);
}

void diagonal_oracle(Outcome& o) {
    const std::vector<std::vector<std::pair<double, double>>> systems{
        {{0.6, 0.3}, {0.5, 0.2}},
        {{0.4, 0.1}, {0.3, 0.2}},
    };
    for (const auto& ab : systems) {
        std::vector<Matrix> linear;
        for (const auto& [a, b] : ab) linear.push_back(diag2(a, b));
        const AffineIFS ifs = make_ifs(linear);
        const Stopwatch clock;
        PressureOptions po;
        po.budget = 8190;  // levels n <= 12 for two maps
        const PressureModel model(ifs, po);
        double worst = 0;
        int max_n = 0;
        for (double s : {0.25, 0.5, 0.75, 1.25, 1.5, 1.75}) {
            for (int i = 0; i < model.level_count(); ++i) {
                worst = std::max(worst, std::abs(model.level_u(i, s) - diagonal_pressure(ab, s)));
                max_n = std::max(max_n, model.tables().levels[i].n);
            }
        }
        const double root = oracle::bisect([&](double s) { return diagonal_pressure(ab, s); }, 0.0, 2.0);
        const AffinityDimension dim = affinity_dimension(model, 1e-8);
        const double elapsed = clock.seconds();
        o.detail << "max|u_n-closed|=" << worst << " (n<=" << max_n << ") dim_aff=" << dim.estimate
                 << " oracle=" << root << " t=" << elapsed << "s; ";
        o.require(worst <= 1e-10, "u_n closed form");
        o.require(max_n <= 12, "levels n <= 12");
        o.require(std::abs(dim.estimate - root) <= 1e-4, "scalar root");
        o.require(elapsed < 10.0, "runtime");
    }
}

void hutchinson(Outcome& o) {
    const AffineIFS ifs = load_system(data_path("cantor.json"));
    const LyapunovDimension uniform = lyapunov_dimension(ifs, BernoulliMeasure::uniform(2));
    const double expected = std::log(2.0) / std::log(3.0);
    o.detail << "dim_L=" << uniform.value << " err=" << std::abs(uniform.value - expected) << "; ";
    o.require(std::abs(uniform.value - expected) <= 1e-9, "uniform weights");

    const BernoulliMeasure skew{{0.3, 0.7}};
    const LyapunovDimension weighted = lyapunov_dimension(ifs, skew);
    const double formula = (0.3 * std::log(0.3) + 0.7 * std::log(0.7)) / std::log(1.0 / 3);
    o.detail << "dim_L(0.3,0.7)=" << weighted.value << " err=" << std::abs(weighted.value - formula);
    o.require(std::abs(weighted.value - formula) <= 1e-9, "weights (0.3, 0.7)");
}

void submultiplicativity(Outcome& o) {
    CounterRng rng(401, 0);
    std::size_t checked = 0, violations = 0;
    double worst = -1;
    for (int d : {2, 3}) {
        for (double s : {0.5, 1.0, 1.5, 2.5}) {
            for (int pair = 0; pair < 10'000; ++pair) {
                const Matrix A = random_matrix(rng, d), B = random_matrix(rng, d);
                const double lhs = svf(A * B, s), rhs = svf(A, s) * svf(B, s);
                const double excess = (lhs - rhs) / rhs;
                worst = std::max(worst, excess);
                if (excess > 1e-12) ++violations;
                ++checked;
            }
        }
    }
    o.detail << checked << " pairs, violations=" << violations << " max relative excess=" << worst;
    o.require(violations == 0, "phi^s(AB) <= phi^s(A) phi^s(B)");
}

std::vector<double> random_probabilities(CounterRng& rng, std::size_t count) {
    std::vector<double> q(count);
    double total = 0;
    for (auto& x : q) total += x = -std::log(1 - rng.uniform());
    for (auto& x : q) x /= total;
    return q;
}

void variational(Outcome& o) {
    CounterRng rng(501, 0);
    std::size_t measures = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int sys = 0; sys < 20; ++sys) {
        const int d = 2 + sys % 2;
        const int m = 2 + sys % 3;
        const AffineIFS ifs = random_contracting_ifs(rng, d, m);
        for (int n : {1, 2, 3}) {
            const std::size_t words = static_cast<std::size_t>(std::pow(m, n));
            for (double s : {0.4, 1.0, 1.7, 2.6}) {
                const double u = level_pressure(ifs, s, n);
                std::vector<std::vector<double>> qs{std::vector<double>(words, 1.0 / static_cast<double>(words)),
                                                    gibbs_weights(ifs, s, n).probs, random_probabilities(rng, words)};
                for (const auto& q : qs) {
                    worst = std::max(worst, level_variational_value(ifs, q, n, s) - u);
                    ++measures;
                }
            }
        }
    }
    o.detail << measures << " measures, max((h+Lambda_s)/n - u_n)=" << worst << "; ";
    o.require(worst <= 1e-10, "variational inequality");

    int systems = 0, violations = 0;
    double worst_gap = -std::numeric_limits<double>::infinity();
    for (int sys = 0; sys < 100; ++sys) {
        const int d = 2 + sys % 2;
        const int m = 2 + sys % 2;
        const AffineIFS ifs = random_contracting_ifs(rng, d, m);
        const BernoulliMeasure mu{random_probabilities(rng, static_cast<std::size_t>(m))};
        const LyapunovDimension dl = lyapunov_dimension(ifs, mu, LyapunovOptions{.budget = 50'000});
        PressureOptions po;
        po.budget = 50'000;
        const AffinityDimension da = affinity_dimension(ifs, 1e-8, po);
        worst_gap = std::max(worst_gap, dl.value - da.hi);
        if (dl.value > da.hi + 1e-10) ++violations;
        ++systems;
    }
    o.detail << systems << " systems, max(dim_L - dim_aff_hi)=" << worst_gap;
    o.require(violations == 0, "dim_L <= dim_aff upper bracket");
}

void proximality_kernel(Outcome& o) {
    const Matrix A = diag2(4, 0.25);
    const ProximalData p = proximal_decomposition(A);
    Matrix P = Matrix::Identity(2, 2);
    for (int m = 0; m < 40; ++m) P = A * P;
    CounterRng rng(601, 0);
    double worst = 0;
    int used = 0;
    while (used < 100) {
        Vector x(2);
        x << rng.normal(), rng.normal();
        if (point_hyperplane_distance(x, p.h_normal) < 0.05) continue;
        const double ratio = (P * x).norm() / x.norm() * p.separation /
                             (point_hyperplane_distance(x, p.h_normal) * std::pow(std::abs(p.lambda1), 40));
        worst = std::max(worst, std::abs(ratio - 1));
        ++used;
    }
    o.detail << "max|ratio-1| at m=40: " << worst << "; ";
    o.require(worst <= 0.05, "Benoist ratio within 5%");

    double residual = 0;
    CounterRng mats(602, 0);
    int decomposed = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const Matrix B = random_matrix(mats, 2 + static_cast<int>(mats.below(4)));
        try {
            residual = std::max(residual, proximal_decomposition(B).residual);
            ++decomposed;
        } catch (const NotProximal&) {
        }
    }
    residual = std::max(residual, p.residual);
    o.detail << decomposed << " random decompositions, max residual=" << residual;
    o.require(residual <= 1e-10, "eigen residuals");
}

void schottky_semigroup(Outcome& o) {
    const AffineIFS ifs = load_system(data_path("rotated_diagonal.json"));
    const SubsystemReport r = schottky_extract(ifs, BernoulliMeasure::uniform(2), 10, 0.3, {1});
    o.detail << "n=10 #J=" << r.words.size() << " r=" << r.r << " eps=" << r.eps_lipschitz
             << " r>4eps=" << r.semigroup_condition << "; ";
    o.require(r.schottky.pass, "base family certified");
    o.require(r.semigroup_condition, "r > 4 eps");

    std::vector<Matrix> family;
    for (const auto& m : r.system.maps) family.push_back(m.A);
    SchottkyOptions opts;
    opts.product_length = 3;

    // A subfamily of a Schottky family is Schottky with the same (r, eps), so
    // 3-fold products are certified exhaustively on the first 24 elements.
    const std::size_t sub_size = std::min<std::size_t>(24, family.size());
    const std::vector<Matrix> sub(family.begin(), family.begin() + static_cast<long>(sub_size));
    opts.products_per_length = sub_size * sub_size * sub_size;
    const SchottkyCertificate c = verify_schottky(sub, r.r, r.eps_lipschitz, opts);
    const std::size_t expected = sub_size * sub_size + sub_size * sub_size * sub_size;
    o.detail << "subfamily of " << sub_size << ": products checked=" << c.products_checked << "/" << expected
             << " failed=" << c.products_failed << " min sep=" << c.product_min_separation
             << " min cross=" << c.product_min_cross << " max Lipschitz=" << c.product_max_lipschitz << "; ";
    o.require(c.pass, "subfamily certified");
    o.require(c.products_checked == expected, "exhaustive products");
    o.require(c.products_ok && c.products_failed == 0, "products at (r/2, 2 eps)");

    // Full family: every 2-fold product and an equally large sample of 3-fold ones.
    opts.products_per_length = family.size() * family.size();
    const SchottkyCertificate full = verify_schottky(family, r.r, r.eps_lipschitz, opts);
    o.detail << "full family: products checked=" << full.products_checked << " failed=" << full.products_failed
             << " min cross=" << full.product_min_cross << "; ";
    o.require(full.products_ok && full.products_failed == 0, "products of the full family");

    const CartanDefect cd = cartan_additivity_defect(family, 6, 2048, 7);
    o.detail << "Cartan defect by length:";
    for (std::size_t i = 0; i < cd.lengths.size(); ++i) o.detail << " " << cd.lengths[i] << ":" << cd.defect[i];
    o.detail << " max=" << cd.max_defect << " slope=" << cd.slope;
    // Each junction of a product loses at most -log of the cross separation in
    // the top singular value; the defect must stay within that per-junction scale.
    const double junction = -std::log(r.schottky.per_k.front().min_cross_separation);
    o.detail << " per-junction scale=" << junction;
    o.require(cd.max_defect <= (cd.lengths.back() - 1) * junction + 1e-12, "defect within per-junction bound");
    o.require(cd.slope <= junction, "defect slope below per-junction scale");
}

void domination(Outcome& o) {
    const AffineIFS ifs = load_system(data_path("diagonal.json"));
    const AffineIFS pair = make_ifs({diag2(0.5, 0.25), diag2(0.3, 0.2)});
    const DominationReport r = domination_test(pair, 1);
    const double expected = std::log(1.5);
    o.detail << "diag(0.5,0.25)/diag(0.3,0.2): " << to_string(r.verdict) << " rate=" << r.rate
             << " rel err=" << std::abs(r.rate - expected) / expected << "; ";
    o.require(r.verdict == Verdict::Dominated, "DOMINATED");
    o.require(std::abs(r.rate - expected) <= 0.1 * expected, "rate within 10%");

    const DominationReport fixture = domination_test(ifs, 1);
    const double fixture_rate = std::log(std::min(0.6 / 0.3, 0.5 / 0.2));
    o.detail << "diagonal.json: " << to_string(fixture.verdict) << " rate=" << fixture.rate << " oracle=" << fixture_rate
             << "; ";
    o.require(fixture.verdict == Verdict::Dominated, "fixture DOMINATED");
    o.require(std::abs(fixture.rate - fixture_rate) <= 0.1 * fixture_rate, "fixture rate within 10%");

    CounterRng rng(801, 0);
    int agree = 0;
    double worst = 0;
    const DominationOptions opts{.budget = 20'000};
    for (int sys = 0; sys < 50; ++sys) {
        const int d = 3 + sys % 2;
        const AffineIFS random = random_contracting_ifs(rng, d, 2);
        const int k = 1 + sys % (d - 1);
        std::vector<Matrix> wedge;
        for (const auto& m : random.maps) wedge.push_back(exterior_power(m.A, k));
        const DominationReport direct = domination_test(random, k, opts);
        const DominationReport lifted = domination_test(linear_system(wedge), 1, opts);
        if (direct.verdict == lifted.verdict) ++agree;
        worst = std::max(worst, std::abs(direct.rate - lifted.rate));
    }
    o.detail << "exterior-power consistency " << agree << "/50, max rate diff=" << worst;
    o.require(agree == 50, "k-verdict equals 1-verdict on the exterior power");
}

void extraction_end_to_end(Outcome& o) {
    const AffineIFS ifs = load_system(data_path("rotated_diagonal.json"));
    const Stopwatch clock;
    double gap6 = 0;
    for (int n : {6, 10}) {
        PipelineOptions opts;
        opts.n = n;
        const PipelineReport r = theorem16_pipeline(ifs, 0.3, opts);
        o.detail << "n=" << n << " s_hi=" << r.dim_aff.hi << " dim_L_lower=" << r.dim_l_lower
                 << " gap=" << r.gap << " #J=" << r.final_stage().words.size()
                 << " certificates=" << r.certificates_pass << "; ";
        o.require(r.certificates_pass, "certificates at n=" + std::to_string(n));
        o.require(r.dim_l_lower >= r.dim_aff.hi - 0.3, "dim_L target at n=" + std::to_string(n));
        if (n == 6) gap6 = r.gap;
        else o.require(r.gap <= gap6, "gap does not increase from n=6 to n=10");
    }
    const double elapsed = clock.seconds();
    o.detail << "t=" << elapsed << "s";
    o.require(elapsed < 120.0, "runtime");
}

void suffix_and_separation(Outcome& o) {
    const AffineIFS cantor = load_system(data_path("cantor.json"));
    const SuffixWitness w = find_separating_suffix(cantor);
    o.detail << "suffix=" << word_to_string(w.suffix, 2) << " kappa=" << w.kappa
             << " inside=" << w.soc_images_inside << " disjoint=" << w.soc_images_disjoint << "; ";
    o.require(w.soc_images_inside && w.soc_images_disjoint, "suffix verified");

    for (int n : {2, 4, 6, 8}) {
        const SubsystemReport r = schottky_extract(cantor, BernoulliMeasure::uniform(2), n, 0.3, {}, w.suffix);
        bool suffixed = true;
        for (const auto& b : r.base_words)
            suffixed = suffixed && b.size() >= w.suffix.size() &&
                       std::equal(w.suffix.begin(), w.suffix.end(), b.end() - static_cast<long>(w.suffix.size()));
        const SeparationCertificate c = strong_separation_certificate(cantor, r.base_words, *cantor.soc_ball);
        o.detail << "n=" << n << " #J=" << r.base_words.size() << " " << c.label << " gap=" << c.min_gap << "; ";
        o.require(suffixed, "suffix closure at n=" + std::to_string(n));
        o.require(c.pass && c.label == "CERTIFIED", "separation at n=" + std::to_string(n));
    }

    const PipelineReport p = theorem16_pipeline(cantor, 0.1);
    o.require(p.separation.has_value() && p.separation->pass, "pipeline separation");
    if (p.separation) o.detail << "pipeline " << p.separation->label << "; ";

    const AffineIFS overlap = load_system(data_path("overlap.json"));
    const SeparationCertificate c = strong_separation_certificate(overlap, {{0}, {1}}, invariant_ball(overlap).ball);
    o.detail << "overlap: " << c.label << " gap=" << c.min_gap;
    o.require(!c.pass && c.label == "INCONCLUSIVE", "overlap inconclusive");
}

void determinism(Outcome& o) {
    std::vector<std::vector<std::string>> commands;
    for (const char* f : {"similarity_quarter.json", "similarity_half.json", "cantor.json", "overlap.json",
                          "diagonal.json", "rotated_diagonal.json"}) {
        const std::string path = data_path(f);
        commands.push_back({"dim-aff", path});
        commands.push_back({"dim-lyap", path});
        commands.push_back({"dim-lyap", path, "--mode", "mc", "--trajectories", "64", "--steps", "500"});
        commands.push_back({"--budget", "4000", "pressure-curve", path, "--s-grid", "0.25:2:0.25"});
    }
    for (const char* f : {"diagonal.json", "rotated_diagonal.json"}) {
        const std::string path = data_path(f);
        commands.push_back({"dominated", path, "--k", "1"});
        commands.push_back({"prox", path, "--word", "12"});
        commands.push_back({"extract", path, "--n", "6", "--eps", "0.3"});
    }
    commands.push_back({"extract", data_path("cantor.json"), "--n", "6", "--eps", "0.3", "--suffix", "12"});
    commands.push_back({"pipeline", data_path("rotated_diagonal.json"), "--delta", "0.3"});
    commands.push_back({"pipeline", data_path("cantor.json"), "--delta", "0.1"});

    int identical = 0;
    for (const auto& cmd : commands) {
        std::string reference;
        int reference_code = 0;
        bool same = true;
        for (const char* threads : {"1", "4", "8"}) {
            std::vector<std::string> args{"--seed", "3", "--threads", threads};
            args.insert(args.end(), cmd.begin(), cmd.end());
            const CliResult r = run_cli(args);
            if (std::string(threads) == "1") {
                reference = r.out;
                reference_code = r.code;
                same = r.code == 0 && !r.out.empty();
                if (!same) o.detail << "exit " << r.code << " for " << cmd.front() << " " << cmd[1] << "; ";
            } else {
                same = same && r.code == reference_code && r.out == reference;
            }
        }
        if (same) ++identical;
        else o.require(false, "identical output for " + cmd.front());
    }
    o.detail << identical << "/" << commands.size() << " commands byte-identical across threads 1/4/8";
}

}  // namespace

// Optional arguments select criteria by number; all run by default.
int main(int argc, char** argv) {
    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::stoul(argv[i]));
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"similarity oracle", similarity_oracle},
        {"diagonal oracle", diagonal_oracle},
        {"Hutchinson measure formula", hutchinson},
        {"submultiplicativity", submultiplicativity},
        {"variational inequality", variational},
        {"proximality kernel", proximality_kernel},
        {"Schottky semigroup property", schottky_semigroup},
        {"domination", domination},
        {"extraction end-to-end", extraction_end_to_end},
        {"suffix and separation", suffix_and_separation},
        {"determinism", determinism},
    };
    int failures = 0;
    std::size_t ran = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), i + 1) == selected.end()) continue;
        ++ran;
        Outcome o;
        const Stopwatch clock;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "[exception: " << e.what() << "]";
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << ", "
                  << clock.seconds() << " s): " << o.detail.str() << std::endl;
    }
    std::cout << (ran - failures) << "/" << ran << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
