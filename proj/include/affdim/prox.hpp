#pragma once

#include "affdim/ifs.hpp"
#include "affdim/tag.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace affdim {

struct ProximalData {
    double lambda1 = 0;   // signed top eigenvalue
    Vector v_plus;        // unit, sign-normalised
    Vector h_normal;      // unit normal of the invariant complementary hyperplane
    double separation = 0;
    double gap = 0;       // |lambda_2| / |lambda_1|
    double residual = 0;  // max of the right and left eigen-equation residuals, relative to |A|
};

// Throws NotProximal when the top eigenvalue is not real, simple and strictly
// dominant with |lambda_2|/|lambda_1| <= 1 - gap_tol.
ProximalData proximal_decomposition(const Matrix& A, double gap_tol = 1e-6);

struct SamplingConfig {
    int points = 256;
    int pair_subsample = 48;
    std::uint64_t seed = 0;
};

// Sampled supremum of the Lipschitz ratio of x -> Ax/|Ax| (sin-angle metric)
// over the lines at distance >= eps from the repelling hyperplane.
double sampled_lipschitz(const Matrix& A, const ProximalData& data, double eps, const SamplingConfig& sampling);

struct ProximalCertificate {
    bool pass = false;
    bool separation_ok = false;
    bool lipschitz_ok = false;
    double r = 0;
    double eps = 0;
    double separation = 0;
    double lipschitz = 0;
    std::string failed_clause;  // "", "NOT_PROXIMAL", "SEPARATION", "LIPSCHITZ"
    Tag tag = Tag::Sampled;
};

ProximalCertificate certify_proximal(const Matrix& A, double r, double eps, const SamplingConfig& sampling = {});
ProximalCertificate certify_proximal(const Matrix& A, const ProximalData& data, double r, double eps,
                                     const SamplingConfig& sampling = {});

// Smallest eps in (0, cap] with sampled Lipschitz bound <= eps, or NaN.
double minimal_lipschitz_epsilon(const Matrix& A, const ProximalData& data, double cap, const SamplingConfig& sampling = {});

struct SchottkyOptions {
    int product_length = 3;
    std::size_t products_per_length = 256;
    double gap_tol = 1e-6;
    SamplingConfig sampling;
};

struct SchottkyCertificate {
    double r = 0;
    double eps = 0;
    std::vector<ProximalData> elements;
    std::vector<std::size_t> not_proximal;
    double min_self_separation = 0;
    double min_cross_separation = 0;
    double max_lipschitz = 0;
    double narrowness = 0;
    bool proximal_ok = false;
    bool separation_ok = false;
    bool lipschitz_ok = false;
    bool cross_ok = false;
    bool pass = false;
    // Products of length 2..product_length at (r/2, 2 eps) with cross separation >= 3r.
    std::size_t products_checked = 0;
    std::size_t products_failed = 0;
    double product_min_separation = 0;
    double product_min_cross = 0;
    double product_max_lipschitz = 0;
    bool products_ok = false;
    std::vector<std::string> failed_clauses;
};

SchottkyCertificate verify_schottky(const std::vector<Matrix>& family, double r, double eps,
                                    const SchottkyOptions& options = {});

struct MultiSchottkyCertificate {
    std::vector<int> ks;
    std::vector<SchottkyCertificate> per_k;
    bool pass = false;
    bool products_ok = false;
};

// Throws InvalidInput unless every k lies in [1, d-1].
MultiSchottkyCertificate verify_schottky_multik(const std::vector<Matrix>& family, const std::vector<int>& ks, double r,
                                                double eps, const SchottkyOptions& options = {});

// eta_k: max over pairs of max(d(v+, v'+), d(normal, normal')) in the k-th exterior power.
// Throws NotProximal naming the offending elements.
double narrowness(const std::vector<Matrix>& family, int k = 1, double gap_tol = 1e-6);
double narrowness(const std::vector<ProximalData>& data);

// min over ordered pairs, self pairs included, of d(v+_a, H-_b).
double cross_separation(const std::vector<ProximalData>& data);

// sup over sampled words of |kappa(g_1...g_l) - sum kappa(g_i)|_inf for each length l.
struct CartanDefect {
    std::vector<int> lengths;
    std::vector<double> defect;
    double max_defect = 0;
    double slope = 0;  // least-squares slope of defect against length
};

CartanDefect cartan_additivity_defect(const std::vector<Matrix>& family, int max_length, std::size_t samples_per_length,
                                      std::uint64_t seed);

enum class Verdict { Dominated, NotDominated, Inconclusive };
const char* to_string(Verdict v);

struct DominationOptions {
    int n_max = 64;
    std::size_t budget = 2'000'000;
    double margin = 1e-3;
    bool cone_witness = false;
    std::uint64_t seed = 0;
};

struct ConeWitness {
    bool found = false;
    double radius = 0;
    double contraction = 0;
    std::size_t centers = 0;
    Tag tag = Tag::Sampled;
};

struct DominationReport {
    int k = 1;
    std::vector<int> ns;
    std::vector<double> log_m;  // log max_{|w|=n} sigma_{k+1}/sigma_k
    double rate = 0;            // minus the fitted slope of log m_n
    double epsilon_hat = 0;
    double fit_residual = 0;
    int n0 = 1;
    Verdict verdict = Verdict::Inconclusive;
    std::string reason;
    std::optional<ConeWitness> cone;
};

// Uses the linear parts of ifs. Throws InvalidInput unless 1 <= k <= d-1.
DominationReport domination_test(const AffineIFS& ifs, int k, const DominationOptions& options = {});

struct InvariantCandidate {
    std::string kind;  // "line" or "hyperplane"
    Vector vector;     // direction of the line, or normal of the hyperplane
};

struct IrreducibilityReport {
    int k = 1;
    int L = 1;
    std::size_t span_dim = 0;
    std::size_t full_dim = 0;
    bool burnside_pass = false;
    Tag tag = Tag::Heuristic;  // Certified when the span is full
    std::vector<InvariantCandidate> candidates;
};

IrreducibilityReport irreducibility_proxy(const AffineIFS& ifs, int k, int L, std::size_t word_cap = 4096);

struct ProximalityIndex {
    int k = 1;
    int index = 0;
    Word witness;
    int squarings = 0;
};

ProximalityIndex proximality_index_proxy(const AffineIFS& ifs, int k, int L, double tol = 1e-9,
                                         std::size_t word_cap = 4096);

// Lifts linear parts into an AffineIFS with zero translations.
AffineIFS linear_system(const std::vector<Matrix>& mats);

// Lyapunov-free default K: the k in 1..d-1 with proximality index proxy 1 in
// the k-th exterior power and a strict gap between the k-th and (k+1)-th exponents.
std::vector<int> default_k_set(const AffineIFS& ifs, const std::vector<double>& lambdas, int L = 4);

}  // namespace affdim
