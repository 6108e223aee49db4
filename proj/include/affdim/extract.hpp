#pragma once

#include "affdim/ifs.hpp"
#include "affdim/prox.hpp"
#include "affdim/thermo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace affdim {

// Cartan vectors, entropies and tolerances in this module are per letter of
// the underlying base alphabet, so lifted systems are comparable to their base.

struct TypicalOptions {
    std::size_t budget = kDefaultBudget;
    std::size_t samples = 200'000;  // words drawn when I^n exceeds the budget
    std::uint64_t seed = 0;
    std::size_t lyapunov_budget = 2'000'000;
};

struct TypicalWordSet {
    int n = 0;
    std::vector<Word> words;  // over the alphabet of the input system
    Vector target;
    double eps = 0;
    double max_deviation = 0;
    double entropy_estimate = 0;  // log #words / (n * base_length)
    double measure_entropy = 0;   // h(mu) / base_length
    bool entropy_reached = false; // entropy_estimate >= measure_entropy - eps
    bool sampled = false;
    std::size_t candidates = 0;
};

// Throws EmptyTypicalSet with a histogram of deviations when no word passes.
TypicalWordSet typical_words(const AffineIFS& ifs, const BernoulliMeasure& measure, int n, double eps,
                             const std::optional<Vector>& target = std::nullopt, const TypicalOptions& options = {});

struct StageCounts {
    std::size_t candidates = 0;
    std::size_t typical = 0;
    std::size_t proximal = 0;
    std::size_t clusters = 0;
    std::size_t cell = 0;
};

struct ExtractOptions {
    TypicalOptions typical;
    SchottkyOptions schottky;
    int density_length = 2;
    std::size_t cartan_samples = 256;
    std::size_t lyapunov_budget = 200'000;
    std::size_t min_cell = 2;
    bool dim_aff = false;
    double dim_aff_tol = 1e-6;
    std::size_t dim_aff_budget = 1'000'000;
};

struct SubsystemReport {
    int n = 0;
    double eps = 0;
    std::vector<int> ks;
    Vector target;
    std::vector<Word> words;       // J over the input alphabet, before the suffix
    std::vector<Word> base_words;  // J in base letters, suffix included
    std::optional<Word> suffix;    // base word
    AffineIFS system;              // letters are the words of J
    StageCounts counts;
    TypicalWordSet typical;

    // Schottky family in every exterior power of K, r and the Lipschitz
    // parameter measured from the family itself.
    double r = 0;
    double eps_lipschitz = 0;
    MultiSchottkyCertificate schottky;
    // r > 4 eps_lipschitz. Reported only: products are certified directly.
    bool semigroup_condition = false;

    std::vector<double> narrowness;  // per k in ks
    bool narrow_ok = false;

    double entropy_rate = 0;     // log #J / (n * base length of input letters)
    double measure_entropy = 0;  // per base letter
    bool entropy_ok = false;
    bool shortfall = false;

    double cartan_beta = 0;                // max over J of the Cartan deviation
    std::vector<double> cartan_products;   // l = 2, 3: sampled deviation of J^l
    std::vector<double> cartan_defects;    // l = 2, 3: sampled additivity defect
    bool cartan_ok = false;

    std::vector<IrreducibilityReport> irreducibility;
    std::vector<ProximalityIndex> proximality_index;

    LyapunovDimension dim_l;
    std::optional<AffinityDimension> dim_aff;
    std::vector<std::string> deviations;
    bool certificates_pass = false;
};

// Throws StageEmpty naming the stage that emptied the candidate set.
SubsystemReport schottky_extract(const AffineIFS& ifs, const BernoulliMeasure& measure, int n, double eps,
                                 const std::vector<int>& ks, const std::optional<Word>& suffix = std::nullopt,
                                 const ExtractOptions& options = {});

struct SuffixWitness {
    Word suffix;
    Vector x0;
    Word x0_word;           // word whose fixed point is x0
    double kappa = 0;       // radius of the ball around x0 inside U
    double image_offset = 0;  // |T_i0 c_U - x0|_Q
    double image_radius = 0;  // |A_i0|_Q rho
    double soc_margin = 0;    // rho - |T_i0 c_U - c_U|_Q - |A_i0|_Q rho
    bool soc_images_inside = false;
    bool soc_images_disjoint = false;
};

// Throws InvalidInput without a SOC ball, NotFound when no witness exists.
SuffixWitness find_separating_suffix(const AffineIFS& ifs, int max_length = 16, int fixed_point_depth = 4);

struct SeparationCertificate {
    bool pass = false;
    double min_gap = 0;  // min over pairs of center distance minus radii sum
    bool images_inside = false;
    std::string label;   // "CERTIFIED" or "INCONCLUSIVE"
};

// Pairwise disjointness of the ball images T_w B for w in J (letters of ifs).
SeparationCertificate strong_separation_certificate(const AffineIFS& ifs, const std::vector<Word>& J, const Ball& ball);

struct PipelineOptions {
    int n = 6;
    int stage_two_length = 2;
    bool stage_two = true;
    double eps = 0.3;
    double tol = 1e-6;
    std::size_t budget = kDefaultBudget;
    std::uint64_t seed = 0;
    int n_search_max = 8;
    ExtractOptions extract;
};

struct PipelineReport {
    AffinityDimension dim_aff;
    double delta = 0;
    double s = 0;
    int n = 0;
    std::vector<int> ks;
    double gibbs_defect = 0;  // u_n(s) - (h + Lambda_s)/n of the Gibbs surrogate
    SubsystemReport stage_one;
    std::optional<SubsystemReport> stage_two;
    std::optional<SuffixWitness> suffix;
    double dim_l = 0;
    double dim_l_lower = 0;
    double target = 0;  // s_hi - delta
    double gap = 0;     // s_hi - dim_l_lower
    bool dimension_ok = false;
    std::vector<DominationReport> domination;
    bool domination_ok = false;  // every k in ks reported DOMINATED
    std::vector<IrreducibilityReport> irreducibility;
    std::optional<SeparationCertificate> separation;
    bool certificates_pass = false;
    std::vector<std::string> notes;

    const SubsystemReport& final_stage() const { return stage_two ? *stage_two : stage_one; }
};

PipelineReport theorem16_pipeline(const AffineIFS& ifs, double delta, const PipelineOptions& options = {});

}  // namespace affdim
