#include "affdim/report.hpp"

#include <cmath>

namespace affdim {

namespace {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json numbers(const std::vector<double>& xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(number(x));
    return a;
}

Json vec(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
    return a;
}

Json words(const std::vector<Word>& ws, int alphabet) {
    Json a = Json::array();
    for (const auto& w : ws) a.push_back(word_to_string(w, alphabet));
    return a;
}

const char* mode_name(LyapunovMode m) { return m == LyapunovMode::MonteCarlo ? "monte-carlo" : "exact-levels"; }

}  // namespace

Json tagged(double value, Tag tag, double tol) {
    return Json{{"value", number(value)}, {"tag", to_string(tag)}, {"tol", number(tol)}};
}

Json to_json(const RunManifest& m) {
    return Json{{"command", m.command}, {"config", m.config}, {"seed", m.seed}, {"budget", m.budget},
                {"version", kVersion}, {"options", m.options}};
}

Json to_json(const Word& w, int alphabet) { return word_to_string(w, alphabet); }

Json to_json(const AffinityDimension& d) {
    const double width = d.hi - d.lo;
    return Json{{"estimate", tagged(d.estimate, d.exact ? Tag::Exact : Tag::Heuristic, width)},
                {"lower", tagged(d.lo, d.lo_tag, width)},
                {"upper", tagged(d.hi, d.hi_tag, width)},
                {"converged", d.converged},
                {"exact", d.exact},
                {"levels", d.levels},
                {"words", d.words},
                {"diagnostic", d.diagnostic}};
}

Json to_json(const PressureEstimate& p) {
    Json levels = Json::array();
    for (const auto& l : p.levels)
        levels.push_back(Json{{"n", l.n}, {"u_n", number(l.u)}, {"log_c", number(l.log_c)}, {"l_n", number(l.lower)}});
    const double width = p.hi - p.lo;
    return Json{{"s", p.s},
                {"lower", tagged(p.lo, p.lo_tag, width)},
                {"upper", tagged(p.hi, p.hi_tag, width)},
                {"exact", p.exact},
                {"budget_limited", p.budget_limited},
                {"words", p.words},
                {"levels", levels}};
}

Json to_json(const LyapunovSpectrum& s) {
    Json lambdas = Json::array();
    for (std::size_t k = 0; k < s.lambdas.size(); ++k)
        lambdas.push_back(tagged(s.lambdas[k], s.tag, k < s.errors.size() ? s.errors[k] : 0.0));
    return Json{{"mode", mode_name(s.mode)},
                {"entropy", number(s.entropy)},
                {"lambdas", lambdas},
                {"partial_sums", numbers(s.partial_sums)},
                {"partial_sums_lower", numbers(s.partial_sums_lower)},
                {"levels", s.levels.size()}};
}

Json to_json(const LyapunovDimension& d) {
    return Json{{"dim_lyap", tagged(d.value, d.tag, d.value - d.lower)},
                {"lower", tagged(d.lower, Tag::Heuristic, d.value - d.lower)},
                {"spectrum", to_json(d.spectrum)}};
}

Json to_json(const ProximalData& p) {
    return Json{{"lambda1", number(p.lambda1)}, {"v_plus", vec(p.v_plus)},     {"h_normal", vec(p.h_normal)},
                {"separation", number(p.separation)}, {"gap", number(p.gap)}, {"residual", number(p.residual)}};
}

Json to_json(const ProximalCertificate& c) {
    return Json{{"pass", c.pass},
                {"r", c.r},
                {"eps", c.eps},
                {"separation", tagged(c.separation, Tag::Certified, 0)},
                {"separation_ok", c.separation_ok},
                {"lipschitz", tagged(c.lipschitz, c.tag, 0)},
                {"lipschitz_ok", c.lipschitz_ok},
                {"failed_clause", c.failed_clause}};
}

Json to_json(const SchottkyCertificate& c) {
    Json np = Json::array();
    for (auto i : c.not_proximal) np.push_back(i);
    return Json{{"pass", c.pass},
                {"r", number(c.r)},
                {"eps", number(c.eps)},
                {"elements", c.elements.size()},
                {"not_proximal", np},
                {"min_self_separation", tagged(c.min_self_separation, Tag::Certified, 0)},
                {"min_cross_separation", tagged(c.min_cross_separation, Tag::Certified, 0)},
                {"max_lipschitz", tagged(c.max_lipschitz, Tag::Sampled, 0)},
                {"narrowness", tagged(c.narrowness, Tag::Certified, 0)},
                {"clauses",
                 Json{{"proximal", c.proximal_ok}, {"separation", c.separation_ok}, {"lipschitz", c.lipschitz_ok}, {"cross", c.cross_ok}}},
                {"products",
                 Json{{"checked", c.products_checked},
                      {"failed", c.products_failed},
                      {"min_separation", number(c.product_min_separation)},
                      {"min_cross", number(c.product_min_cross)},
                      {"max_lipschitz", tagged(c.product_max_lipschitz, Tag::Sampled, 0)},
                      {"pass", c.products_ok}}},
                {"failed_clauses", c.failed_clauses}};
}

Json to_json(const MultiSchottkyCertificate& c) {
    Json per = Json::array();
    for (std::size_t i = 0; i < c.per_k.size(); ++i) {
        Json j = to_json(c.per_k[i]);
        j["k"] = c.ks[i];
        per.push_back(j);
    }
    return Json{{"pass", c.pass}, {"products_pass", c.products_ok}, {"per_k", per}};
}

Json to_json(const CartanDefect& c) {
    return Json{{"lengths", c.lengths}, {"defect", numbers(c.defect)}, {"max_defect", number(c.max_defect)},
                {"slope", number(c.slope)}};
}

Json to_json(const DominationReport& r) {
    Json j{{"k", r.k},
           {"verdict", to_string(r.verdict)},
           {"reason", r.reason},
           {"rate", tagged(r.rate, Tag::Heuristic, r.fit_residual)},
           {"epsilon_hat", number(r.epsilon_hat)},
           {"n0", r.n0},
           {"ns", r.ns},
           {"log_m", numbers(r.log_m)}};
    if (r.cone)
        j["cone"] = Json{{"found", r.cone->found},
                         {"radius", number(r.cone->radius)},
                         {"contraction", tagged(r.cone->contraction, r.cone->tag, 0)},
                         {"centers", r.cone->centers}};
    return j;
}

Json to_json(const IrreducibilityReport& r) {
    Json cands = Json::array();
    for (const auto& c : r.candidates) cands.push_back(Json{{"kind", c.kind}, {"vector", vec(c.vector)}});
    return Json{{"k", r.k},
                {"L", r.L},
                {"span_dim", r.span_dim},
                {"full_dim", r.full_dim},
                {"label", r.burnside_pass ? "CERTIFIED" : "INCONCLUSIVE"},
                {"tag", to_string(r.tag)},
                {"candidates", cands}};
}

Json to_json(const ProximalityIndex& p, int alphabet) {
    return Json{{"k", p.k},
                {"index", p.index},
                {"witness", p.witness.empty() ? Json(nullptr) : Json(word_to_string(p.witness, alphabet))},
                {"squarings", p.squarings},
                {"tag", to_string(Tag::Heuristic)}};
}

Json to_json(const TypicalWordSet& t, int alphabet) {
    return Json{{"n", t.n},
                {"eps", t.eps},
                {"target", vec(t.target)},
                {"count", t.words.size()},
                {"candidates", t.candidates},
                {"sampled", t.sampled},
                {"max_deviation", tagged(t.max_deviation, t.sampled ? Tag::Sampled : Tag::Certified, 0)},
                {"entropy_estimate", number(t.entropy_estimate)},
                {"measure_entropy", number(t.measure_entropy)},
                {"entropy_reached", t.entropy_reached},
                {"words", words(t.words, alphabet)}};
}

Json to_json(const SubsystemReport& r, int input_alphabet) {
    const int base_alphabet = r.system.base_alphabet > 0 ? r.system.base_alphabet : input_alphabet;
    Json irr = Json::array();
    for (const auto& i : r.irreducibility) irr.push_back(to_json(i));
    Json idx = Json::array();
    for (const auto& p : r.proximality_index) idx.push_back(to_json(p, r.system.size()));
    Json j{{"n", r.n},
           {"eps", r.eps},
           {"ks", r.ks},
           {"suffix", r.suffix ? Json(word_to_string(*r.suffix, base_alphabet)) : Json(nullptr)},
           {"size", r.words.size()},
           {"words", words(r.base_words, base_alphabet)},
           {"stages",
            Json{{"candidates", r.counts.candidates},
                 {"typical", r.counts.typical},
                 {"proximal", r.counts.proximal},
                 {"clusters", r.counts.clusters},
                 {"cell", r.counts.cell}}},
           {"schottky",
            Json{{"r", tagged(r.r, Tag::Certified, 0)},
                 {"eps", tagged(r.eps_lipschitz, Tag::Sampled, 0)},
                 {"semigroup_condition", r.semigroup_condition},
                 {"certificate", to_json(r.schottky)}}},
           {"narrowness", Json{{"eta", numbers(r.narrowness)}, {"bound", r.eps}, {"pass", r.narrow_ok}}},
           {"entropy",
            Json{{"rate", number(r.entropy_rate)},
                 {"measure", number(r.measure_entropy)},
                 {"tol", r.eps},
                 {"pass", r.entropy_ok},
                 {"flag", r.shortfall ? "SHORTFALL" : "OK"}}},
           {"cartan",
            Json{{"norm", "max"},
                 {"target", vec(r.target)},
                 {"beta", tagged(r.cartan_beta, Tag::Certified, 0)},
                 {"beta_products", numbers(r.cartan_products)},
                 {"defects", numbers(r.cartan_defects)},
                 {"pass", r.cartan_ok}}},
           {"density", Json{{"irreducibility", irr}, {"proximality_index", idx}}},
           {"dim_lyap", to_json(r.dim_l)},
           {"typical", Json{{"count", r.typical.words.size()},
                            {"max_deviation", number(r.typical.max_deviation)},
                            {"entropy_estimate", number(r.typical.entropy_estimate)},
                            {"entropy_reached", r.typical.entropy_reached},
                            {"sampled", r.typical.sampled}}},
           {"deviations", r.deviations},
           {"certificates_pass", r.certificates_pass}};
    if (r.dim_aff) j["dim_aff"] = to_json(*r.dim_aff);
    return j;
}

Json to_json(const SuffixWitness& w, int alphabet) {
    return Json{{"suffix", word_to_string(w.suffix, alphabet)},
                {"x0", vec(w.x0)},
                {"x0_word", word_to_string(w.x0_word, alphabet)},
                {"kappa", number(w.kappa)},
                {"image_offset", number(w.image_offset)},
                {"image_radius", number(w.image_radius)},
                {"verified", w.image_offset + w.image_radius < w.kappa},
                {"soc_margin", number(w.soc_margin)},
                {"soc_images_inside", w.soc_images_inside},
                {"soc_images_disjoint", w.soc_images_disjoint}};
}

Json to_json(const SeparationCertificate& c) {
    return Json{{"pass", c.pass}, {"label", c.label}, {"min_gap", number(c.min_gap)}, {"images_inside", c.images_inside}};
}

Json to_json(const PipelineReport& r, int alphabet) {
    Json dom = Json::array();
    for (const auto& d : r.domination) dom.push_back(to_json(d));
    Json irr = Json::array();
    for (const auto& i : r.irreducibility) irr.push_back(to_json(i));
    Json j{{"dim_aff", to_json(r.dim_aff)},
           {"delta", r.delta},
           {"s", r.s},
           {"n", r.n},
           {"ks", r.ks},
           {"gibbs_defect", tagged(r.gibbs_defect, Tag::Certified, 0)},
           {"stage_one", to_json(r.stage_one, alphabet)},
           {"stage_two", r.stage_two ? to_json(*r.stage_two, alphabet) : Json(nullptr)},
           {"dimension",
            Json{{"dim_lyap", tagged(r.dim_l, r.final_stage().dim_l.tag, r.dim_l - r.dim_l_lower)},
                 {"dim_lyap_lower", tagged(r.dim_l_lower, Tag::Heuristic, r.dim_l - r.dim_l_lower)},
                 {"target", number(r.target)},
                 {"gap", number(r.gap)},
                 {"pass", r.dimension_ok},
                 {"flag", r.dimension_ok ? "OK" : "SHORTFALL"}}},
           {"domination", dom},
           {"domination_pass", r.domination_ok},
           {"irreducibility", irr},
           {"suffix", r.suffix ? to_json(*r.suffix, alphabet) : Json(nullptr)},
           {"separation", r.separation ? to_json(*r.separation) : Json(nullptr)},
           {"notes", r.notes},
           {"certificates_pass", r.certificates_pass}};
    return j;
}

std::string render_report(const RunManifest& manifest, const Json& body) {
    Json j{{"manifest", to_json(manifest)}, {"report", body}};
    return j.dump(2) + "\n";
}

}  // namespace affdim
