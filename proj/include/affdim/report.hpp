#pragma once

#include "affdim/extract.hpp"
#include "affdim/prox.hpp"
#include "affdim/tag.hpp"
#include "affdim/thermo.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace affdim {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

// Everything needed to rerun a command. Wall-clock time and the worker count
// are kept out so reports are reproducible byte for byte.
struct RunManifest {
    std::string command;
    std::string config;
    std::uint64_t seed = 0;
    std::size_t budget = 0;
    Json options = Json::object();
};

// {"value": v, "tag": ..., "tol": t}; non-finite values become null.
Json tagged(double value, Tag tag, double tol);

Json to_json(const RunManifest& m);
Json to_json(const Word& w, int alphabet);
Json to_json(const AffinityDimension& d);
Json to_json(const PressureEstimate& p);
Json to_json(const LyapunovSpectrum& s);
Json to_json(const LyapunovDimension& d);
Json to_json(const ProximalData& p);
Json to_json(const ProximalCertificate& c);
Json to_json(const SchottkyCertificate& c);
Json to_json(const MultiSchottkyCertificate& c);
Json to_json(const CartanDefect& c);
Json to_json(const DominationReport& r);
Json to_json(const IrreducibilityReport& r);
Json to_json(const ProximalityIndex& p, int alphabet);
Json to_json(const TypicalWordSet& t, int alphabet);
Json to_json(const SubsystemReport& r, int input_alphabet);
Json to_json(const SuffixWitness& w, int alphabet);
Json to_json(const SeparationCertificate& c);
Json to_json(const PipelineReport& r, int alphabet);

// Manifest plus body, indented, with a trailing newline.
std::string render_report(const RunManifest& manifest, const Json& body);

}  // namespace affdim
