#pragma once

namespace affdim {

// Provenance of a reported number.
enum class Tag { Certified, Sampled, Heuristic, Exact };

inline const char* to_string(Tag t) {
    switch (t) {
    case Tag::Certified: return "CERTIFIED";
    case Tag::Sampled: return "SAMPLED";
    case Tag::Heuristic: return "HEURISTIC";
    case Tag::Exact: return "EXACT";
    }
    return "HEURISTIC";
}

}  // namespace affdim
