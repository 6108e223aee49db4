#include "affdim/error.hpp"

#include <sstream>

namespace affdim {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::NotContracting: return "NotContracting";
    case ErrorKind::InsufficientBudget: return "InsufficientBudget";
    case ErrorKind::InvalidSpectrum: return "InvalidSpectrum";
    case ErrorKind::NotProximal: return "NotProximal";
    case ErrorKind::EmptyTypicalSet: return "EmptyTypicalSet";
    case ErrorKind::StageEmpty: return "StageEmpty";
    case ErrorKind::NotFound: return "NotFound";
    }
    return "Unknown";
}

const char* to_string(ConfigIssue::Code code) {
    using C = ConfigIssue::Code;
    switch (code) {
    case C::Syntax: return "Syntax";
    case C::MissingField: return "MissingField";
    case C::AlphabetTooSmall: return "AlphabetTooSmall";
    case C::SingularLinearPart: return "SingularLinearPart";
    case C::DimensionMismatch: return "DimensionMismatch";
    case C::NonFinite: return "NonFinite";
    case C::ProbsNotNormalized: return "ProbsNotNormalized";
    case C::NormNotPositiveDefinite: return "NormNotPositiveDefinite";
    case C::DimensionTooLarge: return "DimensionTooLarge";
    }
    return "Unknown";
}

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
    std::ostringstream os;
    os << issues.size() << " config issue(s)";
    for (const auto& issue : issues)
        os << "; " << to_string(issue.code) << ": " << issue.message;
    return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(ErrorKind::Config, join_issues(issues)), issues_(std::move(issues)) {}

bool ConfigError::has(ConfigIssue::Code code) const {
    for (const auto& issue : issues_)
        if (issue.code == code) return true;
    return false;
}

NotContracting::NotContracting(double factor, std::size_t index)
    : Error(ErrorKind::NotContracting,
            "map " + std::to_string(index + 1) + " has norm " + std::to_string(factor) + " >= 1"),
      factor_(factor),
      index_(index) {}

NotProximal::NotProximal(double gap, const std::string& detail)
    : Error(ErrorKind::NotProximal,
            "no simple dominant eigenvalue (gap " + std::to_string(gap) + ")" + (detail.empty() ? "" : ": " + detail)),
      gap_(gap) {}

EmptyTypicalSet::EmptyTypicalSet(std::vector<std::uint64_t> histogram, double bin_width)
    : Error(ErrorKind::EmptyTypicalSet, "no word satisfies the typicality filter"),
      histogram_(std::move(histogram)),
      bin_width_(bin_width) {}

namespace {

std::string stage_message(const std::string& stage,
                          const std::vector<std::pair<std::string, std::size_t>>& counts) {
    std::ostringstream os;
    os << "extraction emptied at stage '" << stage << "'";
    for (const auto& [name, count] : counts) os << "; " << name << "=" << count;
    return os.str();
}

}  // namespace

StageEmpty::StageEmpty(std::string stage, std::vector<std::pair<std::string, std::size_t>> counts)
    : Error(ErrorKind::StageEmpty, stage_message(stage, counts)),
      stage_(std::move(stage)),
      counts_(std::move(counts)) {}

}  // namespace affdim
