#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace affdim {

enum class ErrorKind {
    InvalidInput,
    Config,
    NotContracting,
    InsufficientBudget,
    InvalidSpectrum,
    NotProximal,
    EmptyTypicalSet,
    StageEmpty,
    NotFound,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error(ErrorKind::InvalidInput, what) {}
};

// One problem found while validating a configuration.
struct ConfigIssue {
    enum class Code {
        Syntax,
        MissingField,
        AlphabetTooSmall,
        SingularLinearPart,
        DimensionMismatch,
        NonFinite,
        ProbsNotNormalized,
        NormNotPositiveDefinite,
        DimensionTooLarge,
    };
    Code code;
    std::string message;
};

const char* to_string(ConfigIssue::Code code);

// All validation problems of a config, reported together.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }
    bool has(ConfigIssue::Code code) const;

private:
    std::vector<ConfigIssue> issues_;
};

class NotContracting : public Error {
public:
    NotContracting(double factor, std::size_t index);
    double factor() const noexcept { return factor_; }
    std::size_t index() const noexcept { return index_; }

private:
    double factor_;
    std::size_t index_;
};

class InsufficientBudget : public Error {
public:
    explicit InsufficientBudget(const std::string& what) : Error(ErrorKind::InsufficientBudget, what) {}
};

class InvalidSpectrum : public Error {
public:
    explicit InvalidSpectrum(const std::string& what) : Error(ErrorKind::InvalidSpectrum, what) {}
};

class NotProximal : public Error {
public:
    explicit NotProximal(double gap, const std::string& detail = "");
    // |lambda_2| / |lambda_1| as measured; 1 for ties and complex pairs.
    double gap() const noexcept { return gap_; }

private:
    double gap_;
};

class EmptyTypicalSet : public Error {
public:
    EmptyTypicalSet(std::vector<std::uint64_t> histogram, double bin_width);
    // Counts of candidate words by Cartan deviation, bins of width bin_width.
    const std::vector<std::uint64_t>& histogram() const noexcept { return histogram_; }
    double bin_width() const noexcept { return bin_width_; }

private:
    std::vector<std::uint64_t> histogram_;
    double bin_width_;
};

class StageEmpty : public Error {
public:
    StageEmpty(std::string stage, std::vector<std::pair<std::string, std::size_t>> counts);
    const std::string& stage() const noexcept { return stage_; }
    const std::vector<std::pair<std::string, std::size_t>>& counts() const noexcept { return counts_; }

private:
    std::string stage_;
    std::vector<std::pair<std::string, std::size_t>> counts_;
};

class NotFound : public Error {
public:
    explicit NotFound(const std::string& what) : Error(ErrorKind::NotFound, what) {}
};

}  // namespace affdim
