#pragma once

#include "affdim/linalg.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace affdim {

// Letters are 0-based internally; text forms use 1-based letters.
using Word = std::vector<int>;

std::string word_to_string(const Word& w, int alphabet_size);
// Accepts "112" for alphabets of size <= 9, otherwise comma-separated "1,12,3".
Word parse_word(const std::string& text, int alphabet_size);

struct AffineMap {
    Matrix A;
    Vector v;

    Vector apply(const Vector& x) const { return A * x + v; }
};

struct Ball {
    Vector center;
    double radius = 0;
};

struct BernoulliMeasure {
    std::vector<double> probs;

    static BernoulliMeasure uniform(std::size_t m);
    // Throws InvalidInput unless entries are >= 0 and sum to 1 within 1e-12.
    void validate(std::size_t alphabet_size) const;
    bool nondegenerate() const;
    double entropy() const;  // nats per symbol
};

struct AffineIFS {
    int dim = 0;
    std::vector<AffineMap> maps;
    std::optional<Matrix> Q;
    std::optional<BernoulliMeasure> probs;
    std::optional<Ball> soc_ball;

    // For systems built from blocks of an underlying alphabet: the base word of
    // every letter. All labels share the length base_length.
    std::vector<Word> labels;
    std::vector<AffineMap> base_maps;
    int base_alphabet = 0;
    int base_length = 1;

    int size() const { return static_cast<int>(maps.size()); }
    // Cholesky factor L of Q (identity when Q is absent).
    Matrix norm_factor() const;
    Word base_word(const Word& w) const;
    int base_size() const { return labels.empty() ? size() : base_alphabet; }
    // Composition of base letters; equals word_product for unlifted systems.
    AffineMap base_product(const Word& base) const;
};

// Validates structure; throws ConfigError listing every problem found.
void validate_system(const AffineIFS& ifs);

AffineIFS parse_system(const std::string& json_text);
AffineIFS load_system(const std::string& path);
std::string system_to_json(const AffineIFS& ifs);

// The system (T_w)_{w in words} whose letters are blocks of ifs letters.
AffineIFS lift(const AffineIFS& ifs, const std::vector<Word>& words);

AffineMap word_product(const AffineIFS& ifs, const Word& w);
Matrix linear_word_product(const AffineIFS& ifs, const Word& w);

// Sorted log singular values; throws InvalidInput for singular A.
Vector cartan_vector(const Matrix& A);

struct ContractionCertificate {
    double tau = 0;
    std::size_t worst_index = 0;
    std::vector<double> norms;
};

// Throws NotContracting when some map has Q-operator norm >= 1.
ContractionCertificate contraction_certificate(const AffineIFS& ifs);

struct InvariantBall {
    Ball ball;
    double tau = 0;
    bool singleton_attractor = false;
};

InvariantBall invariant_ball(const AffineIFS& ifs);

}  // namespace affdim
