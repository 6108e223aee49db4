#include "affdim/prox.hpp"

#include "affdim/error.hpp"
#include "affdim/parallel.hpp"
#include "affdim/rng.hpp"
#include "affdim/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

namespace affdim {

namespace {

Vector null_vector(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
    return svd.matrixV().col(M.cols() - 1);
}

}  // namespace

ProximalData proximal_decomposition(const Matrix& A, double gap_tol) {
    require_finite(A);
    const Eigen::Index d = A.rows();
    ProximalData out;
    if (d == 1) {
        out.lambda1 = A(0, 0);
        out.v_plus = Vector::Ones(1);
        out.h_normal = Vector::Ones(1);
        out.separation = 1;
        out.gap = 0;
        return out;
    }
    Eigen::EigenSolver<Matrix> es(A, false);
    if (es.info() != Eigen::Success) throw NotProximal(1.0, "eigenvalue computation failed");
    std::vector<std::complex<double>> ev(es.eigenvalues().data(), es.eigenvalues().data() + d);
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return std::abs(a) > std::abs(b); });
    const double m1 = std::abs(ev[0]);
    if (m1 == 0) throw NotProximal(1.0, "zero spectral radius");
    const double gap = std::abs(ev[1]) / m1;
    if (std::abs(ev[0].imag()) > 1e-12 * m1) throw NotProximal(1.0, "top eigenvalue is not real");
    if (gap > 1.0 - gap_tol) throw NotProximal(gap);
    const double lam = ev[0].real();
    const Matrix I = Matrix::Identity(d, d);
    Vector v = null_vector(A - lam * I);
    Vector n = null_vector((A - lam * I).transpose());
    // One step of inverse iteration with a slightly shifted eigenvalue sharpens both vectors.
    const double shift = lam * (1 + 1e-10) + (lam == 0 ? 1e-300 : 0);
    Eigen::PartialPivLU<Matrix> lu(A - shift * I);
    Eigen::PartialPivLU<Matrix> lut((A - shift * I).transpose());
    const Vector v2 = lu.solve(v), n2 = lut.solve(n);
    if (v2.allFinite() && v2.norm() > 0) v = v2;
    if (n2.allFinite() && n2.norm() > 0) n = n2;
    v = normalize_sign(v);
    n = normalize_sign(n);
    const double denom = n.dot(v);
    const double refined = std::abs(denom) > 1e-300 ? n.dot(A * v) / denom : lam;
    const double scale = std::max(A.norm(), 1e-300);
    out.lambda1 = refined;
    out.v_plus = v;
    out.h_normal = n;
    out.gap = gap;
    out.separation = point_hyperplane_distance(v, n);
    out.residual = std::max((A * v - refined * v).norm(), (A.transpose() * n - refined * n).norm()) / scale;
    return out;
}

namespace {

std::vector<Vector> sphere_sample(int D, int points, std::uint64_t seed) {
    std::vector<Vector> out;
    if (D == 1) {
        out.push_back(Vector::Ones(1));
        return out;
    }
    if (D == 2) {
        for (int j = 0; j < points; ++j) {
            const double t = M_PI * (j + 0.5) / points;
            Vector x(2);
            x << std::cos(t), std::sin(t);
            out.push_back(x);
        }
        return out;
    }
    if (D == 3) {
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < points; ++j) {
            const double z = 1.0 - (2.0 * j + 1.0) / points;
            const double rad = std::sqrt(std::max(0.0, 1 - z * z));
            Vector x(3);
            x << rad * std::cos(golden * j), rad * std::sin(golden * j), z;
            out.push_back(x);
        }
        return out;
    }
    CounterRng rng(seed, 0x5350ULL);
    for (int j = 0; j < points; ++j) {
        Vector x(D);
        for (int i = 0; i < D; ++i) x(i) = rng.normal();
        out.push_back(x / x.norm());
    }
    return out;
}

Vector tangent_direction(const Vector& x, CounterRng& rng) {
    Vector t(x.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = rng.normal();
    t -= t.dot(x) * x;
    const double n = t.norm();
    if (n == 0) return t;
    return t / n;
}

// Norm of the derivative of x -> Ax/|Ax| at the unit vector x, angle metric.
double projective_derivative(const Matrix& A, const Vector& x) {
    if (x.size() == 2) {
        const double y0 = A(0, 0) * x(0) + A(0, 1) * x(1), y1 = A(1, 0) * x(0) + A(1, 1) * x(1);
        return std::abs(A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0)) / (y0 * y0 + y1 * y1);
    }
    const Vector y = A * x;
    const double ny = y.norm();
    const Vector yh = y / ny;
    const Eigen::Index D = x.size();
    const Matrix Px = Matrix::Identity(D, D) - x * x.transpose();
    const Matrix Py = Matrix::Identity(D, D) - yh * yh.transpose();
    const Matrix Dm = Py * A * Px / ny;
    return singular_values(Dm)(0);
}

// Scalar form of the sampled bound for 2x2 matrices, lines as unit vectors.
double sampled_lipschitz_2d(const Matrix& A, const Vector& normal, double eps, const SamplingConfig& sampling) {
    struct P {
        double x, y;
    };
    const double a = A(0, 0), b = A(0, 1), c = A(1, 0), d = A(1, 1);
    const double det = std::abs(a * d - b * c);
    const double nn = normal.norm();
    const P nrm{normal(0) / nn, normal(1) / nn};
    const double floor_eps = eps * (1 - 1e-12);
    auto dot = [](P u, P v) { return u.x * v.x + u.y * v.y; };
    auto image = [&](P u) { return P{a * u.x + b * u.y, c * u.x + d * u.y}; };
    auto dist = [](P u, P v) {
        return std::min(1.0, std::abs(u.x * v.y - u.y * v.x) / (std::hypot(u.x, u.y) * std::hypot(v.x, v.y)));
    };
    std::vector<P> pts;
    const int points = std::max(1, sampling.points);
    for (int j = 0; j < points; ++j) {
        const double t = M_PI * (j + 0.5) / points;
        const P x{std::cos(t), std::sin(t)};
        const double xn = dot(x, nrm);
        if (std::abs(xn) >= floor_eps) pts.push_back(x);
        const P tang{x.x - xn * nrm.x, x.y - xn * nrm.y};
        const double tn = std::hypot(tang.x, tang.y);
        if (tn > 1e-12 && eps <= 1) {
            const double sgn = xn >= 0 ? 1.0 : -1.0;
            const double w = std::sqrt(std::max(0.0, 1 - eps * eps)) / tn;
            pts.push_back({sgn * eps * nrm.x + w * tang.x, sgn * eps * nrm.y + w * tang.y});
        }
    }
    if (eps <= 1) pts.push_back(nrm);
    double L = 0;
    for (const P& x : pts) {
        const P ax = image(x);
        L = std::max(L, det / dot(ax, ax));
        for (double h : {1e-2, -1e-2, 1e-4, -1e-4}) {
            P y{x.x - h * x.y, x.y + h * x.x};
            const double ny = std::hypot(y.x, y.y);
            y = {y.x / ny, y.y / ny};
            if (std::abs(dot(y, nrm)) < floor_eps) continue;
            const double dxy = dist(x, y);
            if (dxy <= 0) continue;
            L = std::max(L, dist(ax, image(y)) / dxy);
        }
    }
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / static_cast<std::size_t>(std::max(1, sampling.pair_subsample)));
    for (std::size_t i = 0; i < pts.size(); i += stride) {
        const P ai = image(pts[i]);
        for (std::size_t j = i + stride; j < pts.size(); j += stride) {
            const double dxy = dist(pts[i], pts[j]);
            if (dxy < 1e-9) continue;
            L = std::max(L, dist(ai, image(pts[j])) / dxy);
        }
    }
    return L;
}

}  // namespace

double sampled_lipschitz(const Matrix& A, const ProximalData& data, double eps, const SamplingConfig& sampling) {
    const int D = static_cast<int>(A.rows());
    if (D == 1) return 0;
    if (D == 2) return sampled_lipschitz_2d(A, data.h_normal, eps, sampling);
    const Vector& nrm = data.h_normal;
    std::vector<Vector> pts;
    const double floor_eps = eps * (1 - 1e-12);
    for (const auto& x : sphere_sample(D, sampling.points, sampling.seed)) {
        if (std::abs(x.dot(nrm)) >= floor_eps) pts.push_back(x);
        // Boundary companion at distance exactly eps from the hyperplane.
        Vector tang = x - x.dot(nrm) * nrm;
        const double tn = tang.norm();
        if (tn > 1e-12 && eps <= 1) {
            const double sgn = x.dot(nrm) >= 0 ? 1.0 : -1.0;
            pts.push_back(sgn * eps * nrm + std::sqrt(std::max(0.0, 1 - eps * eps)) * tang / tn);
        }
    }
    if (eps <= 1) pts.push_back(nrm);
    if (pts.empty()) return 0;
    std::vector<double> local(pts.size(), 0.0);
    parallel_for(pts.size(), [&](std::size_t i) {
        double best = projective_derivative(A, pts[i]);
        CounterRng rng(sampling.seed, 0x4c50ULL * 100000 + i);
        const Vector t = tangent_direction(pts[i], rng);
        for (double h : {1e-2, 1e-4}) {
            const Vector y = (pts[i] + h * t).normalized();
            if (std::abs(y.dot(nrm)) < floor_eps) continue;
            const double dxy = proj_distance(pts[i], y);
            if (dxy <= 0) continue;
            best = std::max(best, proj_distance(A * pts[i], A * y) / dxy);
        }
        local[i] = best;
    });
    double L = *std::max_element(local.begin(), local.end());
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / static_cast<std::size_t>(std::max(1, sampling.pair_subsample)));
    std::vector<const Vector*> sub;
    for (std::size_t i = 0; i < pts.size(); i += stride) sub.push_back(&pts[i]);
    for (std::size_t i = 0; i < sub.size(); ++i) {
        const Vector Ai = A * *sub[i];
        for (std::size_t j = i + 1; j < sub.size(); ++j) {
            const double dxy = proj_distance(*sub[i], *sub[j]);
            if (dxy < 1e-9) continue;
            L = std::max(L, proj_distance(Ai, A * *sub[j]) / dxy);
        }
    }
    return L;
}

ProximalCertificate certify_proximal(const Matrix& A, double r, double eps, const SamplingConfig& sampling) {
    const ProximalData data = proximal_decomposition(A);
    return certify_proximal(A, data, r, eps, sampling);
}

ProximalCertificate certify_proximal(const Matrix& A, const ProximalData& data, double r, double eps,
                                     const SamplingConfig& sampling) {
    ProximalCertificate c;
    c.r = r;
    c.eps = eps;
    c.separation = data.separation;
    c.separation_ok = data.separation >= 2 * r;
    c.lipschitz = sampled_lipschitz(A, data, eps, sampling);
    c.lipschitz_ok = c.lipschitz <= eps;
    c.pass = c.separation_ok && c.lipschitz_ok;
    if (!c.separation_ok) c.failed_clause = "SEPARATION";
    else if (!c.lipschitz_ok) c.failed_clause = "LIPSCHITZ";
    return c;
}

double minimal_lipschitz_epsilon(const Matrix& A, const ProximalData& data, double cap, const SamplingConfig& sampling) {
    if (!(cap > 0)) return std::numeric_limits<double>::quiet_NaN();
    if (sampled_lipschitz(A, data, cap, sampling) > cap) return std::numeric_limits<double>::quiet_NaN();
    double lo = std::min(cap, 1e-9), hi = cap;
    if (sampled_lipschitz(A, data, lo, sampling) <= lo) return lo;
    for (int it = 0; it < 40 && hi / lo > 1.0 + 1e-3; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (sampled_lipschitz(A, data, mid, sampling) <= mid) hi = mid;
        else lo = mid;
    }
    return hi;
}

namespace {

// Largest projective distance within a set of lines: the pair with the
// smallest |<a, b>| is located from Gram tiles, then measured exactly.
double diameter(const std::vector<const Vector*>& lines) {
    if (lines.size() < 2) return 0;
    const Eigen::Index D = lines.front()->size();
    const Eigen::Index N = static_cast<Eigen::Index>(lines.size());
    Matrix V(D, N);
    for (Eigen::Index i = 0; i < N; ++i) V.col(i) = lines[static_cast<std::size_t>(i)]->normalized();
    constexpr Eigen::Index kTile = 512;
    const Eigen::Index tiles = (N + kTile - 1) / kTile;
    struct Best {
        double dot = 2;
        Eigen::Index i = 0, j = 0;
    };
    std::vector<Best> best(static_cast<std::size_t>(tiles));
    parallel_for(static_cast<std::size_t>(tiles), [&](std::size_t t) {
        const Eigen::Index start = static_cast<Eigen::Index>(t) * kTile;
        const Eigen::Index len = std::min(kTile, N - start);
        const Matrix G = (V.transpose() * V.middleCols(start, len)).cwiseAbs();
        Eigen::Index r = 0, c = 0;
        best[t].dot = G.minCoeff(&r, &c);
        best[t].i = r;
        best[t].j = start + c;
    });
    Best b;
    for (const auto& x : best)
        if (x.dot < b.dot) b = x;
    // Nearly parallel families: the Gram entry cannot resolve the angle, so fall back to pairs.
    if (b.dot > 1 - 1e-6) {
        double eta = 0;
        for (Eigen::Index i = 0; i < N; ++i)
            for (Eigen::Index j = i + 1; j < N; ++j)
                eta = std::max(eta, proj_distance(*lines[static_cast<std::size_t>(i)], *lines[static_cast<std::size_t>(j)]));
        return eta;
    }
    return proj_distance(*lines[static_cast<std::size_t>(b.i)], *lines[static_cast<std::size_t>(b.j)]);
}

}  // namespace

double narrowness(const std::vector<ProximalData>& data) {
    std::vector<const Vector*> v, h;
    for (const auto& x : data) {
        v.push_back(&x.v_plus);
        h.push_back(&x.h_normal);
    }
    return std::max(diameter(v), diameter(h));
}

double narrowness(const std::vector<Matrix>& family, int k, double gap_tol) {
    std::vector<ProximalData> data;
    std::string offenders;
    double worst_gap = 0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        try {
            data.push_back(proximal_decomposition(exterior_power(family[i], k), gap_tol));
        } catch (const NotProximal& e) {
            offenders += (offenders.empty() ? "" : ",") + std::to_string(i);
            worst_gap = std::max(worst_gap, e.gap());
        }
    }
    if (!offenders.empty()) throw NotProximal(worst_gap, "non-proximal elements " + offenders);
    return narrowness(data);
}

namespace {

struct ElementCheck {
    bool proximal = false;
    ProximalData data;
    double lipschitz = 0;
};

ElementCheck check_element(const Matrix& A, double eps, const SchottkyOptions& options) {
    ElementCheck c;
    try {
        c.data = proximal_decomposition(A, options.gap_tol);
        c.proximal = true;
        c.lipschitz = sampled_lipschitz(A, c.data, eps, options.sampling);
    } catch (const NotProximal&) {
        c.proximal = false;
    }
    return c;
}

// min over pairs (a, b) of d(v+_a, H-_b), as blocks of |N^T V| with unit columns.
double min_cross(const std::vector<const ProximalData*>& items) {
    if (items.empty()) return 1.0;
    const Eigen::Index D = items.front()->v_plus.size();
    const Eigen::Index N = static_cast<Eigen::Index>(items.size());
    Matrix V(D, N), H(D, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        V.col(i) = items[static_cast<std::size_t>(i)]->v_plus.normalized();
        H.col(i) = items[static_cast<std::size_t>(i)]->h_normal.normalized();
    }
    constexpr Eigen::Index kTile = 512;
    const Eigen::Index tiles = (N + kTile - 1) / kTile;
    std::vector<double> best(static_cast<std::size_t>(tiles), 1.0);
    parallel_for(static_cast<std::size_t>(tiles), [&](std::size_t t) {
        const Eigen::Index start = static_cast<Eigen::Index>(t) * kTile;
        const Eigen::Index len = std::min(kTile, N - start);
        const Matrix P = H.transpose() * V.middleCols(start, len);
        best[t] = std::min(1.0, P.cwiseAbs().minCoeff());
    });
    return *std::min_element(best.begin(), best.end());
}

}  // namespace

SchottkyCertificate verify_schottky(const std::vector<Matrix>& family, double r, double eps, const SchottkyOptions& options) {
    if (family.empty()) throw InvalidInput("Schottky verification needs a nonempty family");
    SchottkyCertificate cert;
    cert.r = r;
    cert.eps = eps;
    std::vector<ElementCheck> checks(family.size());
    parallel_for(family.size(), [&](std::size_t i) { checks[i] = check_element(family[i], eps, options); });
    cert.min_self_separation = 1.0;
    std::vector<const ProximalData*> gens;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        if (!checks[i].proximal) {
            cert.not_proximal.push_back(i);
            continue;
        }
        cert.elements.push_back(checks[i].data);
        cert.min_self_separation = std::min(cert.min_self_separation, checks[i].data.separation);
        cert.max_lipschitz = std::max(cert.max_lipschitz, checks[i].lipschitz);
    }
    for (const auto& e : cert.elements) gens.push_back(&e);
    cert.proximal_ok = cert.not_proximal.empty();
    cert.separation_ok = cert.proximal_ok && cert.min_self_separation >= 2 * r;
    cert.lipschitz_ok = cert.proximal_ok && cert.max_lipschitz <= eps;
    cert.min_cross_separation = gens.empty() ? 0.0 : min_cross(gens);
    cert.cross_ok = cert.proximal_ok && cert.min_cross_separation >= 6 * r;
    cert.narrowness = narrowness(cert.elements);
    cert.pass = cert.proximal_ok && cert.separation_ok && cert.lipschitz_ok && cert.cross_ok;
    if (!cert.proximal_ok) cert.failed_clauses.push_back("NOT_PROXIMAL");
    if (cert.proximal_ok && !cert.separation_ok) cert.failed_clauses.push_back("SEPARATION");
    if (cert.proximal_ok && !cert.lipschitz_ok) cert.failed_clauses.push_back("LIPSCHITZ");
    if (cert.proximal_ok && !cert.cross_ok) cert.failed_clauses.push_back("CROSS_SEPARATION");

    // Products of length 2..L: all of them when few, otherwise a seeded sample.
    const int m = static_cast<int>(family.size());
    std::vector<Word> words;
    for (int len = 2; len <= options.product_length; ++len) {
        const std::size_t total = ipow(static_cast<std::size_t>(m), len);
        if (total <= options.products_per_length) {
            for (std::size_t i = 0; i < total; ++i) words.push_back(index_to_word(i, m, len));
        } else {
            CounterRng rng(options.sampling.seed, 0x5052ULL * 100 + static_cast<std::uint64_t>(len));
            for (std::size_t i = 0; i < options.products_per_length; ++i) words.push_back(index_to_word(rng.below(total), m, len));
        }
    }
    std::vector<ElementCheck> prods(words.size());
    parallel_for(words.size(), [&](std::size_t i) {
        Matrix P = family[static_cast<std::size_t>(words[i][0])];
        for (std::size_t j = 1; j < words[i].size(); ++j) P = P * family[static_cast<std::size_t>(words[i][j])];
        prods[i] = check_element(P, 2 * eps, options);
    });
    cert.products_checked = prods.size();
    cert.product_min_separation = 1.0;
    std::vector<const ProximalData*> all = gens;
    for (const auto& p : prods) {
        if (!p.proximal) {
            ++cert.products_failed;
            continue;
        }
        const bool ok = p.data.separation >= r && p.lipschitz <= 2 * eps;
        if (!ok) ++cert.products_failed;
        cert.product_min_separation = std::min(cert.product_min_separation, p.data.separation);
        cert.product_max_lipschitz = std::max(cert.product_max_lipschitz, p.lipschitz);
        all.push_back(&p.data);
    }
    cert.product_min_cross = all.empty() ? 0.0 : min_cross(all);
    cert.products_ok = cert.products_failed == 0 && cert.product_min_cross >= 3 * r;
    if (!cert.products_ok) cert.failed_clauses.push_back("PRODUCTS");
    return cert;
}

double cross_separation(const std::vector<ProximalData>& data) {
    std::vector<const ProximalData*> items;
    for (const auto& d : data) items.push_back(&d);
    return min_cross(items);
}

MultiSchottkyCertificate verify_schottky_multik(const std::vector<Matrix>& family, const std::vector<int>& ks, double r,
                                                double eps, const SchottkyOptions& options) {
    MultiSchottkyCertificate out;
    out.ks = ks;
    out.pass = true;
    out.products_ok = true;
    const int d = family.empty() ? 0 : static_cast<int>(family.front().rows());
    for (int k : ks)
        if (k < 1 || k > d - 1) throw InvalidInput("Schottky index k must lie in [1, d-1]");
    for (int k : ks) {
        std::vector<Matrix> lifted;
        for (const auto& A : family) lifted.push_back(exterior_power(A, k));
        out.per_k.push_back(verify_schottky(lifted, r, eps, options));
        out.pass = out.pass && out.per_k.back().pass;
        out.products_ok = out.products_ok && out.per_k.back().products_ok;
    }
    return out;
}

namespace {

Vector sum_cartan(const std::vector<Vector>& kappa, const Word& w) {
    Vector sum = kappa[static_cast<std::size_t>(w[0])];
    for (std::size_t j = 1; j < w.size(); ++j) sum += kappa[static_cast<std::size_t>(w[j])];
    return sum;
}

// Cartan vector of a word product from the norms of its exterior powers, so
// singular values far below sigma_1 keep their relative accuracy.
Vector product_cartan_vector(const std::vector<std::vector<Matrix>>& wedge, const std::vector<Vector>& kappa, const Word& w) {
    const int d = static_cast<int>(kappa.front().size());
    Vector partial(d);
    for (int k = 1; k < d; ++k) {
        const auto& powers = wedge[static_cast<std::size_t>(k - 1)];
        Matrix P = powers[static_cast<std::size_t>(w[0])];
        double log_scale = 0;
        for (std::size_t j = 1; j < w.size(); ++j) {
            P = P * powers[static_cast<std::size_t>(w[j])];
            const double n = P.norm();
            log_scale += std::log(n);
            P /= n;
        }
        partial(k - 1) = log_scale + std::log(singular_values(P)(0));
    }
    partial(d - 1) = sum_cartan(kappa, w).sum();
    Vector out(d);
    out(0) = partial(0);
    for (int k = 1; k < d; ++k) out(k) = partial(k) - partial(k - 1);
    return out;
}

}  // namespace

CartanDefect cartan_additivity_defect(const std::vector<Matrix>& family, int max_length, std::size_t samples_per_length,
                                      std::uint64_t seed) {
    CartanDefect out;
    const int m = static_cast<int>(family.size());
    const int d = static_cast<int>(family.front().rows());
    std::vector<Vector> kappa;
    for (const auto& g : family) kappa.push_back(cartan_vector(g));
    // wedge[k-1][i] is the k-th exterior power of family[i].
    std::vector<std::vector<Matrix>> wedge(static_cast<std::size_t>(std::max(d - 1, 0)));
    for (int k = 1; k < d; ++k)
        for (const auto& g : family) wedge[static_cast<std::size_t>(k - 1)].push_back(k == 1 ? g : exterior_power(g, k));
    for (int len = 1; len <= max_length; ++len) {
        const std::size_t total = ipow(static_cast<std::size_t>(m), len);
        std::vector<Word> words;
        if (total <= samples_per_length) {
            for (std::size_t i = 0; i < total; ++i) words.push_back(index_to_word(i, m, len));
        } else {
            CounterRng rng(seed, 0x4344ULL * 100 + static_cast<std::uint64_t>(len));
            for (std::size_t i = 0; i < samples_per_length; ++i) words.push_back(index_to_word(rng.below(total), m, len));
        }
        std::vector<double> defects(words.size(), 0.0);
        parallel_for(words.size(), [&](std::size_t i) {
            defects[i] = (product_cartan_vector(wedge, kappa, words[i]) - sum_cartan(kappa, words[i])).cwiseAbs().maxCoeff();
        });
        const double worst = *std::max_element(defects.begin(), defects.end());
        out.lengths.push_back(len);
        out.defect.push_back(worst);
        out.max_defect = std::max(out.max_defect, worst);
    }
    if (out.lengths.size() >= 2) {
        const double n = static_cast<double>(out.lengths.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < out.lengths.size(); ++i) {
            sx += out.lengths[i];
            sy += out.defect[i];
            sxx += static_cast<double>(out.lengths[i]) * out.lengths[i];
            sxy += out.lengths[i] * out.defect[i];
        }
        out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return out;
}

}  // namespace affdim
