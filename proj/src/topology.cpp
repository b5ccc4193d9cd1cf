#include "resobs/topology.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "resobs/errors.hpp"
#include "resobs/random.hpp"

namespace resobs {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Dense symmetric adjacency used while a graph is being grown; converted to
// sparse storage at the end.
class AdjacencyBuilder {
public:
    explicit AdjacencyBuilder(std::size_t n) : n_(n), bits_(n * n, 0), degree_(n, 0) {}

    bool has(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }
    std::size_t degree(std::size_t i) const { return degree_[i]; }

    void add(std::size_t i, std::size_t j) {
        if (i == j || has(i, j)) {
            return;
        }
        bits_[i * n_ + j] = bits_[j * n_ + i] = 1;
        ++degree_[i];
        ++degree_[j];
    }

    void remove(std::size_t i, std::size_t j) {
        if (!has(i, j)) {
            return;
        }
        bits_[i * n_ + j] = bits_[j * n_ + i] = 0;
        --degree_[i];
        --degree_[j];
    }

    WeightedMatrix finish() const {
        Triplets t;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                if (has(i, j)) {
                    t.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
                }
            }
        }
        return WeightedMatrix::from_triplets(n_, t);
    }

private:
    std::size_t n_;
    std::vector<std::uint8_t> bits_;
    std::vector<std::size_t> degree_;
};

std::size_t barabasi_attachment(const TopologySpec& spec) {
    return static_cast<std::size_t>(std::max(0L, std::lround(spec.mean_degree / 2.0)));
}

WeightedMatrix erdos_renyi(const TopologySpec& spec, Rng& rng) {
    const double p = spec.mean_degree / static_cast<double>(spec.n - 1);
    AdjacencyBuilder adj(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        for (std::size_t j = i + 1; j < spec.n; ++j) {
            if (rng.bernoulli(p)) {
                adj.add(i, j);
            }
        }
    }
    return adj.finish();
}

// Ring lattice with k/2 neighbours per side, then each lattice edge (u, u+j)
// is rewired to a uniformly chosen new endpoint with probability `beta`.
WeightedMatrix watts_strogatz(const TopologySpec& spec, Rng& rng) {
    const std::size_t n = spec.n;
    const auto half = static_cast<std::size_t>(spec.mean_degree) / 2;
    AdjacencyBuilder adj(n);
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t j = 1; j <= half; ++j) {
            adj.add(u, (u + j) % n);
        }
    }
    if (spec.rewire_prob <= 0.0) {
        return adj.finish();
    }
    for (std::size_t j = 1; j <= half; ++j) {
        for (std::size_t u = 0; u < n; ++u) {
            const std::size_t v = (u + j) % n;
            if (!rng.bernoulli(spec.rewire_prob)) {
                continue;
            }
            if (!adj.has(u, v) || adj.degree(u) >= n - 1) {
                continue;
            }
            std::size_t target = rng.below(n);
            while (target == u || adj.has(u, target)) {
                target = rng.below(n);
            }
            adj.remove(u, v);
            adj.add(u, target);
        }
    }
    return adj.finish();
}

// Preferential attachment seeded by a complete graph on m + 1 nodes; each new
// node attaches to m distinct existing nodes with probability proportional to
// their degree.
WeightedMatrix barabasi_albert(const TopologySpec& spec, Rng& rng) {
    const std::size_t n = spec.n;
    const std::size_t m = barabasi_attachment(spec);
    AdjacencyBuilder adj(n);
    std::vector<std::size_t> endpoints;
    endpoints.reserve(2 * m * n);
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = i + 1; j <= m; ++j) {
            adj.add(i, j);
            endpoints.push_back(i);
            endpoints.push_back(j);
        }
    }
    std::vector<std::size_t> targets;
    for (std::size_t v = m + 1; v < n; ++v) {
        targets.clear();
        while (targets.size() < m) {
            const std::size_t pick = endpoints[rng.below(endpoints.size())];
            if (std::find(targets.begin(), targets.end(), pick) == targets.end()) {
                targets.push_back(pick);
            }
        }
        for (std::size_t t : targets) {
            adj.add(v, t);
            endpoints.push_back(v);
            endpoints.push_back(t);
        }
    }
    return adj.finish();
}

WeightedMatrix dense_structure(std::size_t n) {
    Triplets t;
    t.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            t.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
        }
    }
    return WeightedMatrix::from_triplets(n, t);
}

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& z) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    return qr.householderQ() * Eigen::MatrixXd::Identity(z.rows(), z.cols());
}

} // namespace

std::string_view to_string(TopologyKind kind) noexcept {
    switch (kind) {
    case TopologyKind::ErdosRenyi:
        return "erdos_renyi";
    case TopologyKind::BarabasiAlbert:
        return "barabasi_albert";
    case TopologyKind::SmallWorld:
        return "small_world";
    case TopologyKind::RandomMatrix:
        return "random_matrix";
    }
    return "unknown";
}

TopologyKind parse_topology_kind(std::string_view name) {
    for (TopologyKind kind : kAllTopologies) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    throw ParameterError("unknown topology '" + std::string(name) +
                         "' (expected erdos_renyi, barabasi_albert, small_world or random_matrix)");
}

void TopologySpec::validate() const {
    if (n < 2) {
        throw ParameterError("topology needs at least 2 nodes");
    }
    if (kind == TopologyKind::RandomMatrix) {
        return;
    }
    const double nd = static_cast<double>(n);
    if (!(mean_degree > 0.0) || !(mean_degree < nd)) {
        throw ParameterError("mean degree must lie in (0, n); got " + std::to_string(mean_degree));
    }
    switch (kind) {
    case TopologyKind::ErdosRenyi:
        if (mean_degree > nd - 1.0) {
            throw ParameterError("Erdos-Renyi mean degree cannot exceed n - 1");
        }
        break;
    case TopologyKind::SmallWorld: {
        const double half = mean_degree / 2.0;
        if (half != std::floor(half)) {
            throw ParameterError("small-world mean degree must be an even integer; got " +
                                 std::to_string(mean_degree));
        }
        if (!(rewire_prob >= 0.0 && rewire_prob <= 1.0)) {
            throw ParameterError("rewire probability must lie in [0, 1]");
        }
        break;
    }
    case TopologyKind::BarabasiAlbert: {
        const std::size_t m = barabasi_attachment(*this);
        if (m < 1 || m >= n) {
            throw ParameterError("Barabasi-Albert attachment m = round(D/2) = " + std::to_string(m) +
                                 " must satisfy 1 <= m < n = " + std::to_string(n));
        }
        break;
    }
    case TopologyKind::RandomMatrix:
        break;
    }
}

WeightedMatrix::WeightedMatrix(Storage m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw ParameterError("reservoir matrix must be square");
    }
    m_.makeCompressed();
    for (Eigen::Index k = 0; k < m_.nonZeros(); ++k) {
        if (!std::isfinite(m_.valuePtr()[k])) {
            throw ParameterError("reservoir matrix entries must be finite");
        }
    }
}

WeightedMatrix WeightedMatrix::from_triplets(std::size_t n, const Triplets& entries) {
    Storage m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setFromTriplets(entries.begin(), entries.end());
    return WeightedMatrix(std::move(m));
}

WeightedMatrix WeightedMatrix::from_dense(const Eigen::MatrixXd& dense) {
    if (dense.rows() != dense.cols()) {
        throw ParameterError("reservoir matrix must be square");
    }
    Triplets t;
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
        for (Eigen::Index j = 0; j < dense.cols(); ++j) {
            if (dense(i, j) != 0.0) {
                t.emplace_back(static_cast<int>(i), static_cast<int>(j), dense(i, j));
            }
        }
    }
    return from_triplets(static_cast<std::size_t>(dense.rows()), t);
}

WeightedMatrix WeightedMatrix::scaled(double factor) const {
    Storage copy = m_;
    for (Eigen::Index k = 0; k < copy.nonZeros(); ++k) {
        copy.valuePtr()[k] *= factor;
    }
    return WeightedMatrix(std::move(copy));
}

std::vector<Eigen::Triplet<double>> WeightedMatrix::entries() const {
    Triplets t;
    t.reserve(nnz());
    for (Eigen::Index i = 0; i < m_.outerSize(); ++i) {
        for (Storage::InnerIterator it(m_, i); it; ++it) {
            t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        }
    }
    return t;
}

bool WeightedMatrix::operator==(const WeightedMatrix& other) const {
    if (n() != other.n() || nnz() != other.nnz()) {
        return false;
    }
    const auto a = entries();
    const auto b = other.entries();
    return std::equal(a.begin(), a.end(), b.begin(), [](const auto& l, const auto& r) {
        return l.row() == r.row() && l.col() == r.col() && l.value() == r.value();
    });
}

WeightedMatrix build_skeleton(const TopologySpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    switch (spec.kind) {
    case TopologyKind::ErdosRenyi:
        return erdos_renyi(spec, rng);
    case TopologyKind::BarabasiAlbert:
        return barabasi_albert(spec, rng);
    case TopologyKind::SmallWorld:
        return watts_strogatz(spec, rng);
    case TopologyKind::RandomMatrix:
        return dense_structure(spec.n);
    }
    throw ParameterError("unhandled topology kind");
}

WeightedMatrix assign_weights(const WeightedMatrix& skeleton, std::uint64_t seed) {
    Rng rng(seed);
    Triplets t;
    t.reserve(skeleton.nnz());
    for (const auto& e : skeleton.entries()) {
        if (e.value() != 1.0) {
            throw ParameterError("skeleton entries must be 0 or 1");
        }
        // The [-1, 1) draw is mapped onto the closed interval by symmetry;
        // the endpoint has measure zero.
        t.emplace_back(e.row(), e.col(), rng.uniform(-1.0, 1.0));
    }
    return WeightedMatrix::from_triplets(skeleton.n(), t);
}

double dense_spectral_radius(const Eigen::MatrixXd& dense) {
    if (dense.rows() == 0) {
        throw ParameterError("spectral radius of an empty matrix is undefined");
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(dense, false);
    if (solver.info() != Eigen::Success) {
        throw NumericError("dense eigenvalue solver did not converge");
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

SpectralEstimate block_power_radius(const WeightedMatrix& w, const SpectralOptions& options) {
    using Complex = std::complex<double>;
    const std::size_t n = w.n();
    if (n == 0) {
        throw ParameterError("spectral radius of an empty matrix is undefined");
    }
    const auto p = static_cast<Eigen::Index>(std::min(std::max<std::size_t>(options.block_size, 1), n));
    const std::size_t cap = options.max_iterations ? options.max_iterations : 10 * n;
    // Successive Ritz values can agree by chance while a complex pair is still
    // rotating into the block, so the Ritz residual is held to the same bound.
    const double residual_tol = options.tolerance;
    // Past this fill a dense product beats compressed rows.
    const bool use_dense = w.nnz() * 4 > n * n;
    const Eigen::MatrixXd dense = use_dense ? w.to_dense() : Eigen::MatrixXd();

    // Fixed start block: makes the estimate exactly homogeneous in w.
    Rng rng(0x5eed'0f'b10cULL);
    Eigen::MatrixXd start(static_cast<Eigen::Index>(n), p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < start.rows(); ++i) {
            start(i, j) = rng.uniform(-1.0, 1.0);
        }
    }
    Eigen::MatrixXd q = orthonormal_basis(start);

    SpectralEstimate est;
    double previous = -1.0;
    for (std::size_t it = 1; it <= cap; ++it) {
        const Eigen::MatrixXd z = use_dense ? Eigen::MatrixXd(dense * q) : Eigen::MatrixXd(w.storage() * q);
        est.iterations = it;
        if (z.squaredNorm() == 0.0) {
            // Krylov space annihilated: nilpotent (or zero) matrix.
            est.radius = 0.0;
            est.converged = true;
            return est;
        }
        const Eigen::MatrixXd h = q.transpose() * z;
        Eigen::EigenSolver<Eigen::MatrixXd> ritz(h, true);
        if (ritz.info() != Eigen::Success) {
            break;
        }
        Eigen::Index best = 0;
        ritz.eigenvalues().cwiseAbs().maxCoeff(&best);
        const Complex theta = ritz.eigenvalues()(best);
        const Eigen::VectorXcd y = ritz.eigenvectors().col(best);
        const double radius = std::abs(theta);
        est.radius = radius;

        if (radius > 0.0 && previous >= 0.0 &&
            std::abs(radius - previous) <= options.tolerance * radius) {
            const Eigen::VectorXcd residual =
                z.cast<Complex>() * y - theta * (q.cast<Complex>() * y);
            if (residual.norm() <= residual_tol * radius * y.norm()) {
                est.converged = true;
                return est;
            }
        }
        previous = radius;
        q = orthonormal_basis(z);
    }
    return est;
}

SpectralEstimate estimate_spectral_radius(const WeightedMatrix& w, const SpectralOptions& options) {
    if (w.n() == 0) {
        throw ParameterError("spectral radius of an empty matrix is undefined");
    }
    if (w.n() <= options.dense_threshold) {
        return {dense_spectral_radius(w.to_dense()), 0, true, SpectralMethod::Dense};
    }
    SpectralEstimate est = block_power_radius(w, options);
    if (est.converged || !options.allow_dense_fallback) {
        return est;
    }
    return {dense_spectral_radius(w.to_dense()), est.iterations, true, SpectralMethod::Dense};
}

double spectral_radius(const WeightedMatrix& w, const SpectralOptions& options) {
    const SpectralEstimate est = estimate_spectral_radius(w, options);
    if (!est.converged) {
        throw NumericError("spectral radius did not converge after " +
                           std::to_string(est.iterations) + " iterations");
    }
    return est.radius;
}

WeightedMatrix scale_to_radius(const WeightedMatrix& w, double rho_target,
                               const SpectralOptions& options) {
    if (!(rho_target > 0.0) || !std::isfinite(rho_target)) {
        throw ParameterError("target spectral radius must be positive and finite");
    }
    const double rho = spectral_radius(w, options);
    if (!(rho > 0.0)) {
        throw NumericError("cannot rescale a matrix with zero spectral radius");
    }
    return w.scaled(rho_target / rho);
}

std::size_t undirected_edge_count(const WeightedMatrix& skeleton) {
    std::size_t count = 0;
    for (const auto& e : skeleton.entries()) {
        if (e.row() < e.col()) {
            ++count;
        }
    }
    return count;
}

double mean_degree(const WeightedMatrix& skeleton) {
    return 2.0 * static_cast<double>(undirected_edge_count(skeleton)) /
           static_cast<double>(skeleton.n());
}

} // namespace resobs
