#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace resobs {

enum class TopologyKind { ErdosRenyi, BarabasiAlbert, SmallWorld, RandomMatrix };

/// Canonical lowercase names: erdos_renyi, barabasi_albert, small_world, random_matrix.
std::string_view to_string(TopologyKind kind) noexcept;
/// Accepts the canonical names; throws ParameterError otherwise.
TopologyKind parse_topology_kind(std::string_view name);

inline constexpr TopologyKind kAllTopologies[] = {
    TopologyKind::ErdosRenyi, TopologyKind::RandomMatrix, TopologyKind::BarabasiAlbert,
    TopologyKind::SmallWorld};

struct TopologySpec {
    TopologyKind kind = TopologyKind::ErdosRenyi;
    std::size_t n = 400;
    double mean_degree = 20.0;
    double rewire_prob = 0.1;

    /// Throws ParameterError on any violated invariant.
    void validate() const;
};

/// Square reservoir matrix in compressed row storage. Immutable once built.
class WeightedMatrix {
public:
    using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    WeightedMatrix() = default;
    explicit WeightedMatrix(Storage m);

    static WeightedMatrix from_triplets(std::size_t n,
                                        const std::vector<Eigen::Triplet<double>>& entries);
    static WeightedMatrix from_dense(const Eigen::MatrixXd& dense);

    std::size_t n() const noexcept { return static_cast<std::size_t>(m_.rows()); }
    std::size_t nnz() const noexcept { return static_cast<std::size_t>(m_.nonZeros()); }
    double coeff(std::size_t i, std::size_t j) const {
        return m_.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    const Storage& storage() const noexcept { return m_; }
    Eigen::MatrixXd to_dense() const { return Eigen::MatrixXd(m_); }

    /// Same zero pattern, every stored entry multiplied by `factor`.
    WeightedMatrix scaled(double factor) const;

    /// Stored (row, col, value) entries in row-major order.
    std::vector<Eigen::Triplet<double>> entries() const;

    bool operator==(const WeightedMatrix& other) const;

private:
    Storage m_;
};

/// 0/1 adjacency structure of the chosen graph model; symmetric for the graph
/// models, dense for RandomMatrix.
WeightedMatrix build_skeleton(const TopologySpec& spec, std::uint64_t seed);

/// Replaces each structural 1 with an independent uniform draw on [-1, 1].
WeightedMatrix assign_weights(const WeightedMatrix& skeleton, std::uint64_t seed);

enum class SpectralMethod { BlockPower, Dense };

struct SpectralOptions {
    double tolerance = 1e-10;
    /// 0 means 10 * n.
    std::size_t max_iterations = 0;
    /// Matrices at or below this size go straight to the dense solver.
    std::size_t dense_threshold = 64;
    /// When false, non-convergence is reported instead of falling back.
    bool allow_dense_fallback = true;
    std::size_t block_size = 8;
};

struct SpectralEstimate {
    double radius = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    SpectralMethod method = SpectralMethod::BlockPower;
};

/// Largest eigenvalue magnitude by block power iteration with a Rayleigh-Ritz
/// projection (so complex-conjugate dominant pairs converge), falling back to
/// a dense eigensolver for small or stubborn matrices.
SpectralEstimate estimate_spectral_radius(const WeightedMatrix& w, const SpectralOptions& options = {});

/// Iterative path only, never falls back. `converged` reports the outcome.
SpectralEstimate block_power_radius(const WeightedMatrix& w, const SpectralOptions& options = {});

double dense_spectral_radius(const Eigen::MatrixXd& dense);

/// Throws NumericError if no method converges.
double spectral_radius(const WeightedMatrix& w, const SpectralOptions& options = {});

/// w * (rho_target / spectral_radius(w)). Throws NumericError when w has a
/// zero spectral radius.
WeightedMatrix scale_to_radius(const WeightedMatrix& w, double rho_target,
                               const SpectralOptions& options = {});

/// Number of undirected edges in a symmetric skeleton (off-diagonal pairs).
std::size_t undirected_edge_count(const WeightedMatrix& skeleton);

/// Average number of neighbours per node in a symmetric skeleton.
double mean_degree(const WeightedMatrix& skeleton);

} // namespace resobs
