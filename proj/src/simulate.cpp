#include "gck/simulate.hpp"

#include <numeric>
#include <vector>

#include "gck/errors.hpp"
#include "gck/linalg.hpp"

namespace gck {

LocationSet uniform_pool(std::size_t pool_size, int d, std::uint64_t seed) {
    if (d < 1 || d > 3) throw ValidationError("uniform_pool: dimension must be 1, 2 or 3");
    RandomStream rng(seed, kPoolStream);
    std::vector<double> c(pool_size * static_cast<std::size_t>(d));
    for (auto& v : c) v = rng.uniform();
    return LocationSet(d, std::move(c));
}

LocationSet select_without_replacement(const LocationSet& pool, std::size_t n, RandomStream& rng) {
    const std::size_t m = pool.size();
    if (n > m) throw ValidationError("cannot select " + std::to_string(n) + " points from a pool of " + std::to_string(m));
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(m - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    return pool.subset(idx);
}

LocationSet sample_uniform_locations(std::size_t n, int d, std::uint64_t seed, std::size_t pool_size) {
    if (n > pool_size) throw ValidationError("sample_uniform_locations: n exceeds the pool size");
    LocationSet pool = uniform_pool(pool_size, d, seed);
    if (n == pool_size) return pool;
    RandomStream rng(seed, 0);
    return select_without_replacement(pool, n, rng);
}

Eigen::VectorXd standard_normals(std::size_t n, RandomStream& rng) {
    Eigen::VectorXd eta(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = rng.normal();
    return eta;
}

namespace {

Eigen::VectorXd draw(const LocationSet& locs, const CovarianceModel& model, const Eigen::VectorXd& eta,
                     double nugget) {
    Eigen::MatrixXd c = covariance_matrix(model, locs, true);
    if (nugget < 0.0) throw ValidationError("simulate_gp: nugget must be non-negative");
    if (nugget > 0.0) c.diagonal().array() += nugget;
    CholeskyFactor f(std::move(c));
    return f.L().triangularView<Eigen::Lower>() * eta;
}

}  // namespace

GpSample simulate_gp(const LocationSet& locs, const CovarianceModel& model, std::uint64_t seed,
                     std::uint64_t stream_id, double nugget) {
    model.validate();
    RandomStream rng(seed, stream_id);
    Eigen::VectorXd eta = standard_normals(locs.size(), rng);
    return {draw(locs, model, eta, nugget), locs, model, seed};
}

std::pair<GpSample, GpSample> simulate_paired(const LocationSet& locs, const CovarianceModel& a,
                                              const CovarianceModel& b, std::uint64_t seed,
                                              std::uint64_t stream_id) {
    a.validate();
    b.validate();
    RandomStream rng(seed, stream_id);
    Eigen::VectorXd eta = standard_normals(locs.size(), rng);
    return {GpSample{draw(locs, a, eta, 0.0), locs, a, seed}, GpSample{draw(locs, b, eta, 0.0), locs, b, seed}};
}

}  // namespace gck
