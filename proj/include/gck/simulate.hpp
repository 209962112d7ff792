#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "gck/covmodels.hpp"
#include "gck/rng.hpp"

namespace gck {

struct GpSample {
    Eigen::VectorXd values;
    LocationSet locations;
    CovarianceModel model;
    std::uint64_t seed = 0;
};

// pool_size uniform points in [0,1]^d drawn from stream (seed, kPoolStream).
LocationSet uniform_pool(std::size_t pool_size, int d, std::uint64_t seed);
// n points of the pool without replacement (partial Fisher-Yates), in draw order.
LocationSet select_without_replacement(const LocationSet& pool, std::size_t n, RandomStream& rng);
// Pool from seed, then selection from stream (seed, 0).
LocationSet sample_uniform_locations(std::size_t n, int d, std::uint64_t seed, std::size_t pool_size);

Eigen::VectorXd standard_normals(std::size_t n, RandomStream& rng);

// Z = L eta with L the Cholesky factor of sigma2 R + nugget I; eta from
// stream (seed, stream_id).  The nugget defaults to zero.
GpSample simulate_gp(const LocationSet& locs, const CovarianceModel& model, std::uint64_t seed,
                     std::uint64_t stream_id = 0, double nugget = 0.0);

// Both samples driven by the same eta.
std::pair<GpSample, GpSample> simulate_paired(const LocationSet& locs, const CovarianceModel& a,
                                              const CovarianceModel& b, std::uint64_t seed,
                                              std::uint64_t stream_id = 0);

}  // namespace gck
