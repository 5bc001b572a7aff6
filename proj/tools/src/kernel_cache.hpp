// kernel_cache.hpp: in-process memo of precomputed kernel sets
//
// Keyed by (η, ω_c, ε, T) plus the time grid. Concurrent requests for the
// same key block on a single computation.

#pragma once

#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "ncthermo/kernels.hpp"
#include "ncthermo/metrology.hpp"

namespace ncthermo::app {

class KernelCache {
public:
    using SetPtr = std::shared_ptr<const KernelSet>;
    using FamilyPtr = std::shared_ptr<const std::vector<KernelSet>>;

    explicit KernelCache(QuadratureConfig q = {}, unsigned workers = 1) : quad_(q), workers_(workers) {}

    // workers = 0 uses the cache default.
    SetPtr get(const KernelParams& p, double t_end, double dt, unsigned workers = 0);

    // Stencil family {T, T−2δ, T−δ, T+δ, T+2δ}.
    FamilyPtr family(const KernelParams& p, double t_end, double dt, const StencilConfig& s,
                     unsigned workers = 0);

    std::size_t computed() const;

private:
    using Key = std::tuple<double, double, double, double, double, double, double>;
    static Key key(const KernelParams& p, double t_end, double dt, double extra);

    QuadratureConfig quad_;
    unsigned workers_;
    mutable std::mutex mu_;
    std::map<Key, std::shared_future<SetPtr>> sets_;
    std::map<Key, std::shared_future<FamilyPtr>> families_;
    std::size_t computed_{0};
};

} // namespace ncthermo::app
