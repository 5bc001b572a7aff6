#include "kernel_cache.hpp"

namespace ncthermo::app {

KernelCache::Key KernelCache::key(const KernelParams& p, double t_end, double dt, double extra) {
    return {p.sd.eta, p.sd.omega_c, p.epsilon, p.T, t_end, dt, extra};
}

namespace {

// Returns the cached future for k, or installs one and computes it outside
// the lock. Failures propagate to every waiter.
template <class Ptr, class Map, class Make>
Ptr memo(std::mutex& mu, Map& m, const typename Map::key_type& k, std::size_t& computed, Make make) {
    std::promise<Ptr> promise;
    std::shared_future<Ptr> fut;
    bool owner = false;
    {
        std::lock_guard lock(mu);
        if (auto it = m.find(k); it != m.end()) {
            fut = it->second;
        } else {
            fut = promise.get_future().share();
            m.emplace(k, fut);
            ++computed;
            owner = true;
        }
    }
    if (owner) {
        try {
            promise.set_value(make());
        } catch (...) {
            promise.set_exception(std::current_exception());
        }
    }
    return fut.get();
}

} // namespace

KernelCache::SetPtr KernelCache::get(const KernelParams& p, double t_end, double dt, unsigned workers) {
    if (workers == 0) workers = workers_;
    return memo<SetPtr>(mu_, sets_, key(p, t_end, dt, 0.0), computed_, [&] {
        return std::make_shared<const KernelSet>(precompute(p, t_end, dt, quad_, workers));
    });
}

KernelCache::FamilyPtr KernelCache::family(const KernelParams& p, double t_end, double dt,
                                           const StencilConfig& s, unsigned workers) {
    if (workers == 0) workers = workers_;
    return memo<FamilyPtr>(mu_, families_, key(p, t_end, dt, s.delta_rel), computed_, [&] {
        ProbeConfig c;
        c.sd = p.sd;
        c.epsilon = p.epsilon;
        c.T = p.T;
        c.t_end = t_end;
        c.dt = dt;
        return std::make_shared<const std::vector<KernelSet>>(stencil_kernel_family(c, s, quad_, workers));
    });
}

std::size_t KernelCache::computed() const {
    std::lock_guard lock(mu_);
    return computed_;
}

} // namespace ncthermo::app
