#ifndef LEVYLMM_TEST_FIXTURES_HPP
#define LEVYLMM_TEST_FIXTURES_HPP

#include <levylmm/levylmm.hpp>

namespace fixtures {

inline levylmm::LevyModel merton() { return levylmm::ModelSpec::calibrated("merton").build(); }
inline levylmm::LevyModel cgmy() { return levylmm::ModelSpec::calibrated("cgmy").build(); }

inline levylmm::MarketSetup flat_market(int N, double lambda, double delta = 0.5, double rate = 0.04) {
    const auto tenor = levylmm::TenorStructure::uniform(N, delta);
    return levylmm::MarketSetup(tenor, levylmm::DiscountCurve::flat(tenor, rate), levylmm::VolLoading::flat(N, lambda));
}

inline levylmm::SimConfig sim(levylmm::Scheme scheme, std::size_t paths, std::uint64_t seed = 7, int order = 2) {
    levylmm::SimConfig c;
    c.scheme = scheme;
    c.paths = paths;
    c.seed = seed;
    c.order = order;
    return c;
}

} // namespace fixtures

#endif
