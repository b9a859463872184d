#pragma once

#include "thermoreg/csv.hpp"

#include <cstdint>

namespace thermo {

// Synthetic table in the raw layout the default schema expects: 27 thermal
// sites over four rounds, environment, demographics, and both oral
// targets. Site readings track a latent core temperature with site-specific
// noise, so the maximum-temperature site correlates most with the target.
// A few cells are left empty to exercise the cleaning rules.
struct SyntheticOptions {
    std::size_t rows = 1020;
    std::uint64_t seed = 7;
    int rounds = 4;
    double missing_rate = 0.004;
};

RawTable make_synthetic_flir(const SyntheticOptions& opt = {});

} // namespace thermo
