#pragma once

#include <cstddef>
#include <span>

#include "recourse/predictors/autoencoder.hpp"

namespace recourse {

inline constexpr std::size_t kDefaultPrototypeK = 5;

// Encodes every class-`target_class` row. Throws SpecError when the class is
// empty or k == 0.
PrototypeSet compute_prototypes(const AutoencoderModel& ae, const Dataset& data, int target_class,
                                std::size_t k = kDefaultPrototypeK);

// Mean of the k class encodings nearest (Euclidean) to `latent`; k is capped
// at the class size.
Vector prototype_near(const PrototypeSet& protos, std::span<const double> latent);
Vector prototype_near(const PrototypeSet& protos, std::span<const double> latent, std::size_t k);

// prototype_near(encode(x)); throws SpecError when `target_class` differs from the set's.
Vector prototype_for(const PrototypeSet& protos, const AutoencoderModel& ae, std::span<const double> x,
                     int target_class);

}  // namespace recourse
