#pragma once

#include "crystalpr/group.hpp"
#include "crystalpr/rng.hpp"
#include "crystalpr/parallel.hpp"
#include "crystalpr/fourier.hpp"
#include "crystalpr/symmetry.hpp"
#include "crystalpr/diffsets.hpp"
#include "crystalpr/datagen.hpp"
#include "crystalpr/solvers.hpp"
#include "crystalpr/verify.hpp"
#include "crystalpr/io.hpp"
#include "crystalpr/plot.hpp"

namespace crystalpr {
inline constexpr const char* version = "0.1.0";
}
