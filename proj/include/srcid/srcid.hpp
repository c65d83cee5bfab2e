#ifndef SRCID_SRCID_HPP
#define SRCID_SRCID_HPP

#include "srcid/error_analysis.hpp"
#include "srcid/forward_synth.hpp"
#include "srcid/inversion.hpp"
#include "srcid/multipliers.hpp"
#include "srcid/spectral_grid.hpp"
#include "srcid/transport_kernel.hpp"

#endif // SRCID_SRCID_HPP
