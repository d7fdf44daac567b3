#pragma once

// Umbrella header: signals and kernels on the integer lattice, space-time
// sampling, per-frequency system diagnostics, reconstruction, and frame /
// density certification.

#include "convds/common.hpp"
#include "convds/frames.hpp"
#include "convds/io.hpp"
#include "convds/linalg.hpp"
#include "convds/parallel.hpp"
#include "convds/reconstruct.hpp"
#include "convds/rng.hpp"
#include "convds/sampling.hpp"
#include "convds/signal.hpp"
#include "convds/spectral.hpp"
