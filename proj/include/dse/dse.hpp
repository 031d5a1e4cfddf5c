#pragma once

// Umbrella header: direct spectral evaluation of truncated Fourier and
// spherical-harmonic transforms on arbitrary point sets, with a toy spectral
// operator network, benchmark harness, and file formats.

#include "dse/bench.hpp"
#include "dse/common.hpp"
#include "dse/core.hpp"
#include "dse/distributions.hpp"
#include "dse/fftref.hpp"
#include "dse/io.hpp"
#include "dse/matrix.hpp"
#include "dse/nudft.hpp"
#include "dse/operator.hpp"
#include "dse/spherical.hpp"
#include "dse/validate.hpp"
