#pragma once

/// Everything: Mittag-Leffler evaluation, cosine basis, forward model,
/// observations, estimator, Monte Carlo harness, config and CSV I/O.

#include <fracsrc/config.hpp>
#include <fracsrc/csv.hpp>
#include <fracsrc/errors.hpp>
#include <fracsrc/estimator.hpp>
#include <fracsrc/experiment.hpp>
#include <fracsrc/forward_model.hpp>
#include <fracsrc/mittag_leffler.hpp>
#include <fracsrc/numeric.hpp>
#include <fracsrc/observation.hpp>
#include <fracsrc/rng.hpp>
#include <fracsrc/spectral_basis.hpp>
