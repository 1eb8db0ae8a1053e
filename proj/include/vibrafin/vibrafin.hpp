#pragma once

// Umbrella header for the model library (the server headers are separate
// because they pull in Boost.Beast).

#include "vibrafin/calibration.hpp"
#include "vibrafin/config.hpp"
#include "vibrafin/csv.hpp"
#include "vibrafin/erm_motor.hpp"
#include "vibrafin/errors.hpp"
#include "vibrafin/fin_optimizer.hpp"
#include "vibrafin/locomotion.hpp"
#include "vibrafin/model_bundle.hpp"
#include "vibrafin/optimize.hpp"
#include "vibrafin/parallel.hpp"
#include "vibrafin/structural_modal.hpp"
#include "vibrafin/thrust_model.hpp"
