#pragma once

// Loop-pairing analysis toolkit: interaction arrays for non-square process
// models, pairing recommendation, IMC-PID tuning and closed-loop scoring.

#include "loopair/arrays.hpp"
#include "loopair/errors.hpp"
#include "loopair/matrix.hpp"
#include "loopair/model.hpp"
#include "loopair/pairing.hpp"
#include "loopair/plant_io.hpp"
#include "loopair/report.hpp"
#include "loopair/simulate.hpp"
#include "loopair/tuning.hpp"
#include "loopair/verify.hpp"
