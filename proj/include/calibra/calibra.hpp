#pragma once

// Umbrella header.

#include "calibra/calibration.hpp"
#include "calibra/forms.hpp"
#include "calibra/json_io.hpp"
#include "calibra/slag.hpp"
#include "calibra/squeeze.hpp"
#include "calibra/stabilizer.hpp"
#include "calibra/symplectic.hpp"
