// Umbrella header.

#pragma once

#include "qcst/calibration.hpp"
#include "qcst/common.hpp"
#include "qcst/discrete.hpp"
#include "qcst/fock.hpp"
#include "qcst/gaussian.hpp"
#include "qcst/husimi.hpp"
#include "qcst/io.hpp"
#include "qcst/samples.hpp"
#include "qcst/tomography.hpp"
#include "qcst/transform.hpp"
