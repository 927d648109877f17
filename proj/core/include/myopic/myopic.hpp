#pragma once

#include "myopic/compare.hpp"
#include "myopic/curve_io.hpp"
#include "myopic/dataset_io.hpp"
#include "myopic/entropy.hpp"
#include "myopic/errors.hpp"
#include "myopic/fit.hpp"
#include "myopic/losslog.hpp"
#include "myopic/msp.hpp"
#include "myopic/msp_export.hpp"
#include "myopic/nonergodic.hpp"
#include "myopic/numeric.hpp"
#include "myopic/philox.hpp"
#include "myopic/process.hpp"
#include "myopic/process_io.hpp"
#include "myopic/sampler.hpp"
#include "myopic/version.hpp"
#include "myopic/zoo.hpp"
