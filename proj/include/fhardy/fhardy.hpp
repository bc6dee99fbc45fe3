#pragma once

#include "fhardy/error.hpp"
#include "fhardy/specfun.hpp"
#include "fhardy/constants.hpp"
#include "fhardy/sets1d.hpp"
#include "fhardy/fracmeasures.hpp"
#include "fhardy/variational.hpp"
#include "fhardy/verify.hpp"
