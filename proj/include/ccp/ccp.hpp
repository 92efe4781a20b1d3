#pragma once

// Umbrella header.

#include "ccp/bnb.hpp"
#include "ccp/cutopt.hpp"
#include "ccp/errors.hpp"
#include "ccp/generators.hpp"
#include "ccp/gmi.hpp"
#include "ccp/io.hpp"
#include "ccp/milp.hpp"
#include "ccp/net.hpp"
#include "ccp/rng.hpp"
#include "ccp/simplex.hpp"
#include "ccp/types.hpp"
