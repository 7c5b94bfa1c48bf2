#pragma once

#include "ftalloc/candidate.hpp"
#include "ftalloc/canonicalize.hpp"
#include "ftalloc/core_model.hpp"
#include "ftalloc/errors.hpp"
#include "ftalloc/exact_eval.hpp"
#include "ftalloc/halfspace.hpp"
#include "ftalloc/io.hpp"
#include "ftalloc/junta.hpp"
#include "ftalloc/large_ci.hpp"
#include "ftalloc/lp.hpp"
#include "ftalloc/oracle.hpp"
#include "ftalloc/random.hpp"
#include "ftalloc/rational.hpp"
#include "ftalloc/small_ci.hpp"
#include "ftalloc/solver.hpp"
