#pragma once

#include "analysis.hpp"
#include "chebyshev.hpp"
#include "errors.hpp"
#include "groups.hpp"
#include "lerch.hpp"
#include "moebius.hpp"
#include "parallel.hpp"
#include "reps.hpp"
#include "transfer.hpp"
#include "zeta.hpp"
