#pragma once

#include "ghzloc/linalg.hpp"
#include "ghzloc/numerics.hpp"
#include "ghzloc/ghz_states.hpp"
#include "ghzloc/steering.hpp"
#include "ghzloc/tripartite.hpp"
#include "ghzloc/verify.hpp"
