#pragma once

#include "chain_model.hpp"
#include "cycle.hpp"
#include "dot.hpp"
#include "errors.hpp"
#include "limit_cycle.hpp"
#include "matrix.hpp"
#include "reinforcement.hpp"
#include "rng.hpp"
#include "sojourn.hpp"
