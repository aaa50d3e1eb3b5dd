#pragma once

#include "sls/abstraction.hpp"
#include "sls/acpc.hpp"
#include "sls/automata.hpp"
#include "sls/commands.hpp"
#include "sls/error.hpp"
#include "sls/game.hpp"
#include "sls/gamec.hpp"
#include "sls/graph.hpp"
#include "sls/gridworld.hpp"
#include "sls/ltl.hpp"
#include "sls/matrix_game.hpp"
#include "sls/parallel.hpp"
#include "sls/pipelines.hpp"
#include "sls/product.hpp"
#include "sls/reachability.hpp"
#include "sls/simulate.hpp"
#include "sls/text.hpp"
