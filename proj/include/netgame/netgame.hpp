#pragma once

#include "netgame/efficiency.hpp"
#include "netgame/equilibrium.hpp"
#include "netgame/errors.hpp"
#include "netgame/experiment.hpp"
#include "netgame/game.hpp"
#include "netgame/io.hpp"
#include "netgame/netgen.hpp"
#include "netgame/planner.hpp"
#include "netgame/sphere_max.hpp"
