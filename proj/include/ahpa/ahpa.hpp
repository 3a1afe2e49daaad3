#pragma once

#include "ahpa/allocation.hpp"
#include "ahpa/csv.hpp"
#include "ahpa/error.hpp"
#include "ahpa/fleet.hpp"
#include "ahpa/graph.hpp"
#include "ahpa/instance.hpp"
#include "ahpa/matrix.hpp"
#include "ahpa/oracle.hpp"
#include "ahpa/routing.hpp"
#include "ahpa/sim.hpp"
#include "ahpa/experiments.hpp"
