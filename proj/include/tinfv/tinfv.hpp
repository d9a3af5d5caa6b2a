#pragma once

#include "tinfv/units.hpp"
#include "tinfv/rng.hpp"
#include "tinfv/scenario.hpp"
#include "tinfv/scenario_io.hpp"
#include "tinfv/radio.hpp"
#include "tinfv/qos_delay.hpp"
#include "tinfv/nfv.hpp"
#include "tinfv/convex.hpp"
#include "tinfv/sca.hpp"
#include "tinfv/subcarrier.hpp"
#include "tinfv/delay_adjust.hpp"
#include "tinfv/solver.hpp"
#include "tinfv/oracle.hpp"
#include "tinfv/experiment.hpp"
