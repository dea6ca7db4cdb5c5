#pragma once

#include "errors.hpp"
#include "lp_model.hpp"
#include "simplex.hpp"
#include "branch_bound.hpp"
#include "feasibility.hpp"
#include "mps.hpp"
#include "pwl.hpp"
#include "network.hpp"
#include "scenario.hpp"
#include "formulation.hpp"
#include "reporting.hpp"
