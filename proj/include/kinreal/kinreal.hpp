#pragma once

#include "kinreal/network.hpp"
#include "kinreal/graph.hpp"
#include "kinreal/canonical.hpp"
#include "kinreal/milp/model.hpp"
#include "kinreal/milp/simplex.hpp"
#include "kinreal/milp/branch_and_bound.hpp"
#include "kinreal/milp/check.hpp"
#include "kinreal/milp/lp_format.hpp"
#include "kinreal/kernel.hpp"
#include "kinreal/encoder.hpp"
#include "kinreal/realize.hpp"
#include "kinreal/conjugacy.hpp"
#include "kinreal/verify.hpp"
#include "kinreal/io.hpp"
