#pragma once

#include "momentflow/error.hpp"
#include "momentflow/exponent.hpp"
#include "momentflow/belief.hpp"
#include "momentflow/model.hpp"
#include "momentflow/network.hpp"
#include "momentflow/moments.hpp"
#include "momentflow/planner.hpp"
#include "momentflow/evaluator.hpp"
#include "momentflow/oracle.hpp"
#include "momentflow/generators.hpp"
#include "momentflow/document.hpp"
