#pragma once

#include "snm/adaptive.hpp"
#include "snm/design.hpp"
#include "snm/design_strategy.hpp"
#include "snm/edf.hpp"
#include "snm/errors.hpp"
#include "snm/family.hpp"
#include "snm/graph.hpp"
#include "snm/risk.hpp"
#include "snm/rng.hpp"
#include "snm/sampling.hpp"
#include "snm/zoo.hpp"
