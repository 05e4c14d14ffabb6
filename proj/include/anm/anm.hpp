#pragma once

#include "anm/dataset.hpp"
#include "anm/density.hpp"
#include "anm/error.hpp"
#include "anm/graph.hpp"
#include "anm/harness.hpp"
#include "anm/parallel.hpp"
#include "anm/score.hpp"
#include "anm/search.hpp"
#include "anm/serialize.hpp"
#include "anm/simgen.hpp"
#include "anm/smooth.hpp"
