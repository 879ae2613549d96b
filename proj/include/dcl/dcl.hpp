// Umbrella header.

#pragma once

#include "dcl/graph.hpp"
#include "dcl/hom_search.hpp"
#include "dcl/limits.hpp"
#include "dcl/canonical.hpp"
#include "dcl/slice.hpp"
#include "dcl/random.hpp"
#include "dcl/serialize.hpp"
#include "dcl/signature.hpp"
#include "dcl/enumerate.hpp"
#include "dcl/soundness.hpp"
#include "dcl/sketch.hpp"
#include "dcl/satisfaction.hpp"
#include "dcl/injectivity_logic.hpp"
#include "dcl/io.hpp"
