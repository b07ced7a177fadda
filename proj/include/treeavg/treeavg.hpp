#pragma once

#include "treeavg/bracket_io.hpp"
#include "treeavg/ensemble.hpp"
#include "treeavg/metrics.hpp"
#include "treeavg/pipeline.hpp"
#include "treeavg/tree.hpp"
