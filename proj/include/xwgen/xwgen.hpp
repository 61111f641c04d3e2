#pragma once

#include "xwgen/artifact.hpp"
#include "xwgen/error.hpp"
#include "xwgen/grid.hpp"
#include "xwgen/harness.hpp"
#include "xwgen/lexicon.hpp"
#include "xwgen/oracle.hpp"
#include "xwgen/pipeline.hpp"
#include "xwgen/solver.hpp"
#include "xwgen/word_index.hpp"
