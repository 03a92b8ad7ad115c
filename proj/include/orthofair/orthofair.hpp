#pragma once

#include "orthofair/classify.hpp"
#include "orthofair/dataset.hpp"
#include "orthofair/error.hpp"
#include "orthofair/evaluate.hpp"
#include "orthofair/io.hpp"
#include "orthofair/matrix.hpp"
#include "orthofair/numkernel.hpp"
#include "orthofair/orthodisc.hpp"
#include "orthofair/pipeline.hpp"
#include "orthofair/rng.hpp"
#include "orthofair/scatter.hpp"
#include "orthofair/synthgen.hpp"
#include "orthofair/tune.hpp"
