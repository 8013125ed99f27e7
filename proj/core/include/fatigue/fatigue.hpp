#pragma once

// Convenience header pulling in the whole public API.

#include "fatigue/error.hpp"
#include "fatigue/features.hpp"
#include "fatigue/kstore.hpp"
#include "fatigue/pipeline.hpp"
#include "fatigue/qualify.hpp"
#include "fatigue/rules.hpp"
#include "fatigue/scenario.hpp"
#include "fatigue/signal.hpp"
