#pragma once

#include "tfilter/core.hpp"
#include "tfilter/dbm.hpp"
#include "tfilter/errors.hpp"
#include "tfilter/io.hpp"
#include "tfilter/mask_buffer.hpp"
#include "tfilter/one_clock_det.hpp"
#include "tfilter/oracles.hpp"
#include "tfilter/timed_filter.hpp"
#include "tfilter/untimed_filter.hpp"
