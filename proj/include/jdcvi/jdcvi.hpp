#pragma once

#include "jdcvi/bench.hpp"
#include "jdcvi/clustering.hpp"
#include "jdcvi/core.hpp"
#include "jdcvi/cvi.hpp"
#include "jdcvi/density.hpp"
#include "jdcvi/errors.hpp"
#include "jdcvi/similarity.hpp"
