#pragma once

#include "diad/commands.hpp"
#include "diad/common.hpp"
#include "diad/config.hpp"
#include "diad/evolution.hpp"
#include "diad/io.hpp"
#include "diad/metric.hpp"
#include "diad/models.hpp"
#include "diad/optimize.hpp"
#include "diad/pulse.hpp"
#include "diad/spectral.hpp"
