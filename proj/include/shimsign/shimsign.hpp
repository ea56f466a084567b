#pragma once

#include "shimsign/arith.hpp"
#include "shimsign/densities.hpp"
#include "shimsign/experiment.hpp"
#include "shimsign/qseries.hpp"
#include "shimsign/report_json.hpp"
#include "shimsign/shimura.hpp"
#include "shimsign/signstats.hpp"
