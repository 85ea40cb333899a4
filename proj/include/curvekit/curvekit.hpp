#pragma once

#include "curvekit/bootstrap.hpp"
#include "curvekit/curve.hpp"
#include "curvekit/error.hpp"
#include "curvekit/estimator.hpp"
#include "curvekit/experiments.hpp"
#include "curvekit/io.hpp"
#include "curvekit/kr.hpp"
#include "curvekit/market_data.hpp"
#include "curvekit/metrics.hpp"
#include "curvekit/nelder_mead.hpp"
#include "curvekit/nn.hpp"
#include "curvekit/nss.hpp"
#include "curvekit/pricing.hpp"
#include "curvekit/report.hpp"
#include "curvekit/scenario.hpp"
#include "curvekit/serialize.hpp"
#include "curvekit/tenor_grid.hpp"
