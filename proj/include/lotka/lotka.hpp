#pragma once

#include "lotka/errors.hpp"
#include "lotka/freqdata.hpp"
#include "lotka/loglogfit.hpp"
#include "lotka/lotkamodel.hpp"
#include "lotka/modernfit.hpp"
#include "lotka/plot.hpp"
#include "lotka/report.hpp"
