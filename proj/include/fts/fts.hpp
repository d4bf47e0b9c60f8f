#pragma once

#include "fts/core.hpp"
#include "fts/csv.hpp"
#include "fts/errors.hpp"
#include "fts/monte_carlo.hpp"
#include "fts/normal.hpp"
#include "fts/simulate.hpp"
#include "fts/spectral.hpp"
#include "fts/stationarity.hpp"
