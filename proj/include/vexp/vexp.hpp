#pragma once

#include "vexp/closed_risk.hpp"
#include "vexp/csv.hpp"
#include "vexp/cutoffs.hpp"
#include "vexp/divergence.hpp"
#include "vexp/errors.hpp"
#include "vexp/estimators.hpp"
#include "vexp/figures.hpp"
#include "vexp/integrate.hpp"
#include "vexp/mixture.hpp"
#include "vexp/model.hpp"
#include "vexp/monte_carlo.hpp"
#include "vexp/parallel.hpp"
#include "vexp/reports.hpp"
#include "vexp/rng.hpp"
#include "vexp/root_find.hpp"
#include "vexp/special.hpp"
#include "vexp/verify.hpp"
#include "vexp/version.hpp"
