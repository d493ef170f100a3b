#pragma once

#include "oscint/cli.hpp"
#include "oscint/errors.hpp"
#include "oscint/model.hpp"
#include "oscint/numeric.hpp"
#include "oscint/oracle.hpp"
#include "oscint/pathdecomp.hpp"
#include "oscint/propagator.hpp"
#include "oscint/report.hpp"
#include "oscint/tridiag.hpp"
#include "oscint/verify.hpp"
