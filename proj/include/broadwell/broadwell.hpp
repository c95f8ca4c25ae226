#pragma once

#include "broadwell/artifacts.hpp"
#include "broadwell/boundary.hpp"
#include "broadwell/collision.hpp"
#include "broadwell/config.hpp"
#include "broadwell/continuation.hpp"
#include "broadwell/diagnostics.hpp"
#include "broadwell/fixed_point.hpp"
#include "broadwell/grid.hpp"
#include "broadwell/mollifier.hpp"
#include "broadwell/oracle.hpp"
#include "broadwell/params.hpp"
#include "broadwell/run.hpp"
#include "broadwell/transport.hpp"
