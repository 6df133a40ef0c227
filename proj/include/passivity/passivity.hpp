#pragma once

#include "passivity/core.hpp"
#include "passivity/linalg.hpp"
#include "passivity/realization.hpp"
#include "passivity/qmi.hpp"
#include "passivity/cones.hpp"
#include "passivity/families.hpp"
#include "passivity/convexity.hpp"
#include "passivity/fixtures.hpp"
#include "passivity/io.hpp"
