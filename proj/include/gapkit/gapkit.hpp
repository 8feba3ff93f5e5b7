#pragma once
// Everything at once.

#include "gapkit/jet.hpp"
#include "gapkit/quadrature.hpp"
#include "gapkit/geometry.hpp"
#include "gapkit/profile.hpp"
#include "gapkit/surface.hpp"
#include "gapkit/conditions.hpp"
#include "gapkit/radial_profile.hpp"
#include "gapkit/domain.hpp"
#include "gapkit/radial.hpp"
#include "gapkit/fem.hpp"
#include "gapkit/recovery.hpp"
#include "gapkit/verify.hpp"
#include "gapkit/ricci.hpp"
#include "gapkit/io.hpp"
#include "gapkit/run.hpp"
