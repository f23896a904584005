#pragma once

#include "radcomp/criteria.hpp"
#include "radcomp/curvature.hpp"
#include "radcomp/errors.hpp"
#include "radcomp/geodesics.hpp"
#include "radcomp/io.hpp"
#include "radcomp/synthetic.hpp"
#include "radcomp/volume.hpp"
#include "radcomp/warping.hpp"
