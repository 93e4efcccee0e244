#pragma once

#include "qwell/errors.hpp"
#include "qwell/model.hpp"
#include "qwell/oracle.hpp"
#include "qwell/specfun.hpp"
#include "qwell/spectrum.hpp"
#include "qwell/wavefun.hpp"
