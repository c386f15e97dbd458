#pragma once

#include "lipkin/analysis/localization.hpp"
#include "lipkin/analysis/mean_field.hpp"
#include "lipkin/analysis/scaling.hpp"
#include "lipkin/analysis/spectrum.hpp"
