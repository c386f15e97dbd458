#pragma once

#include "lipkin/acid_test.hpp"
#include "lipkin/analysis.hpp"
#include "lipkin/eigen.hpp"
#include "lipkin/errors.hpp"
#include "lipkin/exceptional.hpp"
#include "lipkin/logfit.hpp"
#include "lipkin/spin.hpp"
