#pragma once

#include "lipkin/eigen/charpoly.hpp"
#include "lipkin/eigen/complex_tridiag.hpp"
#include "lipkin/eigen/real_tridiag.hpp"
