#pragma once

#include "isopar/cayley_dickson.hpp"
#include "isopar/clifford.hpp"
#include "isopar/dense.hpp"
#include "isopar/errors.hpp"
#include "isopar/hopf.hpp"
#include "isopar/polyfam.hpp"
#include "isopar/report.hpp"
#include "isopar/riccati.hpp"
#include "isopar/sampling.hpp"
#include "isopar/sparse_polynomial.hpp"
#include "isopar/spherelevel.hpp"
#include "isopar/suites.hpp"
#include "isopar/symmat.hpp"
