#pragma once

#include "mpsatz/rational.hpp"
#include "mpsatz/errors.hpp"
#include "mpsatz/polynomial.hpp"
#include "mpsatz/matrix_poly.hpp"
#include "mpsatz/poly_json.hpp"
#include "mpsatz/numla.hpp"
#include "mpsatz/sdp.hpp"
#include "mpsatz/module.hpp"
#include "mpsatz/gram.hpp"
#include "mpsatz/states.hpp"
#include "mpsatz/setops.hpp"
#include "mpsatz/certify.hpp"
#include "mpsatz/univar.hpp"
#include "mpsatz/diag.hpp"
#include "mpsatz/io.hpp"
