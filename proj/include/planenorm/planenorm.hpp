#pragma once

#include "planenorm/numeric.hpp"
#include "planenorm/norm2d.hpp"
#include "planenorm/convexity.hpp"
#include "planenorm/operators.hpp"
#include "planenorm/ellipsoid.hpp"
#include "planenorm/construct.hpp"
#include "planenorm/certificate.hpp"
#include "planenorm/quotient.hpp"
#include "planenorm/io.hpp"
#include "planenorm/cli.hpp"
