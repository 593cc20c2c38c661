#pragma once

#include "hdgnet/basis.hpp"
#include "hdgnet/errors.hpp"
#include "hdgnet/hdg_operator.hpp"
#include "hdgnet/mesh.hpp"
#include "hdgnet/network.hpp"
#include "hdgnet/network_io.hpp"
#include "hdgnet/oracle.hpp"
#include "hdgnet/output.hpp"
#include "hdgnet/polynomial.hpp"
#include "hdgnet/projection.hpp"
#include "hdgnet/time_integration.hpp"
