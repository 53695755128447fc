#pragma once

#include "atvis/adapt.hpp"
#include "atvis/diffops.hpp"
#include "atvis/errors.hpp"
#include "atvis/fft.hpp"
#include "atvis/forward.hpp"
#include "atvis/image.hpp"
#include "atvis/io.hpp"
#include "atvis/masks.hpp"
#include "atvis/metrics.hpp"
#include "atvis/recon.hpp"
#include "atvis/shrinkage.hpp"
