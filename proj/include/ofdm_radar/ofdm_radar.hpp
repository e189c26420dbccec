#pragma once

#include "ofdm_radar/analysis.hpp"
#include "ofdm_radar/errors.hpp"
#include "ofdm_radar/io.hpp"
#include "ofdm_radar/pulse_design.hpp"
#include "ofdm_radar/range_model.hpp"
#include "ofdm_radar/reconstruction.hpp"
#include "ofdm_radar/spectral.hpp"
#include "ofdm_radar/version.hpp"
